// Copyright 2026 The LexForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lexforge/trainer.h"

#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "lexforge/errors.h"
#include "lexforge/pipeline.h"
#include "lexforge/student.h"
#include "lexforge/teacher.h"

namespace lexforge {

namespace {

std::string Format(const char *fmt, ...) __attribute__((format(printf, 1, 2)));

std::string Format(const char *fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

double ParseDouble(const std::string &value, const std::string &key,
                   const std::string &source, int line) {
  try {
    size_t used = 0;
    double v = std::stod(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception &) {
  }
  throw ParseError(source, line, "expected a number for " + key);
}

int64_t ParseInt(const std::string &value, const std::string &key,
                 const std::string &source, int line) {
  try {
    size_t used = 0;
    long long v = std::stoll(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception &) {
  }
  throw ParseError(source, line, "expected an integer for " + key);
}

std::string ContextAt(const std::vector<Token> &tokens, size_t i, int offset) {
  const long j = static_cast<long>(i) + offset;
  if (j < 0 || j >= static_cast<long>(tokens.size())) return "";
  return tokens[j].surface;
}

// Independent perturbation streams per split, one seed per sentence.
std::vector<AlignedSentence> PerturbSplit(
    const std::vector<AlignedSentence> &split, double p, uint64_t seed) {
  if (p == 0.0) return split;
  std::mt19937_64 gen(seed);
  std::vector<AlignedSentence> out;
  out.reserve(split.size());
  for (const AlignedSentence &s : split) {
    out.push_back(PerturbAligned(s, PerturbConfig{p, gen()}));
  }
  return out;
}

std::vector<StudentExample> GoldExamples(
    const std::vector<AlignedSentence> &train, const CandidateVocab &vocab,
    size_t dims) {
  std::vector<StudentExample> examples;
  for (const AlignedSentence &s : train) {
    for (size_t i = 0; i < s.source_tokens.size(); ++i) {
      StudentExample ex;
      ex.features = FeaturizeAt(s.source_tokens, i, dims);
      ex.gold_index = vocab.IndexOf(s.gold_labels[i]);
      if (ex.gold_index < 0) {
        throw Error("gold label " + DebugString(s.gold_labels[i]) +
                    " missing from the candidate vocabulary");
      }
      ex.nsw_target = s.gold_labels[i].is_keep() ? 0.0 : 1.0;
      examples.push_back(std::move(ex));
    }
  }
  return examples;
}

LossBreakdown TrainStudent(StudentParams *params,
                           const std::vector<StudentExample> &examples,
                           const TrainConfig &config) {
  LossBreakdown last;
  AdamOptimizer adam(AdamConfig{.learning_rate = config.learning_rate});
  for (int epoch = 0; epoch < config.epochs_per_phase; ++epoch) {
    if (config.optimizer == StudentOptimizer::kAdam) {
      last = adam.Step(params, examples, config.alpha, config.beta);
    } else {
      last = TrainStep(params, examples, config.alpha, config.beta,
                       config.learning_rate);
    }
  }
  return last;
}

template <typename Fn>
auto RunPhase(const std::string &phase, Fn &&fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::exception &e) {
    throw Error("training phase '" + phase + "' failed: " + e.what());
  }
}

}  // namespace

void ValidateTrainConfig(const TrainConfig &config) {
  auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!finite_nonneg(config.alpha) || !finite_nonneg(config.beta)) {
    throw ValidationError("alpha and beta must be finite and >= 0");
  }
  if (config.alpha == 0.0 && config.beta == 0.0) {
    throw ValidationError("alpha and beta cannot both be 0");
  }
  if (!(config.p >= 0.0 && config.p <= 1.0)) {
    throw ValidationError("p must lie in [0, 1]");
  }
  if (config.iterations < 0) throw ValidationError("iterations must be >= 0");
  if (!(config.tau >= 0.0 && config.tau <= 1.0)) {
    throw ValidationError("tau must lie in [0, 1]");
  }
  if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate) ||
      !(config.teacher_learning_rate > 0.0) ||
      !std::isfinite(config.teacher_learning_rate)) {
    throw ValidationError("learning rates must be finite and > 0");
  }
  if (config.epochs_per_phase < 1 || config.teacher_epochs < 1) {
    throw ValidationError("epoch counts must be >= 1");
  }
  if (config.feature_dims < kMinFeatureDims) {
    throw ValidationError("feature_dims must be >= " +
                          std::to_string(kMinFeatureDims));
  }
  if (config.hidden_dims < 1) throw ValidationError("hidden_dims must be >= 1");
  if (!finite_nonneg(config.init_scale) ||
      !finite_nonneg(config.teacher_init_scale)) {
    throw ValidationError("init scales must be finite and >= 0");
  }
}

TrainConfig ParseTrainConfig(std::string_view contents,
                             const std::string &source_name,
                             const std::filesystem::path &base_dir) {
  TrainConfig config;
  auto resolve = [&](const std::string &value) {
    std::filesystem::path path(value);
    return path.is_relative() ? base_dir / path : path;
  };
  std::istringstream in{std::string(contents)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const size_t hash = raw.find('#');
    const std::string line = Trim(raw.substr(0, hash));
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(source_name, line_no, "expected key = value");
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    if (value.empty()) {
      throw ParseError(source_name, line_no, "missing value for " + key);
    }
    auto num = [&] { return ParseDouble(value, key, source_name, line_no); };
    auto integer = [&] { return ParseInt(value, key, source_name, line_no); };
    if (key == "alpha") {
      config.alpha = num();
    } else if (key == "beta") {
      config.beta = num();
    } else if (key == "p") {
      config.p = num();
    } else if (key == "seed") {
      config.seed = static_cast<uint64_t>(integer());
    } else if (key == "iterations") {
      config.iterations = static_cast<int>(integer());
    } else if (key == "tau") {
      config.tau = num();
    } else if (key == "optimizer") {
      if (value == "adam") {
        config.optimizer = StudentOptimizer::kAdam;
      } else if (value == "gd") {
        config.optimizer = StudentOptimizer::kGradientDescent;
      } else {
        throw ParseError(source_name, line_no, "optimizer must be adam or gd");
      }
    } else if (key == "learning_rate") {
      config.learning_rate = num();
    } else if (key == "epochs_per_phase") {
      config.epochs_per_phase = static_cast<int>(integer());
    } else if (key == "teacher_learning_rate") {
      config.teacher_learning_rate = num();
    } else if (key == "teacher_epochs") {
      config.teacher_epochs = static_cast<int>(integer());
    } else if (key == "feature_dims") {
      config.feature_dims = static_cast<size_t>(integer());
    } else if (key == "hidden_dims") {
      config.hidden_dims = static_cast<size_t>(integer());
    } else if (key == "init_scale") {
      config.init_scale = num();
    } else if (key == "teacher_init_scale") {
      config.teacher_init_scale = num();
    } else if (key == "corpus_dir") {
      SetCorpusDir(&config, resolve(value));
    } else if (key == "train") {
      config.train_path = resolve(value);
    } else if (key == "dev") {
      config.dev_path = resolve(value);
    } else if (key == "test") {
      config.test_path = resolve(value);
    } else if (key == "unlabeled") {
      config.unlabeled_path = resolve(value);
    } else if (key == "dictionary") {
      config.dictionary_path = resolve(value);
    } else if (key == "rules") {
      config.rules_path = resolve(value);
    } else if (key == "output_dir") {
      config.output_dir = resolve(value);
    } else {
      throw ParseError(source_name, line_no, "unknown key " + key);
    }
  }
  return config;
}

TrainConfig LoadTrainConfig(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseTrainConfig(buffer.str(), path.string(), path.parent_path());
}

void SetCorpusDir(TrainConfig *config, const std::filesystem::path &dir) {
  config->train_path = dir / "train.csv";
  config->dev_path = dir / "dev.csv";
  config->test_path = dir / "test.csv";
  config->unlabeled_path = dir / "unlabeled.csv";
}

nlohmann::ordered_json ToJson(const TrainReport &report) {
  nlohmann::ordered_json j;
  j["best_iteration"] = report.best_iteration;
  j["vocab_size"] = report.vocab_size;
  j["rules"] = report.rule_names;
  j["skipped_rows"] = {{"train", report.skipped_train},
                       {"dev", report.skipped_dev},
                       {"test", report.skipped_test}};
  j["iterations"] = nlohmann::ordered_json::array();
  for (const IterationRecord &rec : report.iterations) {
    nlohmann::ordered_json it;
    it["iteration"] = rec.iteration;
    it["dev"] = ToJson(rec.dev);
    it["pseudo_labels"] = rec.pseudo_labels;
    it["mean_confidence"] = rec.mean_confidence;
    it["teacher_loss"] = rec.teacher_loss;
    it["student_loss"] = {{"l_norm", rec.student_loss.l_norm},
                          {"l_nsw", rec.student_loss.l_nsw},
                          {"l_total", rec.student_loss.l_total}};
    j["iterations"].push_back(std::move(it));
  }
  j["test"] = ToJson(report.test);
  return j;
}

TrainInputs LoadTrainInputs(const TrainConfig &config) {
  TrainInputs inputs;
  if (config.dictionary_path.empty()) {
    throw ValidationError("config does not name a dictionary");
  }
  for (const auto *path : {&config.train_path, &config.dev_path,
                           &config.test_path, &config.unlabeled_path}) {
    if (path->empty()) throw ValidationError("config is missing corpus paths");
  }
  inputs.dictionary = std::make_shared<const Dictionary>(
      LoadDictionary(config.dictionary_path));
  inputs.rules = config.rules_path.empty()
                     ? DefaultRuleSet(inputs.dictionary)
                     : LoadRuleSet(config.rules_path, inputs.dictionary);
  inputs.corpus.train = LoadLabeledCsv(config.train_path);
  inputs.corpus.dev = LoadLabeledCsv(config.dev_path);
  inputs.corpus.test = LoadLabeledCsv(config.test_path);
  inputs.corpus.unlabeled = LoadUnlabeledCsv(config.unlabeled_path);
  return inputs;
}

MetricsReport EvaluateModel(const ModelBundle &model,
                            const std::vector<AlignedSentence> &sentences,
                            double nsw_threshold) {
  std::vector<std::vector<Label>> predicted;
  predicted.reserve(sentences.size());
  for (const AlignedSentence &s : sentences) {
    predicted.push_back(PredictLabels(model, s.source_tokens, nsw_threshold));
  }
  return Evaluate(sentences, predicted);
}

TrainResult RunSelfTraining(const TrainConfig &config,
                            const TrainInputs &inputs) {
  ValidateTrainConfig(config);
  const Corpus &corpus = inputs.corpus;
  if (corpus.train.sentences.empty()) {
    throw ValidationError("training split is empty");
  }
  TrainResult result;
  auto log = [&](std::string line) {
    spdlog::info("{}", line);
    result.log.push_back(std::move(line));
  };

  const std::vector<AlignedSentence> train =
      PerturbSplit(corpus.train.sentences, config.p, config.seed ^ 0x7472ULL);
  const std::vector<AlignedSentence> dev =
      PerturbSplit(corpus.dev.sentences, config.p, config.seed ^ 0x646576ULL);

  const size_t dims = config.feature_dims;
  const Dictionary empty_dict;
  const CandidateVocab vocab = CandidateVocab::Build(
      train, inputs.dictionary ? *inputs.dictionary : empty_dict);

  TrainReport &report = result.report;
  report.skipped_train = corpus.train.skipped;
  report.skipped_dev = corpus.dev.skipped;
  report.skipped_test = corpus.test.skipped;
  report.vocab_size = vocab.size();
  report.rule_names = inputs.rules.Names();
  log(Format("train=%zu dev=%zu test=%zu unlabeled=%zu vocab=%zu rules=%zu "
             "p=%.3f alpha=%.3f beta=%.3f T=%d",
             train.size(), dev.size(), corpus.test.sentences.size(),
             corpus.unlabeled.size(), vocab.size(), inputs.rules.size(),
             config.p, config.alpha, config.beta, config.iterations));

  ModelBundle current;
  current.vocab = vocab;
  current.detection_head = config.beta > 0.0;
  current.rule_names = report.rule_names;
  current.student = StudentParams::Random(dims, config.hidden_dims,
                                          vocab.size(), config.seed,
                                          config.init_scale);

  const std::vector<StudentExample> gold =
      RunPhase("featurize", [&] { return GoldExamples(train, vocab, dims); });

  // Rule verdicts on labeled and unlabeled tokens do not change across
  // iterations.
  std::vector<TeacherExample> teacher_batch;
  for (const AlignedSentence &s : train) {
    for (size_t i = 0; i < s.source_tokens.size(); ++i) {
      TeacherExample ex;
      ex.features = gold[teacher_batch.size()].features;
      ex.rule_targets = VerdictTargets(
          inputs.rules.Apply(s.source_tokens[i].surface,
                             ContextAt(s.source_tokens, i, -1),
                             ContextAt(s.source_tokens, i, +1)),
          s.source_tokens[i].surface, vocab);
      ex.gold_index = gold[teacher_batch.size()].gold_index;
      teacher_batch.push_back(std::move(ex));
    }
  }
  RanParams ran =
      RanParams::Random(inputs.rules.size(), dims, config.hidden_dims,
                        config.seed + 1, config.teacher_init_scale);

  double best_f1 = -1.0;
  for (int iter = 0; iter <= config.iterations; ++iter) {
    IterationRecord rec;
    rec.iteration = iter;
    std::vector<StudentExample> batch = gold;
    if (iter > 0) {
      rec.teacher_loss = RunPhase("teacher", [&] {
        for (TeacherExample &ex : teacher_batch) {
          ex.student_dist = Forward(current.student, ex.features).norm_dist;
        }
        double loss = 0.0;
        for (int epoch = 0; epoch < config.teacher_epochs; ++epoch) {
          loss = TrainTeacherStep(&ran, teacher_batch,
                                  config.teacher_learning_rate);
        }
        return loss;
      });
      std::vector<PseudoLabel> pseudo = RunPhase("pseudo-label", [&] {
        return PseudoLabelCorpus(ran, corpus.unlabeled, inputs.rules,
                                 current.student, vocab, config.tau);
      });
      double confidence_sum = 0.0;
      for (const PseudoLabel &pl : pseudo) {
        StudentExample ex;
        ex.features = FeaturizeAt(corpus.unlabeled[pl.sentence], pl.token, dims);
        ex.soft_target = pl.label.probs;
        ex.nsw_target = 1.0 - pl.label.probs(CandidateVocab::kKeep);
        ex.weight = pl.weight;
        confidence_sum += pl.weight;
        batch.push_back(std::move(ex));
      }
      rec.pseudo_labels = pseudo.size();
      rec.mean_confidence = pseudo.empty() ? 0.0 : confidence_sum / pseudo.size();
    }
    rec.student_loss = RunPhase("student", [&] {
      return TrainStudent(&current.student, batch, config);
    });
    if (iter > 0) current.teacher = ran;
    rec.dev = RunPhase("evaluate", [&] {
      return EvaluateModel(current, dev, kDefaultNswThreshold);
    });
    log(Format("iteration %d: pseudo_labels=%zu mean_confidence=%.4f "
               "teacher_loss=%.6f student_loss=%.6f dev_f1=%.4f "
               "dev_integrity=%.4f dev_accuracy=%.4f",
               iter, rec.pseudo_labels, rec.mean_confidence, rec.teacher_loss,
               rec.student_loss.l_total, rec.dev.f1, rec.dev.integrity,
               rec.dev.accuracy));
    if (rec.dev.f1 > best_f1) {
      best_f1 = rec.dev.f1;
      report.best_iteration = iter;
      result.best = current;
    }
    report.iterations.push_back(std::move(rec));
  }
  report.test = EvaluateModel(result.best, corpus.test.sentences,
                              kDefaultNswThreshold);
  log(Format("best iteration %d: test_f1=%.4f test_integrity=%.4f "
             "test_accuracy=%.4f",
             report.best_iteration, report.test.f1, report.test.integrity,
             report.test.accuracy));
  return result;
}

TrainResult RunSelfTraining(const TrainConfig &config) {
  ValidateTrainConfig(config);
  const TrainInputs inputs =
      RunPhase("load", [&] { return LoadTrainInputs(config); });
  return RunSelfTraining(config, inputs);
}

void WriteTrainOutputs(const TrainResult &result,
                       const std::filesystem::path &dir) {
  namespace fs = std::filesystem;
  const fs::path staging = dir / ".staging";
  std::error_code ec;
  try {
    fs::remove_all(staging, ec);
    fs::create_directories(staging / "checkpoints");
    SaveModel(result.best, staging / "checkpoints" / "best.ckpt");
    {
      std::ofstream out(staging / "report.json");
      out << ToJson(result.report).dump(2) << "\n";
      if (!out) throw IoError("cannot write report.json");
    }
    {
      std::ofstream out(staging / "log.txt");
      for (const std::string &line : result.log) out << line << "\n";
      if (!out) throw IoError("cannot write log.txt");
    }
    fs::create_directories(dir / "checkpoints");
    fs::rename(staging / "checkpoints" / "best.ckpt",
               dir / "checkpoints" / "best.ckpt");
    fs::rename(staging / "report.json", dir / "report.json");
    fs::rename(staging / "log.txt", dir / "log.txt");
    fs::remove_all(staging, ec);
  } catch (const fs::filesystem_error &e) {
    fs::remove_all(staging, ec);
    throw IoError(std::string("cannot write training outputs: ") + e.what());
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
}

}  // namespace lexforge
