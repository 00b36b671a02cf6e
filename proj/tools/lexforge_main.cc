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

// Command-line front end: corpus synthesis, training, evaluation, the
// interactive demo, one-shot lookup/normalize, and the HTTP service.

#include <spdlog/spdlog.h>

#include <csignal>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "lexforge/checkpoint.h"
#include "lexforge/corpus.h"
#include "lexforge/dictionary.h"
#include "lexforge/errors.h"
#include "lexforge/llm_bridge.h"
#include "lexforge/pipeline.h"
#include "lexforge/service.h"
#include "lexforge/trainer.h"

namespace fs = std::filesystem;

namespace {

const fs::path kDataDir = LEXFORGE_DATA_DIR;

struct Options {
  std::string config = (kDataDir.parent_path() / "configs" / "default.conf");
  std::string checkpoint = "runs/default/checkpoints/best.ckpt";
  std::string dict = kDataDir / "dict" / "seed_dictionary.jsonl";
  std::string mock_llm;
  std::string host = "127.0.0.1";
  int port = 8080;
  double nsw_threshold = lexforge::kDefaultNswThreshold;
  bool verbose = false;

  // synth
  std::string out_dir;
  size_t size = 500;
  size_t unlabeled_size = 0;
  uint64_t seed = 42;

  // train overrides
  std::string corpus_dir;
  int iterations = -1;
  double p = -1.0;
  double beta = -1.0;

  // eval
  std::string data;

  std::string word;
  std::string sentence;
};

std::shared_ptr<const lexforge::LlmClient> MakeLlmClient(const Options &opt) {
  lexforge::LlmConfig config;
  if (!opt.mock_llm.empty()) {
    return std::make_shared<lexforge::LlmClient>(
        lexforge::MockLlmTransport::FromFile(opt.mock_llm), config);
  }
  if (lexforge::LlmConfigFromEnv(&config)) {
    return std::make_shared<lexforge::LlmClient>(
        std::make_shared<lexforge::HttpLlmTransport>(config), config);
  }
  spdlog::warn(
      "no LLM configured (set LEXFORGE_LLM_API_KEY or pass --mock-llm); "
      "dictionary misses will not fall back");
  return nullptr;
}

std::shared_ptr<lexforge::Lookup> MakeLookup(const Options &opt) {
  return std::make_shared<lexforge::Lookup>(
      std::make_shared<lexforge::DictionaryStore>(opt.dict),
      MakeLlmClient(opt));
}

int RunSynth(const Options &opt) {
  if (opt.out_dir.empty()) throw lexforge::ValidationError("--out is required");
  lexforge::SynthConfig config;
  config.size = opt.size;
  config.unlabeled_size = opt.unlabeled_size;
  config.seed = opt.seed;
  const lexforge::SyntheticCorpus corpus =
      lexforge::SynthesizeCorpus(lexforge::LoadDictionary(opt.dict), config);
  lexforge::WriteCorpus(corpus, opt.out_dir);
  std::cout << "wrote " << corpus.train.size() << " train, "
            << corpus.dev.size() << " dev, " << corpus.test.size()
            << " test and " << corpus.unlabeled.size()
            << " unlabeled rows to " << opt.out_dir << "\n";
  return 0;
}

int RunTrain(const Options &opt) {
  lexforge::TrainConfig config = lexforge::LoadTrainConfig(opt.config);
  if (!opt.corpus_dir.empty()) lexforge::SetCorpusDir(&config, opt.corpus_dir);
  if (!opt.out_dir.empty()) config.output_dir = opt.out_dir;
  if (opt.iterations >= 0) config.iterations = opt.iterations;
  if (opt.p >= 0.0) config.p = opt.p;
  if (opt.beta >= 0.0) config.beta = opt.beta;
  if (config.output_dir.empty()) {
    throw lexforge::ValidationError("no output_dir in config and no --out");
  }
  const lexforge::TrainResult result = lexforge::RunSelfTraining(config);
  lexforge::WriteTrainOutputs(result, config.output_dir);
  std::cout << "best iteration " << result.report.best_iteration
            << ", checkpoint at "
            << (config.output_dir / "checkpoints" / "best.ckpt").string()
            << "\n";
  return 0;
}

int RunEval(const Options &opt) {
  if (opt.data.empty()) throw lexforge::ValidationError("--data is required");
  const lexforge::ModelBundle model = lexforge::LoadModel(opt.checkpoint);
  const lexforge::LabeledSplit split = lexforge::LoadLabeledCsv(opt.data);
  const lexforge::MetricsReport report =
      lexforge::EvaluateModel(model, split.sentences, opt.nsw_threshold);
  std::cout << lexforge::ToJson(report).dump(2) << "\n";
  return 0;
}

int RunNormalize(const Options &opt) {
  const lexforge::ModelBundle model = lexforge::LoadModel(opt.checkpoint);
  std::cout << lexforge::ToJson(lexforge::NormalizeSentence(
                                    &model, opt.sentence, opt.nsw_threshold))
                   .dump(2)
            << "\n";
  return 0;
}

int RunDemo(const Options &opt) {
  const lexforge::ModelBundle model = lexforge::LoadModel(opt.checkpoint);
  std::cerr << "Type a sentence per line (Ctrl-D to quit).\n";
  std::string line;
  while (std::cerr << "> ", std::getline(std::cin, line)) {
    const lexforge::NormalizationResult result =
        lexforge::NormalizeSentence(&model, line, opt.nsw_threshold);
    std::cout << result.normalized << "\n";
    for (const lexforge::TokenRecord &rec : result.tokens) {
      std::cout << "  " << rec.source << " -> " << rec.prediction
                << (rec.is_nsw ? "  [nsw]" : "") << "  ("
                << std::to_string(rec.confidence) << ")\n";
    }
  }
  return 0;
}

int RunLookup(const Options &opt) {
  auto lookup = MakeLookup(opt);
  const std::optional<lexforge::LookupResult> result =
      lookup->LookupOrFallback(opt.word);
  if (!result) {
    std::cerr << "'" << opt.word << "' is not in the dictionary\n";
    return 1;
  }
  nlohmann::ordered_json j;
  j["word"] = result->entry.nsw;
  j["was_fallback"] = result->was_fallback;
  j["entry"] = nlohmann::ordered_json::parse(
      lexforge::EntryToJsonLine(result->entry));
  std::cout << j.dump(2) << "\n";
  return 0;
}

lexforge::HttpServer *g_server = nullptr;

void HandleSignal(int) {
  if (g_server != nullptr) g_server->Stop();
}

int RunServe(const Options &opt) {
  std::shared_ptr<const lexforge::ModelBundle> model;
  model = std::make_shared<const lexforge::ModelBundle>(
      lexforge::LoadModel(opt.checkpoint));
  auto service = std::make_shared<lexforge::NormalizerService>(
      model, MakeLookup(opt), opt.nsw_threshold);
  lexforge::HttpServer server(service);
  const int port = server.Bind(opt.host, opt.port);
  g_server = &server;
  std::signal(SIGINT, HandleSignal);
  std::signal(SIGTERM, HandleSignal);
  spdlog::info("serving on http://{}:{}", opt.host, port);
  server.Serve();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"LexForge: lexical normalization for noisy Vietnamese text"};
  app.require_subcommand(1);
  Options opt;
  app.add_flag("-v,--verbose", opt.verbose, "Debug logging");

  auto add_dict = [&](CLI::App *cmd) {
    cmd->add_option("--dict", opt.dict, "Dictionary file (JSONL)");
  };
  auto add_model = [&](CLI::App *cmd) {
    cmd->add_option("--checkpoint", opt.checkpoint, "Model checkpoint");
    cmd->add_option("--nsw-threshold", opt.nsw_threshold,
                    "Detection threshold in [0, 1]")
        ->check(CLI::Range(0.0, 1.0));
  };
  auto add_llm = [&](CLI::App *cmd) {
    cmd->add_option("--mock-llm", opt.mock_llm,
                    "Answer dictionary misses from this JSONL table instead "
                    "of a live LLM")
        ->check(CLI::ExistingFile);
  };

  CLI::App *synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  add_dict(synth);
  synth->add_option("--out", opt.out_dir, "Output directory")->required();
  synth->add_option("--size", opt.size, "Labeled rows")
      ->check(CLI::PositiveNumber);
  synth->add_option("--unlabeled", opt.unlabeled_size,
                    "Unlabeled rows (default 4 x size)");
  synth->add_option("--seed", opt.seed, "Random seed");

  CLI::App *train = app.add_subcommand("train", "Run self-training");
  train->add_option("--config", opt.config, "Training config file")
      ->check(CLI::ExistingFile);
  train->add_option("--corpus", opt.corpus_dir,
                    "Directory holding train/dev/test/unlabeled.csv");
  train->add_option("--out", opt.out_dir, "Output directory");
  train->add_option("--iterations", opt.iterations, "Self-training rounds");
  train->add_option("--p", opt.p, "Diacritics-removal ratio")
      ->check(CLI::Range(0.0, 1.0));
  train->add_option("--beta", opt.beta, "Detection loss weight");

  CLI::App *eval = app.add_subcommand("eval", "Score a checkpoint");
  add_model(eval);
  eval->add_option("--data", opt.data, "Labeled CSV (input,output)")
      ->required();

  CLI::App *demo = app.add_subcommand("demo", "Interactive normalization");
  add_model(demo);

  CLI::App *normalize = app.add_subcommand("normalize", "Normalize a sentence");
  add_model(normalize);
  normalize->add_option("sentence", opt.sentence, "Sentence")->required();

  CLI::App *lookup = app.add_subcommand("lookup", "Look up a word");
  add_dict(lookup);
  add_llm(lookup);
  lookup->add_option("word", opt.word, "Word")->required();

  CLI::App *serve = app.add_subcommand("serve", "Start the HTTP service");
  add_model(serve);
  add_dict(serve);
  add_llm(serve);
  serve->add_option("--host", opt.host, "Listen address");
  serve->add_option("--port", opt.port, "Listen port")
      ->check(CLI::Range(0, 65535));

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(opt.verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*synth) return RunSynth(opt);
    if (*train) return RunTrain(opt);
    if (*eval) return RunEval(opt);
    if (*demo) return RunDemo(opt);
    if (*normalize) return RunNormalize(opt);
    if (*lookup) return RunLookup(opt);
    if (*serve) return RunServe(opt);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
