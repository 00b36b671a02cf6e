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

#include "lexforge/corpus.h"

#include <unicode/uchar.h>

#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "lexforge/errors.h"

namespace lexforge {

namespace {

std::string ReadFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void ExpectHeader(const CsvTable &table, const std::vector<std::string> &want,
                  const std::filesystem::path &path) {
  if (table.header != want) {
    std::string joined;
    for (const auto &h : want) joined += (joined.empty() ? "" : ",") + h;
    throw ParseError(path.string(), 1, "expected header `" + joined + "`");
  }
}

// Common standard words used to pad synthetic sentences.
constexpr const char *kFillerWords[] = {
    "tôi",   "bạn",  "hôm",   "nay",  "trời",  "đẹp",   "quá",   "mình",
    "đi",    "học",  "làm",   "việc", "ăn",    "cơm",   "uống",  "nước",
    "nhà",   "xe",   "đường", "phố",  "sáng",  "tối",   "mai",   "vui",
    "buồn",  "thật", "lắm",   "rất",  "cái",   "này",   "kia",   "đó",
    "chơi",  "game", "xem",   "phim", "nghe",  "nhạc",  "bài",   "hát",
    "mẹ",    "bố",   "anh",   "chị",  "em",    "trường", "lớp",  "thầy",
    "cô",    "sách", "vở",    "điện", "trưa",  "chiều", "tuần",  "tháng",
    "năm",   "mua",  "bán",   "đồ",   "áo",    "quần",  "giày",  "mưa",
    "nắng",  "gió",  "lạnh",  "nóng", "mệt",   "ngủ",   "dậy",   "sớm",
    "muộn",  "nhanh", "chậm", "to",   "nhỏ",   "mới",   "cũ",    "hay",
    "dở",    "thương", "nhớ", "chờ",  "gặp",   "nói",   "hỏi",   "trả",
};

constexpr const char *kSentenceEnds[] = {".", "!", "?", "..."};

class Sampler {
 public:
  explicit Sampler(uint64_t seed) : gen_(seed) {}
  double Uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  size_t Below(size_t n) { return static_cast<size_t>(gen_() % n); }

 private:
  std::mt19937_64 gen_;
};

struct Unit {
  std::string clean;
  std::string source;
  bool multiword = false;
  bool corrupted = false;
};

// Repeats the final letter 2-4 extra times ("vui" -> "vuiii"), or returns
// the word unchanged when it cannot be stretched unambiguously.
std::string Stretch(const std::string &word, Sampler &rng) {
  std::u32string cps = ToCodePoints(word);
  if (cps.size() < 2) return word;
  const char32_t last = cps.back();
  if (!u_isalpha(static_cast<UChar32>(last)) || cps[cps.size() - 2] == last) {
    return word;
  }
  const size_t extra = 2 + rng.Below(3);
  cps.append(extra, last);
  return FromCodePoints(cps);
}

struct Generator {
  const Dictionary &dict;
  const SynthConfig &config;
  std::vector<std::string> fillers;
  std::vector<std::string> forms;  // corruptible standard forms
  std::map<std::string, std::vector<std::string>> nsws_for_form;

  Generator(const Dictionary &d, const SynthConfig &c) : dict(d), config(c) {
    for (const auto &[key, entry] : dict.entries()) {
      nsws_for_form[entry.standard_forms.front()].push_back(key);
    }
    for (const auto &[form, keys] : nsws_for_form) forms.push_back(form);
    for (const char *w : kFillerWords) {
      if (dict.Lookup(w) == nullptr) fillers.push_back(w);
    }
  }

  std::vector<Unit> Draw(Sampler &rng) const {
    std::vector<Unit> units;
    const size_t length = 4 + rng.Below(6);
    for (size_t i = 0; i < length; ++i) {
      Unit u;
      if (rng.Uniform() < 0.45) {
        u.clean = forms[rng.Below(forms.size())];
        const auto &nsws = nsws_for_form.at(u.clean);
        if (rng.Uniform() < config.corruption_rate) {
          u.source = nsws[rng.Below(nsws.size())];
          u.corrupted = true;
        }
      } else {
        u.clean = fillers[rng.Below(fillers.size())];
      }
      u.multiword = u.clean.find(' ') != std::string::npos;
      if (!u.corrupted) {
        u.source = u.clean;
        if (!u.multiword && rng.Uniform() < config.noise_rate) {
          u.source = Stretch(u.clean, rng);
          u.corrupted = u.source != u.clean;
        }
      }
      units.push_back(std::move(u));
    }
    return units;
  }
};

std::string Join(const std::vector<Unit> &units, bool source,
                 const std::string &end) {
  std::string out;
  for (const Unit &u : units) {
    if (!out.empty()) out += ' ';
    out += source ? u.source : u.clean;
  }
  return out + end;
}

std::vector<Label> ExpectedLabels(const std::vector<Unit> &units,
                                  const std::string &end) {
  std::vector<Label> labels;
  for (const Unit &u : units) {
    if (u.corrupted) {
      labels.push_back(Label::Rewrite(u.clean));
    } else {
      for (size_t k = 0; k < Tokenize(u.clean).size(); ++k) {
        labels.push_back(Label::Keep());
      }
    }
  }
  if (!end.empty()) labels.push_back(Label::Keep());
  return labels;
}

}  // namespace

CsvTable ParseCsv(std::string_view contents, const std::string &source_name) {
  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool record_has_content = false;
  int line = 1;
  int record_line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    if (table.header.empty()) {
      table.header = std::move(record);
    } else {
      if (record.size() != table.header.size()) {
        throw ParseError(source_name, record_line,
                         "expected " + std::to_string(table.header.size()) +
                             " fields, found " + std::to_string(record.size()));
      }
      table.rows.push_back(std::move(record));
      table.row_lines.push_back(record_line);
    }
    record.clear();
    record_has_content = false;
  };

  for (size_t i = 0; i < contents.size(); ++i) {
    const char c = contents[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < contents.size() && contents[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_was_quoted) {
          throw ParseError(source_name, line, "stray quote inside field");
        }
        in_quotes = true;
        field_was_quoted = true;
        record_has_content = true;
        break;
      case ',':
        end_field();
        record_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        if (record_has_content || !field.empty()) end_record();
        ++line;
        record_line = line;
        break;
      default:
        if (field_was_quoted) {
          throw ParseError(source_name, line,
                           "unexpected character after closing quote");
        }
        field += c;
        record_has_content = true;
    }
  }
  if (in_quotes) throw ParseError(source_name, record_line, "unterminated quote");
  if (record_has_content || !field.empty()) end_record();
  if (table.header.empty()) throw ParseError(source_name, 1, "missing header");
  return table;
}

CsvTable ReadCsv(const std::filesystem::path &path) {
  return ParseCsv(ReadFile(path), path.string());
}

std::string CsvField(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void WriteCsv(const std::filesystem::path &path,
              const std::vector<std::string> &header,
              const std::vector<std::vector<std::string>> &rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  auto write_row = [&](const std::vector<std::string> &row) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ',';
      out << CsvField(row[i]);
    }
    out << '\n';
  };
  write_row(header);
  for (const auto &row : rows) write_row(row);
  if (!out) throw IoError("short write to " + path.string());
}

AlignedSentence AlignPair(std::string_view input, std::string_view output) {
  AlignedSentence sentence;
  sentence.source_tokens = Tokenize(input);
  const std::vector<Token> target = Tokenize(output);
  sentence.gold_labels = Align(Surfaces(sentence.source_tokens), Surfaces(target));
  return sentence;
}

LabeledSplit LoadLabeledCsv(const std::filesystem::path &path) {
  const CsvTable table = ReadCsv(path);
  ExpectHeader(table, {"input", "output"}, path);
  LabeledSplit split;
  for (const auto &row : table.rows) {
    try {
      AlignedSentence s = AlignPair(row[0], row[1]);
      if (!s.source_tokens.empty()) split.sentences.push_back(std::move(s));
    } catch (const ValidationError &) {
      ++split.skipped;
    }
  }
  if (split.skipped > 0) {
    spdlog::warn("{}: skipped {} row(s) that could not be aligned",
                 path.string(), split.skipped);
  }
  if (table.rows.empty()) spdlog::warn("{}: no data rows", path.string());
  return split;
}

std::vector<std::vector<Token>> LoadUnlabeledCsv(
    const std::filesystem::path &path) {
  const CsvTable table = ReadCsv(path);
  ExpectHeader(table, {"input"}, path);
  std::vector<std::vector<Token>> out;
  for (const auto &row : table.rows) {
    std::vector<Token> tokens = Tokenize(row[0]);
    if (!tokens.empty()) out.push_back(std::move(tokens));
  }
  if (table.rows.empty()) spdlog::warn("{}: no data rows", path.string());
  return out;
}

Corpus LoadCorpus(const std::filesystem::path &dir) {
  Corpus corpus;
  corpus.train = LoadLabeledCsv(dir / "train.csv");
  corpus.dev = LoadLabeledCsv(dir / "dev.csv");
  corpus.test = LoadLabeledCsv(dir / "test.csv");
  corpus.unlabeled = LoadUnlabeledCsv(dir / "unlabeled.csv");
  return corpus;
}

SyntheticCorpus SynthesizeCorpus(const Dictionary &dict,
                                 const SynthConfig &config) {
  if (config.size == 0) throw ValidationError("corpus size must be positive");
  if (dict.empty()) throw ValidationError("synthesis needs a non-empty dictionary");
  Generator generator(dict, config);
  Sampler rng(config.seed);

  auto labeled_row = [&](std::vector<Label> *labels) {
    std::vector<Unit> units = generator.Draw(rng);
    const std::string end =
        rng.Uniform() < 0.3 ? kSentenceEnds[rng.Below(std::size(kSentenceEnds))]
                            : "";
    // Keep the gold labels exact: drop corruptions the aligner would attach
    // differently, multi-word expansions first.
    for (int pass = 0; pass < 3; ++pass) {
      std::string input = Join(units, true, end);
      std::string output = Join(units, false, end);
      std::vector<Label> expected = ExpectedLabels(units, end);
      if (AlignPair(input, output).gold_labels == expected) {
        *labels = std::move(expected);
        return std::make_pair(std::move(input), std::move(output));
      }
      for (Unit &u : units) {
        if (pass == 0 && !u.multiword) continue;
        u.source = u.clean;
        u.corrupted = false;
      }
    }
    throw Error("synthesis produced an unalignable clean sentence");
  };

  SyntheticCorpus corpus;
  const size_t held_out = config.size / 10;
  const size_t train = config.size - 2 * held_out;
  std::vector<Label> labels;
  for (size_t i = 0; i < train; ++i) {
    corpus.train.push_back(labeled_row(&labels));
    corpus.train_labels.push_back(labels);
  }
  for (size_t i = 0; i < held_out; ++i) {
    corpus.dev.push_back(labeled_row(&labels));
    corpus.dev_labels.push_back(labels);
  }
  for (size_t i = 0; i < held_out; ++i) {
    corpus.test.push_back(labeled_row(&labels));
    corpus.test_labels.push_back(labels);
  }
  const size_t unlabeled =
      config.unlabeled_size == 0 ? 4 * config.size : config.unlabeled_size;
  for (size_t i = 0; i < unlabeled; ++i) {
    corpus.unlabeled.push_back(labeled_row(&labels).first);
  }
  return corpus;
}

void WriteCorpus(const SyntheticCorpus &corpus,
                 const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  auto pairs = [](const std::vector<std::pair<std::string, std::string>> &rows) {
    std::vector<std::vector<std::string>> out;
    for (const auto &[in, outp] : rows) out.push_back({in, outp});
    return out;
  };
  WriteCsv(dir / "train.csv", {"input", "output"}, pairs(corpus.train));
  WriteCsv(dir / "dev.csv", {"input", "output"}, pairs(corpus.dev));
  WriteCsv(dir / "test.csv", {"input", "output"}, pairs(corpus.test));
  std::vector<std::vector<std::string>> unlabeled;
  for (const auto &s : corpus.unlabeled) unlabeled.push_back({s});
  WriteCsv(dir / "unlabeled.csv", {"input"}, unlabeled);
}

}  // namespace lexforge
