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

#ifndef LEXFORGE_CORPUS_H_
#define LEXFORGE_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "lexforge/dictionary.h"
#include "lexforge/textcore.h"

namespace lexforge {

// RFC 4180 style: comma separated, fields optionally double-quoted with ""
// as the escaped quote; quoted fields may span lines.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> row_lines;  // 1-based line on which each row starts
};

CsvTable ParseCsv(std::string_view contents, const std::string &source_name);
CsvTable ReadCsv(const std::filesystem::path &path);
std::string CsvField(std::string_view field);
void WriteCsv(const std::filesystem::path &path,
              const std::vector<std::string> &header,
              const std::vector<std::vector<std::string>> &rows);

// Tokenizes both sides and aligns them. Throws ValidationError when exactly
// one side has no tokens.
AlignedSentence AlignPair(std::string_view input, std::string_view output);

struct LabeledSplit {
  std::vector<AlignedSentence> sentences;
  size_t skipped = 0;  // rows whose alignment failed
};

// Header must be `input,output`.
LabeledSplit LoadLabeledCsv(const std::filesystem::path &path);
// Header must be `input`.
std::vector<std::vector<Token>> LoadUnlabeledCsv(
    const std::filesystem::path &path);

struct Corpus {
  LabeledSplit train;
  LabeledSplit dev;
  LabeledSplit test;
  std::vector<std::vector<Token>> unlabeled;
};

// Loads train.csv, dev.csv, test.csv and unlabeled.csv from `dir`.
Corpus LoadCorpus(const std::filesystem::path &dir);

struct SynthConfig {
  size_t size = 500;            // labeled rows over train/dev/test
  size_t unlabeled_size = 0;    // 0 -> 4 * size
  uint64_t seed = 42;
  double corruption_rate = 0.35;
  double noise_rate = 0.05;
};

struct SyntheticCorpus {
  std::vector<std::pair<std::string, std::string>> train;
  std::vector<std::pair<std::string, std::string>> dev;
  std::vector<std::pair<std::string, std::string>> test;
  std::vector<std::string> unlabeled;
  // Gold labels by construction, parallel to train/dev/test rows.
  std::vector<std::vector<Label>> train_labels;
  std::vector<std::vector<Label>> dev_labels;
  std::vector<std::vector<Label>> test_labels;
};

// Builds clean sentences from standard words, then corrupts a fraction of
// them by swapping a standard form for one of its dictionary NSWs or by
// stretching a final letter. Labeled rows are split 80/10/10 (dev and test
// get size/10 rows each). Throws ValidationError when size is 0 or the
// dictionary is empty.
SyntheticCorpus SynthesizeCorpus(const Dictionary &dict,
                                 const SynthConfig &config);

void WriteCorpus(const SyntheticCorpus &corpus,
                 const std::filesystem::path &dir);

}  // namespace lexforge

#endif  // LEXFORGE_CORPUS_H_
