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

#include <gtest/gtest.h>

#include "lexforge/errors.h"
#include "test_util.h"

namespace lexforge {
namespace {

using testing::TempDir;
using testing::WriteFile;

TEST(CsvTest, QuotedFieldsAndEscapes) {
  const CsvTable t = ParseCsv(
      "input,output\n"
      "\"ko, bik\",\"không, biết\"\n"
      "\"nói \"\"ok\"\"\",nói ok\n"
      "\"hai\ndòng\",x\n"
      "last,row",
      "t.csv");
  ASSERT_EQ(t.rows.size(), 4u);
  EXPECT_EQ(t.rows[0][0], "ko, bik");
  EXPECT_EQ(t.rows[1][0], "nói \"ok\"");
  EXPECT_EQ(t.rows[2][0], "hai\ndòng");
  EXPECT_EQ(t.row_lines, (std::vector<int>{2, 3, 4, 6}));
  EXPECT_EQ(t.rows[3][1], "row");
}

TEST(CsvTest, WriteThenParseRoundTrips) {
  TempDir dir;
  const std::vector<std::vector<std::string>> rows = {
      {"a,b", "c\"d"}, {"", "e\nf"}, {"ố", "plain"}};
  WriteCsv(dir / "x.csv", {"input", "output"}, rows);
  const CsvTable t = ReadCsv(dir / "x.csv");
  EXPECT_EQ(t.rows, rows);
}

TEST(CsvTest, MalformedQuotingNamesFileAndLine) {
  try {
    ParseCsv("input,output\nok,ok\n\"open,x\n", "bad.csv");
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.source(), "bad.csv");
    EXPECT_EQ(e.line(), 3);
  }
  try {
    ParseCsv("input,output\na\"b,c\n", "bad.csv");
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 2);
  }
  try {
    ParseCsv("input,output\na,b\nc\n", "bad.csv");
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 3);
  }
  EXPECT_THROW(ParseCsv("", "empty.csv"), ParseError);
}

TEST(LoadLabeledCsvTest, AlignsRows) {
  TempDir dir;
  WriteFile(dir / "s.csv",
            "input,output\nko bik,không biết\nxin chào,xin chào\n");
  const LabeledSplit split = LoadLabeledCsv(dir / "s.csv");
  ASSERT_EQ(split.sentences.size(), 2u);
  EXPECT_EQ(split.sentences[0].gold_labels,
            (std::vector<Label>{Label::Rewrite("không"), Label::Rewrite("biết")}));
  for (const Label &l : split.sentences[1].gold_labels) {
    EXPECT_TRUE(l.is_keep());
  }
}

TEST(LoadLabeledCsvTest, HeaderOnlyGivesEmptySplit) {
  TempDir dir;
  WriteFile(dir / "s.csv", "input,output\n");
  const LabeledSplit split = LoadLabeledCsv(dir / "s.csv");
  EXPECT_TRUE(split.sentences.empty());
  EXPECT_EQ(split.skipped, 0u);
}

TEST(LoadLabeledCsvTest, UnalignableRowsAreSkippedAndCounted) {
  TempDir dir;
  WriteFile(dir / "s.csv", "input,output\nko,\n,không\nko,không\n");
  const LabeledSplit split = LoadLabeledCsv(dir / "s.csv");
  EXPECT_EQ(split.sentences.size(), 1u);
  EXPECT_EQ(split.skipped, 2u);
}

TEST(LoadLabeledCsvTest, WrongHeaderOrMissingFileFails) {
  TempDir dir;
  WriteFile(dir / "s.csv", "src,tgt\na,b\n");
  try {
    LoadLabeledCsv(dir / "s.csv");
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_NE(std::string(e.what()).find("s.csv"), std::string::npos);
  }
  EXPECT_THROW(LoadLabeledCsv(dir / "missing.csv"), IoError);
  WriteFile(dir / "u.csv", "input,output\na,b\n");
  EXPECT_THROW(LoadUnlabeledCsv(dir / "u.csv"), ParseError);
}

TEST(LoadCorpusTest, ShippedSyntheticCorpusLoads) {
  const Corpus corpus = LoadCorpus(testing::DataDir() / "synthetic");
  EXPECT_EQ(corpus.train.sentences.size(), 400u);
  EXPECT_EQ(corpus.dev.sentences.size(), 50u);
  EXPECT_EQ(corpus.test.sentences.size(), 50u);
  EXPECT_EQ(corpus.unlabeled.size(), 2000u);
  EXPECT_EQ(corpus.train.skipped, 0u);
}

TEST(SynthesizeTest, SizeOneEmitsOneLabeledRow) {
  const Dictionary dict = LoadDictionary(testing::SeedDictionaryPath());
  SynthConfig config;
  config.size = 1;
  const SyntheticCorpus c = SynthesizeCorpus(dict, config);
  EXPECT_EQ(c.train.size() + c.dev.size() + c.test.size(), 1u);
  EXPECT_EQ(c.unlabeled.size(), 4u);
  config.size = 0;
  EXPECT_THROW(SynthesizeCorpus(dict, config), ValidationError);
  EXPECT_THROW(SynthesizeCorpus(Dictionary(), SynthConfig{}), ValidationError);
}

TEST(SynthesizeTest, SameSeedWritesByteIdenticalFiles) {
  const Dictionary dict = LoadDictionary(testing::SeedDictionaryPath());
  SynthConfig config;
  config.size = 120;
  config.seed = 3;
  TempDir a, b;
  WriteCorpus(SynthesizeCorpus(dict, config), a.path());
  WriteCorpus(SynthesizeCorpus(dict, config), b.path());
  for (const char *name :
       {"train.csv", "dev.csv", "test.csv", "unlabeled.csv"}) {
    const std::string content = testing::ReadFile(a / name);
    EXPECT_FALSE(content.empty()) << name;
    EXPECT_EQ(content, testing::ReadFile(b / name)) << name;
  }
  config.seed = 4;
  TempDir c;
  WriteCorpus(SynthesizeCorpus(dict, config), c.path());
  EXPECT_NE(testing::ReadFile(a / "train.csv"),
            testing::ReadFile(c / "train.csv"));
}

TEST(SynthesizeTest, ShippedCorpusMatchesGenerator) {
  const Dictionary dict = LoadDictionary(testing::SeedDictionaryPath());
  SynthConfig config;
  config.size = 500;
  config.seed = 42;
  TempDir dir;
  WriteCorpus(SynthesizeCorpus(dict, config), dir.path());
  for (const char *name :
       {"train.csv", "dev.csv", "test.csv", "unlabeled.csv"}) {
    EXPECT_EQ(testing::ReadFile(dir / name),
              testing::ReadFile(testing::DataDir() / "synthetic" / name))
        << name;
  }
}

// Last code point of a UTF-8 string.
std::u32string LastCodePoint(const std::string &s) {
  const std::u32string cps = ToCodePoints(s);
  return cps.empty() ? U"" : cps.substr(cps.size() - 1);
}

TEST(SynthesizeTest, GoldLabelsAreExactByConstruction) {
  const Dictionary dict = LoadDictionary(testing::SeedDictionaryPath());
  SynthConfig config;
  config.size = 300;
  config.seed = 8;
  const SyntheticCorpus c = SynthesizeCorpus(dict, config);
  size_t dictionary_corruptions = 0;
  size_t stretches = 0;
  for (size_t r = 0; r < c.train.size(); ++r) {
    const auto &[input, output] = c.train[r];
    const AlignedSentence aligned = AlignPair(input, output);
    ASSERT_EQ(aligned.gold_labels, c.train_labels[r]) << input;
    for (size_t i = 0; i < aligned.source_tokens.size(); ++i) {
      const Label &label = c.train_labels[r][i];
      if (label.is_keep()) continue;
      const std::string &source = aligned.source_tokens[i].surface;
      const std::string &target = label.target();
      if (const DictEntry *e = dict.Lookup(source);
          e != nullptr && e->standard_forms.front() == target) {
        ++dictionary_corruptions;
        continue;
      }
      // Otherwise the only corruption is stretching the final letter.
      const std::u32string src = ToCodePoints(source);
      const std::u32string tgt = ToCodePoints(target);
      ASSERT_GT(src.size(), tgt.size()) << source << " -> " << target;
      ASSERT_EQ(src.substr(0, tgt.size()), tgt) << source;
      for (size_t k = tgt.size(); k < src.size(); ++k) {
        ASSERT_EQ(std::u32string(1, src[k]), LastCodePoint(target)) << source;
      }
      ++stretches;
    }
  }
  EXPECT_GT(dictionary_corruptions, 50u);
  EXPECT_GT(stretches, 0u);
}

}  // namespace
}  // namespace lexforge
