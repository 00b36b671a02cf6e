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

#ifndef LEXFORGE_CHECKPOINT_H_
#define LEXFORGE_CHECKPOINT_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lexforge/student.h"
#include "lexforge/teacher.h"

namespace lexforge {

// Everything needed to run (and resume training of) a normalizer.
struct ModelBundle {
  CandidateVocab vocab;
  StudentParams student;
  // False when the student was trained without the detection loss; the
  // pipeline then derives is_nsw from the normalization head alone.
  bool detection_head = true;
  std::optional<RanParams> teacher;
  std::vector<std::string> rule_names;

  bool operator==(const ModelBundle &) const = default;
};

// Binary container: the magic "LXFCKPT\x01" followed by named sections
// (u32 name length, name, u64 payload length, payload). Integers are little
// endian, parameters raw IEEE-754 doubles, so a save/load round trip is
// bitwise exact. Sections: meta, vocab, student, and optionally teacher.
void SaveModel(const ModelBundle &bundle, const std::filesystem::path &path);
// Throws IoError or ParseError naming the section at fault.
ModelBundle LoadModel(const std::filesystem::path &path);

}  // namespace lexforge

#endif  // LEXFORGE_CHECKPOINT_H_
