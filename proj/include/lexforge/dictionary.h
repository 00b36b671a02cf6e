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

#ifndef LEXFORGE_DICTIONARY_H_
#define LEXFORGE_DICTIONARY_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lexforge {

enum class EntrySource { kSeed, kLlm };

std::string_view EntrySourceName(EntrySource source);

using Timestamp = std::chrono::sys_seconds;

// One non-standard word and what it normalizes to.
struct DictEntry {
  std::string nsw;
  std::vector<std::string> standard_forms;
  std::string definition;
  std::vector<std::string> examples;
  EntrySource source = EntrySource::kSeed;
  Timestamp created_at{};

  bool operator==(const DictEntry &) const = default;
};

// Lowercased, whitespace-trimmed form used as dictionary key.
std::string NormalizeKey(std::string_view word);

// Throws ValidationError when `entry` breaks a DictEntry invariant.
void ValidateEntry(const DictEntry &entry);

std::string FormatRfc3339(Timestamp ts);
// Accepts "YYYY-MM-DDTHH:MM:SS[.frac](Z|±HH:MM)". Returns nullopt otherwise.
std::optional<Timestamp> ParseRfc3339(std::string_view text);

Timestamp NowUtc();

// Single-line JSON record with the fields nsw, standard_forms, definition,
// examples, source, created_at (in that order).
std::string EntryToJsonLine(const DictEntry &entry);
// Throws ParseError (source "<record>", line 0) on malformed input.
DictEntry EntryFromJsonLine(std::string_view line);

class Dictionary {
 public:
  Dictionary() = default;

  // Case-insensitive exact-key lookup after trimming. Returns nullptr on miss.
  const DictEntry *Lookup(std::string_view word) const;

  // Inserts or replaces the entry for entry.nsw and bumps the version.
  // Throws ValidationError (dictionary unchanged) on an invalid entry.
  void Insert(DictEntry entry);

  const std::map<std::string, DictEntry> &entries() const { return entries_; }
  int64_t version() const { return version_; }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Restores the version read from disk.
  void set_version(int64_t version) { version_ = version; }

 private:
  std::map<std::string, DictEntry> entries_;
  int64_t version_ = 0;
};

// File layout: an optional "# lexforge-dictionary version=N" header followed
// by one JSON record per line. Blank lines and other '#' lines are ignored.
Dictionary LoadDictionary(const std::filesystem::path &path);
Dictionary ParseDictionary(std::string_view contents,
                           const std::string &source_name);

// Writes to a sibling temp file, fsyncs, then renames over `path`.
void SaveDictionary(const Dictionary &dict, const std::filesystem::path &path);

// A dictionary bound to a file. Readers get immutable snapshots; writers are
// serialized and each mutation is on disk before it becomes visible.
class DictionaryStore {
 public:
  // Loads `path` if it exists, otherwise starts empty. The file is created on
  // the first insert.
  explicit DictionaryStore(std::filesystem::path path);

  DictionaryStore(const DictionaryStore &) = delete;
  DictionaryStore &operator=(const DictionaryStore &) = delete;

  std::shared_ptr<const Dictionary> Snapshot() const;
  std::optional<DictEntry> Lookup(std::string_view word) const;
  int64_t version() const { return Snapshot()->version(); }

  void Insert(DictEntry entry);

  const std::filesystem::path &path() const { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::mutex snapshot_mu_;
  std::mutex writer_mu_;
  std::shared_ptr<const Dictionary> current_;
};

}  // namespace lexforge

#endif  // LEXFORGE_DICTIONARY_H_
