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

#include "lexforge/dictionary.h"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lexforge/errors.h"
#include "lexforge/textcore.h"

namespace lexforge {

namespace {

constexpr std::string_view kHeaderPrefix = "# lexforge-dictionary version=";

const char *const kFields[] = {"nsw",      "standard_forms", "definition",
                               "examples", "source",         "created_at"};

std::vector<std::string> StringArray(const nlohmann::json &value,
                                     const char *field) {
  if (!value.is_array()) {
    throw ParseError("<record>", 0,
                     std::string("field \"") + field + "\" must be an array");
  }
  std::vector<std::string> out;
  for (const auto &item : value) {
    if (!item.is_string()) {
      throw ParseError("<record>", 0,
                       std::string("field \"") + field +
                           "\" must contain only strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

void WriteFileDurably(const std::filesystem::path &path,
                      const std::string &contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) {
    throw IoError("cannot open " + tmp.string() + ": " + std::strerror(errno));
  }
  const char *data = contents.data();
  size_t remaining = contents.size();
  while (remaining > 0) {
    ssize_t n = ::write(fd, data, remaining);
    if (n < 0) {
      if (errno == EINTR) continue;
      int err = errno;
      ::close(fd);
      throw IoError("write failed for " + tmp.string() + ": " +
                    std::strerror(err));
    }
    data += n;
    remaining -= static_cast<size_t>(n);
  }
  if (::fsync(fd) != 0 || ::close(fd) != 0) {
    throw IoError("cannot flush " + tmp.string() + ": " + std::strerror(errno));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw IoError("cannot rename " + tmp.string() + " to " + path.string() +
                  ": " + ec.message());
  }
}

}  // namespace

std::string_view EntrySourceName(EntrySource source) {
  return source == EntrySource::kSeed ? "seed" : "llm";
}

std::string NormalizeKey(std::string_view word) { return ToLower(Trim(word)); }

void ValidateEntry(const DictEntry &entry) {
  if (entry.nsw.empty()) throw ValidationError("entry has an empty nsw key");
  for (char32_t cp : ToCodePoints(entry.nsw)) {
    if (IsWhitespace(cp)) {
      throw ValidationError("nsw \"" + entry.nsw + "\" contains whitespace");
    }
  }
  if (ToLower(entry.nsw) != entry.nsw) {
    throw ValidationError("nsw \"" + entry.nsw + "\" is not lowercase");
  }
  if (entry.standard_forms.empty()) {
    throw ValidationError("entry \"" + entry.nsw + "\" has no standard forms");
  }
  for (const std::string &form : entry.standard_forms) {
    if (form.empty()) {
      throw ValidationError("entry \"" + entry.nsw +
                            "\" has an empty standard form");
    }
    if (form == entry.nsw) {
      throw ValidationError("entry \"" + entry.nsw +
                            "\" lists itself as a standard form");
    }
  }
}

std::string FormatRfc3339(Timestamp ts) {
  std::time_t t = static_cast<std::time_t>(ts.time_since_epoch().count());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::optional<Timestamp> ParseRfc3339(std::string_view text) {
  std::string s(text);
  int year, month, day, hour, minute, second;
  int consumed = 0;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &year, &month, &day,
                  &hour, &minute, &second, &consumed) != 6 ||
      consumed != 19) {
    return std::nullopt;
  }
  size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    size_t digits = 0;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      ++pos;
      ++digits;
    }
    if (digits == 0) return std::nullopt;
  }
  long offset_seconds = 0;
  if (pos < s.size() && (s[pos] == 'Z' || s[pos] == 'z')) {
    ++pos;
  } else if (pos + 6 == s.size() && (s[pos] == '+' || s[pos] == '-') &&
             s[pos + 3] == ':') {
    int oh = 0, om = 0;
    if (std::sscanf(s.c_str() + pos + 1, "%2d:%2d", &oh, &om) != 2) {
      return std::nullopt;
    }
    offset_seconds = (oh * 3600L + om * 60L) * (s[pos] == '+' ? 1 : -1);
    pos += 6;
  } else {
    return std::nullopt;
  }
  if (pos != s.size()) return std::nullopt;
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 ||
      minute > 59 || second > 60) {
    return std::nullopt;
  }
  std::tm tm{};
  tm.tm_year = year - 1900;
  tm.tm_mon = month - 1;
  tm.tm_mday = day;
  tm.tm_hour = hour;
  tm.tm_min = minute;
  tm.tm_sec = second;
  const std::time_t t = timegm(&tm);
  return Timestamp(std::chrono::seconds(t - offset_seconds));
}

Timestamp NowUtc() {
  return std::chrono::time_point_cast<std::chrono::seconds>(
      std::chrono::system_clock::now());
}

std::string EntryToJsonLine(const DictEntry &entry) {
  nlohmann::ordered_json j;
  j["nsw"] = entry.nsw;
  j["standard_forms"] = entry.standard_forms;
  j["definition"] = entry.definition;
  j["examples"] = entry.examples;
  j["source"] = std::string(EntrySourceName(entry.source));
  j["created_at"] = FormatRfc3339(entry.created_at);
  return j.dump();
}

DictEntry EntryFromJsonLine(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error &e) {
    throw ParseError("<record>", 0,
                     "invalid JSON at byte " + std::to_string(e.byte));
  }
  if (!j.is_object()) throw ParseError("<record>", 0, "record is not an object");
  for (const char *field : kFields) {
    if (!j.contains(field)) {
      throw ParseError("<record>", 0,
                       std::string("missing field \"") + field + "\"");
    }
  }
  if (j.size() != std::size(kFields)) {
    for (const auto &[key, value] : j.items()) {
      if (std::find(std::begin(kFields), std::end(kFields), key) ==
          std::end(kFields)) {
        throw ParseError("<record>", 0, "unknown field \"" + key + "\"");
      }
    }
  }
  DictEntry entry;
  if (!j["nsw"].is_string() || !j["definition"].is_string() ||
      !j["source"].is_string() || !j["created_at"].is_string()) {
    throw ParseError("<record>", 0,
                     "fields nsw, definition, source, created_at must be "
                     "strings");
  }
  entry.nsw = j["nsw"].get<std::string>();
  entry.standard_forms = StringArray(j["standard_forms"], "standard_forms");
  entry.definition = j["definition"].get<std::string>();
  entry.examples = StringArray(j["examples"], "examples");
  const std::string source = j["source"].get<std::string>();
  if (source == "seed") {
    entry.source = EntrySource::kSeed;
  } else if (source == "llm") {
    entry.source = EntrySource::kLlm;
  } else {
    throw ParseError("<record>", 0, "unknown source \"" + source + "\"");
  }
  auto created = ParseRfc3339(j["created_at"].get<std::string>());
  if (!created) {
    throw ParseError("<record>", 0,
                     "created_at is not an RFC 3339 timestamp");
  }
  entry.created_at = *created;
  try {
    ValidateEntry(entry);
  } catch (const ValidationError &e) {
    throw ParseError("<record>", 0, e.what());
  }
  return entry;
}

const DictEntry *Dictionary::Lookup(std::string_view word) const {
  auto it = entries_.find(NormalizeKey(word));
  return it == entries_.end() ? nullptr : &it->second;
}

void Dictionary::Insert(DictEntry entry) {
  ValidateEntry(entry);
  std::string key = entry.nsw;
  entries_.insert_or_assign(std::move(key), std::move(entry));
  ++version_;
}

Dictionary ParseDictionary(std::string_view contents,
                           const std::string &source_name) {
  Dictionary dict;
  int64_t version = 0;
  std::istringstream in{std::string(contents)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line.rfind(kHeaderPrefix, 0) == 0) {
      try {
        version = std::stoll(line.substr(kHeaderPrefix.size()));
      } catch (const std::exception &) {
        throw ParseError(source_name, line_no, "bad version header");
      }
      continue;
    }
    if (line[0] == '#') continue;
    DictEntry entry;
    try {
      entry = EntryFromJsonLine(line);
    } catch (const ParseError &e) {
      // Strip the "<record>: " prefix and re-anchor on the file position.
      std::string what = e.what();
      what = what.substr(what.find(": ") + 2);
      throw ParseError(source_name, line_no, what);
    }
    if (dict.Lookup(entry.nsw) != nullptr) {
      throw ParseError(source_name, line_no,
                       "duplicate entry \"" + entry.nsw + "\"");
    }
    dict.Insert(std::move(entry));
  }
  dict.set_version(version);
  return dict;
}

Dictionary LoadDictionary(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dictionary " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseDictionary(buffer.str(), path.string());
}

void SaveDictionary(const Dictionary &dict, const std::filesystem::path &path) {
  std::string out;
  out += kHeaderPrefix;
  out += std::to_string(dict.version());
  out += '\n';
  for (const auto &[key, entry] : dict.entries()) {
    out += EntryToJsonLine(entry);
    out += '\n';
  }
  WriteFileDurably(path, out);
}

DictionaryStore::DictionaryStore(std::filesystem::path path)
    : path_(std::move(path)) {
  if (std::filesystem::exists(path_)) {
    current_ = std::make_shared<const Dictionary>(LoadDictionary(path_));
  } else {
    current_ = std::make_shared<const Dictionary>();
  }
}

std::shared_ptr<const Dictionary> DictionaryStore::Snapshot() const {
  std::lock_guard<std::mutex> lock(snapshot_mu_);
  return current_;
}

std::optional<DictEntry> DictionaryStore::Lookup(std::string_view word) const {
  auto snapshot = Snapshot();
  const DictEntry *entry = snapshot->Lookup(word);
  if (entry == nullptr) return std::nullopt;
  return *entry;
}

void DictionaryStore::Insert(DictEntry entry) {
  std::lock_guard<std::mutex> writer(writer_mu_);
  auto next = std::make_shared<Dictionary>(*Snapshot());
  next->Insert(std::move(entry));
  SaveDictionary(*next, path_);
  std::lock_guard<std::mutex> lock(snapshot_mu_);
  current_ = std::move(next);
}

}  // namespace lexforge
