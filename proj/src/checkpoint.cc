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

#include "lexforge/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "lexforge/errors.h"

namespace lexforge {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'L', 'X', 'F', 'C', 'K', 'P', 'T', '\x01'};
constexpr uint32_t kFormatVersion = 1;

class Writer {
 public:
  template <typename T>
  void Put(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    const char *p = reinterpret_cast<const char *>(&value);
    buf_.append(p, sizeof(T));
  }
  void PutString(const std::string &s) {
    Put<uint32_t>(static_cast<uint32_t>(s.size()));
    buf_.append(s);
  }
  template <typename Matrix>
  void PutMatrix(const Matrix &m) {
    Put<uint64_t>(m.rows());
    Put<uint64_t>(m.cols());
    // Row-major element order regardless of storage.
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) Put<double>(m(r, c));
    }
  }
  void PutVector(const Eigen::VectorXd &v) {
    Put<uint64_t>(v.size());
    buf_.append(reinterpret_cast<const char *>(v.data()),
                v.size() * sizeof(double));
  }
  void PutSection(const std::string &name, const Writer &payload) {
    PutString(name);
    Put<uint64_t>(payload.buf_.size());
    buf_.append(payload.buf_);
  }
  void PutRaw(const char *data, size_t n) { buf_.append(data, n); }
  const std::string &bytes() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(std::string_view data, std::string section)
      : data_(data), section_(std::move(section)) {}

  template <typename T>
  T Get() {
    Need(sizeof(T));
    T value;
    std::memcpy(&value, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::string GetString() {
    const uint32_t n = Get<uint32_t>();
    Need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::string_view GetBytes(size_t n) {
    Need(n);
    std::string_view s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  template <typename Matrix>
  Matrix GetMatrix() {
    const uint64_t rows = Get<uint64_t>();
    const uint64_t cols = Get<uint64_t>();
    if (cols != 0 && rows > (data_.size() - pos_) / sizeof(double) / cols) {
      Fail("matrix larger than section");
    }
    Matrix m(rows, cols);
    for (uint64_t r = 0; r < rows; ++r) {
      for (uint64_t c = 0; c < cols; ++c) m(r, c) = Get<double>();
    }
    return m;
  }
  Eigen::VectorXd GetVector() {
    const uint64_t n = Get<uint64_t>();
    if (n > (data_.size() - pos_) / sizeof(double)) {
      Fail("vector larger than section");
    }
    Eigen::VectorXd v(n);
    std::memcpy(v.data(), data_.data() + pos_, n * sizeof(double));
    pos_ += n * sizeof(double);
    return v;
  }
  bool done() const { return pos_ == data_.size(); }
  [[noreturn]] void Fail(const std::string &what) const {
    throw ParseError("checkpoint", 0, "section " + section_ + ": " + what);
  }

 private:
  void Need(size_t n) const {
    if (data_.size() - pos_ < n) Fail("truncated");
  }

  std::string_view data_;
  size_t pos_ = 0;
  std::string section_;
};

}  // namespace

void SaveModel(const ModelBundle &bundle, const std::filesystem::path &path) {
  Writer file;
  file.PutRaw(kMagic, sizeof(kMagic));
  file.Put<uint32_t>(kFormatVersion);

  Writer meta;
  meta.Put<uint64_t>(bundle.student.feature_dims());
  meta.Put<uint64_t>(bundle.student.hidden_dims());
  meta.Put<uint8_t>(bundle.detection_head ? 1 : 0);
  meta.Put<uint32_t>(static_cast<uint32_t>(bundle.rule_names.size()));
  for (const std::string &name : bundle.rule_names) meta.PutString(name);
  file.PutSection("meta", meta);

  Writer vocab;
  const std::vector<std::string> candidates = bundle.vocab.Candidates();
  vocab.Put<uint64_t>(candidates.size());
  for (const std::string &c : candidates) vocab.PutString(c);
  file.PutSection("vocab", vocab);

  Writer student;
  student.PutMatrix(bundle.student.feature_projection);
  student.PutVector(bundle.student.hidden_bias);
  student.PutMatrix(bundle.student.norm_weights);
  student.PutVector(bundle.student.norm_bias);
  student.PutVector(bundle.student.nsw_weights);
  student.Put<double>(bundle.student.nsw_bias);
  file.PutSection("student", student);

  if (bundle.teacher) {
    Writer teacher;
    teacher.PutMatrix(bundle.teacher->source_embeddings);
    teacher.PutMatrix(bundle.teacher->context_projection);
    file.PutSection("teacher", teacher);
  }

  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint " + tmp.string());
    out.write(file.bytes().data(),
              static_cast<std::streamsize>(file.bytes().size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place: " + ec.message());
}

ModelBundle LoadModel(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("no checkpoint at " + path.string() +
                  "; run `lexforge train` first");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string data = buffer.str();

  Reader file(data, "header");
  if (file.GetBytes(sizeof(kMagic)) != std::string_view(kMagic, sizeof(kMagic))) {
    file.Fail("not a lexforge checkpoint");
  }
  if (file.Get<uint32_t>() != kFormatVersion) {
    file.Fail("unsupported format version");
  }
  std::map<std::string, std::string_view> sections;
  while (!file.done()) {
    std::string name = file.GetString();
    const uint64_t size = file.Get<uint64_t>();
    sections[name] = file.GetBytes(size);
  }
  for (const char *required : {"meta", "vocab", "student"}) {
    if (!sections.count(required)) {
      throw ParseError(path.string(), 0,
                       std::string("missing section ") + required);
    }
  }

  ModelBundle bundle;
  Reader meta(sections["meta"], "meta");
  const uint64_t feature_dims = meta.Get<uint64_t>();
  const uint64_t hidden_dims = meta.Get<uint64_t>();
  bundle.detection_head = meta.Get<uint8_t>() != 0;
  const uint32_t rules = meta.Get<uint32_t>();
  for (uint32_t i = 0; i < rules; ++i) {
    bundle.rule_names.push_back(meta.GetString());
  }

  Reader vocab(sections["vocab"], "vocab");
  const uint64_t count = vocab.Get<uint64_t>();
  std::vector<std::string> candidates;
  for (uint64_t i = 0; i < count; ++i) candidates.push_back(vocab.GetString());
  bundle.vocab = CandidateVocab(std::move(candidates));

  Reader student(sections["student"], "student");
  StudentParams &p = bundle.student;
  p.feature_projection = student.GetMatrix<RowMatrix>();
  p.hidden_bias = student.GetVector();
  p.norm_weights = student.GetMatrix<Eigen::MatrixXd>();
  p.norm_bias = student.GetVector();
  p.nsw_weights = student.GetVector();
  p.nsw_bias = student.Get<double>();
  if (p.feature_projection.rows() != static_cast<Eigen::Index>(feature_dims) ||
      p.feature_projection.cols() != static_cast<Eigen::Index>(hidden_dims) ||
      p.hidden_bias.size() != p.feature_projection.cols() ||
      p.norm_weights.rows() != p.feature_projection.cols() ||
      p.norm_weights.cols() != p.norm_bias.size() ||
      p.norm_bias.size() != static_cast<Eigen::Index>(bundle.vocab.size()) ||
      p.nsw_weights.size() != p.feature_projection.cols()) {
    student.Fail("parameter shapes are inconsistent");
  }

  if (sections.count("teacher")) {
    Reader teacher(sections["teacher"], "teacher");
    RanParams ran;
    ran.source_embeddings = teacher.GetMatrix<Eigen::MatrixXd>();
    ran.context_projection = teacher.GetMatrix<RowMatrix>();
    if (ran.source_embeddings.rows() != static_cast<Eigen::Index>(rules) + 1 ||
        ran.source_embeddings.cols() != ran.context_projection.cols() ||
        ran.context_projection.rows() != static_cast<Eigen::Index>(feature_dims)) {
      teacher.Fail("parameter shapes are inconsistent");
    }
    bundle.teacher = std::move(ran);
  }
  return bundle;
}

}  // namespace lexforge
