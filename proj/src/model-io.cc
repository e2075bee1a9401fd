// src/model-io.cc

// Copyright 2026  The spkback Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "spkback/model-io.h"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "spkback/error.h"
#include "spkback/io.h"

namespace spkback {

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary model I/O assumes a little-endian host");

constexpr uint32_t kVersion = 1;
constexpr char kPreMagic[9] = "SPKBPRE1";
constexpr char kPldaMagic[9] = "SPKBPLDA";
constexpr char kFourCovMagic[9] = "SPKB4COV";

// Rejects absurd sizes before allocating.
constexpr uint32_t kMaxDim = 1 << 16;

class Writer {
 public:
  explicit Writer(std::ostream &os) : os_(os) {}
  void Magic(const char *magic) {
    os_.write(magic, 8);
    U32(kVersion);
  }
  void U32(uint32_t v) { os_.write(reinterpret_cast<const char *>(&v), sizeof(v)); }
  void Doubles(const double *p, Eigen::Index n) {
    os_.write(reinterpret_cast<const char *>(p), static_cast<std::streamsize>(n * sizeof(double)));
  }
  void Mat(const Matrix &m) { Doubles(m.data(), m.size()); }
  void Vec(const Vector &v) { Doubles(v.data(), v.size()); }

 private:
  std::ostream &os_;
};

class Reader {
 public:
  Reader(std::istream &is, std::string path) : is_(is), path_(std::move(path)) {}
  void Magic(const char *magic) {
    char buf[8];
    is_.read(buf, 8);
    if (!is_ || std::memcmp(buf, magic, 8) != 0)
      throw Error(ErrorKind::kParse, path_ + ": not a " + std::string(magic, 8) + " file");
    uint32_t version = U32();
    if (version != kVersion)
      throw Error(ErrorKind::kParse, path_ + ": unsupported version " + std::to_string(version));
  }
  uint32_t U32() {
    uint32_t v = 0;
    is_.read(reinterpret_cast<char *>(&v), sizeof(v));
    if (!is_) Truncated();
    return v;
  }
  uint32_t Dim() {
    uint32_t v = U32();
    if (v > kMaxDim) throw Error(ErrorKind::kParse, path_ + ": implausible dimension " + std::to_string(v));
    return v;
  }
  Matrix Mat(Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    Read(m.data(), m.size());
    return m;
  }
  Vector Vec(Eigen::Index n) {
    Vector v(n);
    Read(v.data(), n);
    return v;
  }
  void End() {
    if (is_.peek() != std::char_traits<char>::eof())
      throw Error(ErrorKind::kParse, path_ + ": trailing data");
  }

 private:
  void Read(double *p, Eigen::Index n) {
    is_.read(reinterpret_cast<char *>(p), static_cast<std::streamsize>(n * sizeof(double)));
    if (!is_) Truncated();
  }
  [[noreturn]] void Truncated() { throw Error(ErrorKind::kParse, path_ + ": truncated file"); }

  std::istream &is_;
  std::string path_;
};

void PutPre(Writer &w, const Preprocessor &pre) {
  w.U32(static_cast<uint32_t>(pre.Dim()));
  w.Vec(pre.mean);
  w.Mat(pre.whitener);
}

Preprocessor GetPre(Reader &r) {
  uint32_t d = r.Dim();
  Preprocessor pre;
  pre.mean = r.Vec(d);
  pre.whitener = r.Mat(d, d);
  return pre;
}

void PutPlda(Writer &w, const PldaModel &m) {
  w.U32(static_cast<uint32_t>(m.Dim()));
  w.U32(static_cast<uint32_t>(m.Rank()));
  w.Vec(m.mu);
  w.Mat(m.phi);
  w.Mat(m.gamma);
}

PldaModel GetPlda(Reader &r) {
  uint32_t d = r.Dim(), rank = r.Dim();
  PldaModel m;
  m.mu = r.Vec(d);
  m.phi = r.Mat(d, rank);
  m.gamma = r.Mat(d, d);
  return m;
}

void CheckChain(const Preprocessor &pre, const PldaModel &model, const std::string &path) {
  if (pre.Dim() != model.Dim())
    throw Error(ErrorKind::kDimension, path + ": preprocessor dimension " +
                                           std::to_string(pre.Dim()) + " != model dimension " +
                                           std::to_string(model.Dim()));
}

template <typename Fn>
auto ReadBinary(const std::string &path, Fn fn) {
  std::ifstream is(path, std::ios::in | std::ios::binary);
  if (!is) throw Error(ErrorKind::kIo, "cannot open " + path + " for reading");
  Reader r(is, path);
  auto out = fn(r);
  r.End();
  return out;
}

}  // namespace

void WritePreprocessor(const std::string &path, const Preprocessor &pre) {
  WriteFileAtomically(
      path,
      [&](std::ostream &os) {
        Writer w(os);
        w.Magic(kPreMagic);
        PutPre(w, pre);
      },
      true);
}

Preprocessor ReadPreprocessor(const std::string &path) {
  return ReadBinary(path, [](Reader &r) {
    r.Magic(kPreMagic);
    return GetPre(r);
  });
}

void WritePldaBundle(const std::string &path, const PldaBundle &bundle) {
  CheckChain(bundle.pre, bundle.model, path);
  WriteFileAtomically(
      path,
      [&](std::ostream &os) {
        Writer w(os);
        w.Magic(kPldaMagic);
        PutPre(w, bundle.pre);
        PutPlda(w, bundle.model);
      },
      true);
}

PldaBundle ReadPldaBundle(const std::string &path) {
  PldaBundle b = ReadBinary(path, [](Reader &r) {
    r.Magic(kPldaMagic);
    PldaBundle out;
    out.pre = GetPre(r);
    out.model = GetPlda(r);
    return out;
  });
  CheckChain(b.pre, b.model, path);
  b.model.Validate();
  return b;
}

void WriteFourCovSystem(const std::string &path, const FourCovSystem &system) {
  CheckChain(system.pre1, system.model.plda1, path);
  CheckChain(system.pre2, system.model.plda2, path);
  WriteFileAtomically(
      path,
      [&](std::ostream &os) {
        Writer w(os);
        w.Magic(kFourCovMagic);
        w.U32(system.average_mode == AverageMode::kMeanOnly ? 1 : 0);
        PutPre(w, system.pre1);
        PutPlda(w, system.model.plda1);
        PutPre(w, system.pre2);
        PutPlda(w, system.model.plda2);
        w.Mat(system.model.a);
        w.Mat(system.model.m);
      },
      true);
}

FourCovSystem ReadFourCovSystem(const std::string &path) {
  FourCovSystem s = ReadBinary(path, [](Reader &r) {
    r.Magic(kFourCovMagic);
    FourCovSystem out;
    out.average_mode = r.U32() == 1 ? AverageMode::kMeanOnly : AverageMode::kNormalizeMembers;
    out.pre1 = GetPre(r);
    out.model.plda1 = GetPlda(r);
    out.pre2 = GetPre(r);
    out.model.plda2 = GetPlda(r);
    out.model.a = r.Mat(out.model.plda2.Rank(), out.model.plda1.Rank());
    out.model.m = r.Mat(out.model.plda2.Rank(), out.model.plda2.Rank());
    return out;
  });
  CheckChain(s.pre1, s.model.plda1, path);
  CheckChain(s.pre2, s.model.plda2, path);
  s.model.Validate();
  s.Rebuild();
  return s;
}

}  // namespace spkback
