// src/io.cc

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

#include "spkback/io.h"

#include <bit>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spkback/error.h"

namespace spkback {

namespace {

constexpr char kEmbeddingMagic[8] = {'S', 'P', 'K', 'B', 'E', 'M', 'B', '1'};

static_assert(std::endian::native == std::endian::little,
              "binary embedding I/O assumes a little-endian host");

std::vector<std::string_view> SplitWhitespace(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

// Calls fn(fields, line_number) for each non-comment, non-blank line.
template <typename Fn>
void ForEachRecord(std::istream &is, Fn fn) {
  std::string line;
  int line_number = 0;
  while (std::getline(is, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = SplitWhitespace(line);
    if (fields.empty() || fields.front().front() == '#') continue;
    fn(fields, line_number);
  }
}

[[noreturn]] void ThrowParse(const std::string &source, int line,
                             const std::string &what) {
  throw Error(ErrorKind::kParse,
              source + ":" + std::to_string(line) + ": " + what);
}

std::ifstream OpenInput(const std::string &path, bool binary = false) {
  std::ifstream is(path, binary ? std::ios::in | std::ios::binary : std::ios::in);
  if (!is) throw Error(ErrorKind::kIo, "cannot open " + path + " for reading");
  return is;
}

template <typename Fn>
auto ReadFile(const std::string &path, Fn fn) {
  std::ifstream is = OpenInput(path);
  return fn(is, path);
}

}  // namespace

std::string FormatDouble(double value) {
  char buf[64];
  auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

bool ParseDouble(std::string_view token, double *value) {
  if (token.empty()) return false;
  // from_chars rejects a leading '+', which some tools emit.
  if (token.front() == '+') token.remove_prefix(1);
  auto result = std::from_chars(token.data(), token.data() + token.size(), *value);
  return result.ec == std::errc() && result.ptr == token.data() + token.size();
}

std::vector<Embedding> ReadEmbeddingsText(std::istream &is,
                                          const std::string &source) {
  std::vector<Embedding> out;
  ForEachRecord(is, [&](const std::vector<std::string_view> &fields, int line) {
    if (fields.size() < 2)
      ThrowParse(source, line, "embedding record needs an id and at least one value");
    Embedding e;
    e.id = std::string(fields[0]);
    e.vector.resize(static_cast<Eigen::Index>(fields.size() - 1));
    for (size_t i = 1; i < fields.size(); ++i) {
      double v;
      if (!ParseDouble(fields[i], &v) || !std::isfinite(v))
        ThrowParse(source, line, "bad value '" + std::string(fields[i]) + "'");
      e.vector(static_cast<Eigen::Index>(i - 1)) = v;
    }
    if (!out.empty() && out.front().Dim() != e.Dim())
      throw Error(ErrorKind::kDimension,
                  source + ":" + std::to_string(line) + ": dimension " +
                      std::to_string(e.Dim()) + " differs from " +
                      std::to_string(out.front().Dim()));
    out.push_back(std::move(e));
  });
  return out;
}

std::vector<Embedding> ReadEmbeddingsBinary(std::istream &is,
                                            const std::string &source) {
  char magic[sizeof(kEmbeddingMagic)];
  if (!is.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kEmbeddingMagic, sizeof(magic)) != 0)
    throw Error(ErrorKind::kParse, source + ": missing binary embedding magic");
  uint32_t dim = 0;
  if (!is.read(reinterpret_cast<char *>(&dim), sizeof(dim)) || dim == 0)
    throw Error(ErrorKind::kParse, source + ": bad dimension header");
  std::vector<Embedding> out;
  std::vector<float> buf(dim);
  while (true) {
    uint32_t len = 0;
    if (!is.read(reinterpret_cast<char *>(&len), sizeof(len))) {
      if (is.gcount() == 0) break;
      throw Error(ErrorKind::kParse, source + ": truncated record " +
                                         std::to_string(out.size()));
    }
    Embedding e;
    e.id.resize(len);
    if (!is.read(e.id.data(), len) ||
        !is.read(reinterpret_cast<char *>(buf.data()), dim * sizeof(float)))
      throw Error(ErrorKind::kParse, source + ": truncated record " +
                                         std::to_string(out.size()));
    e.vector.resize(dim);
    for (uint32_t i = 0; i < dim; ++i) {
      if (!std::isfinite(buf[i]))
        throw Error(ErrorKind::kParse, source + ": non-finite value in record " +
                                           std::to_string(out.size()));
      e.vector(i) = buf[i];
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<Embedding> ReadEmbeddings(const std::string &path) {
  std::ifstream is = OpenInput(path, true);
  char magic[sizeof(kEmbeddingMagic)] = {};
  is.read(magic, sizeof(magic));
  bool binary = is.gcount() == sizeof(magic) &&
                std::memcmp(magic, kEmbeddingMagic, sizeof(magic)) == 0;
  is.clear();
  is.seekg(0);
  return binary ? ReadEmbeddingsBinary(is, path) : ReadEmbeddingsText(is, path);
}

void WriteEmbeddingsText(std::ostream &os,
                         const std::vector<Embedding> &embeddings) {
  for (const Embedding &e : embeddings) {
    os << e.id << ' ';
    for (Eigen::Index i = 0; i < e.Dim(); ++i)
      os << ' ' << FormatDouble(e.vector(i));
    os << '\n';
  }
}

void WriteEmbeddingsBinary(std::ostream &os,
                           const std::vector<Embedding> &embeddings) {
  uint32_t dim = embeddings.empty() ? 1 : static_cast<uint32_t>(embeddings[0].Dim());
  os.write(kEmbeddingMagic, sizeof(kEmbeddingMagic));
  os.write(reinterpret_cast<const char *>(&dim), sizeof(dim));
  std::vector<float> buf(dim);
  for (const Embedding &e : embeddings) {
    if (static_cast<uint32_t>(e.Dim()) != dim)
      throw Error(ErrorKind::kDimension, "embedding " + e.id + " has dimension " +
                                             std::to_string(e.Dim()) + ", expected " +
                                             std::to_string(dim));
    uint32_t len = static_cast<uint32_t>(e.id.size());
    os.write(reinterpret_cast<const char *>(&len), sizeof(len));
    os.write(e.id.data(), len);
    for (uint32_t i = 0; i < dim; ++i) buf[i] = static_cast<float>(e.vector(i));
    os.write(reinterpret_cast<const char *>(buf.data()), dim * sizeof(float));
  }
}

void WriteEmbeddings(const std::string &path,
                     const std::vector<Embedding> &embeddings,
                     EmbeddingFormat format) {
  bool binary = format == EmbeddingFormat::kBinary;
  WriteFileAtomically(
      path,
      [&](std::ostream &os) {
        if (binary)
          WriteEmbeddingsBinary(os, embeddings);
        else
          WriteEmbeddingsText(os, embeddings);
      },
      binary);
}

TrialList ReadTrials(std::istream &is, const std::string &source) {
  TrialList trials;
  ForEachRecord(is, [&](const std::vector<std::string_view> &fields, int line) {
    if (fields.size() != 2 && fields.size() != 3)
      ThrowParse(source, line, "trial record needs 2 or 3 fields");
    Trial t;
    t.enroll_id = std::string(fields[0]);
    t.test_id = std::string(fields[1]);
    if (fields.size() == 3) {
      std::string_view label = fields[2];
      if (label == "tgt" || label == "target")
        t.label = TrialLabel::kTarget;
      else if (label == "non" || label == "nontarget")
        t.label = TrialLabel::kNontarget;
      else
        ThrowParse(source, line, "label must be tgt or non, got '" +
                                     std::string(label) + "'");
    }
    trials.entries.push_back(std::move(t));
  });
  trials.CheckUnique();
  return trials;
}

TrialList ReadTrials(const std::string &path) {
  return ReadFile(path, [](std::istream &is, const std::string &p) {
    return ReadTrials(is, p);
  });
}

void WriteTrials(const std::string &path, const TrialList &trials) {
  WriteFileAtomically(path, [&](std::ostream &os) {
    for (const Trial &t : trials.entries) {
      os << t.enroll_id << ' ' << t.test_id;
      if (t.label) os << (*t.label == TrialLabel::kTarget ? " tgt" : " non");
      os << '\n';
    }
  });
}

ScoreSet ReadScores(std::istream &is, const std::string &source) {
  ScoreSet scores;
  ForEachRecord(is, [&](const std::vector<std::string_view> &fields, int line) {
    if (fields.size() != 3) ThrowParse(source, line, "score record needs 3 fields");
    ScoreEntry e{std::string(fields[0]), std::string(fields[1]), 0.0};
    if (!ParseDouble(fields[2], &e.score) || !std::isfinite(e.score))
      ThrowParse(source, line, "bad score '" + std::string(fields[2]) + "'");
    scores.entries.push_back(std::move(e));
  });
  return scores;
}

ScoreSet ReadScores(const std::string &path) {
  return ReadFile(path, [](std::istream &is, const std::string &p) {
    return ReadScores(is, p);
  });
}

void WriteScores(std::ostream &os, const ScoreSet &scores) {
  for (const ScoreEntry &e : scores.entries)
    os << e.enroll_id << ' ' << e.test_id << ' ' << FormatDouble(e.score) << '\n';
}

void WriteScores(const std::string &path, const ScoreSet &scores) {
  WriteFileAtomically(path, [&](std::ostream &os) { WriteScores(os, scores); });
}

std::map<std::string, std::string> ReadStringMap(const std::string &path) {
  std::ifstream is = OpenInput(path);
  std::map<std::string, std::string> map;
  ForEachRecord(is, [&](const std::vector<std::string_view> &fields, int line) {
    if (fields.size() != 2) ThrowParse(path, line, "expected 2 fields");
    if (!map.emplace(fields[0], fields[1]).second)
      ThrowParse(path, line, "duplicate key " + std::string(fields[0]));
  });
  return map;
}

std::map<std::string, int> ReadIntMap(const std::string &path) {
  std::ifstream is = OpenInput(path);
  std::map<std::string, int> map;
  ForEachRecord(is, [&](const std::vector<std::string_view> &fields, int line) {
    if (fields.size() != 2) ThrowParse(path, line, "expected 2 fields");
    int value = 0;
    auto r = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(),
                             value);
    if (r.ec != std::errc() || r.ptr != fields[1].data() + fields[1].size())
      ThrowParse(path, line, "bad integer '" + std::string(fields[1]) + "'");
    if (!map.emplace(fields[0], value).second)
      ThrowParse(path, line, "duplicate key " + std::string(fields[0]));
  });
  return map;
}

std::map<std::string, std::vector<std::string>> ReadListMap(
    const std::string &path) {
  std::ifstream is = OpenInput(path);
  std::map<std::string, std::vector<std::string>> map;
  ForEachRecord(is, [&](const std::vector<std::string_view> &fields, int line) {
    if (fields.size() < 2) ThrowParse(path, line, "expected a key and at least one id");
    std::vector<std::string> ids(fields.begin() + 1, fields.end());
    if (!map.emplace(fields[0], std::move(ids)).second)
      ThrowParse(path, line, "duplicate key " + std::string(fields[0]));
  });
  return map;
}

void WriteStringMap(const std::string &path,
                    const std::map<std::string, std::string> &map) {
  WriteFileAtomically(path, [&](std::ostream &os) {
    for (const auto &[k, v] : map) os << k << ' ' << v << '\n';
  });
}

void WriteIntMap(const std::string &path, const std::map<std::string, int> &map) {
  WriteFileAtomically(path, [&](std::ostream &os) {
    for (const auto &[k, v] : map) os << k << ' ' << v << '\n';
  });
}

void WriteListMap(const std::string &path,
                  const std::map<std::string, std::vector<std::string>> &map) {
  WriteFileAtomically(path, [&](std::ostream &os) {
    for (const auto &[k, ids] : map) {
      os << k;
      for (const std::string &id : ids) os << ' ' << id;
      os << '\n';
    }
  });
}

void WriteFileAtomically(const std::string &path,
                         const std::function<void(std::ostream &)> &writer,
                         bool binary) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, binary ? std::ios::out | std::ios::binary | std::ios::trunc
                                 : std::ios::out | std::ios::trunc);
    if (!os) throw Error(ErrorKind::kIo, "cannot open " + tmp + " for writing");
    try {
      writer(os);
    } catch (...) {
      os.close();
      std::remove(tmp.c_str());
      throw;
    }
    os.flush();
    if (!os) {
      std::remove(tmp.c_str());
      throw Error(ErrorKind::kIo, "write failed for " + path);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw Error(ErrorKind::kIo, "cannot rename " + tmp + " to " + path + ": " +
                                    ec.message());
  }
}

}  // namespace spkback
