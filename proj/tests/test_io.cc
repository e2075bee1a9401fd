// tests/test_io.cc

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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "spkback/io.h"
#include "test_util.h"

namespace spkback {

namespace {

std::string TempPath(const std::string &name) {
  return (std::filesystem::temp_directory_path() / ("spkback-test-" + name)).string();
}

}  // namespace

TEST_CASE("text embeddings parse") {
  std::istringstream is("spkA-utt1  0.1 0.2\nspkA-utt2  0.3 0.4\n");
  auto list = ReadEmbeddingsText(is);
  REQUIRE(list.size() == 2);
  CHECK(list[0].Dim() == 2);
  CHECK(list[1].vector(1) == doctest::Approx(0.4));
}

TEST_CASE("empty embedding file") {
  std::istringstream is("");
  CHECK(ReadEmbeddingsText(is).empty());
}

TEST_CASE("mixed dimensions rejected") {
  std::istringstream is("a 0.1 0.2\nb 0.1 0.2 0.3\n");
  CHECK(ThrowsKind(ErrorKind::kDimension, [&] { ReadEmbeddingsText(is); }));
}

TEST_CASE("malformed number rejected") {
  std::istringstream is("a 0.1 zz\n");
  CHECK(ThrowsKind(ErrorKind::kParse, [&] { ReadEmbeddingsText(is); }));
}

TEST_CASE("embedding round trips") {
  std::vector<Embedding> list{{"x-1", Vector::LinSpaced(5, -1.0 / 3.0, 1e5 / 7.0)},
                              {"x-2", Vector::Constant(5, 1e-30)}};
  // The binary format stores 32-bit floats.
  std::vector<Embedding> floats = list;
  for (Embedding &e : floats) e.vector = e.vector.cast<float>().cast<double>();
  SUBCASE("text") {
    std::stringstream ss;
    WriteEmbeddingsText(ss, list);
    auto back = ReadEmbeddingsText(ss);
    REQUIRE(back.size() == 2);
    for (size_t i = 0; i < 2; ++i) {
      CHECK(back[i].id == list[i].id);
      for (Eigen::Index j = 0; j < 5; ++j)
        CHECK(std::abs(back[i].vector(j) - list[i].vector(j)) <=
              1e-12 * std::abs(list[i].vector(j)));
    }
  }
  SUBCASE("binary is bit exact") {
    std::stringstream ss;
    WriteEmbeddingsBinary(ss, floats);
    auto back = ReadEmbeddingsBinary(ss);
    REQUIRE(back.size() == 2);
    for (size_t i = 0; i < 2; ++i) CHECK(back[i].vector == floats[i].vector);
  }
  SUBCASE("file with format detection") {
    std::string path = TempPath("emb.bin");
    WriteEmbeddings(path, floats, EmbeddingFormat::kBinary);
    auto back = ReadEmbeddings(path);
    CHECK(back[1].vector == floats[1].vector);
    std::remove(path.c_str());
  }
}

TEST_CASE("scores round trip") {
  ScoreSet scores{{{"e1", "t1", 1.0 / 3.0}, {"e1", "t2", -2.5e-7}, {"e2", "t1", 12345.678}}};
  std::stringstream ss;
  WriteScores(ss, scores);
  ScoreSet back = ReadScores(ss);
  REQUIRE(back.Size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(back.entries[i].enroll_id == scores.entries[i].enroll_id);
    CHECK(back.entries[i].test_id == scores.entries[i].test_id);
    CHECK(std::abs(back.entries[i].score - scores.entries[i].score) <= 1e-12);
  }
}

TEST_CASE("trial labels optional") {
  std::istringstream labeled("e1 t1 tgt\ne1 t2 non\n");
  TrialList a = ReadTrials(labeled);
  REQUIRE(a.Size() == 2);
  CHECK(a.entries[0].label == TrialLabel::kTarget);
  CHECK(a.entries[1].label == TrialLabel::kNontarget);
  std::istringstream bare("e1 t1\n");
  TrialList b = ReadTrials(bare);
  CHECK_FALSE(b.entries[0].label.has_value());
  std::istringstream bad("e1 t1 maybe\n");
  CHECK(ThrowsKind(ErrorKind::kParse, [&] { ReadTrials(bad); }));
}

TEST_CASE("missing file is an io error") {
  CHECK(ThrowsKind(ErrorKind::kIo, [] { ReadEmbeddings("/nonexistent/dir/x.emb"); }));
}

TEST_CASE("maps round trip") {
  std::string path = TempPath("map.txt");
  WriteListMap(path, {{"m1", {"a", "b"}}, {"m2", {"c"}}});
  auto m = ReadListMap(path);
  CHECK(m["m1"].size() == 2);
  CHECK(m["m2"][0] == "c");
  WriteIntMap(path, {{"m1", 3}});
  CHECK(ReadIntMap(path).at("m1") == 3);
  std::remove(path.c_str());
}

}  // namespace spkback
