// src/system.cc

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

#include "spkback/system.h"

#include <algorithm>
#include <map>

#include "spkback/error.h"

namespace spkback {

namespace {

int ClipRank(int rank, Eigen::Index dim) {
  return static_cast<int>(std::min<Eigen::Index>(rank, dim));
}

std::vector<Embedding> Flatten(const std::vector<SpeakerGroup> &groups) {
  std::vector<Embedding> out;
  for (const SpeakerGroup &g : groups)
    out.insert(out.end(), g.members.begin(), g.members.end());
  return out;
}

Eigen::Index DimOf(const std::vector<SpeakerGroup> &groups, const char *what) {
  for (const SpeakerGroup &g : groups)
    if (!g.members.empty()) return g.Dim();
  throw Error(ErrorKind::kDomain, std::string("no training data for ") + what);
}

}  // namespace

Embedding FourCovSystem::PrepareEnroll(const SpeakerGroup &sample) const {
  return EnrollAverage(sample, pre1, average_mode);
}

std::vector<Embedding> FourCovSystem::PrepareEnrolls(
    const std::vector<SpeakerGroup> &samples) const {
  std::vector<Embedding> out;
  out.reserve(samples.size());
  for (const SpeakerGroup &s : samples) out.push_back(PrepareEnroll(s));
  return out;
}

std::vector<Embedding> FourCovSystem::PrepareTests(const std::vector<Embedding> &raw) const {
  return pre2.Apply(raw);
}

std::vector<SpeakerGroup> MakeLAverages(const std::vector<SpeakerGroup> &raw,
                                        const Preprocessor &pre, int size,
                                        AverageMode mode) {
  if (size < 1) throw Error(ErrorKind::kParameter, "L-average size must be positive");
  std::vector<SpeakerGroup> out;
  out.reserve(raw.size());
  for (const SpeakerGroup &g : raw) {
    SpeakerGroup averaged{g.speaker_id, {}};
    const int n = g.Size();
    for (int begin = 0; begin < n; begin += size) {
      int end = std::min(n, begin + size);
      if (end - begin < size && !averaged.members.empty()) break;
      SpeakerGroup chunk{g.speaker_id,
                         std::vector<Embedding>(g.members.begin() + begin,
                                                g.members.begin() + end)};
      Embedding e = EnrollAverage(chunk, pre, mode);
      e.id = g.members[begin].id;
      averaged.members.push_back(std::move(e));
    }
    if (!averaged.members.empty()) out.push_back(std::move(averaged));
  }
  return out;
}

std::vector<SpeakerGroup> PrepareGroups(const std::vector<SpeakerGroup> &raw,
                                        const Preprocessor &pre) {
  std::vector<SpeakerGroup> out;
  out.reserve(raw.size());
  for (const SpeakerGroup &g : raw) out.push_back({g.speaker_id, pre.Apply(g.members)});
  return out;
}

// Appends `more` to the groups of `examples`, matching speakers by id.
static void MergeGroups(std::vector<SpeakerGroup> *examples, const std::vector<SpeakerGroup> &more) {
  std::map<std::string, size_t> index;
  for (size_t i = 0; i < examples->size(); ++i) index.emplace((*examples)[i].speaker_id, i);
  for (const SpeakerGroup &g : more) {
    auto [it, inserted] = index.emplace(g.speaker_id, examples->size());
    if (inserted)
      examples->push_back(g);
    else
      (*examples)[it->second].members.insert((*examples)[it->second].members.end(),
                                             g.members.begin(), g.members.end());
  }
}

static std::vector<Embedding> FlattenSets(const std::vector<Side1Set> &sets) {
  std::vector<Embedding> out;
  for (const Side1Set &set : sets) {
    std::vector<Embedding> flat = Flatten(set.raw);
    out.insert(out.end(), flat.begin(), flat.end());
  }
  return out;
}

static std::vector<SpeakerGroup> AverageSets(const std::vector<Side1Set> &sets,
                                      const Preprocessor &pre, AverageMode mode) {
  std::vector<SpeakerGroup> examples;
  for (const Side1Set &set : sets)
    MergeGroups(&examples, MakeLAverages(set.raw, pre, set.average_size, mode));
  return examples;
}

FourCovSystem TrainFourCovSystem(const std::vector<Side1Set> &side1_sets,
                                 const std::vector<SpeakerGroup> &side2_raw,
                                 const SystemTrainOptions &opts,
                                 const std::vector<SpeakerGroup> *side2_out_domain) {
  FourCovSystem system;
  system.average_mode = opts.average_mode;
  std::vector<Embedding> side1_flat = FlattenSets(side1_sets);
  if (side1_flat.empty()) throw Error(ErrorKind::kDomain, "no training data for side 1");
  const Eigen::Index d1 = side1_flat[0].Dim(), d2 = DimOf(side2_raw, "side 2");

  system.pre1 = FitPreprocessor(side1_flat);
  std::vector<SpeakerGroup> side1 = AverageSets(side1_sets, system.pre1, opts.average_mode);
  PldaTrainOptions p1{ClipRank(opts.rank1, d1), opts.iterations};
  PldaModel plda1 = TrainPlda(side1, p1);

  system.pre2 = FitPreprocessor(Flatten(side2_raw));
  std::vector<SpeakerGroup> side2 = PrepareGroups(side2_raw, system.pre2);
  PldaTrainOptions p2{ClipRank(opts.rank2, d2), opts.iterations};
  PldaModel plda2 = TrainPlda(side2, p2);
  if (side2_out_domain != nullptr) {
    PldaModel out_domain = TrainPlda(PrepareGroups(*side2_out_domain, system.pre2), p2);
    plda2 = InterpolatePlda(plda2, out_domain, opts.alpha);
  }

  std::map<std::string, size_t> side2_index;
  for (size_t i = 0; i < side2.size(); ++i) side2_index.emplace(side2[i].speaker_id, i);
  std::vector<std::pair<SpeakerGroup, SpeakerGroup>> pairs;
  for (const SpeakerGroup &g1 : side1) {
    auto it = side2_index.find(g1.speaker_id);
    if (it != side2_index.end()) pairs.emplace_back(g1, side2[it->second]);
  }
  system.model = FitCoupling(plda1, plda2, pairs);
  system.Rebuild();
  return system;
}

FourCovSystem TrainFourCovSystem(const std::vector<SpeakerGroup> &side1_raw,
                                 const std::vector<SpeakerGroup> &side2_raw,
                                 const SystemTrainOptions &opts,
                                 const std::vector<SpeakerGroup> *side2_out_domain) {
  return TrainFourCovSystem({Side1Set{side1_raw, opts.enroll_average_size}}, side2_raw, opts,
                            side2_out_domain);
}

FourCovSystem TrainSymmetricSystem(const std::vector<Side1Set> &side1_sets,
                                   const std::vector<SpeakerGroup> &side2_raw,
                                   const SystemTrainOptions &opts) {
  FourCovSystem system;
  system.average_mode = opts.average_mode;
  std::vector<Embedding> pooled = FlattenSets(side1_sets);
  std::vector<Embedding> side2_flat = Flatten(side2_raw);
  pooled.insert(pooled.end(), side2_flat.begin(), side2_flat.end());
  Preprocessor pre = FitPreprocessor(pooled);

  std::vector<SpeakerGroup> examples = AverageSets(side1_sets, pre, opts.average_mode);
  MergeGroups(&examples, PrepareGroups(side2_raw, pre));
  PldaTrainOptions p{ClipRank(opts.rank1, pre.Dim()), opts.iterations};
  system.pre1 = pre;
  system.pre2 = pre;
  system.model = MakeSymmetricModel(TrainPlda(examples, p));
  system.Rebuild();
  return system;
}

FourCovSystem TrainSymmetricSystem(const std::vector<SpeakerGroup> &side1_raw,
                                   const std::vector<SpeakerGroup> &side2_raw,
                                   const SystemTrainOptions &opts) {
  return TrainSymmetricSystem({Side1Set{side1_raw, opts.enroll_average_size}}, side2_raw, opts);
}

ScoreSet ScoreRaw(const FourCovSystem &system, const std::vector<SpeakerGroup> &enrolls,
                  const std::vector<Embedding> &tests, const TrialList &trials) {
  return ScoreBatch(system.kernel, system.PrepareEnrolls(enrolls),
                    system.PrepareTests(tests), trials);
}

}  // namespace spkback
