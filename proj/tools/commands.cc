// tools/commands.cc

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

#include "commands.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include <json.hpp>

#include "spkback/calibration.h"
#include "spkback/error.h"
#include "spkback/io.h"
#include "spkback/model-io.h"
#include "spkback/routing.h"
#include "spkback/synth.h"

namespace spkback {
namespace cli {

namespace fs = std::filesystem;

namespace {

// Every input is checked before any work starts.
void RequireFiles(std::initializer_list<const std::string *> paths) {
  for (const std::string *p : paths)
    if (!p->empty() && !fs::is_regular_file(*p))
      throw Error(ErrorKind::kIo, "input file not found: " + *p);
}

void RequireFile(const std::string &path) { RequireFiles({&path}); }

EmbeddingFormat Format(bool binary) {
  return binary ? EmbeddingFormat::kBinary : EmbeddingFormat::kText;
}

std::vector<SpeakerGroup> GroupBySpeaker(const std::vector<Embedding> &list,
                                         const std::string &utt2spk) {
  return utt2spk.empty() ? GroupBySpeakerPrefix(list)
                         : GroupBySpeakerMap(list, ReadStringMap(utt2spk));
}

// Models from a model -> segment-ids map; without a map every embedding is
// a single-segment model named by its own id.
std::vector<SpeakerGroup> LoadModels(const std::vector<Embedding> &segments,
                                     const std::string &map_path) {
  std::vector<SpeakerGroup> models;
  if (map_path.empty()) {
    for (const Embedding &e : segments) models.push_back({e.id, {e}});
    return models;
  }
  std::map<std::string, size_t> index = IndexById(segments);
  for (const auto &[model, ids] : ReadListMap(map_path)) {
    SpeakerGroup g{model, {}};
    for (const std::string &id : ids) {
      auto it = index.find(id);
      if (it == index.end())
        throw Error(ErrorKind::kLookup,
                    map_path + ": model " + model + " lists unknown segment " + id);
      g.members.push_back(segments[it->second]);
    }
    models.push_back(std::move(g));
  }
  return models;
}

std::vector<SpeakerGroup> LoadModels(const TrialInputs &in) {
  return LoadModels(ReadEmbeddings(in.enroll), in.enroll_map);
}

std::map<std::string, std::vector<std::string>> ModelMap(
    const std::vector<SpeakerGroup> &models) {
  std::map<std::string, std::vector<std::string>> map;
  for (const SpeakerGroup &g : models)
    for (const Embedding &e : g.members) map[g.speaker_id].push_back(e.id);
  return map;
}

std::vector<Embedding> Flatten(const std::vector<SpeakerGroup> &groups) {
  std::vector<Embedding> out;
  for (const SpeakerGroup &g : groups)
    out.insert(out.end(), g.members.begin(), g.members.end());
  return out;
}

std::string LanguageLabel(TestLanguage lang) {
  return lang == TestLanguage::kPrimary ? "primary" : "secondary";
}

void WriteEvalSet(const fs::path &dir, const std::string &name, const EvalSet &set,
                  EmbeddingFormat format) {
  WriteEmbeddings(dir / (name + "_enroll.emb"), Flatten(set.enrolls), format);
  WriteListMap(dir / (name + "_enroll.map"), ModelMap(set.enrolls));
  WriteEmbeddings(dir / (name + "_test.emb"), set.tests, format);
  WriteTrials(dir / (name + "_trials"), set.trials);
  WriteIntMap(dir / (name + "_enroll_segments"), set.enroll_segments);
  std::map<std::string, std::string> lang;
  for (const auto &[id, l] : set.test_language) lang.emplace(id, LanguageLabel(l));
  WriteStringMap(dir / (name + "_test_language"), lang);
}

void WriteGroups(const fs::path &dir, const std::string &name,
                 const std::vector<SpeakerGroup> &groups, EmbeddingFormat format,
                 bool with_map) {
  WriteEmbeddings(dir / (name + ".emb"), Flatten(groups), format);
  if (with_map) WriteListMap(dir / (name + ".map"), ModelMap(groups));
}

fs::path Resolve(const fs::path &base, const std::string &p) {
  if (p.empty()) return {};
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

void RunSynth(const SynthOptions &opts) {
  if (opts.out_dir.empty()) throw Error(ErrorKind::kParameter, "--out-dir is required");
  BenchmarkOptions b;
  b.seed = opts.seed;
  b.truth.dim = opts.dim;
  b.truth.rank1 = b.truth.rank2 = opts.rank;
  b.truth.snr = opts.snr;
  b.truth.kappa = opts.kappa;
  b.truth.rotation = opts.rotation;
  b.eval_shift_rotation = opts.eval_shift_rotation;
  b.eval_shift_offset = opts.eval_shift_offset;
  b.test_noise_spread = opts.test_noise_spread;
  b.train_speakers = opts.train_speakers;
  b.dev_speakers = opts.dev_speakers;
  b.eval_speakers = opts.eval_speakers;
  b.cohort_speakers = opts.cohort_speakers;
  b.secondary_fraction = opts.secondary_fraction;
  Benchmark bench = SampleBenchmark(b);

  const fs::path dir(opts.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + opts.out_dir + ": " + ec.message());
  const EmbeddingFormat format = Format(opts.binary);

  WriteGroups(dir, "train_enroll_few", bench.train_side1_few, format, false);
  WriteGroups(dir, "train_enroll_many", bench.train_side1_many, format, false);
  WriteGroups(dir, "train_test", bench.train_side2, format, false);
  if (!bench.train_side2_secondary.empty())
    WriteGroups(dir, "train_test_secondary", bench.train_side2_secondary, format, false);
  WriteEvalSet(dir, "dev", bench.dev, format);
  WriteEvalSet(dir, "eval", bench.eval, format);
  WriteGroups(dir, "cohort_enroll_few", bench.cohort_enroll_few, format, true);
  WriteGroups(dir, "cohort_enroll_many", bench.cohort_enroll_many, format, true);
  WriteEmbeddings(dir / "cohort_test.emb", bench.cohort_test, format);

  auto write_truth = [&](const GroundTruth &truth, const std::string &name) {
    FourCovSystem sys;
    sys.pre1 = Preprocessor::Identity(truth.side1.Dim());
    sys.pre2 = Preprocessor::Identity(truth.side2.Dim());
    sys.model = truth.AsModel();
    WriteFourCovSystem(dir / name, sys);
  };
  write_truth(bench.truth, "truth.4cov");
  write_truth(bench.eval_truth, "truth_eval.4cov");
}

void RunPreprocess(const PreprocessOptions &opts) {
  if (opts.out.empty()) throw Error(ErrorKind::kParameter, "--out is required");
  if (opts.fit_inputs.empty() == opts.apply.empty())
    throw Error(ErrorKind::kParameter, "give exactly one of --fit or --apply");
  if (!opts.fit_inputs.empty()) {
    for (const std::string &p : opts.fit_inputs) RequireFile(p);
    std::vector<Embedding> all;
    for (const std::string &p : opts.fit_inputs) {
      std::vector<Embedding> part = ReadEmbeddings(p);
      all.insert(all.end(), part.begin(), part.end());
    }
    WritePreprocessor(opts.out, FitPreprocessor(all));
    return;
  }
  if (opts.in.empty()) throw Error(ErrorKind::kParameter, "--in is required with --apply");
  if (opts.average_size > 0 && !opts.enroll_map.empty())
    throw Error(ErrorKind::kParameter, "--average-size and --enroll-map are exclusive");
  RequireFiles({&opts.apply, &opts.in, &opts.utt2spk, &opts.enroll_map});
  const Preprocessor pre = ReadPreprocessor(opts.apply);
  const std::vector<Embedding> raw = ReadEmbeddings(opts.in);
  const AverageMode mode = opts.mean_only ? AverageMode::kMeanOnly : AverageMode::kNormalizeMembers;
  std::vector<Embedding> out;
  if (opts.average_size > 0) {
    out = Flatten(MakeLAverages(GroupBySpeaker(raw, opts.utt2spk), pre, opts.average_size, mode));
  } else if (!opts.enroll_map.empty()) {
    for (const SpeakerGroup &g : LoadModels(raw, opts.enroll_map))
      out.push_back(EnrollAverage(g, pre, mode));
  } else {
    out = pre.Apply(raw);
  }
  WriteEmbeddings(opts.out, out, Format(opts.binary));
}

void RunTrainPlda(const TrainPldaOptions &opts) {
  if (opts.in.empty() || opts.out.empty())
    throw Error(ErrorKind::kParameter, "--in and --out are required");
  RequireFiles({&opts.in, &opts.preprocessor, &opts.utt2spk});
  std::vector<Embedding> data = ReadEmbeddings(opts.in);
  if (data.empty()) throw Error(ErrorKind::kDomain, opts.in + ": no embeddings");
  PldaBundle bundle;
  bundle.pre = opts.preprocessor.empty() ? Preprocessor::Identity(data[0].Dim())
                                         : ReadPreprocessor(opts.preprocessor);
  PldaTrainOptions t;
  t.rank = static_cast<int>(std::min<Eigen::Index>(opts.rank, data[0].Dim()));
  t.iterations = opts.iterations;
  PldaTrainStats stats;
  bundle.model = TrainPlda(GroupBySpeaker(data, opts.utt2spk), t, &stats);
  for (size_t k = 0; k < stats.log_likelihood.size(); ++k)
    std::cout << "iter " << k << " loglike " << FormatDouble(stats.log_likelihood[k]) << '\n';
  WritePldaBundle(opts.out, bundle);
}

void RunFitFourCov(const FitFourCovOptions &opts) {
  if (opts.plda1.empty() || opts.out.empty())
    throw Error(ErrorKind::kParameter, "--plda1 and --out are required");
  FourCovSystem sys;
  if (opts.symmetric) {
    RequireFile(opts.plda1);
    PldaBundle b = ReadPldaBundle(opts.plda1);
    sys.pre1 = sys.pre2 = b.pre;
    sys.model = MakeSymmetricModel(b.model);
  } else {
    if (opts.plda2.empty() || opts.side1.empty() || opts.side2.empty())
      throw Error(ErrorKind::kParameter, "--plda2, --side1 and --side2 are required");
    RequireFiles({&opts.plda1, &opts.plda2, &opts.side1, &opts.side2, &opts.utt2spk1,
                  &opts.utt2spk2});
    PldaBundle b1 = ReadPldaBundle(opts.plda1), b2 = ReadPldaBundle(opts.plda2);
    std::vector<SpeakerGroup> g1 = GroupBySpeaker(ReadEmbeddings(opts.side1), opts.utt2spk1);
    std::vector<SpeakerGroup> g2 = GroupBySpeaker(ReadEmbeddings(opts.side2), opts.utt2spk2);
    std::map<std::string, size_t> index;
    for (size_t i = 0; i < g2.size(); ++i) index.emplace(g2[i].speaker_id, i);
    std::vector<std::pair<SpeakerGroup, SpeakerGroup>> pairs;
    for (const SpeakerGroup &g : g1) {
      auto it = index.find(g.speaker_id);
      if (it != index.end()) pairs.emplace_back(g, g2[it->second]);
    }
    sys.pre1 = b1.pre;
    sys.pre2 = b2.pre;
    sys.model = FitCoupling(b1.model, b2.model, pairs);
  }
  sys.Rebuild();
  WriteFourCovSystem(opts.out, sys);
}

void RunInterpolate(const InterpolateOptions &opts) {
  if (opts.in_domain.empty() || opts.out_domain.empty() || opts.out.empty())
    throw Error(ErrorKind::kParameter, "--in-domain, --out-domain and --out are required");
  RequireFiles({&opts.in_domain, &opts.out_domain});
  PldaBundle in = ReadPldaBundle(opts.in_domain), out = ReadPldaBundle(opts.out_domain);
  in.model = InterpolatePlda(in.model, out.model, opts.alpha, opts.rank);
  WritePldaBundle(opts.out, in);
}

void RunScore(const ScoreOptions &opts) {
  if (opts.model.empty() || opts.inputs.enroll.empty() || opts.inputs.test.empty() ||
      opts.trials.empty() || opts.out.empty())
    throw Error(ErrorKind::kParameter, "--model, --enroll, --test, --trials and --out are required");
  RequireFiles({&opts.model, &opts.inputs.enroll, &opts.inputs.enroll_map, &opts.inputs.test,
                &opts.trials});
  FourCovSystem sys = ReadFourCovSystem(opts.model);
  ScoreSet scores = ScoreRaw(sys, LoadModels(opts.inputs), ReadEmbeddings(opts.inputs.test),
                             ReadTrials(opts.trials));
  WriteScores(opts.out, scores);
}

void RunSnorm(const SnormOptions &opts) {
  if (opts.model.empty() || opts.scores.empty() || opts.inputs.enroll.empty() ||
      opts.inputs.test.empty() || opts.cohort_enroll.empty() || opts.cohort_test.empty() ||
      opts.out.empty())
    throw Error(ErrorKind::kParameter,
                "--model, --scores, --enroll, --test, --cohort-enroll, --cohort-test and "
                "--out are required");
  if (opts.top_k < 0) throw Error(ErrorKind::kParameter, "--top-k must be >= 0");
  RequireFiles({&opts.model, &opts.scores, &opts.inputs.enroll, &opts.inputs.enroll_map,
                &opts.inputs.test, &opts.cohort_enroll, &opts.cohort_enroll_map,
                &opts.cohort_test});
  FourCovSystem sys = ReadFourCovSystem(opts.model);
  ScoreSet raw = ReadScores(opts.scores);
  CohortSet cohorts;
  cohorts.enroll_cohort =
      sys.PrepareEnrolls(LoadModels(ReadEmbeddings(opts.cohort_enroll), opts.cohort_enroll_map));
  cohorts.test_cohort = sys.PrepareTests(ReadEmbeddings(opts.cohort_test));
  cohorts.top_k = opts.top_k == 0 ? std::nullopt : std::optional<int>(opts.top_k);
  std::vector<Embedding> e = sys.PrepareEnrolls(LoadModels(opts.inputs));
  std::vector<Embedding> t = sys.PrepareTests(ReadEmbeddings(opts.inputs.test));
  WriteScores(opts.out, SnormBatch(sys.kernel, cohorts, e, t, raw));
}

void RunCalibrate(const CalibrateOptions &opts) {
  if (opts.scores.empty() || opts.out.empty())
    throw Error(ErrorKind::kParameter, "--scores and --out are required");
  if (opts.trials.empty() == opts.apply.empty())
    throw Error(ErrorKind::kParameter, "give exactly one of --trials (fit) or --apply");
  RequireFiles({&opts.scores, &opts.trials, &opts.apply});
  ScoreSet scores = ReadScores(opts.scores);
  if (!opts.apply.empty()) {
    WriteScores(opts.out, ApplyCalibration(ReadCalibration(opts.apply), scores));
    return;
  }
  CalibrationOptions c;
  c.effective_prior = opts.effective_prior;
  CalibrationModel model = FitCalibration(scores, ReadTrials(opts.trials), c);
  model.condition = opts.condition;
  WriteCalibration(opts.out, model);
}

void RunRouteScore(const RouteScoreOptions &opts) {
  if (opts.config.empty() || opts.inputs.enroll.empty() || opts.inputs.test.empty() ||
      opts.trials.empty() || opts.test_language.empty() || opts.out.empty())
    throw Error(ErrorKind::kParameter,
                "--config, --enroll, --test, --trials, --test-language and --out are required");
  RequireFiles({&opts.config, &opts.inputs.enroll, &opts.inputs.enroll_map, &opts.inputs.test,
                &opts.trials, &opts.test_language, &opts.enroll_segments});

  nlohmann::json cfg;
  {
    std::ifstream is(opts.config);
    try {
      cfg = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception &e) {
      throw Error(ErrorKind::kParse, opts.config + ": " + e.what());
    }
  }
  const fs::path base = fs::path(opts.config).parent_path();
  struct Entry {
    ConditionKey key;
    fs::path model, calibration, cohort_enroll, cohort_enroll_map, cohort_test;
  };
  std::vector<Entry> entries;
  int threshold = 5;
  std::string primary = "primary", secondary = "secondary";
  std::optional<int> top_k = kDefaultTopK;
  try {
    threshold = cfg.value("enroll_seg_threshold", 5);
    primary = cfg.value("primary_label", primary);
    secondary = cfg.value("secondary_label", secondary);
    if (cfg.contains("top_k")) {
      int k = cfg.at("top_k").get<int>();
      top_k = k == 0 ? std::nullopt : std::optional<int>(k);
    }
    for (const auto &[name, c] : cfg.at("conditions").items()) {
      std::optional<ConditionKey> key = ParseConditionName(name);
      if (!key) throw Error(ErrorKind::kRouting, opts.config + ": unknown condition " + name);
      auto path = [&](const char *field) {
        return Resolve(base, c.contains(field) ? c.at(field).get<std::string>() : "");
      };
      entries.push_back({*key, path("model"), path("calibration"), path("cohort_enroll"),
                         path("cohort_enroll_map"), path("cohort_test")});
      if (entries.back().model.empty())
        throw Error(ErrorKind::kRouting, opts.config + ": condition " + name + " has no model");
      if (entries.back().cohort_enroll.empty() != entries.back().cohort_test.empty())
        throw Error(ErrorKind::kRouting, opts.config + ": condition " + name +
                                             " needs both cohort_enroll and cohort_test");
    }
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorKind::kRouting, opts.config + ": " + e.what());
  }
  if (opts.top_k) top_k = *opts.top_k == 0 ? std::nullopt : std::optional<int>(*opts.top_k);
  for (const Entry &e : entries)
    for (const fs::path *p : {&e.model, &e.calibration, &e.cohort_enroll, &e.cohort_enroll_map,
                              &e.cohort_test})
      RequireFile(p->string());

  const std::vector<Embedding> raw_enroll = ReadEmbeddings(opts.inputs.enroll);
  const std::vector<SpeakerGroup> models = LoadModels(raw_enroll, opts.inputs.enroll_map);
  RoutingConfig config;
  config.enroll_seg_threshold = threshold;
  if (!opts.enroll_segments.empty()) {
    config.enroll_segments = ReadIntMap(opts.enroll_segments);
  } else {
    for (const SpeakerGroup &g : models) config.enroll_segments[g.speaker_id] = g.Size();
  }
  config.test_language = ParseLanguageMap(ReadStringMap(opts.test_language), primary, secondary);
  for (const Entry &e : entries) {
    FourCovSystem sys = ReadFourCovSystem(e.model.string());
    CalibrationModel cal;
    if (!e.calibration.empty()) cal = ReadCalibration(e.calibration.string());
    std::optional<std::vector<SpeakerGroup>> ce;
    std::optional<std::vector<Embedding>> ct;
    if (!e.cohort_enroll.empty()) {
      ce = LoadModels(ReadEmbeddings(e.cohort_enroll.string()), e.cohort_enroll_map.string());
      ct = ReadEmbeddings(e.cohort_test.string());
    }
    config.models.emplace(e.key, MakeConditionPipeline(std::move(sys), ce ? &*ce : nullptr,
                                                       ct ? &*ct : nullptr, top_k, cal));
  }
  ScoreSet scores =
      RouteAndScore(config, models, ReadEmbeddings(opts.inputs.test), ReadTrials(opts.trials));
  WriteScores(opts.out, scores);
}

void RunEvaluate(const EvaluateOptions &opts) {
  if (opts.scores.empty() || opts.trials.empty())
    throw Error(ErrorKind::kParameter, "--scores and --trials are required");
  RequireFiles({&opts.scores, &opts.trials});
  opts.dcf.Normalizer();
  LabeledScores labeled = JoinLabels(ReadScores(opts.scores), ReadTrials(opts.trials));
  std::vector<DetPoint> det = DetPoints(labeled);
  double eer = EerFromDetPoints(det);
  double min_dcf = MinDcfFromDetPoints(det, opts.dcf);
  char line[64];
  std::snprintf(line, sizeof(line), "EER%% %.2f\n", 100.0 * eer);
  std::cout << line;
  std::snprintf(line, sizeof(line), "minDCF %.4f\n", min_dcf);
  std::cout << line;
  if (!opts.det.empty()) {
    WriteFileAtomically(opts.det, [&](std::ostream &os) {
      os << "# p_fa p_miss\n";
      for (const DetPoint &p : det) os << FormatDouble(p.p_fa) << ' ' << FormatDouble(p.p_miss) << '\n';
    });
  }
}

}  // namespace cli
}  // namespace spkback
