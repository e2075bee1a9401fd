// src/synth.cc

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

#include "spkback/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

#include "spkback/error.h"
#include "spkback/linalg.h"

namespace spkback {

namespace {

// Stream tags; each (seed, stream, index) triple seeds its own engine.
constexpr uint64_t kTruthStream = 100;
constexpr uint64_t kFactorStream = 101;
constexpr uint64_t kBucketStream = 102;
constexpr uint64_t kTrialStream = 103;
constexpr uint64_t kShiftStream = 104;

std::mt19937_64 MakeEngine(uint64_t seed, uint64_t stream, uint64_t index) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(stream), static_cast<uint32_t>(stream >> 32),
                    static_cast<uint32_t>(index), static_cast<uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

Matrix Gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64 &rng) {
  std::normal_distribution<double> normal;
  Matrix out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = normal(rng);
  return out;
}

// Cayley transform of a random skew matrix, scaled so the largest rotation
// angle is `angle`.
Matrix RandomRotation(Eigen::Index dim, double angle, std::mt19937_64 &rng) {
  Matrix identity = Matrix::Identity(dim, dim);
  if (angle == 0.0) return identity;
  if (!(angle > 0.0 && angle < M_PI))
    throw Error(ErrorKind::kParameter, "rotation angle must be in [0, pi)");
  Matrix g = Gaussian(dim, dim, rng);
  Matrix s = g - g.transpose();
  Eigen::JacobiSVD<Matrix> svd(s);
  double norm = svd.singularValues()(0);
  s *= std::tan(angle / 2.0) / norm;
  return (identity - s).partialPivLu().solve(identity + s);
}

// Some L with L L^t = m for a PSD m; works for m = 0.
Matrix PsdFactor(const Matrix &m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(Symmetrize(m));
  Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

double GaussianLogPdf(const Matrix &cov, const Vector &x) {
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::kNumerical, "joint covariance is not positive definite");
  Vector half = llt.matrixL().solve(x);
  double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * (static_cast<double>(x.size()) * std::log(2.0 * M_PI) + logdet +
                 half.squaredNorm());
}

}  // namespace

void GroundTruth::Validate() const {
  try {
    side1.Validate();
    side2.Validate();
  } catch (const Error &e) {
    throw Error(ErrorKind::kParameter, std::string("ground truth: ") + e.what());
  }
  const Eigen::Index r1 = side1.Rank(), r2 = side2.Rank();
  if (a.rows() != r2 || a.cols() != r1)
    throw Error(ErrorKind::kParameter, "ground truth: A is " + DimString(a) + ", expected " +
                                           std::to_string(r2) + "x" + std::to_string(r1));
  if (m.rows() != r2 || m.cols() != r2)
    throw Error(ErrorKind::kParameter, "ground truth: M is " + DimString(m) + ", expected " +
                                           std::to_string(r2) + "x" + std::to_string(r2));
  if (r2 > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(Symmetrize(m), Eigen::EigenvaluesOnly);
    double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
    if (eig.eigenvalues().minCoeff() < -1e-10 * scale)
      throw Error(ErrorKind::kParameter, "ground truth: M is not positive semidefinite");
  }
}

GroundTruth RandomGroundTruth(const RandomTruthOptions &opts, uint64_t seed) {
  const int d = opts.dim;
  if (d < 1 || opts.rank1 < 0 || opts.rank2 < 0 || opts.rank1 > d || opts.rank2 > d)
    throw Error(ErrorKind::kParameter, "random truth: need 0 <= ranks <= dim and dim >= 1");
  if (!(opts.snr >= 0.0) || !(opts.kappa > 0.0))
    throw Error(ErrorKind::kParameter, "random truth: snr must be >= 0 and kappa > 0");
  if (!(opts.coupling >= 0.0 && opts.coupling <= 1.0))
    throw Error(ErrorKind::kParameter, "random truth: coupling must be in [0, 1]");
  std::mt19937_64 rng = MakeEngine(seed, kTruthStream, 0);

  Matrix g = Gaussian(d, d + 2, rng);
  Matrix gamma1 = Symmetrize(g * g.transpose() / static_cast<double>(d + 2));
  gamma1 *= static_cast<double>(d) / gamma1.trace();

  auto scaled_loading = [&](int rank) {
    Matrix phi = Gaussian(d, rank, rng);
    double norm2 = phi.squaredNorm();
    if (norm2 > 0.0) phi *= std::sqrt(opts.snr * gamma1.trace() / norm2);
    return phi;
  };
  Matrix phi1 = scaled_loading(opts.rank1);
  Matrix phi2 = opts.rank2 == opts.rank1 ? phi1 : scaled_loading(opts.rank2);
  phi2 = RandomRotation(d, opts.rotation, rng) * phi2;

  Vector mu1 = Gaussian(d, 1, rng).col(0);
  Vector dir = Gaussian(d, 1, rng).col(0);
  Vector mu2 = mu1 + opts.mean_offset * dir / dir.norm();

  GroundTruth truth;
  truth.side1 = {mu1, phi1, gamma1};
  truth.side2 = {mu2, phi2, opts.kappa * gamma1};
  truth.a = opts.coupling * Matrix::Identity(opts.rank2, opts.rank1);
  truth.m = Matrix::Identity(opts.rank2, opts.rank2) - truth.a * truth.a.transpose();
  truth.Validate();
  return truth;
}

GroundTruth ShiftTestSide(const GroundTruth &truth, double rotation, double mean_offset,
                          uint64_t seed) {
  std::mt19937_64 rng = MakeEngine(seed, kShiftStream, 0);
  const Eigen::Index d = truth.side2.Dim();
  GroundTruth out = truth;
  out.side2.phi = RandomRotation(d, rotation, rng) * truth.side2.phi;
  Vector dir = Gaussian(d, 1, rng).col(0);
  out.side2.mu += mean_offset * dir / dir.norm();
  return out;
}

std::string SyntheticSpeakerId(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "spk%06d", index);
  return buf;
}

SpeakerFactors SampleFactors(const GroundTruth &truth, int n, uint64_t seed, int first_index) {
  truth.Validate();
  if (n < 0) throw Error(ErrorKind::kParameter, "negative speaker count");
  const Eigen::Index r1 = truth.side1.Rank(), r2 = truth.side2.Rank();
  const Matrix m_factor = PsdFactor(truth.m);
  SpeakerFactors f{Matrix(n, r1), Matrix(n, r2)};
#pragma omp parallel for schedule(static)
  for (int s = 0; s < n; ++s) {
    std::mt19937_64 rng = MakeEngine(seed, kFactorStream, static_cast<uint64_t>(first_index + s));
    Vector y1 = Gaussian(r1, 1, rng).col(0);
    Vector eta = m_factor * Gaussian(r2, 1, rng).col(0);
    f.y1.row(s) = y1.transpose();
    f.y2.row(s) = (truth.a * y1 + eta).transpose();
  }
  return f;
}

std::vector<SpeakerGroup> SampleSegments(const PldaModel &side, const Matrix &factors,
                                         const SegmentOptions &opts, uint64_t seed,
                                         int first_index) {
  side.Validate();
  if (factors.cols() != side.Rank())
    throw Error(ErrorKind::kDimension, "factor matrix has " + std::to_string(factors.cols()) +
                                           " columns, model rank is " +
                                           std::to_string(side.Rank()));
  if (opts.count < 0 || opts.augment_copies < 0 || !(opts.noise_scale > 0.0) ||
      !(opts.augment_noise >= 0.0) || !(opts.noise_spread >= 0.0))
    throw Error(ErrorKind::kParameter, "invalid segment options");
  const Eigen::Index d = side.Dim();
  const int n = static_cast<int>(factors.rows());
  Eigen::LLT<Matrix> llt(side.gamma);
  const Matrix noise = std::sqrt(opts.noise_scale) * Matrix(llt.matrixL());
  const Matrix aug_noise = std::sqrt(opts.augment_noise) * Matrix(llt.matrixL());

  std::vector<SpeakerGroup> out(n);
#pragma omp parallel for schedule(static)
  for (int s = 0; s < n; ++s) {
    const int index = first_index + s;
    std::mt19937_64 rng = MakeEngine(seed, opts.stream, static_cast<uint64_t>(index));
    SpeakerGroup &g = out[s];
    g.speaker_id = SyntheticSpeakerId(index);
    g.members.reserve(static_cast<size_t>(opts.count) * (1 + opts.augment_copies));
    const Vector center = side.mu + side.phi * factors.row(s).transpose();
    std::uniform_real_distribution<double> spread(-opts.noise_spread, opts.noise_spread);
    for (int k = 0; k < opts.count; ++k) {
      double scale = opts.noise_spread > 0.0 ? std::exp(0.5 * spread(rng)) : 1.0;
      Vector w = center + scale * (noise * Gaussian(d, 1, rng).col(0));
      std::string id = g.speaker_id + "-" + opts.tag + std::to_string(k);
      g.members.push_back({id, w});
      for (int j = 0; j < opts.augment_copies; ++j)
        g.members.push_back({id + "a" + std::to_string(j),
                             w + aug_noise * Gaussian(d, 1, rng).col(0)});
    }
  }
  return out;
}

SampledDataset SampleDataset(const GenConfig &config) {
  SampledDataset out;
  out.truth = config.truth;
  out.factors = SampleFactors(config.truth, config.n_speakers, config.seed);
  out.side1 = SampleSegments(config.truth.side1, out.factors.y1, config.side1, config.seed);
  out.side2 = SampleSegments(config.truth.side2, out.factors.y2, config.side2, config.seed);
  return out;
}

double TrueLlr(const GroundTruth &truth, const Vector &w1, const Vector &w2) {
  const PldaModel &p1 = truth.side1, &p2 = truth.side2;
  const Eigen::Index d1 = p1.Dim(), d2 = p2.Dim();
  if (w1.size() != d1 || w2.size() != d2)
    throw Error(ErrorKind::kDimension, "true LLR: vectors are " + std::to_string(w1.size()) +
                                           "/" + std::to_string(w2.size()) + ", model is " +
                                           std::to_string(d1) + "/" + std::to_string(d2));
  // cov(y2) = A A^t + M, cov(y1, y2) = A^t.
  Matrix c11 = p1.phi * p1.phi.transpose() + p1.gamma;
  Matrix c22 = p2.phi * (truth.a * truth.a.transpose() + truth.m) * p2.phi.transpose() +
               p2.gamma;
  Matrix c21 = p2.phi * truth.a * p1.phi.transpose();

  Matrix tar(d1 + d2, d1 + d2), non = Matrix::Zero(d1 + d2, d1 + d2);
  tar.topLeftCorner(d1, d1) = c11;
  tar.bottomRightCorner(d2, d2) = c22;
  tar.bottomLeftCorner(d2, d1) = c21;
  tar.topRightCorner(d1, d2) = c21.transpose();
  non.topLeftCorner(d1, d1) = c11;
  non.bottomRightCorner(d2, d2) = c22;

  Vector z(d1 + d2);
  z << w1 - p1.mu, w2 - p2.mu;
  return GaussianLogPdf(tar, z) - GaussianLogPdf(non, z);
}

namespace {

// One labeled split over speakers [first, first + n).
EvalSet SampleEvalSet(const BenchmarkOptions &opts, const GroundTruth &truth,
                      const GroundTruth *secondary, int first, int n, uint64_t stream_base) {
  const uint64_t seed = opts.seed;
  SpeakerFactors f = SampleFactors(truth, n, seed, first);
  SegmentOptions few{opts.few_max, opts.few_noise_scale, 0.0, 0, 0.1, "f", stream_base + 1};
  SegmentOptions many{opts.many_max, opts.many_noise_scale, 0.0, 0, 0.1, "m", stream_base + 2};
  SegmentOptions test{opts.tests_per_speaker, 1.0, opts.test_noise_spread, 0, 0.1, "t",
                      stream_base + 3};
  std::vector<SpeakerGroup> few_groups = SampleSegments(truth.side1, f.y1, few, seed, first);
  std::vector<SpeakerGroup> many_groups = SampleSegments(truth.side1, f.y1, many, seed, first);
  std::vector<SpeakerGroup> tests = SampleSegments(truth.side2, f.y2, test, seed, first);
  std::vector<SpeakerGroup> tests2;
  if (secondary != nullptr) tests2 = SampleSegments(secondary->side2, f.y2, test, seed, first);

  EvalSet set;
  std::vector<EnrollBucket> bucket(n);
  std::vector<std::vector<TestLanguage>> language(n);
  for (int s = 0; s < n; ++s) {
    std::mt19937_64 rng = MakeEngine(seed, kBucketStream + stream_base, first + s);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    bucket[s] = u(rng) < opts.few_fraction ? EnrollBucket::kFew : EnrollBucket::kMany;
    const bool few_bucket = bucket[s] == EnrollBucket::kFew;
    std::uniform_int_distribution<int> size(few_bucket ? opts.few_min : opts.many_min,
                                            few_bucket ? opts.few_max : opts.many_max);
    SpeakerGroup &enroll = few_bucket ? few_groups[s] : many_groups[s];
    enroll.members.resize(size(rng));
    set.enroll_segments[enroll.speaker_id] = enroll.Size();
    set.enrolls.push_back(std::move(enroll));
    for (int k = 0; k < opts.tests_per_speaker; ++k) {
      bool second = secondary != nullptr && u(rng) < opts.secondary_fraction;
      language[s].push_back(second ? TestLanguage::kSecondary : TestLanguage::kPrimary);
      Embedding &e = second ? tests2[s].members[k] : tests[s].members[k];
      set.test_language[e.id] = language[s].back();
      set.tests.push_back(std::move(e));
    }
  }

  const int per = opts.tests_per_speaker;
  const int total_tests = n * per;
  const int others = total_tests - per;
  const int want = std::min(opts.nontargets_per_model, others);
  for (int s = 0; s < n; ++s) {
    const std::string &model = set.enrolls[s].speaker_id;
    auto add = [&](int t, TrialLabel label) {
      ConditionKey key{bucket[s], set.test_language.at(set.tests[t].id)};
      set.trials.entries.push_back({model, set.tests[t].id, label, key});
    };
    for (int k = 0; k < per; ++k) add(s * per + k, TrialLabel::kTarget);
    std::mt19937_64 rng = MakeEngine(seed, kTrialStream + stream_base, first + s);
    std::uniform_int_distribution<int> pick(0, total_tests - 1);
    std::set<int> chosen;
    while (static_cast<int>(chosen.size()) < want) {
      int t = pick(rng);
      if (t / per != s) chosen.insert(t);
    }
    for (int t : chosen) add(t, TrialLabel::kNontarget);
  }
  return set;
}

std::vector<Embedding> Flatten(std::vector<SpeakerGroup> groups) {
  std::vector<Embedding> out;
  for (SpeakerGroup &g : groups)
    for (Embedding &e : g.members) out.push_back(std::move(e));
  return out;
}

}  // namespace

Benchmark SampleBenchmark(const BenchmarkOptions &opts) {
  if (opts.train_speakers < 2 || opts.dev_speakers < 2 || opts.eval_speakers < 2 ||
      opts.cohort_speakers < 0)
    throw Error(ErrorKind::kParameter, "benchmark needs at least 2 speakers per split");
  if (opts.few_segments < 1 || opts.many_segments < 1 || opts.tests_per_speaker < 1 ||
      opts.few_min < 1 || opts.few_min > opts.few_max || opts.many_min < 1 ||
      opts.many_min > opts.many_max)
    throw Error(ErrorKind::kParameter, "segment counts must be positive with min <= max");
  Benchmark b;
  b.truth = RandomGroundTruth(opts.truth, opts.seed);
  b.eval_truth = ShiftTestSide(b.truth, opts.eval_shift_rotation, opts.eval_shift_offset,
                               opts.seed + 1);
  const bool bilingual = opts.secondary_fraction > 0.0;
  if (bilingual)
    b.secondary_truth =
        ShiftTestSide(b.eval_truth, opts.secondary_rotation, opts.secondary_offset, opts.seed);
  const GroundTruth *secondary = bilingual ? &*b.secondary_truth : nullptr;
  const uint64_t seed = opts.seed;

  int next = 0;
  {
    SpeakerFactors f = SampleFactors(b.truth, opts.train_speakers, seed, next);
    b.train_side1_few = SampleSegments(
        b.truth.side1, f.y1, {opts.train_few_segments, opts.few_noise_scale, 0.0, 0, 0.1, "f", 11}, seed, next);
    b.train_side1_many = SampleSegments(
        b.truth.side1, f.y1, {opts.train_many_segments, opts.many_noise_scale, 0.0, 0, 0.1, "m", 12}, seed, next);
    b.train_side2 = SampleSegments(
        b.truth.side2, f.y2, {opts.train_test_segments, 1.0, opts.test_noise_spread, 0, 0.1, "t", 13}, seed, next);
    if (bilingual) {
      int n2 = std::min(opts.secondary_train_speakers, opts.train_speakers);
      Matrix y2 = f.y2.topRows(n2);
      b.train_side2_secondary = SampleSegments(
          secondary->side2, y2, {opts.train_test_segments, 1.0, opts.test_noise_spread, 0, 0.1, "u", 14}, seed, next);
    }
    next += opts.train_speakers;
  }
  b.dev = SampleEvalSet(opts, b.eval_truth, secondary, next, opts.dev_speakers, 20);
  next += opts.dev_speakers;
  b.eval = SampleEvalSet(opts, b.eval_truth, secondary, next, opts.eval_speakers, 30);
  next += opts.eval_speakers;
  {
    SpeakerFactors f = SampleFactors(b.truth, opts.cohort_speakers, seed, next);
    b.cohort_enroll_few = SampleSegments(
        b.truth.side1, f.y1, {opts.few_segments, opts.few_noise_scale, 0.0, 0, 0.1, "f", 41}, seed, next);
    b.cohort_enroll_many = SampleSegments(
        b.truth.side1, f.y1, {opts.many_segments, opts.many_noise_scale, 0.0, 0, 0.1, "m", 42}, seed, next);
    b.cohort_test = Flatten(
        SampleSegments(b.eval_truth.side2, f.y2, {1, 1.0, opts.test_noise_spread, 0, 0.1, "t", 43}, seed, next));
  }
  return b;
}

}  // namespace spkback
