// tools/spkback.cc

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

// Command-line front end. One subcommand per pipeline stage; every stage
// reads and writes plain files so stages chain without hidden state.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.h"
#include "spkback/error.h"
#include "spkback/parallel.h"

namespace {

using spkback::ErrorKind;

// Distinct exit status per failure class.
int ExitCode(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo: return 3;
    case ErrorKind::kParse: return 4;
    case ErrorKind::kLookup: return 4;
    case ErrorKind::kDimension: return 5;
    case ErrorKind::kNumerical: return 6;
    case ErrorKind::kRouting: return 7;
    case ErrorKind::kParameter: return 8;
    case ErrorKind::kDomain: return 8;
    case ErrorKind::kMetric: return 8;
  }
  return 1;
}

void Fail(std::string_view kind, const std::string &message) {
  std::string flat = message;
  for (char &c : flat)
    if (c == '\n') c = ' ';
  std::cerr << "spkback: error[" << kind << "]: " << flat << '\n';
}

constexpr const char *kExitCodes =
    "Exit status: 0 ok, 2 usage, 3 io, 4 parse/lookup, 5 dimension, 6 numerical, "
    "7 routing/config, 8 parameter/domain/metric, 1 other. Errors are printed as one line "
    "'spkback: error[<kind>]: <message>' on stderr.";

void AddInputs(CLI::App *sub, spkback::cli::TrialInputs *in) {
  sub->add_option("--enroll", in->enroll, "Raw enrollment segments (text or binary)");
  sub->add_option("--enroll-map", in->enroll_map,
                  "Model map '<model> <seg-id>...'; without it each segment is a model");
  sub->add_option("--test", in->test, "Raw test segments");
}

}  // namespace

int main(int argc, char **argv) {
  namespace cli = spkback::cli;
  CLI::App app{"spkback: two-sided PLDA speaker verification back-end"};
  app.footer(kExitCodes);
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads,
                 std::string("Worker threads for parallel kernels (default: $") +
                     spkback::kThreadsEnvVar + " or all cores)")
      ->check(CLI::NonNegativeNumber);

  cli::SynthOptions synth;
  auto *s = app.add_subcommand("synth",
                               "Sample a seeded two-sided benchmark. Writes into --out-dir: "
                               "train_enroll_{few,many}.emb, train_test.emb, "
                               "{dev,eval}_{enroll.emb,enroll.map,test.emb,trials,"
                               "enroll_segments,test_language}, cohort_enroll_{few,many}."
                               "{emb,map}, cohort_test.emb, truth.4cov, truth_eval.4cov");
  s->add_option("--out-dir", synth.out_dir, "Output directory")->required();
  s->add_option("--seed", synth.seed, "Master seed");
  s->add_option("--dim", synth.dim, "Embedding dimension");
  s->add_option("--rank", synth.rank, "Speaker-factor rank of both sides");
  s->add_option("--snr", synth.snr, "Speaker-to-residual trace ratio");
  s->add_option("--kappa", synth.kappa, "Test-side residual inflation");
  s->add_option("--rotation", synth.rotation, "Rotation (radians) of the test-side loading");
  s->add_option("--eval-shift-rotation", synth.eval_shift_rotation,
                "Extra test-side rotation of the evaluation domain");
  s->add_option("--eval-shift-offset", synth.eval_shift_offset,
                "Test-side mean shift of the evaluation domain");
  s->add_option("--test-noise-spread", synth.test_noise_spread,
                "Per-segment log spread of the test residual scale");
  s->add_option("--train-speakers", synth.train_speakers);
  s->add_option("--dev-speakers", synth.dev_speakers);
  s->add_option("--eval-speakers", synth.eval_speakers);
  s->add_option("--cohort-speakers", synth.cohort_speakers);
  s->add_option("--secondary-fraction", synth.secondary_fraction,
                "Fraction of dev/eval tests in the second language");
  s->add_flag("--binary", synth.binary, "Write binary embedding files");

  cli::PreprocessOptions pre;
  auto *p = app.add_subcommand(
      "preprocess",
      "Fit a centering+whitening preprocessor (--fit, writes a .pre file) or apply one "
      "(--apply, writes whitened, length-normalized embeddings; optionally L-averaged)");
  p->add_option("--fit", pre.fit_inputs, "Embedding files to fit on");
  p->add_option("--apply", pre.apply, "Preprocessor file to apply");
  p->add_option("--in", pre.in, "Embeddings to transform");
  p->add_option("--out", pre.out, "Output file")->required();
  p->add_option("--average-size", pre.average_size,
                "Replace each run of N segments of a speaker by its L-average");
  p->add_option("--utt2spk", pre.utt2spk, "Segment-to-speaker map (default: id prefix)");
  p->add_option("--enroll-map", pre.enroll_map, "Produce one L-average per listed model");
  p->add_flag("--mean-only", pre.mean_only, "Average without normalizing members first");
  p->add_flag("--binary", pre.binary, "Write binary embeddings");

  cli::TrainPldaOptions train;
  auto *t = app.add_subcommand(
      "train-plda",
      "EM-train a PLDA model on preprocessed embeddings; writes a .plda bundle and prints "
      "'iter <k> loglike <value>' lines");
  t->add_option("--in", train.in, "Preprocessed training embeddings")->required();
  t->add_option("--out", train.out, "Output PLDA bundle")->required();
  t->add_option("--preprocessor", train.preprocessor, "Preprocessor stored with the model");
  t->add_option("--utt2spk", train.utt2spk, "Segment-to-speaker map (default: id prefix)");
  t->add_option("--rank", train.rank, "Speaker subspace rank (clipped to the dimension)");
  t->add_option("--iters", train.iterations, "EM iterations");

  cli::FitFourCovOptions fit;
  auto *f = app.add_subcommand(
      "fit-fourcov",
      "Couple two side-specific PLDA bundles on paired training speakers; writes a .4cov "
      "system. With --symmetric, wraps one PLDA as a symmetric system");
  f->add_option("--plda1", fit.plda1, "Enrollment-side PLDA bundle");
  f->add_option("--plda2", fit.plda2, "Test-side PLDA bundle");
  f->add_option("--side1", fit.side1, "Preprocessed enrollment-side training embeddings");
  f->add_option("--side2", fit.side2, "Preprocessed test-side training embeddings");
  f->add_option("--utt2spk1", fit.utt2spk1);
  f->add_option("--utt2spk2", fit.utt2spk2);
  f->add_option("--out", fit.out, "Output system")->required();
  f->add_flag("--symmetric", fit.symmetric, "Symmetric system from --plda1 alone");

  cli::InterpolateOptions interp;
  auto *i = app.add_subcommand(
      "interpolate", "Interpolate an in-domain and an out-of-domain PLDA bundle; the output "
                     "keeps the in-domain preprocessor");
  i->add_option("--in-domain", interp.in_domain)->required();
  i->add_option("--out-domain", interp.out_domain)->required();
  i->add_option("--out", interp.out)->required();
  i->add_option("--alpha", interp.alpha, "Weight of the in-domain model")
      ->check(CLI::Range(0.0, 1.0));
  i->add_option("--rank", interp.rank, "Output rank (default: in-domain rank)");

  cli::ScoreOptions score;
  auto *sc = app.add_subcommand("score", "Score trials with a .4cov system; writes a score file");
  sc->add_option("--model", score.model)->required();
  AddInputs(sc, &score.inputs);
  sc->add_option("--trials", score.trials)->required();
  sc->add_option("--out", score.out)->required();

  cli::SnormOptions snorm;
  auto *sn = app.add_subcommand("snorm", "Adaptive asymmetric S-norm of a score file");
  sn->add_option("--model", snorm.model)->required();
  sn->add_option("--scores", snorm.scores, "Raw scores to normalize")->required();
  AddInputs(sn, &snorm.inputs);
  sn->add_option("--cohort-enroll", snorm.cohort_enroll, "Raw enrollment-side cohort segments");
  sn->add_option("--cohort-enroll-map", snorm.cohort_enroll_map, "Cohort model map");
  sn->add_option("--cohort-test", snorm.cohort_test, "Raw test-side cohort segments");
  sn->add_option("--top-k", snorm.top_k, "Top cohort scores kept per side (0: all)");
  sn->add_option("--out", snorm.out)->required();

  cli::CalibrateOptions cal;
  auto *c = app.add_subcommand(
      "calibrate", "Fit an affine calibration on labeled scores (--trials), or apply one "
                   "(--apply) to a score file");
  c->add_option("--scores", cal.scores)->required();
  c->add_option("--trials", cal.trials, "Labeled trials: fit mode");
  c->add_option("--apply", cal.apply, "Calibration file: apply mode");
  c->add_option("--condition", cal.condition, "Condition tag stored in the calibration file");
  c->add_option("--p-effective", cal.effective_prior, "Effective target prior of the fit")
      ->check(CLI::Range(0.0, 1.0));
  c->add_option("--out", cal.out)->required();

  cli::RouteScoreOptions route;
  auto *r = app.add_subcommand(
      "route-score",
      "Score each trial with the model of its condition (enrollment size x test language) "
      "per a JSON config; writes one merged score file in trial order");
  r->add_option("--config", route.config, "Routing config (JSON)")->required();
  AddInputs(r, &route.inputs);
  r->add_option("--trials", route.trials)->required();
  r->add_option("--test-language", route.test_language, "'<test-id> <label>' map")->required();
  r->add_option("--enroll-segments", route.enroll_segments,
                "'<model> <count>' map (default: counted from --enroll-map)");
  r->add_option("--top-k", route.top_k, "Override the config's top_k (0: all)");
  r->add_option("--out", route.out)->required();

  cli::EvaluateOptions eval;
  auto *e = app.add_subcommand(
      "evaluate", "Print 'EER% <x>' and 'minDCF <y>'; optionally write DET points");
  e->add_option("--scores", eval.scores)->required();
  e->add_option("--trials", eval.trials, "Labeled trials")->required();
  e->add_option("--det", eval.det, "DET point file '<p_fa> <p_miss>'");
  e->add_option("--p-target", eval.dcf.p_target);
  e->add_option("--c-miss", eval.dcf.c_miss);
  e->add_option("--c-fa", eval.dcf.c_fa);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp &) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError &err) {
    if (err.get_exit_code() == 0) return app.exit(err);
    Fail("usage", err.what());
    return 2;
  }

  try {
    if (threads > 0) spkback::SetNumThreads(threads);
    if (*s) cli::RunSynth(synth);
    else if (*p) cli::RunPreprocess(pre);
    else if (*t) cli::RunTrainPlda(train);
    else if (*f) cli::RunFitFourCov(fit);
    else if (*i) cli::RunInterpolate(interp);
    else if (*sc) cli::RunScore(score);
    else if (*sn) cli::RunSnorm(snorm);
    else if (*c) cli::RunCalibrate(cal);
    else if (*r) cli::RunRouteScore(route);
    else if (*e) cli::RunEvaluate(eval);
  } catch (const spkback::Error &err) {
    Fail(spkback::ErrorKindName(err.kind()), err.what());
    return ExitCode(err.kind());
  } catch (const std::exception &err) {
    Fail("internal", err.what());
    return 1;
  }
  return 0;
}
