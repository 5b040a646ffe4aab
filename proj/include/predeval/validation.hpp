#pragma once

#include <cstdint>
#include <string>

#include "predeval/baseline.hpp"
#include "predeval/predictors.hpp"
#include "predeval/stats.hpp"

// Turns (dataset, predictor, scheme) into a PredictionRun: leave-one-out,
// repeated k-fold, or a single seeded hold-out split. All preprocessing
// (normalisation, subset selection) happens inside each training fold;
// hold-out cases never influence fitting.

namespace predeval {

struct ValidationScheme {
  enum class Kind { loocv, repeated_kfold, holdout };

  Kind kind = Kind::loocv;
  std::size_t folds = 10;
  std::size_t repeats = 1;
  double holdout_fraction = 0.3;
  std::uint64_t seed = 0;

  // Parses the CLI scheme syntax: "loocv", "kfold:folds=5,repeats=2",
  // "holdout:fraction=0.3".
  static ValidationScheme parse(const std::string& text);
  std::string label() const;
};

// Runs the scheme. LOOCV yields one pair per case in dataset order;
// repeated k-fold yields one pair per case per repeat (repeat-major,
// dataset order within a repeat); hold-out yields pairs for the test
// cases in dataset order. Deterministic for fixed seeds.
PredictionRun run_validation(const Dataset& data, const PredictorSpec& spec,
                             const ValidationScheme& scheme);

struct StatsConfig {
  std::size_t baseline_runs = 1000;
  std::uint64_t seed = 0;
  double pred_level = 0.25;
};

struct EvaluationResult {
  PredictionRun run;
  AccuracyReport report;        // sa missing when the baseline is degenerate
  BaselineDistribution baseline;
};

// run_validation plus the guessing baseline on the same evaluation actuals
// and the full accuracy report.
EvaluationResult evaluate(const Dataset& data, const PredictorSpec& spec,
                          const ValidationScheme& scheme, const StatsConfig& stats);

}  // namespace predeval
