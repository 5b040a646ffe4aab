#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

// Prediction systems used to re-enact the case studies: trivial mean and
// median baselines, random guessing as a predictor, estimation by analogy
// (k nearest neighbours on min-max normalised features with inverse
// distance weighting), optionally with feature subset selection and donor
// case subset selection, and forward stepwise regression.

namespace predeval {

struct Case {
  std::string id;
  std::vector<double> features;
  double outcome = 0;  // positive effort units
};

class Dataset {
 public:
  Dataset(std::string name, std::vector<std::string> feature_names,
          std::vector<Case> cases);

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  std::span<const Case> cases() const noexcept { return cases_; }
  std::size_t size() const noexcept { return cases_.size(); }
  std::size_t feature_count() const noexcept { return feature_names_.size(); }

  std::vector<double> outcomes() const;
  // New dataset without the case at `drop` (order otherwise preserved).
  Dataset without_case(std::size_t drop) const;
  // New dataset with exactly the cases at `keep`, in the given order.
  Dataset subset(std::span<const std::size_t> keep) const;
  // New dataset keeping only the given feature columns.
  Dataset with_features(std::span<const std::size_t> features) const;

 private:
  std::string name_;
  std::vector<std::string> feature_names_;
  std::vector<Case> cases_;
};

enum class PredictorKind { mean, median, guess, eba, eba_fss, eba_css, stepwise };
enum class Weighting { inverse_distance, uniform };

std::string_view to_string(PredictorKind k) noexcept;

struct PredictorSpec {
  PredictorKind kind = PredictorKind::eba;
  std::size_t k = 2;
  Weighting weighting = Weighting::inverse_distance;
  std::uint64_t seed = 0;
  double stepwise_alpha = 0.05;   // entry p-value for forward selection
  double prediction_floor = 1.0;  // lower clamp for linear predictions
  // Reuse the first fold's subset selection across folds (speed knob for
  // cross-validation; the default reruns selection inside every fold).
  bool fast_selection = false;

  // Parses the CLI spec syntax, e.g. "eba:k=3,weighting=uniform".
  static PredictorSpec parse(const std::string& text);
  std::string label() const;  // e.g. "eba(k=2,inv)"
};

// Distance-zero guard for inverse distance weighting: w = 1 / (d + epsilon).
inline constexpr double kDistanceEpsilon = 1e-9;

class FittedPredictor {
 public:
  // Estimate for one feature vector. Thread-safe for all kinds except
  // `guess`, which draws from its own seeded stream per call.
  double predict(std::span<const double> features) const;

  const PredictorSpec& spec() const noexcept { return spec_; }
  // Feature indices actually used (subset selection); empty means "all".
  std::span<const std::size_t> selected_features() const noexcept { return selected_features_; }
  // Donor case ids retained by case subset selection; empty means "all".
  std::span<const std::string> retained_case_ids() const noexcept { return retained_ids_; }
  std::span<const std::string> warnings() const noexcept { return warnings_; }

 private:
  friend FittedPredictor fit(const PredictorSpec&, const Dataset&);

  struct EbaModel {
    std::vector<std::vector<double>> feature_columns;  // donors, column-major
    std::vector<double> outcomes;
    std::vector<double> min;    // per feature, over the full training set
    std::vector<double> range;  // 0 for constant features
    std::vector<std::size_t> features;
    std::size_t k = 2;
    Weighting weighting = Weighting::inverse_distance;
  };
  struct LinearModel {
    std::vector<std::size_t> features;
    std::vector<double> coefficients;
    double intercept = 0;
    double floor = 1.0;
  };
  struct GuessModel {
    std::vector<double> outcomes;
    std::uint64_t seed = 0;
    mutable std::atomic<std::uint64_t> counter{0};
  };

  PredictorSpec spec_;
  std::size_t input_dim_ = 0;
  double constant_ = 0;  // mean/median
  std::shared_ptr<EbaModel> eba_;
  std::shared_ptr<LinearModel> linear_;
  std::shared_ptr<GuessModel> guess_;
  std::vector<std::size_t> selected_features_;
  std::vector<std::string> retained_ids_;
  std::vector<std::string> warnings_;
};

// Fits a predictor on the training set. For eba_fss this runs feature
// subset selection; for eba_css, feature subset selection followed by
// greedy donor elimination.
FittedPredictor fit(const PredictorSpec& spec, const Dataset& train);

// Feature subset minimising the LOOCV sum of absolute residuals of the
// base EBA on the training set. Exhaustive for <= 16 features, greedy
// forward selection beyond; ties go to the lexicographically smallest
// subset.
std::vector<std::size_t> select_features_fss(const Dataset& train,
                                             const PredictorSpec& base);

// Greedy backward donor elimination: repeatedly drop the donor whose
// removal most reduces the LOOCV sum of absolute residuals over the
// training cases (every case stays a prediction target; only the donor
// pool shrinks). Stops when no removal improves the objective or the pool
// would fall below k + 2. Returns retained case indices in dataset order.
std::vector<std::size_t> select_cases_css(const Dataset& train, const PredictorSpec& base,
                                          std::span<const std::size_t> features = {});

struct StepwiseModel {
  std::vector<std::size_t> features;
  std::vector<double> coefficients;
  double intercept = 0;
  double rss = 0;
  std::vector<std::string> warnings;
};

// Forward stepwise OLS: starting from the intercept-only model, repeatedly
// add the candidate with the smallest two-sided t-test p-value, while that
// p-value is below alpha_in. Normal equations; collinear candidates are
// skipped with a warning.
StepwiseModel fit_stepwise(const Dataset& train, double alpha_in = 0.05);

// LOOCV sum of absolute residuals for an EBA configuration: the selection
// objective. Exposed for tests and the selection-objective acceptance
// checks. `donors`, when non-empty, restricts the donor pool (targets are
// still all cases); `features` empty means all features.
double eba_loocv_sar(const Dataset& train, const PredictorSpec& base,
                     std::span<const std::size_t> features = {},
                     std::span<const std::size_t> donors = {});

}  // namespace predeval
