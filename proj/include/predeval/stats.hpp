#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

// Residual-based accuracy statistics for one prediction run: MAR, MMRE,
// MdMRE, pred(l) and SA. MMRE-family statistics are kept for comparison
// with older studies; MAR and SA are the ones safe to base decisions on.

namespace predeval {

enum class Direction { lower_is_better, higher_is_better };

struct PredictionPair {
  double actual;
  double predicted;
};

// One prediction system's paired (actual, predicted) values over one
// evaluation set. Pair order is stable; paired tests depend on it.
class PredictionRun {
 public:
  PredictionRun(std::string system_id, std::vector<PredictionPair> pairs,
                std::vector<std::string> case_ids = {});

  const std::string& system_id() const noexcept { return system_id_; }
  std::size_t size() const noexcept { return actuals_.size(); }
  std::span<const double> actuals() const noexcept { return actuals_; }
  std::span<const double> predictions() const noexcept { return predictions_; }
  // Empty unless the source carried case identities (CSV column, CV folds).
  std::span<const std::string> case_ids() const noexcept { return case_ids_; }

  PredictionPair pair(std::size_t i) const noexcept {
    return {actuals_[i], predictions_[i]};
  }

 private:
  std::string system_id_;
  std::vector<double> actuals_;
  std::vector<double> predictions_;
  std::vector<std::string> case_ids_;
};

// |actual - predicted| per case, order preserved.
std::vector<double> absolute_residuals(const PredictionRun& run);

// Mean absolute residual (effort units).
double mar(const PredictionRun& run);

// Mean magnitude of relative error, percent. Requires every actual > 0.
double mmre(const PredictionRun& run);

// Median magnitude of relative error, percent; even-length medians average
// the two central order statistics.
double mdmre(const PredictionRun& run);

// Fraction of cases with MRE <= level; level must lie in (0,1).
double pred(const PredictionRun& run, double level);

// SA = (1 - mar / baseline_mean_mar) * 100. Positive means better than
// guessing; 0 means guessing-equivalent. Throws DegenerateError unless
// baseline_mean_mar > 0.
double standardised_accuracy(double mar_value, double baseline_mean_mar);

Direction direction_of_mar() noexcept;
Direction direction_of_mmre() noexcept;
Direction direction_of_mdmre() noexcept;
Direction direction_of_pred() noexcept;
Direction direction_of_sa() noexcept;

struct AccuracyReport {
  std::string system_id;
  double mar = 0;
  double mmre = 0;     // percent
  double mdmre = 0;    // percent
  double pred_l = 0;   // fraction in [0,1]
  double pred_level = 0.25;
  // Absent when no baseline was supplied or the baseline is degenerate.
  std::optional<double> sa;  // percent
};

// Assembles the full report; sa is filled when a positive baseline mean is
// given.
AccuracyReport make_report(const PredictionRun& run, double pred_level,
                           std::optional<double> baseline_mean_mar = std::nullopt);

// Helpers shared across modules.
double mean_of(std::span<const double> values);
double median_of(std::vector<double> values);  // takes a copy, sorts it
// Population standard deviation (divides by n).
double population_sd(std::span<const double> values);

}  // namespace predeval
