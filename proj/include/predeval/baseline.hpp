#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

// Random guessing P0: predict each case by drawing, uniformly, the actual
// outcome of one of the other n-1 cases. Simulating many such runs gives a
// permutation distribution of MAR values; its mean anchors SA and its
// quantiles answer "is this system even predicting?". The exact expectation
// the simulation converges to is also computed directly and serves as the
// oracle for the Monte Carlo path.

namespace predeval {

// The actual outcomes of an evaluation set. Guessing needs n >= 2.
class OutcomeSample {
 public:
  explicit OutcomeSample(std::vector<double> values);
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

 private:
  std::vector<double> values_;
};

class Rng;

// One run of random guessing over the sample; returns that run's MAR.
// Draws one donor per target, in target order, from the supplied stream.
double random_guess_run(const OutcomeSample& sample, Rng& rng);

struct ExactBaseline {
  // mean over targets t of mean over donors r != t of |y_t - y_r|
  double mean = 0;
  // population SD of the multiset { |y_t - y_r| : t != r }
  double sd = 0;
};

ExactBaseline exact_expected_mar(const OutcomeSample& sample);

// Monte Carlo (or exact) characterisation of P0 over one evaluation set.
// Immutable once built; safe to share across threads.
class BaselineDistribution {
 public:
  // runs >= 1. Deterministic for fixed (sample, runs, seed): run j draws
  // from substream (seed, j), so results do not depend on scheduling.
  static BaselineDistribution simulate(const OutcomeSample& sample, std::size_t runs,
                                       std::uint64_t seed);

  // Exact mode: mean/sd from the pairwise expectation, no MAR samples.
  // quantile() and empirical_p() are unavailable on an exact baseline.
  static BaselineDistribution exact(const OutcomeSample& sample);

  std::size_t runs() const noexcept { return runs_; }
  std::span<const double> mar_samples() const noexcept { return mar_samples_; }
  double mean_mar() const noexcept { return mean_mar_; }
  // Pooled per-draw absolute residual SD (exact mode: over all ordered pairs).
  double sd_abs_residuals() const noexcept { return sd_abs_residuals_; }
  std::uint64_t seed() const noexcept { return seed_; }
  bool is_exact() const noexcept { return runs_ == 0; }

  // Actuals the baseline was built on, in original order.
  std::span<const double> source_actuals() const noexcept { return source_; }

  // Exact oracle for the same sample (always available).
  const ExactBaseline& exact_oracle() const noexcept { return oracle_; }

 private:
  BaselineDistribution() = default;

  std::size_t runs_ = 0;
  std::vector<double> mar_samples_;         // run order
  std::vector<double> sorted_mar_samples_;  // ascending
  double mean_mar_ = 0;
  double sd_abs_residuals_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<double> source_;
  ExactBaseline oracle_;

  friend double quantile(const BaselineDistribution&, double);
  friend double empirical_p(const BaselineDistribution&, double);
};

// Linear interpolation between order statistics (the "type 7" rule:
// position (runs-1)*q). q must lie in (0,1).
double quantile(const BaselineDistribution& dist, double q);

// (count of samples <= observed + 1) / (runs + 1); never exactly zero.
double empirical_p(const BaselineDistribution& dist, double observed_mar);

struct HistogramBin {
  double lower;
  double upper;
  std::size_t count;
};

// Equal-width bins over [min, max] of the MAR samples; the last bin is
// closed above.
std::vector<HistogramBin> mar_histogram(const BaselineDistribution& dist, int bins = 20);

// CSV rows "bin_lower,bin_upper,count" with a header line.
void write_histogram_csv(std::ostream& out, const BaselineDistribution& dist,
                         int bins = 20);

}  // namespace predeval
