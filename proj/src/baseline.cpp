#include "predeval/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "predeval/error.hpp"
#include "predeval/kernels.hpp"
#include "predeval/rng.hpp"

namespace predeval {

OutcomeSample::OutcomeSample(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2)
    throw DataError("random guessing needs at least 2 cases to draw from");
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0)
      throw DataError("outcome sample contains a negative or non-finite value");
  }
}

namespace {

// Fills ys with one guessed outcome per target: a uniform draw over the
// other n-1 indices, independent across targets.
void draw_guesses(std::span<const double> y, Rng& rng, std::vector<double>& ys) {
  const std::size_t n = y.size();
  ys.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    std::size_t r = static_cast<std::size_t>(rng.bounded(n - 1));
    if (r >= t) ++r;  // skip the target itself
    ys[t] = y[r];
  }
}

}  // namespace

double random_guess_run(const OutcomeSample& sample, Rng& rng) {
  std::vector<double> ys;
  draw_guesses(sample.values(), rng, ys);
  return kernels::sum_abs_diff(sample.values(), ys) /
         static_cast<double>(sample.size());
}

ExactBaseline exact_expected_mar(const OutcomeSample& sample) {
  const auto y = sample.values();
  const std::size_t n = y.size();
  const double pair_count = static_cast<double>(n) * static_cast<double>(n - 1);

  // Self terms are |y_t - y_t| = 0, so whole-vector sums need no exclusion.
  double total = 0;
  for (std::size_t t = 0; t < n; ++t) total += kernels::sum_abs_dev(y[t], y);
  const double mean = total / pair_count;

  double ss = 0;
  std::vector<double> dev(n);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t r = 0; r < n; ++r) dev[r] = std::fabs(y[t] - y[r]);
    // subtract the self term's contribution (0 - mean)^2
    ss += kernels::sum_sq_dev(mean, dev) - mean * mean;
  }
  ExactBaseline out;
  out.mean = mean;
  out.sd = std::sqrt(std::max(0.0, ss / pair_count));
  return out;
}

BaselineDistribution BaselineDistribution::simulate(const OutcomeSample& sample,
                                                    std::size_t runs,
                                                    std::uint64_t seed) {
  if (runs == 0) throw std::invalid_argument("baseline simulation needs runs >= 1");

  BaselineDistribution dist;
  dist.runs_ = runs;
  dist.seed_ = seed;
  dist.source_.assign(sample.values().begin(), sample.values().end());
  dist.oracle_ = exact_expected_mar(sample);

  const std::size_t n = sample.size();
  dist.mar_samples_.resize(runs);
  double pooled_abs = 0;   // sum of |y_t - y_r| over every draw
  double pooled_sq = 0;    // sum of squares of the same
  std::vector<double> ys;
  for (std::size_t j = 0; j < runs; ++j) {
    Rng rng = Rng::substream(seed, j);
    draw_guesses(sample.values(), rng, ys);
    const double abs_sum = kernels::sum_abs_diff(sample.values(), ys);
    const double sq_sum = kernels::squared_distance(sample.values(), ys);
    dist.mar_samples_[j] = abs_sum / static_cast<double>(n);
    pooled_abs += abs_sum;
    pooled_sq += sq_sum;
  }

  dist.mean_mar_ = kernels::sum(dist.mar_samples_) / static_cast<double>(runs);
  const double draws = static_cast<double>(runs) * static_cast<double>(n);
  const double pooled_mean = pooled_abs / draws;
  dist.sd_abs_residuals_ =
      std::sqrt(std::max(0.0, pooled_sq / draws - pooled_mean * pooled_mean));

  dist.sorted_mar_samples_ = dist.mar_samples_;
  std::sort(dist.sorted_mar_samples_.begin(), dist.sorted_mar_samples_.end());
  return dist;
}

BaselineDistribution BaselineDistribution::exact(const OutcomeSample& sample) {
  BaselineDistribution dist;
  dist.source_.assign(sample.values().begin(), sample.values().end());
  dist.oracle_ = exact_expected_mar(sample);
  dist.mean_mar_ = dist.oracle_.mean;
  dist.sd_abs_residuals_ = dist.oracle_.sd;
  return dist;
}

double quantile(const BaselineDistribution& dist, double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile q must lie in (0,1)");
  if (dist.runs_ == 0)
    throw std::invalid_argument("quantile requires a simulated baseline (runs >= 1)");
  const auto& s = dist.sorted_mar_samples_;
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= s.size()) return s.back();
  const double frac = pos - static_cast<double>(lo);
  return s[lo] + frac * (s[lo + 1] - s[lo]);
}

double empirical_p(const BaselineDistribution& dist, double observed_mar) {
  if (dist.runs_ == 0)
    throw std::invalid_argument("empirical_p requires a simulated baseline (runs >= 1)");
  const auto& s = dist.sorted_mar_samples_;
  const auto count = static_cast<std::size_t>(
      std::upper_bound(s.begin(), s.end(), observed_mar) - s.begin());
  return static_cast<double>(count + 1) / static_cast<double>(dist.runs_ + 1);
}

std::vector<HistogramBin> mar_histogram(const BaselineDistribution& dist, int bins) {
  if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
  if (dist.runs() == 0)
    throw std::invalid_argument("histogram requires a simulated baseline");
  const auto& s = dist.mar_samples();
  const auto [mn_it, mx_it] = std::minmax_element(s.begin(), s.end());
  const double mn = *mn_it, mx = *mx_it;
  std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
  const double width = (mx - mn) / static_cast<double>(bins);
  for (int b = 0; b < bins; ++b) {
    out[static_cast<std::size_t>(b)] = {mn + width * b, mn + width * (b + 1), 0};
  }
  out.back().upper = mx;
  for (double v : s) {
    std::size_t b = 0;
    if (width > 0) {
      b = static_cast<std::size_t>((v - mn) / width);
      if (b >= out.size()) b = out.size() - 1;  // max value lands in the last bin
    }
    ++out[b].count;
  }
  return out;
}

void write_histogram_csv(std::ostream& out, const BaselineDistribution& dist, int bins) {
  char buf[96];
  out << "bin_lower,bin_upper,count\n";
  for (const auto& bin : mar_histogram(dist, bins)) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%zu\n", bin.lower, bin.upper, bin.count);
    out << buf;
  }
}

}  // namespace predeval
