#include "predeval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "predeval/error.hpp"
#include "predeval/kernels.hpp"

namespace predeval {

PredictionRun::PredictionRun(std::string system_id, std::vector<PredictionPair> pairs,
                             std::vector<std::string> case_ids)
    : system_id_(std::move(system_id)) {
  if (pairs.empty()) throw DataError("prediction run '" + system_id_ + "' is empty");
  if (!case_ids.empty() && case_ids.size() != pairs.size())
    throw DataError("prediction run '" + system_id_ + "': case id count != pair count");
  actuals_.reserve(pairs.size());
  predictions_.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (!std::isfinite(p.actual) || !std::isfinite(p.predicted))
      throw DataError("prediction run '" + system_id_ + "' contains a non-finite value");
    if (p.actual < 0)
      throw DataError("prediction run '" + system_id_ + "' has a negative actual");
    actuals_.push_back(p.actual);
    predictions_.push_back(p.predicted);
  }
  case_ids_ = std::move(case_ids);
}

std::vector<double> absolute_residuals(const PredictionRun& run) {
  std::vector<double> out(run.size());
  for (std::size_t i = 0; i < run.size(); ++i)
    out[i] = std::fabs(run.actuals()[i] - run.predictions()[i]);
  return out;
}

double mar(const PredictionRun& run) {
  return kernels::sum_abs_diff(run.actuals(), run.predictions()) /
         static_cast<double>(run.size());
}

namespace {

std::vector<double> relative_errors_percent(const PredictionRun& run) {
  std::vector<double> mre(run.size());
  for (std::size_t i = 0; i < run.size(); ++i) {
    const double y = run.actuals()[i];
    if (y <= 0)
      throw DataError("MRE undefined: run '" + run.system_id() +
                      "' has an actual <= 0 (case index " + std::to_string(i) + ")");
    mre[i] = std::fabs(y - run.predictions()[i]) / y * 100.0;
  }
  return mre;
}

}  // namespace

double mmre(const PredictionRun& run) {
  return mean_of(relative_errors_percent(run));
}

double mdmre(const PredictionRun& run) {
  return median_of(relative_errors_percent(run));
}

double pred(const PredictionRun& run, double level) {
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("pred level must lie in (0,1)");
  const auto mre = relative_errors_percent(run);
  std::size_t hits = 0;
  for (double m : mre)
    if (m <= level * 100.0) ++hits;
  return static_cast<double>(hits) / static_cast<double>(mre.size());
}

double standardised_accuracy(double mar_value, double baseline_mean_mar) {
  if (!(baseline_mean_mar > 0))
    throw DegenerateError("standardised accuracy undefined: baseline mean MAR is not positive");
  return (1.0 - mar_value / baseline_mean_mar) * 100.0;
}

Direction direction_of_mar() noexcept { return Direction::lower_is_better; }
Direction direction_of_mmre() noexcept { return Direction::lower_is_better; }
Direction direction_of_mdmre() noexcept { return Direction::lower_is_better; }
Direction direction_of_pred() noexcept { return Direction::higher_is_better; }
Direction direction_of_sa() noexcept { return Direction::higher_is_better; }

AccuracyReport make_report(const PredictionRun& run, double pred_level,
                           std::optional<double> baseline_mean_mar) {
  AccuracyReport r;
  r.system_id = run.system_id();
  r.mar = mar(run);
  r.mmre = mmre(run);
  r.mdmre = mdmre(run);
  r.pred_l = pred(run, pred_level);
  r.pred_level = pred_level;
  if (baseline_mean_mar && *baseline_mean_mar > 0)
    r.sa = standardised_accuracy(r.mar, *baseline_mean_mar);
  return r;
}

double mean_of(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean of empty sequence");
  return kernels::sum(values) / static_cast<double>(values.size());
}

double median_of(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty sequence");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

double population_sd(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("sd of empty sequence");
  const double m = mean_of(values);
  const double ss = kernels::sum_sq_dev(m, values);
  return std::sqrt(std::max(0.0, ss / static_cast<double>(values.size())));
}

}  // namespace predeval
