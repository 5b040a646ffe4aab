#include "predeval/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "predeval/error.hpp"
#include "predeval/numerics.hpp"

namespace predeval {

std::string_view to_string(Tail t) noexcept {
  switch (t) {
    case Tail::two_sided: return "two-sided";
    case Tail::one_sided_less: return "one-sided-less";
    case Tail::one_sided_greater: return "one-sided-greater";
  }
  return "?";
}

std::string_view to_string(TestMethod m) noexcept {
  return m == TestMethod::exact ? "exact" : "normal-approximation";
}

namespace {

constexpr double kMinP = std::numeric_limits<double>::min();

double clamp_p(double p) { return std::min(1.0, std::max(kMinP, p)); }

struct RankInfo {
  std::vector<double> ranks;  // 1-based midranks, aligned with input order
  bool has_ties = false;
  double tie_correction_sum = 0;  // sum over tie groups of (t^3 - t)
};

RankInfo midranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });

  RankInfo info;
  info.ranks.resize(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) info.ranks[order[k]] = avg_rank;
    const auto t = static_cast<double>(j - i + 1);
    if (t > 1) {
      info.has_ties = true;
      info.tie_correction_sum += t * t * t - t;
    }
    i = j + 1;
  }
  return info;
}

double one_sided_exact(double count_le, double count_ge, double total, Tail tail) {
  switch (tail) {
    case Tail::one_sided_less: return count_le / total;
    case Tail::one_sided_greater: return count_ge / total;
    case Tail::two_sided: return 2.0 * std::min(count_le, count_ge) / total;
  }
  return 1.0;
}

double normal_tail_p(double stat, double mean, double sd, Tail tail) {
  switch (tail) {
    case Tail::one_sided_greater:
      return 1.0 - numerics::normal_cdf((stat - mean - 0.5) / sd);
    case Tail::one_sided_less:
      return numerics::normal_cdf((stat - mean + 0.5) / sd);
    case Tail::two_sided:
      return 2.0 * (1.0 - numerics::normal_cdf((std::fabs(stat - mean) - 0.5) / sd));
  }
  return 1.0;
}

}  // namespace

TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b, Tail tail) {
  if (a.empty() || b.empty()) throw DataError("Mann-Whitney U: empty sample");
  const std::size_t n1 = a.size(), n2 = b.size(), n = n1 + n2;

  std::vector<double> pooled;
  pooled.reserve(n);
  pooled.insert(pooled.end(), a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const RankInfo ri = midranks(pooled);

  double r1 = 0;
  for (std::size_t i = 0; i < n1; ++i) r1 += ri.ranks[i];
  const double u1 = r1 - static_cast<double>(n1) * (static_cast<double>(n1) + 1) / 2.0;
  const double max_u = static_cast<double>(n1) * static_cast<double>(n2);

  TestResult res;
  res.statistic = u1;
  res.tail = tail;
  res.n1 = n1;
  res.n2 = n2;

  if (!ri.has_ties && n <= kExactEnumerationLimit) {
    // Null distribution of the rank sum of sample 1 over all C(n, n1)
    // assignments: f[k][s] = number of k-subsets of ranks {1..n} summing
    // to s.
    const std::size_t max_sum = n * (n + 1) / 2;
    std::vector<std::vector<std::uint64_t>> f(
        n1 + 1, std::vector<std::uint64_t>(max_sum + 1, 0));
    f[0][0] = 1;
    for (std::size_t v = 1; v <= n; ++v) {
      for (std::size_t k = std::min(n1, v); k >= 1; --k) {
        for (std::size_t s = max_sum; s >= v; --s) {
          if (f[k - 1][s - v]) f[k][s] += f[k - 1][s - v];
        }
      }
    }
    const auto u_obs = static_cast<std::size_t>(std::llround(u1));
    const std::size_t base = n1 * (n1 + 1) / 2;
    double count_le = 0, count_ge = 0, total = 0;
    for (std::size_t s = base; s <= base + static_cast<std::size_t>(max_u); ++s) {
      const auto c = static_cast<double>(f[n1][s]);
      const std::size_t u = s - base;
      total += c;
      if (u <= u_obs) count_le += c;
      if (u >= u_obs) count_ge += c;
    }
    res.method = TestMethod::exact;
    res.p_value = clamp_p(one_sided_exact(count_le, count_ge, total, tail));
    return res;
  }

  res.method = TestMethod::normal_approximation;
  const double nn = static_cast<double>(n);
  const double mean = max_u / 2.0;
  const double var = max_u / 12.0 *
                     ((nn + 1.0) - ri.tie_correction_sum / (nn * (nn - 1.0)));
  if (!(var > 0)) {
    res.p_value = 1.0;  // every pooled value identical: no evidence either way
    return res;
  }
  res.p_value = clamp_p(normal_tail_p(u1, mean, std::sqrt(var), tail));
  return res;
}

TestResult wilcoxon_signed_rank(std::span<const double> diffs, Tail tail) {
  std::vector<double> d;
  d.reserve(diffs.size());
  for (double v : diffs)
    if (v != 0.0) d.push_back(v);
  if (d.empty())
    throw DegenerateError("Wilcoxon signed rank undefined: all paired differences are zero");

  const std::size_t n = d.size();
  std::vector<double> abs_d(n);
  for (std::size_t i = 0; i < n; ++i) abs_d[i] = std::fabs(d[i]);
  const RankInfo ri = midranks(abs_d);

  double w_plus = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (d[i] > 0) w_plus += ri.ranks[i];

  TestResult res;
  res.statistic = w_plus;
  res.tail = tail;
  res.n1 = n;

  if (!ri.has_ties && n <= kExactEnumerationLimit) {
    // Null distribution of W+ over all 2^n sign assignments: ways[s] =
    // number of subsets of ranks {1..n} summing to s.
    const std::size_t max_sum = n * (n + 1) / 2;
    std::vector<std::uint64_t> ways(max_sum + 1, 0);
    ways[0] = 1;
    for (std::size_t v = 1; v <= n; ++v)
      for (std::size_t s = max_sum; s >= v; --s)
        if (ways[s - v]) ways[s] += ways[s - v];

    const auto w_obs = static_cast<std::size_t>(std::llround(w_plus));
    double count_le = 0, count_ge = 0, total = 0;
    for (std::size_t s = 0; s <= max_sum; ++s) {
      const auto c = static_cast<double>(ways[s]);
      total += c;
      if (s <= w_obs) count_le += c;
      if (s >= w_obs) count_ge += c;
    }
    res.method = TestMethod::exact;
    res.p_value = clamp_p(one_sided_exact(count_le, count_ge, total, tail));
    return res;
  }

  res.method = TestMethod::normal_approximation;
  const double nn = static_cast<double>(n);
  const double mean = nn * (nn + 1.0) / 4.0;
  const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - ri.tie_correction_sum / 48.0;
  if (!(var > 0)) {
    res.p_value = 1.0;
    return res;
  }
  res.p_value = clamp_p(normal_tail_p(w_plus, mean, std::sqrt(var), tail));
  return res;
}

TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                Tail tail) {
  if (a.size() != b.size())
    throw DataError("Wilcoxon signed rank: samples are not paired (unequal lengths)");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return wilcoxon_signed_rank(d, tail);
}

}  // namespace predeval
