#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

// Nonparametric tests on (absolute) residuals. Small tie-free samples get
// exact enumeration of the permutation null; anything larger, or anything
// with ties, uses the normal approximation with midranks, tie-corrected
// variance and a 0.5 continuity correction.

namespace predeval {

enum class Tail { two_sided, one_sided_less, one_sided_greater };
enum class TestMethod { exact, normal_approximation };

std::string_view to_string(Tail t) noexcept;
std::string_view to_string(TestMethod m) noexcept;

struct TestResult {
  double statistic = 0;  // U of the first sample, or W+ (positive rank sum)
  double p_value = 1;
  Tail tail = Tail::two_sided;
  TestMethod method = TestMethod::exact;
  std::size_t n1 = 0;                 // first sample / retained pairs
  std::optional<std::size_t> n2;      // second sample (absent for paired test)
};

// Exact enumeration is used up to this combined size (and only without ties).
inline constexpr std::size_t kExactEnumerationLimit = 20;

// Mann-Whitney U. one_sided_less tests the alternative "a tends to be
// smaller than b". statistic is U for sample a (count of (a_i, b_j) pairs
// with a_i > b_j, ties counting one half).
TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                          Tail tail = Tail::two_sided);

// Wilcoxon signed rank over paired differences. Zero differences are
// dropped; throws DegenerateError if none remain. one_sided_greater tests
// the alternative "differences tend positive". statistic is W+.
TestResult wilcoxon_signed_rank(std::span<const double> diffs, Tail tail = Tail::two_sided);

// Convenience overload: differences a[i] - b[i].
TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                Tail tail);

}  // namespace predeval
