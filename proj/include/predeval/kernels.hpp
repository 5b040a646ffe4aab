#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Reduction and update kernels shared by the statistics and search layers.
//
// Every backend of a kernel performs the same IEEE operations in the same
// order: the main loop keeps four independent lane accumulators (one AVX2
// register worth of doubles), the lanes are combined as (l0+l1)+(l2+l3),
// and the tail is folded in element by element. The scalar reference
// follows that pattern explicitly, so scalar and SIMD results are
// bit-identical and backend selection never changes program output.

namespace predeval::kernels {

enum class Backend { scalar, avx2 };

// Backend in use. Defaults to the widest one the CPU supports; the
// PREDEVAL_KERNELS environment variable ("scalar" or "avx2") overrides.
Backend active_backend() noexcept;
std::string_view backend_name(Backend b) noexcept;
bool backend_supported(Backend b) noexcept;

// Force a specific backend (used by the equivalence tests).
// Throws std::invalid_argument if the CPU lacks support.
void set_backend(Backend b);

// sum of v
double sum(std::span<const double> v) noexcept;

// sum of |a[i] - b[i]|; a and b must have equal length
double sum_abs_diff(std::span<const double> a, std::span<const double> b) noexcept;

// sum of |v[i] - center|
double sum_abs_dev(double center, std::span<const double> v) noexcept;

// sum of (v[i] - center)^2
double sum_sq_dev(double center, std::span<const double> v) noexcept;

// sum of (a[i] - b[i])^2
double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;

// acc[i] += w * (v[i] - center)^2 -- the weighted per-feature distance
// accumulation used by the analogy searches. Element-wise, so trivially
// identical across backends.
void add_weighted_sq_dev(std::span<double> acc, double w, double center,
                         std::span<const double> v) noexcept;

}  // namespace predeval::kernels
