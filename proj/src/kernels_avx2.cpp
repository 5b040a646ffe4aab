// AVX2 backend. Compiled with -mavx2 on x86-64; stubs elsewhere. The lane
// layout and combine order mirror the scalar reference exactly (see
// kernels.hpp), and FMA contraction is disabled, so results match the
// scalar backend bit for bit.

#include "predeval/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__)

#include <immintrin.h>

#include <cmath>

namespace predeval::kernels::avx2 {

bool available() noexcept { return __builtin_cpu_supports("avx2"); }

namespace {

// (l0 + l1) + (l2 + l3), matching the scalar lane combine
inline double combine(__m256d acc) noexcept {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

inline __m256d abs_pd(__m256d x) noexcept {
  const __m256d sign = _mm256_set1_pd(-0.0);
  return _mm256_andnot_pd(sign, x);
}

}  // namespace

double sum(std::span<const double> v) noexcept {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const std::size_t n = v.size();
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(v.data() + i));
  double s = combine(acc);
  for (; i < n; ++i) s += v[i];
  return s;
}

double sum_abs_diff(std::span<const double> a, std::span<const double> b) noexcept {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const std::size_t n = a.size();
  for (; i + 4 <= n; i += 4) {
    const __m256d d =
        _mm256_sub_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
    acc = _mm256_add_pd(acc, abs_pd(d));
  }
  double s = combine(acc);
  for (; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

double sum_abs_dev(double center, std::span<const double> v) noexcept {
  const __m256d c = _mm256_set1_pd(center);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const std::size_t n = v.size();
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(v.data() + i), c);
    acc = _mm256_add_pd(acc, abs_pd(d));
  }
  double s = combine(acc);
  for (; i < n; ++i) s += std::fabs(v[i] - center);
  return s;
}

double sum_sq_dev(double center, std::span<const double> v) noexcept {
  const __m256d c = _mm256_set1_pd(center);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const std::size_t n = v.size();
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(v.data() + i), c);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double s = combine(acc);
  for (; i < n; ++i) {
    const double d = v[i] - center;
    s += d * d;
  }
  return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const std::size_t n = a.size();
  for (; i + 4 <= n; i += 4) {
    const __m256d d =
        _mm256_sub_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double s = combine(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void add_weighted_sq_dev(std::span<double> acc, double w, double center,
                         std::span<const double> v) noexcept {
  const __m256d wc = _mm256_set1_pd(w);
  const __m256d c = _mm256_set1_pd(center);
  std::size_t i = 0;
  const std::size_t n = v.size();
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(v.data() + i), c);
    const __m256d term = _mm256_mul_pd(wc, _mm256_mul_pd(d, d));
    _mm256_storeu_pd(acc.data() + i, _mm256_add_pd(_mm256_loadu_pd(acc.data() + i), term));
  }
  for (; i < n; ++i) {
    const double d = v[i] - center;
    acc[i] += w * (d * d);
  }
}

}  // namespace predeval::kernels::avx2

#else  // stubs for targets without AVX2 codegen

namespace predeval::kernels::avx2 {

bool available() noexcept { return false; }
double sum(std::span<const double>) noexcept { return 0; }
double sum_abs_diff(std::span<const double>, std::span<const double>) noexcept { return 0; }
double sum_abs_dev(double, std::span<const double>) noexcept { return 0; }
double sum_sq_dev(double, std::span<const double>) noexcept { return 0; }
double squared_distance(std::span<const double>, std::span<const double>) noexcept { return 0; }
void add_weighted_sq_dev(std::span<double>, double, double, std::span<const double>) noexcept {}

}  // namespace predeval::kernels::avx2

#endif
