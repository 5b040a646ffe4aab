#include "predeval/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace predeval::kernels {

namespace scalar {

double sum(std::span<const double> v) noexcept {
  double acc[4] = {0, 0, 0, 0};
  std::size_t i = 0;
  const std::size_t n = v.size();
  for (; i + 4 <= n; i += 4) {
    acc[0] += v[i];
    acc[1] += v[i + 1];
    acc[2] += v[i + 2];
    acc[3] += v[i + 3];
  }
  double s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (; i < n; ++i) s += v[i];
  return s;
}

double sum_abs_diff(std::span<const double> a, std::span<const double> b) noexcept {
  double acc[4] = {0, 0, 0, 0};
  std::size_t i = 0;
  const std::size_t n = a.size();
  for (; i + 4 <= n; i += 4) {
    acc[0] += std::fabs(a[i] - b[i]);
    acc[1] += std::fabs(a[i + 1] - b[i + 1]);
    acc[2] += std::fabs(a[i + 2] - b[i + 2]);
    acc[3] += std::fabs(a[i + 3] - b[i + 3]);
  }
  double s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

double sum_abs_dev(double center, std::span<const double> v) noexcept {
  double acc[4] = {0, 0, 0, 0};
  std::size_t i = 0;
  const std::size_t n = v.size();
  for (; i + 4 <= n; i += 4) {
    acc[0] += std::fabs(v[i] - center);
    acc[1] += std::fabs(v[i + 1] - center);
    acc[2] += std::fabs(v[i + 2] - center);
    acc[3] += std::fabs(v[i + 3] - center);
  }
  double s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (; i < n; ++i) s += std::fabs(v[i] - center);
  return s;
}

double sum_sq_dev(double center, std::span<const double> v) noexcept {
  double acc[4] = {0, 0, 0, 0};
  std::size_t i = 0;
  const std::size_t n = v.size();
  for (; i + 4 <= n; i += 4) {
    const double d0 = v[i] - center;
    const double d1 = v[i + 1] - center;
    const double d2 = v[i + 2] - center;
    const double d3 = v[i + 3] - center;
    acc[0] += d0 * d0;
    acc[1] += d1 * d1;
    acc[2] += d2 * d2;
    acc[3] += d3 * d3;
  }
  double s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (; i < n; ++i) {
    const double d = v[i] - center;
    s += d * d;
  }
  return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double acc[4] = {0, 0, 0, 0};
  std::size_t i = 0;
  const std::size_t n = a.size();
  for (; i + 4 <= n; i += 4) {
    const double d0 = a[i] - b[i];
    const double d1 = a[i + 1] - b[i + 1];
    const double d2 = a[i + 2] - b[i + 2];
    const double d3 = a[i + 3] - b[i + 3];
    acc[0] += d0 * d0;
    acc[1] += d1 * d1;
    acc[2] += d2 * d2;
    acc[3] += d3 * d3;
  }
  double s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void add_weighted_sq_dev(std::span<double> acc, double w, double center,
                         std::span<const double> v) noexcept {
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = v[i] - center;
    acc[i] += w * (d * d);
  }
}

}  // namespace scalar

namespace avx2 {
bool available() noexcept;
double sum(std::span<const double> v) noexcept;
double sum_abs_diff(std::span<const double> a, std::span<const double> b) noexcept;
double sum_abs_dev(double center, std::span<const double> v) noexcept;
double sum_sq_dev(double center, std::span<const double> v) noexcept;
double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;
void add_weighted_sq_dev(std::span<double> acc, double w, double center,
                         std::span<const double> v) noexcept;
}  // namespace avx2

namespace {

struct Table {
  double (*sum)(std::span<const double>) noexcept;
  double (*sum_abs_diff)(std::span<const double>, std::span<const double>) noexcept;
  double (*sum_abs_dev)(double, std::span<const double>) noexcept;
  double (*sum_sq_dev)(double, std::span<const double>) noexcept;
  double (*squared_distance)(std::span<const double>, std::span<const double>) noexcept;
  void (*add_weighted_sq_dev)(std::span<double>, double, double,
                              std::span<const double>) noexcept;
};

constexpr Table kScalarTable = {
    scalar::sum,        scalar::sum_abs_diff,     scalar::sum_abs_dev,
    scalar::sum_sq_dev, scalar::squared_distance, scalar::add_weighted_sq_dev,
};

constexpr Table kAvx2Table = {
    avx2::sum,        avx2::sum_abs_diff,     avx2::sum_abs_dev,
    avx2::sum_sq_dev, avx2::squared_distance, avx2::add_weighted_sq_dev,
};

Backend pick_default() noexcept {
  if (const char* env = std::getenv("PREDEVAL_KERNELS")) {
    const std::string_view want(env);
    if (want == "scalar") return Backend::scalar;
    if (want == "avx2" && avx2::available()) return Backend::avx2;
  }
  return avx2::available() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend> g_backend{pick_default()};

const Table& table(Backend b) noexcept {
  return b == Backend::avx2 ? kAvx2Table : kScalarTable;
}

}  // namespace

Backend active_backend() noexcept { return g_backend.load(std::memory_order_relaxed); }

std::string_view backend_name(Backend b) noexcept {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

bool backend_supported(Backend b) noexcept {
  return b == Backend::scalar || avx2::available();
}

void set_backend(Backend b) {
  if (!backend_supported(b))
    throw std::invalid_argument("kernel backend not supported on this CPU");
  g_backend.store(b, std::memory_order_relaxed);
}

double sum(std::span<const double> v) noexcept { return table(active_backend()).sum(v); }

double sum_abs_diff(std::span<const double> a, std::span<const double> b) noexcept {
  return table(active_backend()).sum_abs_diff(a, b);
}

double sum_abs_dev(double center, std::span<const double> v) noexcept {
  return table(active_backend()).sum_abs_dev(center, v);
}

double sum_sq_dev(double center, std::span<const double> v) noexcept {
  return table(active_backend()).sum_sq_dev(center, v);
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  return table(active_backend()).squared_distance(a, b);
}

void add_weighted_sq_dev(std::span<double> acc, double w, double center,
                         std::span<const double> v) noexcept {
  table(active_backend()).add_weighted_sq_dev(acc, w, center, v);
}

}  // namespace predeval::kernels
