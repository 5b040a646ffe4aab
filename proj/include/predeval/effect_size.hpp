#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

// Glass's delta: the accuracy difference standardised by the control's
// spread, classified with Cohen's conventional categories. A pooled SD is
// deliberately not used; the control (random guessing, or the incumbent
// technique) supplies the yardstick.

namespace predeval {

enum class EffectCategory { negligible, small, medium, large };

// Half-open bands: [0,0.2) negligible, [0.2,0.5) small, [0.5,0.8) medium,
// [0.8,inf) large.
EffectCategory categorize(double magnitude);

std::string_view to_string(EffectCategory c) noexcept;

struct EffectSize {
  // (treatment MAR - control mean MAR) / control SD; negative = improvement
  double delta = 0;
  double magnitude = 0;  // |delta|
  bool improved = false;
  EffectCategory category = EffectCategory::negligible;
  std::string control_id;
  std::string treatment_id;
  // Set when either sample had fewer than 20 cases: Glass's delta is a
  // biased estimator there and Hedges's g may be preferable.
  bool small_sample_warning = false;
};

// control_sd must be positive; a zero-spread control (all outcomes equal)
// raises DegenerateError.
EffectSize glass_delta(double treatment_mar, double control_mean_mar, double control_sd,
                       std::string treatment_id = {}, std::string control_id = {},
                       std::optional<std::size_t> n_treatment = std::nullopt,
                       std::optional<std::size_t> n_control = std::nullopt);

}  // namespace predeval
