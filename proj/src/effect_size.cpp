#include "predeval/effect_size.hpp"

#include <cmath>

#include "predeval/error.hpp"

namespace predeval {

EffectCategory categorize(double magnitude) {
  if (magnitude < 0.2) return EffectCategory::negligible;
  if (magnitude < 0.5) return EffectCategory::small;
  if (magnitude < 0.8) return EffectCategory::medium;
  return EffectCategory::large;
}

std::string_view to_string(EffectCategory c) noexcept {
  switch (c) {
    case EffectCategory::negligible: return "negligible";
    case EffectCategory::small: return "small";
    case EffectCategory::medium: return "medium";
    case EffectCategory::large: return "large";
  }
  return "?";
}

EffectSize glass_delta(double treatment_mar, double control_mean_mar, double control_sd,
                       std::string treatment_id, std::string control_id,
                       std::optional<std::size_t> n_treatment,
                       std::optional<std::size_t> n_control) {
  if (!(control_sd > 0))
    throw DegenerateError("Glass's delta undefined: control SD is not positive");
  EffectSize e;
  e.delta = (treatment_mar - control_mean_mar) / control_sd;
  e.magnitude = std::fabs(e.delta);
  e.improved = treatment_mar < control_mean_mar;
  e.category = categorize(e.magnitude);
  e.treatment_id = std::move(treatment_id);
  e.control_id = std::move(control_id);
  e.small_sample_warning = (n_treatment && *n_treatment < 20) ||
                           (n_control && *n_control < 20);
  return e;
}

}  // namespace predeval
