#include "predeval/predictors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "predeval/error.hpp"
#include "predeval/kernels.hpp"
#include "predeval/numerics.hpp"
#include "predeval/rng.hpp"
#include "predeval/stats.hpp"

namespace predeval {

Dataset::Dataset(std::string name, std::vector<std::string> feature_names,
                 std::vector<Case> cases)
    : name_(std::move(name)),
      feature_names_(std::move(feature_names)),
      cases_(std::move(cases)) {
  if (cases_.empty()) throw DataError("dataset '" + name_ + "' has no cases");
  std::set<std::string> ids;
  for (const auto& c : cases_) {
    if (c.features.size() != feature_names_.size())
      throw DataError("dataset '" + name_ + "': case '" + c.id +
                      "' has a wrong feature count");
    if (!(c.outcome > 0) || !std::isfinite(c.outcome))
      throw DataError("dataset '" + name_ + "': case '" + c.id +
                      "' has a non-positive outcome");
    for (double f : c.features)
      if (!std::isfinite(f))
        throw DataError("dataset '" + name_ + "': case '" + c.id +
                        "' has a non-finite feature");
    if (!ids.insert(c.id).second)
      throw DataError("dataset '" + name_ + "': duplicate case id '" + c.id + "'");
  }
}

std::vector<double> Dataset::outcomes() const {
  std::vector<double> out(cases_.size());
  for (std::size_t i = 0; i < cases_.size(); ++i) out[i] = cases_[i].outcome;
  return out;
}

Dataset Dataset::without_case(std::size_t drop) const {
  std::vector<Case> kept;
  kept.reserve(cases_.size() - 1);
  for (std::size_t i = 0; i < cases_.size(); ++i)
    if (i != drop) kept.push_back(cases_[i]);
  return Dataset(name_, feature_names_, std::move(kept));
}

Dataset Dataset::subset(std::span<const std::size_t> keep) const {
  std::vector<Case> kept;
  kept.reserve(keep.size());
  for (std::size_t i : keep) kept.push_back(cases_.at(i));
  return Dataset(name_, feature_names_, std::move(kept));
}

Dataset Dataset::with_features(std::span<const std::size_t> features) const {
  std::vector<std::string> names;
  for (std::size_t f : features) names.push_back(feature_names_.at(f));
  std::vector<Case> projected = cases_;
  for (auto& c : projected) {
    std::vector<double> vals;
    vals.reserve(features.size());
    for (std::size_t f : features) vals.push_back(c.features[f]);
    c.features = std::move(vals);
  }
  return Dataset(name_, std::move(names), std::move(projected));
}

std::string_view to_string(PredictorKind k) noexcept {
  switch (k) {
    case PredictorKind::mean: return "mean";
    case PredictorKind::median: return "median";
    case PredictorKind::guess: return "guess";
    case PredictorKind::eba: return "eba";
    case PredictorKind::eba_fss: return "eba_fss";
    case PredictorKind::eba_css: return "eba_css";
    case PredictorKind::stepwise: return "stepwise";
  }
  return "?";
}

PredictorSpec PredictorSpec::parse(const std::string& text) {
  PredictorSpec spec;
  std::string kind = text;
  std::string params;
  if (const auto colon = text.find(':'); colon != std::string::npos) {
    kind = text.substr(0, colon);
    params = text.substr(colon + 1);
  }
  if (kind == "mean") spec.kind = PredictorKind::mean;
  else if (kind == "median") spec.kind = PredictorKind::median;
  else if (kind == "guess") spec.kind = PredictorKind::guess;
  else if (kind == "eba") spec.kind = PredictorKind::eba;
  else if (kind == "eba_fss") spec.kind = PredictorKind::eba_fss;
  else if (kind == "eba_css") spec.kind = PredictorKind::eba_css;
  else if (kind == "stepwise") spec.kind = PredictorKind::stepwise;
  else throw std::invalid_argument("unknown predictor kind '" + kind + "'");

  std::stringstream ss(params);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("bad predictor parameter '" + item + "' (want key=value)");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    try {
      if (key == "k") spec.k = std::stoul(value);
      else if (key == "weighting") {
        if (value == "inverse" || value == "inverse-distance" || value == "inv")
          spec.weighting = Weighting::inverse_distance;
        else if (value == "uniform") spec.weighting = Weighting::uniform;
        else throw std::invalid_argument("unknown weighting '" + value + "'");
      } else if (key == "seed") spec.seed = std::stoull(value);
      else if (key == "alpha_in") spec.stepwise_alpha = std::stod(value);
      else if (key == "floor") spec.prediction_floor = std::stod(value);
      else throw std::invalid_argument("unknown predictor parameter '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument("bad value for predictor parameter '" + key + "'");
    }
  }
  if (spec.k < 1) throw std::invalid_argument("predictor k must be >= 1");
  if (!(spec.stepwise_alpha > 0 && spec.stepwise_alpha < 1))
    throw std::invalid_argument("alpha_in must lie in (0,1)");
  return spec;
}

std::string PredictorSpec::label() const {
  std::string s(to_string(kind));
  if (kind == PredictorKind::eba || kind == PredictorKind::eba_fss ||
      kind == PredictorKind::eba_css) {
    s += "(k=" + std::to_string(k);
    s += weighting == Weighting::inverse_distance ? ",inv)" : ",uniform)";
  }
  return s;
}

namespace {

// Relative tolerance for objective comparisons in the subset searches:
// bit-level noise (e.g. identical feature copies summed in different
// group sizes) must not break the documented tie rules.
constexpr double kObjectiveTol = 1e-12;

bool objective_improves(double candidate, double best) {
  if (!std::isfinite(best)) return true;  // nothing accepted yet
  return candidate < best - kObjectiveTol * std::max(std::fabs(candidate), std::fabs(best));
}

bool objective_ties(double candidate, double best) {
  if (!std::isfinite(best)) return false;
  return std::fabs(candidate - best) <=
         kObjectiveTol * std::max(std::fabs(candidate), std::fabs(best));
}

// LOOCV machinery for EBA on one training set. Distances are computed on
// min-max normalised features where the min/max exclude the held-out
// target, matching what fitting on the reduced set would do.
class EbaLoocvEvaluator {
 public:
  EbaLoocvEvaluator(const Dataset& train, std::size_t k, Weighting weighting)
      : n_(train.size()), k_(k), weighting_(weighting), outcomes_(train.outcomes()) {
    if (n_ < 2) throw DataError("EBA LOOCV needs at least 2 cases");
    const std::size_t f = train.feature_count();
    columns_.resize(f, std::vector<double>(n_));
    for (std::size_t j = 0; j < f; ++j)
      for (std::size_t i = 0; i < n_; ++i)
        columns_[j][i] = train.cases()[i].features[j];
    ext_.resize(f);
    std::vector<double> sorted;
    for (std::size_t j = 0; j < f; ++j) {
      sorted = columns_[j];
      std::sort(sorted.begin(), sorted.end());
      ext_[j] = {sorted.front(), sorted[1], sorted[n_ - 2], sorted.back()};
    }
  }

  std::size_t size() const noexcept { return n_; }

  // Sum over all cases t of |y_t - estimate from k nearest donors|, donors
  // restricted by mask (mask empty = all donors).
  double sar(std::span<const std::size_t> features, std::span<const char> donor_mask) const {
    double total = 0;
    std::vector<double> dist2(n_);
    std::vector<std::pair<double, std::size_t>> best;
    best.reserve(k_ + 1);
    for (std::size_t t = 0; t < n_; ++t) {
      std::fill(dist2.begin(), dist2.end(), 0.0);
      for (std::size_t fj : features) {
        const double x = columns_[fj][t];
        const auto& e = ext_[fj];
        const double lo = (x == e.lo0) ? e.lo1 : e.lo0;
        const double hi = (x == e.hi0) ? e.hi1 : e.hi0;
        const double range = hi - lo;
        if (range > 0)
          kernels::add_weighted_sq_dev(dist2, 1.0 / (range * range), x, columns_[fj]);
      }

      best.clear();
      for (std::size_t r = 0; r < n_; ++r) {
        if (r == t) continue;
        if (!donor_mask.empty() && !donor_mask[r]) continue;
        const std::pair<double, std::size_t> cand{dist2[r], r};
        if (best.size() < k_) {
          best.insert(std::upper_bound(best.begin(), best.end(), cand), cand);
        } else if (cand < best.back()) {
          best.pop_back();
          best.insert(std::upper_bound(best.begin(), best.end(), cand), cand);
        }
      }
      if (best.size() < k_)
        throw DataError("EBA LOOCV: fewer than k donors available for a target");

      total += std::fabs(outcomes_[t] - estimate(best));
    }
    return total;
  }

  double estimate(const std::vector<std::pair<double, std::size_t>>& neighbours) const {
    double num = 0, den = 0;
    for (const auto& [d2, idx] : neighbours) {
      const double w = weighting_ == Weighting::inverse_distance
                           ? 1.0 / (std::sqrt(d2) + kDistanceEpsilon)
                           : 1.0;
      num += w * outcomes_[idx];
      den += w;
    }
    return num / den;
  }

 private:
  struct Extremes {
    double lo0, lo1, hi1, hi0;
  };

  std::size_t n_;
  std::size_t k_;
  Weighting weighting_;
  std::vector<double> outcomes_;
  std::vector<std::vector<double>> columns_;
  std::vector<Extremes> ext_;
};

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

}  // namespace

double eba_loocv_sar(const Dataset& train, const PredictorSpec& base,
                     std::span<const std::size_t> features,
                     std::span<const std::size_t> donors) {
  const EbaLoocvEvaluator eval(train, base.k, base.weighting);
  const auto feats = features.empty() ? all_indices(train.feature_count())
                                      : std::vector<std::size_t>(features.begin(), features.end());
  std::vector<char> mask;
  if (!donors.empty()) {
    mask.assign(train.size(), 0);
    for (std::size_t d : donors) mask.at(d) = 1;
  }
  return eval.sar(feats, mask);
}

std::vector<std::size_t> select_features_fss(const Dataset& train,
                                             const PredictorSpec& base) {
  const std::size_t f = train.feature_count();
  if (f == 0) throw DataError("feature subset selection needs at least one feature");
  const EbaLoocvEvaluator eval(train, base.k, base.weighting);
  const std::vector<char> no_mask;

  double best_obj = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_subset;

  if (f <= 16) {
    std::vector<std::size_t> subset;
    for (std::uint32_t mask = 1; mask < (1u << f); ++mask) {
      subset.clear();
      for (std::size_t j = 0; j < f; ++j)
        if (mask & (1u << j)) subset.push_back(j);
      const double obj = eval.sar(subset, no_mask);
      if (objective_improves(obj, best_obj) ||
          (objective_ties(obj, best_obj) &&
           std::lexicographical_compare(subset.begin(), subset.end(), best_subset.begin(),
                                        best_subset.end()))) {
        best_obj = obj;
        best_subset = subset;
      }
    }
    return best_subset;
  }

  // Greedy forward selection for wide datasets.
  std::vector<std::size_t> selected;
  while (selected.size() < f) {
    double step_obj = std::numeric_limits<double>::infinity();
    std::size_t step_feature = f;
    std::vector<std::size_t> candidate;
    for (std::size_t j = 0; j < f; ++j) {
      if (std::find(selected.begin(), selected.end(), j) != selected.end()) continue;
      candidate = selected;
      candidate.insert(std::upper_bound(candidate.begin(), candidate.end(), j), j);
      const double obj = eval.sar(candidate, no_mask);
      if (objective_improves(obj, step_obj)) {  // ties keep the smaller index
        step_obj = obj;
        step_feature = j;
      }
    }
    if (step_feature == f || !objective_improves(step_obj, best_obj)) break;
    selected.insert(std::upper_bound(selected.begin(), selected.end(), step_feature),
                    step_feature);
    best_obj = step_obj;
    best_subset = selected;
  }
  if (best_subset.empty())
    throw DataError("greedy feature selection found no usable feature");
  return best_subset;
}

std::vector<std::size_t> select_cases_css(const Dataset& train, const PredictorSpec& base,
                                          std::span<const std::size_t> features) {
  const std::size_t n = train.size();
  if (n < base.k + 2) throw DataError("case subset selection needs at least k + 2 cases");
  const EbaLoocvEvaluator eval(train, base.k, base.weighting);
  const auto feats = features.empty() ? all_indices(train.feature_count())
                                      : std::vector<std::size_t>(features.begin(), features.end());

  std::vector<char> mask(n, 1);
  std::size_t retained = n;
  double current = eval.sar(feats, mask);

  while (retained > base.k + 2) {
    double best_obj = std::numeric_limits<double>::infinity();
    std::size_t best_case = n;
    for (std::size_t c = 0; c < n; ++c) {
      if (!mask[c]) continue;
      mask[c] = 0;
      const double obj = eval.sar(feats, mask);
      mask[c] = 1;
      if (objective_improves(obj, best_obj) ||
          (objective_ties(obj, best_obj) && best_case < n &&
           train.cases()[c].id < train.cases()[best_case].id)) {
        best_obj = obj;
        best_case = c;
      }
    }
    if (best_case == n || !objective_improves(best_obj, current)) break;
    mask[best_case] = 0;
    --retained;
    current = best_obj;
  }

  std::vector<std::size_t> kept;
  kept.reserve(retained);
  for (std::size_t i = 0; i < n; ++i)
    if (mask[i]) kept.push_back(i);
  return kept;
}

namespace {

// Solves the symmetric positive definite system A x = b by Cholesky.
// Returns false when A is (numerically) singular.
bool solve_spd(std::vector<std::vector<double>> a, std::vector<double> b,
               std::vector<double>& x) {
  const std::size_t n = a.size();
  double scale = 0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::fabs(a[i][i]));
  if (scale == 0) return false;
  // L in the lower triangle of a
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j][k] * a[j][k];
    if (!(d > scale * 1e-12)) return false;
    a[j][j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i][k] * a[j][k];
      a[i][j] = s / a[j][j];
    }
  }
  // forward then backward substitution
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i][k] * b[k];
    b[i] = s / a[i][i];
  }
  x.assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[k][i] * x[k];
    x[i] = s / a[i][i];
  }
  return true;
}

struct OlsFit {
  std::vector<double> beta;  // intercept first
  double rss = 0;
  std::vector<std::vector<double>> xtx;
};

// OLS of outcome on the selected feature columns (plus intercept) via the
// normal equations. Returns nullopt when X'X is singular.
std::optional<OlsFit> ols(const Dataset& data, const std::vector<std::size_t>& features) {
  const std::size_t n = data.size();
  const std::size_t p = features.size() + 1;
  std::vector<std::vector<double>> xtx(p, std::vector<double>(p, 0));
  std::vector<double> xty(p, 0);

  auto column = [&](std::size_t j, std::size_t row) -> double {
    return j == 0 ? 1.0 : data.cases()[row].features[features[j - 1]];
  };
  for (std::size_t r = 0; r < n; ++r) {
    const double y = data.cases()[r].outcome;
    for (std::size_t i = 0; i < p; ++i) {
      const double xi = column(i, r);
      xty[i] += xi * y;
      for (std::size_t j = i; j < p; ++j) xtx[i][j] += xi * column(j, r);
    }
  }
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < i; ++j) xtx[i][j] = xtx[j][i];

  OlsFit fit;
  if (!solve_spd(xtx, xty, fit.beta)) return std::nullopt;
  fit.xtx = std::move(xtx);
  double rss = 0;
  for (std::size_t r = 0; r < n; ++r) {
    double yhat = 0;
    for (std::size_t i = 0; i < p; ++i) yhat += fit.beta[i] * column(i, r);
    const double e = data.cases()[r].outcome - yhat;
    rss += e * e;
  }
  fit.rss = std::max(0.0, rss);
  return fit;
}

// Variance factor (X'X)^-1[idx][idx], via one solve against a unit vector.
std::optional<double> inverse_diagonal(const std::vector<std::vector<double>>& xtx,
                                       std::size_t idx) {
  std::vector<double> e(xtx.size(), 0.0);
  e[idx] = 1.0;
  std::vector<double> z;
  if (!solve_spd(xtx, std::move(e), z)) return std::nullopt;
  return z[idx];
}

}  // namespace

StepwiseModel fit_stepwise(const Dataset& train, double alpha_in) {
  if (train.size() < 3) throw DataError("stepwise regression needs at least 3 cases");
  const std::size_t f = train.feature_count();
  if (f == 0) throw DataError("stepwise regression needs at least one feature");
  if (!(alpha_in > 0 && alpha_in < 1))
    throw std::invalid_argument("stepwise alpha_in must lie in (0,1)");

  for (std::size_t j = 0; j < f; ++j) {
    const double first = train.cases()[0].features[j];
    bool constant = true;
    for (const auto& c : train.cases())
      if (c.features[j] != first) {
        constant = false;
        break;
      }
    if (constant)
      throw DataError("stepwise regression: feature '" + train.feature_names()[j] +
                      "' has zero variance");
  }

  StepwiseModel model;
  std::vector<std::size_t> selected;
  auto base = ols(train, selected);
  if (!base) throw DataError("stepwise regression: degenerate design");
  double current_rss = base->rss;

  while (selected.size() < f) {
    const std::size_t p_next = selected.size() + 2;  // intercept + selected + candidate
    if (train.size() <= p_next) break;               // no residual degrees of freedom
    const double dof = static_cast<double>(train.size() - p_next);

    double best_p = 1.0;
    std::size_t best_feature = f;
    if (current_rss == 0) break;  // already a perfect fit

    for (std::size_t j = 0; j < f; ++j) {
      if (std::find(selected.begin(), selected.end(), j) != selected.end()) continue;
      auto candidate = selected;
      candidate.push_back(j);
      const auto fit = ols(train, candidate);
      if (!fit) {
        model.warnings.push_back("stepwise: skipped collinear feature '" +
                                 train.feature_names()[j] + "'");
        continue;
      }
      const auto vf = inverse_diagonal(fit->xtx, candidate.size());
      if (!vf) continue;
      const double beta_j = fit->beta[candidate.size()];
      const double sigma2 = fit->rss / dof;
      const double se = std::sqrt(std::max(0.0, sigma2 * *vf));
      double p;
      if (se == 0)
        p = beta_j == 0 ? 1.0 : std::numeric_limits<double>::min();
      else
        p = numerics::student_t_two_sided_p(beta_j / se, dof);
      if (p < best_p) {
        best_p = p;
        best_feature = j;
      }
    }

    if (best_feature == f || best_p >= alpha_in) break;
    selected.push_back(best_feature);
    const auto refit = ols(train, selected);
    if (!refit) throw DataError("stepwise regression: design became singular");
    current_rss = refit->rss;
  }

  std::sort(selected.begin(), selected.end());
  const auto final_fit = ols(train, selected);
  if (!final_fit) throw DataError("stepwise regression: design became singular");
  model.features = selected;
  model.intercept = final_fit->beta[0];
  model.coefficients.assign(final_fit->beta.begin() + 1, final_fit->beta.end());
  model.rss = final_fit->rss;
  return model;
}

FittedPredictor fit(const PredictorSpec& spec, const Dataset& train) {
  FittedPredictor fp;
  fp.spec_ = spec;
  fp.input_dim_ = train.feature_count();

  switch (spec.kind) {
    case PredictorKind::mean:
      fp.constant_ = mean_of(train.outcomes());
      break;
    case PredictorKind::median:
      fp.constant_ = median_of(train.outcomes());
      break;
    case PredictorKind::guess: {
      auto g = std::make_shared<FittedPredictor::GuessModel>();
      g->outcomes = train.outcomes();
      g->seed = spec.seed;
      fp.guess_ = std::move(g);
      break;
    }
    case PredictorKind::eba:
    case PredictorKind::eba_fss:
    case PredictorKind::eba_css: {
      if (train.size() < 2) throw DataError("EBA needs at least 2 training cases");
      if (spec.k > train.size())
        throw DataError("EBA: k exceeds the number of available donors");

      std::vector<std::size_t> features = all_indices(train.feature_count());
      std::vector<std::size_t> donors = all_indices(train.size());
      if (spec.kind == PredictorKind::eba_fss || spec.kind == PredictorKind::eba_css)
        features = select_features_fss(train, spec);
      if (spec.kind == PredictorKind::eba_css)
        donors = select_cases_css(train, spec, features);

      auto m = std::make_shared<FittedPredictor::EbaModel>();
      m->k = spec.k;
      m->weighting = spec.weighting;
      m->features = features;
      // Normalisation bounds come from the full training set; the donor
      // pool only constrains which cases may serve as analogies.
      m->min.resize(train.feature_count());
      m->range.resize(train.feature_count());
      for (std::size_t j = 0; j < train.feature_count(); ++j) {
        double lo = train.cases()[0].features[j], hi = lo;
        for (const auto& c : train.cases()) {
          lo = std::min(lo, c.features[j]);
          hi = std::max(hi, c.features[j]);
        }
        m->min[j] = lo;
        m->range[j] = hi - lo;
      }
      m->feature_columns.resize(train.feature_count(), std::vector<double>(donors.size()));
      m->outcomes.resize(donors.size());
      for (std::size_t d = 0; d < donors.size(); ++d) {
        const auto& c = train.cases()[donors[d]];
        for (std::size_t j = 0; j < train.feature_count(); ++j)
          m->feature_columns[j][d] = c.features[j];
        m->outcomes[d] = c.outcome;
        fp.retained_ids_.push_back(c.id);
      }
      if (spec.kind == PredictorKind::eba) fp.retained_ids_.clear();  // no selection
      if (spec.k > m->outcomes.size())
        throw DataError("EBA: k exceeds the number of available donors");
      fp.selected_features_ =
          (spec.kind == PredictorKind::eba) ? std::vector<std::size_t>{} : features;
      fp.eba_ = std::move(m);
      break;
    }
    case PredictorKind::stepwise: {
      const StepwiseModel sw = fit_stepwise(train, spec.stepwise_alpha);
      auto lin = std::make_shared<FittedPredictor::LinearModel>();
      lin->features = sw.features;
      lin->coefficients = sw.coefficients;
      lin->intercept = sw.intercept;
      lin->floor = spec.prediction_floor;
      fp.selected_features_ = sw.features;
      fp.warnings_ = sw.warnings;
      fp.linear_ = std::move(lin);
      break;
    }
  }
  return fp;
}

double FittedPredictor::predict(std::span<const double> features) const {
  if (features.size() != input_dim_)
    throw DataError("predict: feature vector length " + std::to_string(features.size()) +
                    " does not match training dimension " + std::to_string(input_dim_));

  switch (spec_.kind) {
    case PredictorKind::mean:
    case PredictorKind::median:
      return constant_;
    case PredictorKind::guess: {
      const std::uint64_t call = guess_->counter.fetch_add(1, std::memory_order_relaxed);
      Rng rng = Rng::substream(guess_->seed, call);
      return guess_->outcomes[rng.bounded(guess_->outcomes.size())];
    }
    case PredictorKind::stepwise: {
      double y = linear_->intercept;
      for (std::size_t i = 0; i < linear_->features.size(); ++i)
        y += linear_->coefficients[i] * features[linear_->features[i]];
      return std::max(y, linear_->floor);
    }
    case PredictorKind::eba:
    case PredictorKind::eba_fss:
    case PredictorKind::eba_css: {
      const auto& m = *eba_;
      const std::size_t donors = m.outcomes.size();
      std::vector<double> dist2(donors, 0.0);
      for (std::size_t fj : m.features) {
        if (m.range[fj] > 0)
          kernels::add_weighted_sq_dev(dist2, 1.0 / (m.range[fj] * m.range[fj]),
                                       features[fj], m.feature_columns[fj]);
      }
      std::vector<std::pair<double, std::size_t>> best;
      best.reserve(m.k + 1);
      for (std::size_t r = 0; r < donors; ++r) {
        const std::pair<double, std::size_t> cand{dist2[r], r};
        if (best.size() < m.k) {
          best.insert(std::upper_bound(best.begin(), best.end(), cand), cand);
        } else if (cand < best.back()) {
          best.pop_back();
          best.insert(std::upper_bound(best.begin(), best.end(), cand), cand);
        }
      }
      double num = 0, den = 0;
      for (const auto& [d2, idx] : best) {
        const double w = m.weighting == Weighting::inverse_distance
                             ? 1.0 / (std::sqrt(d2) + kDistanceEpsilon)
                             : 1.0;
        num += w * m.outcomes[idx];
        den += w;
      }
      return num / den;
    }
  }
  return constant_;
}

}  // namespace predeval
