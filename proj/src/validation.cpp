#include "predeval/validation.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "predeval/error.hpp"
#include "predeval/rng.hpp"

namespace predeval {

ValidationScheme ValidationScheme::parse(const std::string& text) {
  ValidationScheme s;
  std::string kind = text;
  std::string params;
  if (const auto colon = text.find(':'); colon != std::string::npos) {
    kind = text.substr(0, colon);
    params = text.substr(colon + 1);
  }
  if (kind == "loocv") s.kind = Kind::loocv;
  else if (kind == "kfold") s.kind = Kind::repeated_kfold;
  else if (kind == "holdout") s.kind = Kind::holdout;
  else throw std::invalid_argument("unknown validation scheme '" + kind + "'");

  std::stringstream ss(params);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("bad scheme parameter '" + item + "' (want key=value)");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    try {
      if (key == "folds") s.folds = std::stoul(value);
      else if (key == "repeats") s.repeats = std::stoul(value);
      else if (key == "fraction") s.holdout_fraction = std::stod(value);
      else throw std::invalid_argument("unknown scheme parameter '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument("bad value for scheme parameter '" + key + "'");
    }
  }
  if (s.kind == Kind::repeated_kfold && s.folds < 2)
    throw std::invalid_argument("k-fold needs folds >= 2");
  if (s.repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  if (s.kind == Kind::holdout && !(s.holdout_fraction > 0 && s.holdout_fraction < 1))
    throw std::invalid_argument("holdout fraction must lie in (0,1)");
  return s;
}

std::string ValidationScheme::label() const {
  switch (kind) {
    case Kind::loocv: return "loocv";
    case Kind::repeated_kfold:
      return "kfold(folds=" + std::to_string(folds) + ",repeats=" + std::to_string(repeats) + ")";
    case Kind::holdout: {
      char buf[48];
      std::snprintf(buf, sizeof buf, "holdout(fraction=%g)", holdout_fraction);
      return buf;
    }
  }
  return "?";
}

namespace {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t repeat, std::uint64_t fold) {
  std::uint64_t st = base;
  st ^= splitmix64(st) + (repeat + 1) * 0x9E3779B97F4A7C15ULL;
  st ^= splitmix64(st) + (fold + 1) * 0xD1B54A32D192ED03ULL;
  return splitmix64(st);
}

// Fits per fold, optionally reusing the first fold's subset selection
// (--fast-selection): later folds then train a plain EBA on the projected
// features and, for donor selection, on the retained donors present in
// that fold's training set.
class FoldFitter {
 public:
  explicit FoldFitter(const PredictorSpec& spec) : spec_(spec) {
    selective_ = spec.kind == PredictorKind::eba_fss || spec.kind == PredictorKind::eba_css;
  }

  struct Model {
    FittedPredictor fitted;
    std::vector<std::size_t> projection;  // empty = identity
  };

  Model fit_fold(const Dataset& train, std::uint64_t fold_seed) {
    PredictorSpec fold_spec = spec_;
    fold_spec.seed = fold_seed;
    if (!spec_.fast_selection || !selective_) return {fit(fold_spec, train), {}};

    if (!cached_) {
      FittedPredictor full = fit(fold_spec, train);
      features_.assign(full.selected_features().begin(), full.selected_features().end());
      retained_.insert(full.retained_case_ids().begin(), full.retained_case_ids().end());
      cached_ = true;
      return {std::move(full), {}};
    }

    Dataset projected = train.with_features(features_);
    if (spec_.kind == PredictorKind::eba_css && !retained_.empty()) {
      std::vector<std::size_t> keep;
      for (std::size_t i = 0; i < projected.size(); ++i)
        if (retained_.count(projected.cases()[i].id)) keep.push_back(i);
      // Donors never vetted by the first-fold selection stay in play when
      // the retained pool would be too small to serve k analogies.
      if (keep.size() >= std::max<std::size_t>(spec_.k, 2))
        projected = projected.subset(keep);
    }
    PredictorSpec plain = spec_;
    plain.kind = PredictorKind::eba;
    plain.seed = fold_seed;
    return {fit(plain, projected), features_};
  }

  static double predict(const Model& m, std::span<const double> target) {
    if (m.projection.empty()) return m.fitted.predict(target);
    std::vector<double> proj;
    proj.reserve(m.projection.size());
    for (std::size_t f : m.projection) proj.push_back(target[f]);
    return m.fitted.predict(proj);
  }

 private:
  PredictorSpec spec_;
  bool selective_ = false;
  bool cached_ = false;
  std::vector<std::size_t> features_;
  std::set<std::string> retained_;
};

}  // namespace

PredictionRun run_validation(const Dataset& data, const PredictorSpec& spec,
                             const ValidationScheme& scheme) {
  const std::size_t n = data.size();
  if (n < 3) throw DataError("validation needs at least 3 cases");

  std::vector<PredictionPair> pairs;
  std::vector<std::string> case_ids;
  FoldFitter fitter(spec);

  auto fit_and_predict = [&](const Dataset& train, std::span<const std::size_t> test,
                             std::uint64_t fold_seed, const std::string& fold_name) {
    FoldFitter::Model model;
    try {
      model = fitter.fit_fold(train, fold_seed);
    } catch (const DataError& e) {
      throw DataError("fold fit failed (" + fold_name + "): " + e.what());
    }
    for (std::size_t t : test) {
      const auto& c = data.cases()[t];
      pairs.push_back({c.outcome, FoldFitter::predict(model, c.features)});
      case_ids.push_back(c.id);
    }
  };

  switch (scheme.kind) {
    case ValidationScheme::Kind::loocv: {
      for (std::size_t t = 0; t < n; ++t) {
        const std::size_t test[] = {t};
        fit_and_predict(data.without_case(t), test, derive_seed(spec.seed, 0, t),
                        "leave-one-out fold for case '" + data.cases()[t].id + "'");
      }
      break;
    }
    case ValidationScheme::Kind::repeated_kfold: {
      if (scheme.folds > n)
        throw std::invalid_argument("k-fold: folds exceed the number of cases");
      for (std::size_t rep = 0; rep < scheme.repeats; ++rep) {
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        Rng rng = Rng::substream(scheme.seed, rep);
        shuffle(std::span<std::size_t>(perm), rng);

        const std::string prefix =
            scheme.repeats > 1 ? "r" + std::to_string(rep) + ":" : "";
        std::size_t offset = 0;
        std::vector<std::vector<std::size_t>> folds(scheme.folds);
        for (std::size_t j = 0; j < scheme.folds; ++j) {
          std::size_t size = n / scheme.folds + (j < n % scheme.folds ? 1 : 0);
          folds[j].assign(perm.begin() + offset, perm.begin() + offset + size);
          // test cases in dataset order keeps output independent of the shuffle
          std::sort(folds[j].begin(), folds[j].end());
          offset += size;
        }
        // reassemble predictions in dataset order within the repeat
        std::vector<PredictionPair> rep_pairs(n);
        std::vector<char> filled(n, 0);
        for (std::size_t j = 0; j < scheme.folds; ++j) {
          std::vector<std::size_t> train_idx;
          train_idx.reserve(n - folds[j].size());
          std::vector<char> in_fold(n, 0);
          for (std::size_t t : folds[j]) in_fold[t] = 1;
          for (std::size_t i = 0; i < n; ++i)
            if (!in_fold[i]) train_idx.push_back(i);
          const Dataset train = data.subset(train_idx);

          FoldFitter::Model model;
          try {
            model = fitter.fit_fold(train, derive_seed(spec.seed, rep, j));
          } catch (const DataError& e) {
            throw DataError("fold fit failed (repeat " + std::to_string(rep) + ", fold " +
                            std::to_string(j) + "): " + e.what());
          }
          for (std::size_t t : folds[j]) {
            rep_pairs[t] = {data.cases()[t].outcome,
                            FoldFitter::predict(model, data.cases()[t].features)};
            filled[t] = 1;
          }
        }
        for (std::size_t t = 0; t < n; ++t) {
          if (!filled[t]) throw std::logic_error("k-fold left a case unpredicted");
          pairs.push_back(rep_pairs[t]);
          case_ids.push_back(prefix + data.cases()[t].id);
        }
      }
      break;
    }
    case ValidationScheme::Kind::holdout: {
      std::vector<std::size_t> perm(n);
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      Rng rng = Rng::substream(scheme.seed, 0);
      shuffle(std::span<std::size_t>(perm), rng);
      std::size_t n_test = static_cast<std::size_t>(
          std::llround(scheme.holdout_fraction * static_cast<double>(n)));
      n_test = std::clamp<std::size_t>(n_test, 1, n - 2);
      std::vector<std::size_t> test(perm.begin(), perm.begin() + n_test);
      std::sort(test.begin(), test.end());
      std::vector<std::size_t> train_idx;
      std::vector<char> in_test(n, 0);
      for (std::size_t t : test) in_test[t] = 1;
      for (std::size_t i = 0; i < n; ++i)
        if (!in_test[i]) train_idx.push_back(i);
      fit_and_predict(data.subset(train_idx), test, derive_seed(spec.seed, 0, 0),
                      "holdout split");
      break;
    }
  }

  return PredictionRun(spec.label(), std::move(pairs), std::move(case_ids));
}

EvaluationResult evaluate(const Dataset& data, const PredictorSpec& spec,
                          const ValidationScheme& scheme, const StatsConfig& stats) {
  PredictionRun run = run_validation(data, spec, scheme);
  const OutcomeSample sample(
      std::vector<double>(run.actuals().begin(), run.actuals().end()));
  BaselineDistribution baseline =
      BaselineDistribution::simulate(sample, stats.baseline_runs, stats.seed);
  AccuracyReport report = make_report(run, stats.pred_level,
                                      baseline.mean_mar() > 0
                                          ? std::optional<double>(baseline.mean_mar())
                                          : std::nullopt);
  return {std::move(run), std::move(report), std::move(baseline)};
}

}  // namespace predeval
