#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "predeval/baseline.hpp"
#include "predeval/effect_size.hpp"
#include "predeval/inference.hpp"
#include "predeval/stats.hpp"

// The decision procedure over pairs of prediction systems:
//   Q1  does each system beat random guessing at the alpha quantile?
//   Q2  is the residual difference unlikely under the null (p < alpha)?
//   Q3  is the effect size big enough to matter (|delta| >= threshold)?
// A strict preference needs all three; otherwise the pair is indifferent.
// Verdicts assemble into a preference graph whose transitive reduction is
// the Hasse diagram.

namespace predeval {

enum class TailPolicy { automatic, one_sided, two_sided };
enum class PairingPolicy { automatic, paired, unpaired };

struct DecisionConfig {
  double alpha = 0.05;
  double delta_threshold = 0.2;
  // automatic: one-sided for paired comparisons (Wilcoxon), two-sided for
  // unpaired ones (Mann-Whitney U).
  TailPolicy tail = TailPolicy::automatic;
  PairingPolicy pairing = PairingPolicy::automatic;
};

enum class Relation {
  left_precedes_right,   // left is worse:  left < right
  right_precedes_left,   // right is worse: right < left
  indifferent,
  incomparable,
};

std::string_view to_string(Relation r) noexcept;

struct Q1Result {
  bool pass = false;
  double mar = 0;
  double threshold = 0;   // the alpha quantile of the baseline MAR samples
  double empirical_p = 1; // fraction of baseline runs at or below the MAR
};

// pass iff mar(run) < quantile(baseline, alpha); the baseline must have
// been built on the same actuals (any order) as the run.
Q1Result q1_better_than_guessing(const PredictionRun& run,
                                 const BaselineDistribution& baseline, double alpha);

struct PairEvidence {
  bool q1_left = false;
  bool q1_right = false;
  double mar_left = 0;
  double mar_right = 0;
  double p_value = 1;
  double delta_magnitude = 0;
  EffectCategory delta_category = EffectCategory::negligible;
  TestResult test;
  bool paired = false;
  // Both sides failed Q1: the relation is reported but neither system is
  // actually predicting, so build_order() skips the edge by default.
  bool not_predicting = false;
};

struct PairVerdict {
  std::string left_id;
  std::string right_id;
  Relation relation = Relation::indifferent;
  PairEvidence evidence;
};

// The pure decision rule, separated so printed (p, delta) evidence can be
// replayed against it directly.
struct DecisionInputs {
  double mar_left = 0;
  double mar_right = 0;
  bool q1_left = false;
  bool q1_right = false;
  double p_value = 1;
  double delta_magnitude = 0;
};
Relation decide(const DecisionInputs& in, const DecisionConfig& config);

// Full pairwise evaluation: Q1 both sides, the paired/unpaired residual
// test, Glass's delta of the better-MAR run against the other as control.
// Runs over different evaluation sets (different actuals multisets) are
// incomparable.
PairVerdict evaluate_pair(const PredictionRun& left, const PredictionRun& right,
                          const BaselineDistribution& baseline,
                          const DecisionConfig& config);

// P0-vs-system pseudo verdicts derived from Q1: a pass contributes the
// strict edge P0 < system.
std::vector<PairVerdict> baseline_verdicts(std::span<const PredictionRun> runs,
                                           const BaselineDistribution& baseline,
                                           const DecisionConfig& config,
                                           const std::string& baseline_id = "P0");

class PreferenceGraph {
 public:
  using Edge = std::pair<std::string, std::string>;  // (worse, better)

  const std::vector<std::string>& nodes() const noexcept { return nodes_; }
  const std::set<Edge>& strict_edges() const noexcept { return strict_; }
  const std::set<Edge>& indifferences() const noexcept { return indiff_; }

  friend PreferenceGraph build_order(std::span<const PairVerdict> verdicts,
                                     bool include_not_predicting);

 private:
  std::vector<std::string> nodes_;  // sorted, unique
  std::set<Edge> strict_;
  std::set<Edge> indiff_;          // stored with the two ids sorted
};

// Assembles verdicts into a graph. Throws CycleError if the strict edges
// admit a cycle, DataError on contradictory verdicts for the same pair.
// Strict edges between two systems that both failed Q1 are dropped unless
// include_not_predicting is set.
PreferenceGraph build_order(std::span<const PairVerdict> verdicts,
                            bool include_not_predicting = false);

// Cover pairs (worse, better) of the strict order: its transitive
// reduction, i.e. exactly the edges a Hasse diagram draws.
std::vector<PreferenceGraph::Edge> hasse_edges(const PreferenceGraph& graph);

// Deterministic DOT rendering: nodes sorted, covers drawn upward (rankdir
// BT), indifferences dashed and undirected.
std::string emit_dot(const PreferenceGraph& graph);

}  // namespace predeval
