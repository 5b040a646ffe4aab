#include "predeval/preference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "predeval/error.hpp"

namespace predeval {

std::string_view to_string(Relation r) noexcept {
  switch (r) {
    case Relation::left_precedes_right: return "left-precedes-right";
    case Relation::right_precedes_left: return "right-precedes-left";
    case Relation::indifferent: return "indifferent";
    case Relation::incomparable: return "incomparable";
  }
  return "?";
}

namespace {

bool same_multiset(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return false;
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  return sa == sb;
}

bool same_sequence(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

}  // namespace

Q1Result q1_better_than_guessing(const PredictionRun& run,
                                 const BaselineDistribution& baseline, double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("alpha must lie in (0,1)");
  if (!same_multiset(run.actuals(), baseline.source_actuals()))
    throw DataError("Q1: baseline was built on different actuals than run '" +
                    run.system_id() + "'");
  Q1Result q;
  q.mar = mar(run);
  q.threshold = quantile(baseline, alpha);
  q.empirical_p = empirical_p(baseline, q.mar);
  q.pass = q.mar < q.threshold;
  return q;
}

Relation decide(const DecisionInputs& in, const DecisionConfig& config) {
  if (in.mar_left == in.mar_right) return Relation::indifferent;
  const bool better_is_left = in.mar_left < in.mar_right;
  const bool significant = in.p_value < config.alpha;
  const bool meaningful = in.delta_magnitude >= config.delta_threshold;
  if (significant && meaningful)
    return better_is_left ? Relation::right_precedes_left : Relation::left_precedes_right;
  return Relation::indifferent;
}

PairVerdict evaluate_pair(const PredictionRun& left, const PredictionRun& right,
                          const BaselineDistribution& baseline,
                          const DecisionConfig& config) {
  PairVerdict v;
  v.left_id = left.system_id();
  v.right_id = right.system_id();

  if (!same_multiset(left.actuals(), right.actuals())) {
    if (config.pairing == PairingPolicy::paired)
      throw DataError("paired comparison requested but runs cover different cases");
    v.relation = Relation::incomparable;  // different evaluation sets
    return v;
  }

  bool paired = false;
  switch (config.pairing) {
    case PairingPolicy::paired:
      if (!same_sequence(left.actuals(), right.actuals()))
        throw DataError("paired comparison requested but case order differs");
      paired = true;
      break;
    case PairingPolicy::unpaired:
      paired = false;
      break;
    case PairingPolicy::automatic:
      paired = same_sequence(left.actuals(), right.actuals());
      break;
  }

  PairEvidence& e = v.evidence;
  e.paired = paired;
  e.mar_left = mar(left);
  e.mar_right = mar(right);

  const Q1Result q1l = q1_better_than_guessing(left, baseline, config.alpha);
  const Q1Result q1r = q1_better_than_guessing(right, baseline, config.alpha);
  e.q1_left = q1l.pass;
  e.q1_right = q1r.pass;
  e.not_predicting = !q1l.pass && !q1r.pass;

  const auto abs_left = absolute_residuals(left);
  const auto abs_right = absolute_residuals(right);

  const bool left_better = e.mar_left <= e.mar_right;
  if (paired && abs_left == abs_right) {
    // Identical residual sequences (e.g. a run against itself): the signed
    // rank test is undefined, and there is trivially no difference.
    e.test.p_value = 1.0;
    e.test.method = TestMethod::normal_approximation;
    e.test.n1 = abs_left.size();
  } else if (paired) {
    // One-sided alternative: the better-MAR system has smaller absolute
    // residuals, i.e. (worse - better) differences tend positive.
    Tail tail = Tail::two_sided;
    if (config.tail != TailPolicy::two_sided) tail = Tail::one_sided_greater;
    e.test = left_better ? wilcoxon_signed_rank(abs_right, abs_left, tail)
                         : wilcoxon_signed_rank(abs_left, abs_right, tail);
  } else {
    Tail tail = Tail::two_sided;
    if (config.tail == TailPolicy::one_sided) tail = Tail::one_sided_greater;
    e.test = left_better ? mann_whitney_u(abs_right, abs_left, tail)
                         : mann_whitney_u(abs_left, abs_right, tail);
  }
  e.p_value = e.test.p_value;

  // Glass's delta: better-MAR run as treatment, the other as control.
  const auto& control_abs = left_better ? abs_right : abs_left;
  const double control_sd = population_sd(control_abs);
  if (control_sd > 0) {
    const EffectSize es = glass_delta(left_better ? e.mar_left : e.mar_right,
                                      left_better ? e.mar_right : e.mar_left, control_sd);
    e.delta_magnitude = es.magnitude;
    e.delta_category = es.category;
  } else {
    // Identical residuals on both sides: no measurable effect.
    e.delta_magnitude = 0;
    e.delta_category = EffectCategory::negligible;
  }

  DecisionInputs in;
  in.mar_left = e.mar_left;
  in.mar_right = e.mar_right;
  in.q1_left = e.q1_left;
  in.q1_right = e.q1_right;
  in.p_value = e.p_value;
  in.delta_magnitude = e.delta_magnitude;
  v.relation = decide(in, config);
  return v;
}

std::vector<PairVerdict> baseline_verdicts(std::span<const PredictionRun> runs,
                                           const BaselineDistribution& baseline,
                                           const DecisionConfig& config,
                                           const std::string& baseline_id) {
  std::vector<PairVerdict> out;
  out.reserve(runs.size());
  for (const auto& run : runs) {
    const Q1Result q1 = q1_better_than_guessing(run, baseline, config.alpha);
    PairVerdict v;
    v.left_id = baseline_id;
    v.right_id = run.system_id();
    v.evidence.q1_left = false;
    v.evidence.q1_right = q1.pass;
    v.evidence.mar_left = baseline.mean_mar();
    v.evidence.mar_right = q1.mar;
    v.evidence.p_value = q1.empirical_p;
    v.relation = q1.pass ? Relation::left_precedes_right : Relation::indifferent;
    out.push_back(std::move(v));
  }
  return out;
}

PreferenceGraph build_order(std::span<const PairVerdict> verdicts,
                            bool include_not_predicting) {
  PreferenceGraph g;
  std::set<std::string> nodes;
  std::map<PreferenceGraph::Edge, Relation> seen;

  for (const auto& v : verdicts) {
    nodes.insert(v.left_id);
    nodes.insert(v.right_id);
    if (v.left_id == v.right_id) continue;

    const auto key = v.left_id < v.right_id
                         ? PreferenceGraph::Edge{v.left_id, v.right_id}
                         : PreferenceGraph::Edge{v.right_id, v.left_id};
    // Normalise the relation to the sorted key orientation for conflict checks.
    Relation rel = v.relation;
    if (v.left_id > v.right_id) {
      if (rel == Relation::left_precedes_right) rel = Relation::right_precedes_left;
      else if (rel == Relation::right_precedes_left) rel = Relation::left_precedes_right;
    }
    if (auto it = seen.find(key); it != seen.end()) {
      if (it->second != rel)
        throw DataError("conflicting verdicts for pair (" + key.first + ", " +
                        key.second + ")");
      continue;  // duplicate verdict, same outcome
    }
    seen.emplace(key, rel);

    switch (v.relation) {
      case Relation::left_precedes_right:
      case Relation::right_precedes_left: {
        if (v.evidence.not_predicting && !include_not_predicting) break;
        const bool lr = v.relation == Relation::left_precedes_right;
        g.strict_.insert({lr ? v.left_id : v.right_id, lr ? v.right_id : v.left_id});
        break;
      }
      case Relation::indifferent:
        g.indiff_.insert(key);
        break;
      case Relation::incomparable:
        break;
    }
  }

  g.nodes_.assign(nodes.begin(), nodes.end());

  // Cycle check on the strict digraph (DFS, iterative).
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& e : g.strict_) adj[e.first].push_back(e.second);
  std::map<std::string, int> state;  // 0 new, 1 on stack, 2 done
  for (const auto& start : g.nodes_) {
    if (state[start]) continue;
    std::vector<std::pair<std::string, std::size_t>> stack{{start, 0}};
    state[start] = 1;
    std::vector<std::string> path{start};
    while (!stack.empty()) {
      auto& [node, idx] = stack.back();
      const auto& next = adj[node];
      if (idx < next.size()) {
        const std::string& child = next[idx++];
        if (state[child] == 1) {
          std::string cycle = child;
          for (auto it = std::find(path.begin(), path.end(), child); it != path.end(); ++it)
            if (*it != child) cycle += " < " + *it;
          throw CycleError("preference cycle detected: " + cycle + " < " + child);
        }
        if (state[child] == 0) {
          state[child] = 1;
          stack.emplace_back(child, 0);
          path.push_back(child);
        }
      } else {
        state[node] = 2;
        stack.pop_back();
        path.pop_back();
      }
    }
  }
  return g;
}

namespace {

// reach[i] = nodes reachable from i via strict edges (excluding i), as a
// bool matrix over node indices.
std::vector<std::vector<bool>> reachability(const PreferenceGraph& g,
                                            const std::map<std::string, std::size_t>& index) {
  const std::size_t n = g.nodes().size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (const auto& e : g.strict_edges())
    reach[index.at(e.first)][index.at(e.second)] = true;
  // Floyd-Warshall closure
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = true;
  return reach;
}

}  // namespace

std::vector<PreferenceGraph::Edge> hasse_edges(const PreferenceGraph& graph) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < graph.nodes().size(); ++i) index[graph.nodes()[i]] = i;
  const auto reach = reachability(graph, index);
  const std::size_t n = graph.nodes().size();

  std::vector<PreferenceGraph::Edge> covers;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!reach[i][j]) continue;
      bool has_intermediate = false;
      for (std::size_t k = 0; k < n && !has_intermediate; ++k)
        if (k != i && k != j && reach[i][k] && reach[k][j]) has_intermediate = true;
      if (!has_intermediate)
        covers.emplace_back(graph.nodes()[i], graph.nodes()[j]);
    }
  }
  std::sort(covers.begin(), covers.end());
  return covers;
}

namespace {

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string emit_dot(const PreferenceGraph& graph) {
  std::ostringstream os;
  os << "digraph preferences {\n";
  os << "  rankdir=BT;\n";
  os << "  node [shape=box];\n";
  for (const auto& node : graph.nodes()) os << "  " << dot_quote(node) << ";\n";
  for (const auto& [worse, better] : hasse_edges(graph))
    os << "  " << dot_quote(worse) << " -> " << dot_quote(better) << ";\n";
  for (const auto& [a, b] : graph.indifferences())
    os << "  " << dot_quote(a) << " -> " << dot_quote(b)
       << " [dir=none, style=dashed, constraint=false];\n";
  os << "}\n";
  return os.str();
}

}  // namespace predeval
