#pragma once

#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pcafe/ahp.hpp"
#include "pcafe/elicitation.hpp"
#include "pcafe/error.hpp"
#include "pcafe/fahp.hpp"
#include "pcafe/fce.hpp"
#include "pcafe/hierarchy.hpp"

namespace pcafe {

inline constexpr std::string_view kEngineName = "pcafe";
inline constexpr std::string_view kEngineVersion = "1.0.0";

enum class WeightMethod { geometric, linear };

constexpr std::string_view to_string(WeightMethod m) noexcept {
  return m == WeightMethod::geometric ? "geometric" : "linear";
}

inline std::optional<WeightMethod> parse_weight_method(std::string_view s) {
  if (s == "geometric") return WeightMethod::geometric;
  if (s == "linear") return WeightMethod::linear;
  return std::nullopt;
}

struct PipelineOptions {
  WeightMethod method = WeightMethod::geometric;
  std::optional<double> theta;  // linear method only; default (n-1)/2 per node
  RiTable ri_table;
};

// Checks the method/theta combination against the session before any work.
inline void check_options(const Session& s, const PipelineOptions& opt) {
  if (opt.method == WeightMethod::linear) {
    PCAFE_REQUIRE(s.scale == Scale::fuzzy_01_09, Errc::InvalidArgument,
                  "the linear weight method applies only to fuzzy_01_09 sessions");
    if (opt.theta) {
      for (const IndicatorNode* node : s.hierarchy.internal_nodes()) {
        const std::size_t n = node->children.size();
        PCAFE_REQUIRE(std::isfinite(*opt.theta) && *opt.theta >= min_theta(n), Errc::ThetaTooSmall,
                      "theta = " + std::to_string(*opt.theta) + " is below the minimum (n-1)/2 = " +
                          std::to_string(min_theta(n)) + " required by node '" + node->id + "' (n = " +
                          std::to_string(n) + ")");
      }
    }
  }
}

struct MatrixDiagnostics {
  WeightVector weights;
  ConsistencyReport consistency;
  std::optional<double> additive_residual;  // fuzzy sessions only
  std::optional<Triad> worst_triad;         // n >= 3 only
};

struct ExpertDiagnostics {
  std::string expert_id;
  MatrixDiagnostics diagnostics;
};

struct NodeWeighting {
  std::string node_id;
  std::vector<std::string> children;
  WeightMethod method = WeightMethod::geometric;
  std::optional<double> theta;
  SquareMatrix aggregated_matrix;
  MatrixDiagnostics aggregated;
  std::vector<ExpertDiagnostics> experts;
};

namespace detail {

inline MatrixDiagnostics diagnose(const JudgmentMatrix& a, const PipelineOptions& opt) {
  MatrixDiagnostics d;
  d.weights = weights_geometric_mean(a);
  d.consistency = make_consistency_report(a.size(), lambda_max(a, d.weights), opt.ri_table);
  if (a.size() >= 3) d.worst_triad = most_inconsistent_triad(a);
  return d;
}

inline WeightVector fuzzy_weights(const FuzzyJudgmentMatrix& a, WeightMethod method, double theta) {
  const auto r = to_consistency_matrix(a);
  return method == WeightMethod::geometric ? weights_geometric_mean_fuzzy(r) : weights_linear(r, theta);
}

inline MatrixDiagnostics diagnose(const FuzzyJudgmentMatrix& a, const PipelineOptions& opt, double theta) {
  MatrixDiagnostics d;
  d.weights = fuzzy_weights(a, opt.method, theta);
  const auto check = fuzzy_consistency_check(a, d.weights, opt.ri_table);
  d.consistency = check.report;
  d.additive_residual = check.additive_residual;
  if (a.size() >= 3) d.worst_triad = most_inconsistent_triad(a);
  return d;
}

}  // namespace detail

// Aggregates the panel for one node and derives weights and diagnostics, both
// for the aggregate and for every expert.
inline NodeWeighting compute_node_weighting(const Session& s, const IndicatorNode& node, const PipelineOptions& opt) {
  NodeWeighting w;
  w.node_id = node.id;
  for (const auto& c : node.children) w.children.push_back(c.id);
  w.method = s.scale == Scale::crisp_1_9 ? WeightMethod::geometric : opt.method;
  PCAFE_REQUIRE(!s.experts.empty(), Errc::EmptyPanel, "session has no experts");

  const auto panel = assemble_matrices(s, node.id);
  if (const auto* crisp = std::get_if<std::vector<JudgmentMatrix>>(&panel)) {
    const auto agg = aggregate_expert_matrices(*crisp);
    w.aggregated_matrix = agg.matrix();
    w.aggregated = detail::diagnose(agg, opt);
    for (std::size_t k = 0; k < crisp->size(); ++k)
      w.experts.push_back({s.experts[k].expert_id, detail::diagnose((*crisp)[k], opt)});
  } else {
    const auto& fuzzy = std::get<std::vector<FuzzyJudgmentMatrix>>(panel);
    const double theta = opt.theta.value_or(default_theta(node.children.size()));
    if (w.method == WeightMethod::linear) w.theta = theta;
    const auto agg = aggregate_expert_fuzzy(fuzzy);
    w.aggregated_matrix = agg.matrix();
    w.aggregated = detail::diagnose(agg, opt, theta);
    for (std::size_t k = 0; k < fuzzy.size(); ++k)
      w.experts.push_back({s.experts[k].expert_id, detail::diagnose(fuzzy[k], opt, theta)});
  }
  return w;
}

using SessionWeights = std::map<std::string, NodeWeighting>;

inline SessionWeights compute_weights(const Session& s, const PipelineOptions& opt = {}) {
  check_options(s, opt);
  SessionWeights out;
  for (const IndicatorNode* node : s.hierarchy.internal_nodes())
    out.emplace(node->id, compute_node_weighting(s, *node, opt));
  return out;
}

inline LeafDistributions leaf_distributions(const Session& s) {
  LeafDistributions out;
  for (const IndicatorNode* leaf : s.hierarchy.leaves())
    out.emplace(leaf->id, membership_from_tallies(tally_ratings(s, leaf->id), s.experts.size()));
  return out;
}

struct SessionEvaluation {
  SessionWeights weights;
  LeafDistributions leaves;
  NodeResults results;
  std::vector<EnvironmentWarning> environment_warnings;

  const EvaluationResult& root(const Session& s) const { return results.at(s.hierarchy.root().id); }
};

inline SessionEvaluation evaluate_session(const Session& s, const PipelineOptions& opt = {}) {
  SessionEvaluation ev;
  ev.weights = compute_weights(s, opt);
  ev.leaves = leaf_distributions(s);
  NodeWeights nw;
  for (const auto& [id, w] : ev.weights) nw.emplace(id, w.aggregated.weights);
  ev.results = evaluate_hierarchy(s.hierarchy, nw, ev.leaves, s.evaluation_set);
  if (s.environment) ev.environment_warnings = validate_environment(*s.environment);
  return ev;
}

// ---- Consistency gate ---------------------------------------------------------

struct ConsistencyFailure {
  std::string node_id;
  std::string expert_id;  // empty for the aggregated matrix
  double cr = 0.0;
  std::optional<Triad> worst_triad;
};

inline std::vector<ConsistencyFailure> consistency_failures(const SessionWeights& weights) {
  std::vector<ConsistencyFailure> out;
  for (const auto& [id, w] : weights) {
    for (const auto& e : w.experts)
      if (!e.diagnostics.consistency.consistent)
        out.push_back({id, e.expert_id, e.diagnostics.consistency.cr, e.diagnostics.worst_triad});
    if (!w.aggregated.consistency.consistent)
      out.push_back({id, "", w.aggregated.consistency.cr, w.aggregated.worst_triad});
  }
  return out;
}

// ---- Report -------------------------------------------------------------------

// FNV-1a 64-bit over the canonical session serialization.
inline std::string session_digest(const Session& s) {
  const std::string bytes = serialize_session(s).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline json to_json(const ConsistencyReport& r) {
  return json{{"n", r.n}, {"lambda_max", r.lambda_max}, {"ci", r.ci}, {"ri", r.ri}, {"cr", r.cr},
              {"consistent", r.consistent}};
}

inline json to_json(const Triad& t) { return json{{"i", t.i}, {"j", t.j}, {"k", t.k}, {"deviation", t.deviation}}; }

inline json to_json(const MatrixDiagnostics& d) {
  json j{{"weights", d.weights.values()}, {"consistency", to_json(d.consistency)}};
  j["additive_residual"] = d.additive_residual ? json(*d.additive_residual) : json(nullptr);
  j["worst_triad"] = d.worst_triad ? to_json(*d.worst_triad) : json(nullptr);
  return j;
}

inline json to_json(const NodeWeighting& w) {
  json experts = json::array();
  for (const auto& e : w.experts) {
    json d = to_json(e.diagnostics);
    d["expert_id"] = e.expert_id;
    experts.push_back(std::move(d));
  }
  json agg = to_json(w.aggregated);
  agg["matrix"] = w.aggregated_matrix.rows();
  json j{{"children", w.children},
         {"method", std::string(to_string(w.method))},
         {"aggregated", std::move(agg)},
         {"experts", std::move(experts)}};
  j["theta"] = w.theta ? json(*w.theta) : json(nullptr);
  if (w.method == WeightMethod::linear) {
    j["theta_min"] = min_theta(w.children.size());
    j["theta_rule"] = "theta >= (n-1)/2; smaller values give negative weights or divide by zero";
  }
  return j;
}

inline json to_json(const EvaluationResult& r, const EvaluationSet& v) {
  json ties = json::array();
  for (auto t : r.verdict_ties) ties.push_back(t + 1);
  return json{{"b", r.b.values()},
              {"score", r.score},
              {"verdict", r.verdict + 1},
              {"verdict_label", v[r.verdict].label},
              {"verdict_ties", std::move(ties)}};
}

inline json to_json(const EnvironmentWarning& w) { return json{{"field", w.field}, {"message", w.message}}; }

// Self-contained, timestamp-free report. Identical inputs give identical bytes.
inline json build_report(const Session& s, const SessionEvaluation& ev, const PipelineOptions& opt) {
  json weights = json::object();
  for (const auto& [id, w] : ev.weights) weights[id] = to_json(w);
  json results = json::object();
  for (const auto& [id, r] : ev.results) results[id] = to_json(r, s.evaluation_set);
  json warnings = json::array();
  for (const auto& w : ev.environment_warnings) warnings.push_back(to_json(w));

  json ri_ext = json::object();
  for (const auto& [n, ri] : opt.ri_table.extension()) ri_ext[std::to_string(n)] = ri;

  const auto& root = ev.root(s);
  json inputs{{"session_id", s.session_id},
              {"session_digest", session_digest(s)},
              {"scale", std::string(to_string(s.scale))},
              {"method", std::string(to_string(s.scale == Scale::crisp_1_9 ? WeightMethod::geometric : opt.method))},
              {"expert_count", s.experts.size()},
              {"ri_extension", std::move(ri_ext)}};
  inputs["theta"] = opt.theta ? json(*opt.theta) : json(nullptr);

  return json{{"engine", {{"name", std::string(kEngineName)}, {"version", std::string(kEngineVersion)}}},
              {"inputs", std::move(inputs)},
              {"evaluation_set", to_json(s.evaluation_set)},
              {"weights", std::move(weights)},
              {"results", std::move(results)},
              {"root",
               {{"id", s.hierarchy.root().id},
                {"score", root.score},
                {"verdict", root.verdict + 1},
                {"verdict_label", s.evaluation_set[root.verdict].label}}},
              {"environment_warnings", std::move(warnings)}};
}

inline json build_report(const Session& s, const PipelineOptions& opt = {}) {
  return build_report(s, evaluate_session(s, opt), opt);
}

// Serialized report text; the exact bytes written by `evaluate --out`.
inline std::string report_text(const json& report) { return report.dump(2) + "\n"; }

}  // namespace pcafe
