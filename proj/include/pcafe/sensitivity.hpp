#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "pcafe/elicitation.hpp"
#include "pcafe/error.hpp"
#include "pcafe/fahp.hpp"
#include "pcafe/pipeline.hpp"

namespace pcafe {

struct PerturbationSpec {
  double epsilon = 0.0;    // log-scale for crisp sessions, additive for fuzzy
  std::uint64_t trials = 100;
  std::uint64_t seed = 0;
  unsigned threads = 0;    // 0: hardware concurrency

  void validate() const {
    PCAFE_REQUIRE(std::isfinite(epsilon) && epsilon >= 0.0, Errc::InvalidArgument, "epsilon must be >= 0");
    PCAFE_REQUIRE(trials > 0, Errc::InvalidArgument, "trials must be positive");
  }
};

struct WeightSpread {
  std::string child_id;
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

struct StabilityReport {
  std::uint64_t trials = 0;
  std::size_t baseline_verdict = 0;  // 0-based
  double baseline_score = 0.0;
  std::uint64_t verdict_preserved = 0;
  std::uint64_t cr_rejections = 0;
  double top_rank_stability = 0.0;  // fraction of trials keeping the baseline root verdict
  double cr_rejection_rate = 0.0;   // fraction of trials with some aggregated CR >= 0.1
  double score_min = 0.0;
  double score_mean = 0.0;
  double score_max = 0.0;
  std::map<std::string, std::vector<WeightSpread>> weight_spread;  // node id -> per child
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Sub-seed for one trial; independent of how trials are scheduled.
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  return splitmix64(seed ^ splitmix64(trial + 1));
}

// Uniform on [-1, 1] from the top 53 bits, portable across standard libraries.
inline double symmetric_unit(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

inline Session perturb_session(const Session& base, double epsilon, std::uint64_t sub_seed) {
  Session s = base;
  std::mt19937_64 g(sub_seed);
  for (auto& e : s.experts)
    for (auto& [node, pairs] : e.judgments)
      for (auto& p : pairs) {
        const double u = symmetric_unit(g);
        if (s.scale == Scale::crisp_1_9)
          p.value = std::clamp(p.value * std::exp(u * epsilon), kCrispScaleMin, kCrispScaleMax);
        else
          p.value = std::clamp(p.value + u * epsilon, kFuzzyScaleMin, kFuzzyScaleMax);
      }
  return s;
}

struct TrialOutcome {
  std::size_t verdict = 0;
  double score = 0.0;
  bool cr_rejected = false;
  std::map<std::string, std::vector<double>> weights;
};

inline TrialOutcome run_trial(const Session& s, const PipelineOptions& opt) {
  const auto ev = evaluate_session(s, opt);
  TrialOutcome t;
  t.verdict = ev.root(s).verdict;
  t.score = ev.root(s).score;
  for (const auto& [id, w] : ev.weights) {
    t.weights[id] = w.aggregated.weights.values();
    t.cr_rejected = t.cr_rejected || w.aggregated.consistency.cr >= kConsistencyThreshold;
  }
  return t;
}

}  // namespace detail

// Each trial perturbs every recorded judgment (upper triangle only, so
// reciprocity / complementarity is restored when matrices are rebuilt), reruns
// the full pipeline and records the outcome. Statistics are reduced in trial
// order after all trials finish, so the result is independent of threading.
inline StabilityReport perturb_and_evaluate(const Session& s, const PerturbationSpec& spec,
                                            const PipelineOptions& opt = {}) {
  spec.validate();
  const auto baseline = detail::run_trial(s, opt);

  std::vector<detail::TrialOutcome> outcomes(spec.trials);
  auto run_range = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t t = begin; t < end; ++t)
      outcomes[t] = detail::run_trial(detail::perturb_session(s, spec.epsilon, detail::trial_seed(spec.seed, t)), opt);
  };
  unsigned workers = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, spec.trials));
  if (workers <= 1) {
    run_range(0, spec.trials);
  } else {
    std::vector<std::future<void>> jobs;
    const std::uint64_t chunk = (spec.trials + workers - 1) / workers;
    for (std::uint64_t b = 0; b < spec.trials; b += chunk)
      jobs.push_back(std::async(std::launch::async, run_range, b, std::min(spec.trials, b + chunk)));
    for (auto& j : jobs) j.get();
  }

  StabilityReport r;
  r.trials = spec.trials;
  r.baseline_verdict = baseline.verdict;
  r.baseline_score = baseline.score;
  r.score_min = r.score_max = outcomes.front().score;
  double score_sum = 0.0;
  for (const auto& o : outcomes) {
    r.verdict_preserved += o.verdict == baseline.verdict;
    r.cr_rejections += o.cr_rejected;
    r.score_min = std::min(r.score_min, o.score);
    r.score_max = std::max(r.score_max, o.score);
    score_sum += o.score;
  }
  r.score_mean = score_sum / static_cast<double>(spec.trials);
  r.top_rank_stability = static_cast<double>(r.verdict_preserved) / static_cast<double>(spec.trials);
  r.cr_rejection_rate = static_cast<double>(r.cr_rejections) / static_cast<double>(spec.trials);

  for (const IndicatorNode* node : s.hierarchy.internal_nodes()) {
    auto& spreads = r.weight_spread[node->id];
    for (std::size_t c = 0; c < node->children.size(); ++c) {
      WeightSpread ws{node->children[c].id, outcomes.front().weights.at(node->id)[c], 0.0,
                      outcomes.front().weights.at(node->id)[c]};
      double sum = 0.0;
      for (const auto& o : outcomes) {
        const double w = o.weights.at(node->id)[c];
        ws.min = std::min(ws.min, w);
        ws.max = std::max(ws.max, w);
        sum += w;
      }
      ws.mean = sum / static_cast<double>(spec.trials);
      spreads.push_back(ws);
    }
  }
  return r;
}

inline std::vector<std::pair<double, WeightVector>> theta_sweep(const FuzzyConsistencyMatrix& r,
                                                                const std::vector<double>& thetas) {
  std::vector<std::pair<double, WeightVector>> out;
  out.reserve(thetas.size());
  for (double t : thetas) out.emplace_back(t, weights_linear(r, t));
  return out;
}

inline json to_json(const StabilityReport& r, const EvaluationSet& v, const PerturbationSpec& spec) {
  json spread = json::object();
  for (const auto& [id, list] : r.weight_spread) {
    json arr = json::array();
    for (const auto& w : list) arr.push_back({{"child_id", w.child_id}, {"min", w.min}, {"mean", w.mean}, {"max", w.max}});
    spread[id] = std::move(arr);
  }
  return json{{"engine", {{"name", std::string(kEngineName)}, {"version", std::string(kEngineVersion)}}},
              {"spec", {{"epsilon", spec.epsilon}, {"trials", spec.trials}, {"seed", spec.seed}}},
              {"baseline", {{"verdict", r.baseline_verdict + 1},
                            {"verdict_label", v[r.baseline_verdict].label},
                            {"score", r.baseline_score}}},
              {"top_rank_stability", r.top_rank_stability},
              {"cr_rejection_rate", r.cr_rejection_rate},
              {"score", {{"min", r.score_min}, {"mean", r.score_mean}, {"max", r.score_max}}},
              {"weight_spread", std::move(spread)}};
}

}  // namespace pcafe
