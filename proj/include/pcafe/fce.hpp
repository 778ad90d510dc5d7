#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pcafe/error.hpp"
#include "pcafe/hierarchy.hpp"
#include "pcafe/matrix.hpp"

namespace pcafe {

// Membership over the m grades of an evaluation set.
class GradeDistribution {
 public:
  static constexpr double kSumTolerance = 1e-12;

  GradeDistribution() = default;

  explicit GradeDistribution(std::vector<double> z) : z_(std::move(z)) {
    PCAFE_REQUIRE(!z_.empty(), Errc::InvalidArgument, "grade distribution is empty");
    double sum = 0.0;
    for (double x : z_) {
      PCAFE_REQUIRE(std::isfinite(x) && x >= 0.0, Errc::InvalidArgument,
                    "memberships must be finite and nonnegative");
      sum += x;
    }
    PCAFE_REQUIRE(std::abs(sum - 1.0) <= kSumTolerance, Errc::InvalidArgument,
                  "memberships sum to " + std::to_string(sum) + ", expected 1");
  }

  std::size_t size() const noexcept { return z_.size(); }
  double operator[](std::size_t j) const noexcept { return z_[j]; }
  const std::vector<double>& values() const noexcept { return z_; }

  bool operator==(const GradeDistribution&) const = default;

 private:
  std::vector<double> z_;
};

// Rows are the single-factor distributions of the children being combined.
class EvaluationMatrix {
 public:
  EvaluationMatrix() = default;

  explicit EvaluationMatrix(std::vector<GradeDistribution> rows) : rows_(std::move(rows)) {
    PCAFE_REQUIRE(!rows_.empty(), Errc::InvalidArgument, "evaluation matrix has no rows");
    for (const auto& r : rows_)
      PCAFE_REQUIRE(r.size() == rows_.front().size(), Errc::DimensionMismatch,
                    "evaluation matrix rows differ in grade count");
  }

  std::size_t rows() const noexcept { return rows_.size(); }
  std::size_t grades() const noexcept { return rows_.empty() ? 0 : rows_.front().size(); }
  const GradeDistribution& row(std::size_t i) const { return rows_[i]; }

 private:
  std::vector<GradeDistribution> rows_;
};

struct EvaluationResult {
  GradeDistribution b;
  double score = 0.0;
  std::size_t verdict = 0;                // 0-based grade index, best grade first
  std::vector<std::size_t> verdict_ties;  // every index within 1e-12 of max(b)
};

inline GradeDistribution membership_from_tallies(std::span<const std::uint64_t> counts,
                                                 std::uint64_t expert_count) {
  PCAFE_REQUIRE(expert_count > 0, Errc::InvalidArgument, "expert count must be positive");
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  PCAFE_REQUIRE(total == expert_count, Errc::CountMismatch,
                "tallies sum to " + std::to_string(total) + " but the panel has " +
                    std::to_string(expert_count) + " experts");
  std::vector<double> z;
  z.reserve(counts.size());
  for (auto c : counts) z.push_back(static_cast<double>(c) / static_cast<double>(expert_count));
  return GradeDistribution(std::move(z));
}

// Scores b against V and applies the maximum-membership rule; ties go to the
// better (lower-index) grade.
inline EvaluationResult score_distribution(GradeDistribution b, const EvaluationSet& v) {
  PCAFE_REQUIRE(b.size() == v.size(), Errc::DimensionMismatch,
                "distribution has " + std::to_string(b.size()) + " grades, evaluation set has " +
                    std::to_string(v.size()));
  EvaluationResult r;
  double best = b[0];
  for (std::size_t j = 0; j < b.size(); ++j) {
    r.score += b[j] * v[j].score;
    best = std::max(best, b[j]);
  }
  for (std::size_t j = 0; j < b.size(); ++j)
    if (b[j] >= best - 1e-12) r.verdict_ties.push_back(j);
  r.verdict = r.verdict_ties.front();
  r.b = std::move(b);
  return r;
}

// b_j = sum_i w_i z_ij, then score = b . V
inline EvaluationResult single_factor_evaluate(const WeightVector& w, const EvaluationMatrix& z,
                                               const EvaluationSet& v) {
  PCAFE_REQUIRE(w.size() == z.rows(), Errc::DimensionMismatch,
                std::to_string(w.size()) + " weights for " + std::to_string(z.rows()) + " rows");
  std::vector<double> b(z.grades(), 0.0);
  for (std::size_t i = 0; i < z.rows(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) b[j] += w[i] * z.row(i)[j];
  return score_distribution(GradeDistribution(std::move(b)), v);
}

// Top-level roll-up: the primary-indicator vectors stacked as B_total.
inline EvaluationResult overall_evaluate(const WeightVector& w_top, std::span<const GradeDistribution> rows,
                                         const EvaluationSet& v) {
  PCAFE_REQUIRE(w_top.size() == rows.size(), Errc::DimensionMismatch,
                std::to_string(w_top.size()) + " weights for " + std::to_string(rows.size()) + " rows");
  return single_factor_evaluate(w_top, EvaluationMatrix({rows.begin(), rows.end()}), v);
}

using NodeWeights = std::map<std::string, WeightVector>;
using LeafDistributions = std::map<std::string, GradeDistribution>;
using NodeResults = std::map<std::string, EvaluationResult>;

namespace detail {

inline const EvaluationResult& evaluate_node(const IndicatorNode& node, const NodeWeights& weights,
                                             const LeafDistributions& leaves, const EvaluationSet& v,
                                             NodeResults& out) {
  if (node.is_leaf()) {
    auto it = leaves.find(node.id);
    PCAFE_REQUIRE(it != leaves.end(), Errc::MissingLeaf, "no grade distribution for leaf '" + node.id + "'");
    return out[node.id] = score_distribution(it->second, v);
  }
  auto wit = weights.find(node.id);
  PCAFE_REQUIRE(wit != weights.end(), Errc::MissingWeights, "no weight vector for node '" + node.id + "'");
  PCAFE_REQUIRE(wit->second.size() == node.children.size(), Errc::ArityMismatch,
                "node '" + node.id + "' has " + std::to_string(node.children.size()) +
                    " children but " + std::to_string(wit->second.size()) + " weights");
  std::vector<GradeDistribution> rows;
  rows.reserve(node.children.size());
  for (const auto& c : node.children) rows.push_back(evaluate_node(c, weights, leaves, v, out).b);
  return out[node.id] = single_factor_evaluate(wit->second, EvaluationMatrix(std::move(rows)), v);
}

}  // namespace detail

// Bottom-up roll-up over any indicator tree. Every node gets a result; the
// root's is the overall evaluation.
inline NodeResults evaluate_tree(const IndicatorNode& root, const NodeWeights& weights,
                                 const LeafDistributions& leaves, const EvaluationSet& v) {
  NodeResults out;
  detail::evaluate_node(root, weights, leaves, v, out);
  return out;
}

inline NodeResults evaluate_hierarchy(const Hierarchy& h, const NodeWeights& weights,
                                      const LeafDistributions& leaves, const EvaluationSet& v) {
  return evaluate_tree(h.root(), weights, leaves, v);
}

}  // namespace pcafe
