#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pcafe/ahp.hpp"
#include "pcafe/error.hpp"
#include "pcafe/matrix.hpp"

namespace pcafe {

inline constexpr double kFuzzyScaleMin = 0.1;
inline constexpr double kFuzzyScaleMax = 0.9;

inline bool in_fuzzy_scale(double v) {
  return std::isfinite(v) && v >= kFuzzyScaleMin - 1e-12 && v <= kFuzzyScaleMax + 1e-12;
}

// Complementary judgment matrix: a_ii = 0.5, a_ij + a_ji = 1, entries in [0, 1].
class FuzzyJudgmentMatrix {
 public:
  FuzzyJudgmentMatrix() = default;

  static FuzzyJudgmentMatrix from_matrix(SquareMatrix m) {
    const std::size_t n = m.size();
    PCAFE_REQUIRE(n >= 2, Errc::TooSmall, "fuzzy judgment matrices need n >= 2");
    for (std::size_t i = 0; i < n; ++i) {
      PCAFE_REQUIRE(std::abs(m(i, i) - 0.5) <= 1e-9, Errc::InvalidArgument,
                    "diagonal entry " + std::to_string(i + 1) + " is not 0.5");
      for (std::size_t j = 0; j < n; ++j) {
        PCAFE_REQUIRE(std::isfinite(m(i, j)) && m(i, j) >= 0.0 && m(i, j) <= 1.0, Errc::OutOfScale,
                      "entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") is outside [0, 1]");
        PCAFE_REQUIRE(std::abs(m(i, j) + m(j, i) - 1.0) <= 1e-9, Errc::InvalidArgument,
                      "entries (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                          ") and its transpose do not sum to 1");
      }
    }
    FuzzyJudgmentMatrix a;
    a.m_ = std::move(m);
    return a;
  }

  std::size_t size() const noexcept { return m_.size(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
  const SquareMatrix& matrix() const noexcept { return m_; }

  bool operator==(const FuzzyJudgmentMatrix&) const = default;

 private:
  SquareMatrix m_;
};

class FuzzyConsistencyMatrix;
inline FuzzyConsistencyMatrix to_consistency_matrix(const FuzzyJudgmentMatrix& a);

// Additively consistent matrix produced by the row-sum transform, together
// with the source row sums it was built from.
class FuzzyConsistencyMatrix {
 public:
  std::size_t size() const noexcept { return r_.size(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return r_(i, j); }
  const SquareMatrix& matrix() const noexcept { return r_; }
  const std::vector<double>& source_row_sums() const noexcept { return row_sums_; }

 private:
  friend FuzzyConsistencyMatrix to_consistency_matrix(const FuzzyJudgmentMatrix& a);
  SquareMatrix r_;
  std::vector<double> row_sums_;
};

inline FuzzyJudgmentMatrix build_fuzzy_matrix(std::size_t n, std::span<const PairJudgment> upper) {
  PCAFE_REQUIRE(n >= 2, Errc::TooSmall, "fuzzy judgment matrices need n >= 2");
  SquareMatrix m = detail::fill_upper(n, upper, 0.5, [](const PairJudgment& p) {
    PCAFE_REQUIRE(in_fuzzy_scale(p.value), Errc::OutOfScale,
                  "value " + std::to_string(p.value) + " at (" + std::to_string(p.i) + "," +
                      std::to_string(p.j) + ") is outside [0.1, 0.9]");
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m(j, i) = 1.0 - m(i, j);
  return FuzzyJudgmentMatrix::from_matrix(std::move(m));
}

// r_i = sum_k a_ik;  r_ij = (r_i - r_j) / (2(n - 1)) + 0.5
inline FuzzyConsistencyMatrix to_consistency_matrix(const FuzzyJudgmentMatrix& a) {
  const std::size_t n = a.size();
  FuzzyConsistencyMatrix out;
  out.row_sums_ = detail::row_sums(a.matrix());
  out.r_ = SquareMatrix(n, 0.5);
  const double denom = 2.0 * static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) out.r_(i, j) = (out.row_sums_[i] - out.row_sums_[j]) / denom + 0.5;
  return out;
}

// max over (i, j, k) of |m_ij - (0.5 + m_ik - m_jk)|
inline double additive_consistency_residual(const SquareMatrix& m) {
  const std::size_t n = m.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        worst = std::max(worst, std::abs(m(i, j) - (0.5 + m(i, k) - m(j, k))));
  return worst;
}

inline double additive_consistency_residual(const FuzzyJudgmentMatrix& a) {
  return additive_consistency_residual(a.matrix());
}

inline WeightVector weights_geometric_mean_fuzzy(const FuzzyConsistencyMatrix& r) {
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < r.size(); ++j)
      PCAFE_REQUIRE(r(i, j) > 0.0, Errc::ZeroEntry,
                    "entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                        ") is zero; geometric mean is degenerate");
  return detail::row_geometric_mean_weights(r.matrix());
}

// Smallest theta for which the linear formula yields nonnegative weights for
// every consistency matrix of dimension n.
inline double min_theta(std::size_t n) { return static_cast<double>(n - 1) / 2.0; }
inline double default_theta(std::size_t n) { return min_theta(n); }

// w_i = 1/n - 1/(2 theta) + (1/(n theta)) * sum_k r_ik, theta >= (n - 1)/2.
inline WeightVector weights_linear(const FuzzyConsistencyMatrix& r, double theta) {
  const std::size_t n = r.size();
  PCAFE_REQUIRE(std::isfinite(theta) && theta > 0.0 && theta >= min_theta(n), Errc::ThetaTooSmall,
                "theta = " + std::to_string(theta) + " is below the minimum (n-1)/2 = " +
                    std::to_string(min_theta(n)) + " for n = " + std::to_string(n));
  const double nd = static_cast<double>(n);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (double x : r.matrix().row(i)) s += x;
    w[i] = 1.0 / nd - 1.0 / (2.0 * theta) + s / (nd * theta);
    if (w[i] < 0.0 && w[i] > -1e-15) w[i] = 0.0;  // rounding at the theta boundary
  }
  return WeightVector(std::move(w));
}

struct FuzzyConsistencyReport {
  ConsistencyReport report;         // lambda_max/CI/CR on the raw judgment matrix
  double additive_residual = 0.0;   // 0 iff the raw matrix is additively consistent
};

// lambda_max is evaluated on A exactly as in the crisp case and never clamped;
// on [0, 1] matrices CI can be negative.
inline FuzzyConsistencyReport fuzzy_consistency_check(const FuzzyJudgmentMatrix& a, const WeightVector& w,
                                                      const RiTable& ri_table = {}) {
  FuzzyConsistencyReport out;
  out.report = make_consistency_report(a.size(), lambda_max(a.matrix(), w), ri_table);
  out.additive_residual = additive_consistency_residual(a);
  return out;
}

// Element-wise arithmetic mean; keeps a_ij + a_ji = 1.
inline FuzzyJudgmentMatrix aggregate_expert_fuzzy(std::span<const FuzzyJudgmentMatrix> panel) {
  PCAFE_REQUIRE(!panel.empty(), Errc::EmptyPanel, "no matrices to aggregate");
  const std::size_t n = panel.front().size();
  for (const auto& a : panel)
    PCAFE_REQUIRE(a.size() == n, Errc::DimensionMismatch, "panel matrices differ in dimension");
  if (panel.size() == 1) return panel.front();

  SquareMatrix out(n, 0.5);
  std::vector<double> vals(panel.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = 0; k < panel.size(); ++k) vals[k] = panel[k](i, j);
      std::sort(vals.begin(), vals.end());
      double s = 0.0;
      for (double x : vals) s += x;
      out(i, j) = s / static_cast<double>(panel.size());
      out(j, i) = 1.0 - out(i, j);
    }
  return FuzzyJudgmentMatrix::from_matrix(std::move(out));
}

// Worst additive-consistency triad of a fuzzy matrix, 1-based, i < j < k.
inline Triad most_inconsistent_triad(const FuzzyJudgmentMatrix& a) {
  const std::size_t n = a.size();
  PCAFE_REQUIRE(n >= 3, Errc::TooSmall, "triads need n >= 3");
  Triad best{1, 2, 3, -1.0};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const double dev = std::abs(a(i, j) - (0.5 + a(i, k) - a(j, k)));
        if (dev > best.deviation) best = {i + 1, j + 1, k + 1, dev};
      }
  return best;
}

}  // namespace pcafe
