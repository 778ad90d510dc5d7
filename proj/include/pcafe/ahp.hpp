#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcafe/error.hpp"
#include "pcafe/matrix.hpp"

namespace pcafe {

// ---- Random consistency index ---------------------------------------------

inline constexpr std::array<double, 11> kRandomIndexTable = {0.0,  0.0,  0.58, 0.9,  1.12, 1.24,
                                                             1.32, 1.41, 1.45, 1.49, 1.51};

inline constexpr double kConsistencyThreshold = 0.1;

// Built-in RI values for n = 1..11, optionally extended for larger n.
class RiTable {
 public:
  RiTable() = default;

  // Extension entries must be for n > 11; the built-in values are fixed.
  explicit RiTable(std::map<std::size_t, double> extension) : extension_(std::move(extension)) {
    for (const auto& [n, ri] : extension_) {
      PCAFE_REQUIRE(n > kRandomIndexTable.size(), Errc::InvalidArgument,
                    "custom RI entries may only extend the table beyond n = 11 (got n = " +
                        std::to_string(n) + ")");
      PCAFE_REQUIRE(std::isfinite(ri) && ri > 0.0, Errc::InvalidArgument,
                    "custom RI for n = " + std::to_string(n) + " must be positive");
    }
  }

  double lookup(std::size_t n) const {
    PCAFE_REQUIRE(n >= 1, Errc::InvalidArgument, "RI is undefined for n = 0");
    if (n <= kRandomIndexTable.size()) return kRandomIndexTable[n - 1];
    auto it = extension_.find(n);
    PCAFE_REQUIRE(it != extension_.end(), Errc::NoRIAvailable,
                  "no random consistency index for n = " + std::to_string(n));
    return it->second;
  }

  const std::map<std::size_t, double>& extension() const noexcept { return extension_; }

 private:
  std::map<std::size_t, double> extension_;
};

inline double ri_lookup(std::size_t n) { return RiTable{}.lookup(n); }

struct ConsistencyReport {
  std::size_t n = 0;
  double lambda_max = 0.0;
  double ci = 0.0;
  double ri = 0.0;
  double cr = 0.0;
  bool consistent = true;
};

// Shared tail of the crisp and fuzzy checks. CR is pinned to 0 for n <= 2,
// where RI is 0 and every reciprocal matrix is consistent.
inline ConsistencyReport make_consistency_report(std::size_t n, double lambda_max, const RiTable& ri_table) {
  ConsistencyReport r;
  r.n = n;
  r.lambda_max = lambda_max;
  r.ri = ri_table.lookup(n);
  r.ci = n >= 2 ? (lambda_max - static_cast<double>(n)) / static_cast<double>(n - 1) : 0.0;
  r.cr = n <= 2 ? 0.0 : r.ci / r.ri;
  r.consistent = r.cr < kConsistencyThreshold;
  return r;
}

// ---- Crisp judgment matrices ------------------------------------------------

inline constexpr double kCrispScaleMin = 1.0 / 9.0;
inline constexpr double kCrispScaleMax = 9.0;
inline constexpr double kReciprocityTolerance = 1e-9;

inline bool in_crisp_scale(double v) {
  return std::isfinite(v) && v >= kCrispScaleMin * (1.0 - 1e-9) && v <= kCrispScaleMax * (1.0 + 1e-9);
}

// Values an expert may enter: 1..9 and their reciprocals. Reciprocals written
// with a few decimals (0.333, 0.1111) are accepted.
inline bool on_crisp_grid(double v) {
  if (!std::isfinite(v) || v <= 0.0) return false;
  if (v >= 1.0) return v <= 9.0 + 1e-9 && std::abs(v - std::round(v)) <= 1e-9 * v;
  const double r = 1.0 / v;
  return r <= 9.0 * (1.0 + 1e-3) && std::abs(r - std::round(r)) <= 1e-3 * r;
}

// Positive reciprocal matrix on the 1-9 scale.
class JudgmentMatrix {
 public:
  JudgmentMatrix() = default;

  static JudgmentMatrix from_matrix(SquareMatrix m) {
    const std::size_t n = m.size();
    PCAFE_REQUIRE(n >= 2, Errc::TooSmall, "judgment matrices need n >= 2");
    for (std::size_t i = 0; i < n; ++i) {
      PCAFE_REQUIRE(std::abs(m(i, i) - 1.0) <= kReciprocityTolerance, Errc::InvalidArgument,
                    "diagonal entry " + std::to_string(i + 1) + " is not 1");
      for (std::size_t j = 0; j < n; ++j) {
        PCAFE_REQUIRE(m(i, j) > 0.0 && std::isfinite(m(i, j)), Errc::InvalidArgument,
                      "entries must be positive");
        PCAFE_REQUIRE(in_crisp_scale(m(i, j)), Errc::OutOfScale,
                      "entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                          ") = " + std::to_string(m(i, j)) + " is outside [1/9, 9]");
        PCAFE_REQUIRE(std::abs(m(i, j) * m(j, i) - 1.0) <= kReciprocityTolerance, Errc::InvalidArgument,
                      "entries (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                          ") and its transpose are not reciprocal");
      }
    }
    JudgmentMatrix a;
    a.m_ = std::move(m);
    return a;
  }

  std::size_t size() const noexcept { return m_.size(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
  const SquareMatrix& matrix() const noexcept { return m_; }

  bool operator==(const JudgmentMatrix&) const = default;

 private:
  SquareMatrix m_;
};

inline JudgmentMatrix build_judgment_matrix(std::size_t n, std::span<const PairJudgment> upper) {
  PCAFE_REQUIRE(n >= 2, Errc::TooSmall, "judgment matrices need n >= 2");
  SquareMatrix m = detail::fill_upper(n, upper, 1.0, [](const PairJudgment& p) {
    PCAFE_REQUIRE(in_crisp_scale(p.value), Errc::OutOfScale,
                  "value " + std::to_string(p.value) + " at (" + std::to_string(p.i) + "," +
                      std::to_string(p.j) + ") is outside [1/9, 9]");
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m(j, i) = 1.0 / m(i, j);
  return JudgmentMatrix::from_matrix(std::move(m));
}

inline WeightVector weights_geometric_mean(const JudgmentMatrix& a) {
  return detail::row_geometric_mean_weights(a.matrix());
}

// lambda_max = (1/n) * sum_i (A w)_i / w_i. Applied verbatim to both crisp and
// fuzzy matrices.
inline double lambda_max(const SquareMatrix& a, const WeightVector& w) {
  const std::size_t n = a.size();
  PCAFE_REQUIRE(w.size() == n, Errc::DimensionMismatch,
                "weight vector has " + std::to_string(w.size()) + " entries for a " + std::to_string(n) +
                    "x" + std::to_string(n) + " matrix");
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    PCAFE_REQUIRE(w[i] > 0.0, Errc::ZeroWeight, "weight " + std::to_string(i + 1) + " is zero");
    double aw = 0.0;
    for (std::size_t j = 0; j < n; ++j) aw += a(i, j) * w[j];
    acc += aw / w[i];
  }
  return acc / static_cast<double>(n);
}

inline double lambda_max(const JudgmentMatrix& a, const WeightVector& w) { return lambda_max(a.matrix(), w); }

inline ConsistencyReport consistency(const JudgmentMatrix& a, const RiTable& ri_table = {}) {
  return make_consistency_report(a.size(), lambda_max(a, weights_geometric_mean(a)), ri_table);
}

// Element-wise geometric mean of a panel. Each cell's values are sorted before
// summing logs so the result does not depend on panel order.
inline JudgmentMatrix aggregate_expert_matrices(std::span<const JudgmentMatrix> panel) {
  PCAFE_REQUIRE(!panel.empty(), Errc::EmptyPanel, "no matrices to aggregate");
  const std::size_t n = panel.front().size();
  for (const auto& a : panel)
    PCAFE_REQUIRE(a.size() == n, Errc::DimensionMismatch, "panel matrices differ in dimension");
  if (panel.size() == 1) return panel.front();

  SquareMatrix out(n, 1.0);
  std::vector<double> logs(panel.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = 0; k < panel.size(); ++k) logs[k] = std::log(panel[k](i, j));
      std::sort(logs.begin(), logs.end());
      double s = 0.0;
      for (double x : logs) s += x;
      out(i, j) = std::exp(s / static_cast<double>(panel.size()));
      out(j, i) = 1.0 / out(i, j);
    }
  }
  return JudgmentMatrix::from_matrix(std::move(out));
}

struct Triad {
  std::size_t i = 0;  // 1-based
  std::size_t j = 0;
  std::size_t k = 0;
  double deviation = 0.0;
};

// Worst transitivity violation |log a_ij - log(a_ik a_kj)| over triads i<j<k.
// The deviation is the same for every ordering of a triad, so scanning sorted
// triads with a strict comparison gives the lexicographic tie-break.
inline Triad most_inconsistent_triad(const JudgmentMatrix& a) {
  const std::size_t n = a.size();
  PCAFE_REQUIRE(n >= 3, Errc::TooSmall, "triads need n >= 3");
  Triad best{1, 2, 3, -1.0};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const double dev = std::abs(std::log(a(i, j)) - std::log(a(i, k) * a(k, j)));
        if (dev > best.deviation) best = {i + 1, j + 1, k + 1, dev};
      }
  return best;
}

}  // namespace pcafe
