#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "pcafe/error.hpp"

namespace pcafe {

// Dense row-major n x n matrix of doubles.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  static SquareMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    SquareMatrix m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      PCAFE_REQUIRE(rows[i].size() == rows.size(), Errc::DimensionMismatch,
                    "row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                        " entries, expected " + std::to_string(rows.size()));
      for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t size() const noexcept { return n_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * n_, n_};
  }

  std::vector<std::vector<double>> rows() const {
    std::vector<std::vector<double>> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i].assign(row(i).begin(), row(i).end());
    return out;
  }

  bool operator==(const SquareMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

// Priority weights: nonnegative, summing to one.
class WeightVector {
 public:
  static constexpr double kSumTolerance = 1e-12;

  WeightVector() = default;

  // Validates the invariant. Use normalized() to build from raw magnitudes.
  explicit WeightVector(std::vector<double> w) : w_(std::move(w)) {
    PCAFE_REQUIRE(!w_.empty(), Errc::InvalidArgument, "weight vector is empty");
    double sum = 0.0;
    for (double x : w_) {
      PCAFE_REQUIRE(std::isfinite(x) && x >= 0.0, Errc::InvalidArgument,
                    "weights must be finite and nonnegative");
      sum += x;
    }
    PCAFE_REQUIRE(std::abs(sum - 1.0) <= kSumTolerance, Errc::InvalidArgument,
                  "weights sum to " + std::to_string(sum) + ", expected 1");
  }

  static WeightVector normalized(std::span<const double> raw) {
    const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
    PCAFE_REQUIRE(total > 0.0 && std::isfinite(total), Errc::InvalidArgument,
                  "cannot normalize a vector with nonpositive total");
    std::vector<double> w(raw.begin(), raw.end());
    for (double& x : w) x /= total;
    WeightVector out;
    out.w_ = std::move(w);
    return out;
  }

  static WeightVector uniform(std::size_t n) {
    WeightVector out;
    out.w_.assign(n, 1.0 / static_cast<double>(n));
    return out;
  }

  std::size_t size() const noexcept { return w_.size(); }
  double operator[](std::size_t i) const noexcept { return w_[i]; }
  const std::vector<double>& values() const noexcept { return w_; }
  auto begin() const noexcept { return w_.begin(); }
  auto end() const noexcept { return w_.end(); }

  bool operator==(const WeightVector&) const = default;

 private:
  std::vector<double> w_;
};

// 1-based (i, j, value) judgment as it appears in session files.
struct PairJudgment {
  std::size_t i = 0;
  std::size_t j = 0;
  double value = 0.0;

  bool operator==(const PairJudgment&) const = default;
};

namespace detail {

// Fills the upper triangle from 1-based (i, j) judgments, enforcing that each
// pair i < j appears exactly once. Scale bounds are checked by the caller.
template <typename CheckValue>
SquareMatrix fill_upper(std::size_t n, std::span<const PairJudgment> upper, double diagonal,
                        CheckValue&& check) {
  PCAFE_REQUIRE(n >= 1, Errc::TooSmall, "matrix dimension must be positive");
  SquareMatrix m(n, diagonal);
  std::vector<bool> seen(n * n, false);
  for (const auto& p : upper) {
    PCAFE_REQUIRE(p.i >= 1 && p.j <= n && p.i < p.j, Errc::InvalidArgument,
                  "pair (" + std::to_string(p.i) + "," + std::to_string(p.j) +
                      ") is not an upper-triangle pair of a " + std::to_string(n) + "x" +
                      std::to_string(n) + " matrix");
    const std::size_t i = p.i - 1, j = p.j - 1;
    PCAFE_REQUIRE(!seen[i * n + j], Errc::DuplicatePair,
                  "pair (" + std::to_string(p.i) + "," + std::to_string(p.j) + ") given twice");
    check(p);
    seen[i * n + j] = true;
    m(i, j) = p.value;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      PCAFE_REQUIRE(seen[i * n + j], Errc::MissingPair,
                    "pair (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") missing");
  return m;
}

inline std::vector<double> row_sums(const SquareMatrix& m) {
  std::vector<double> s(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (double x : m.row(i)) s[i] += x;
  return s;
}

// Normalized row geometric means, computed in log space.
inline WeightVector row_geometric_mean_weights(const SquareMatrix& m) {
  const std::size_t n = m.size();
  std::vector<double> gm(n);
  for (std::size_t i = 0; i < n; ++i) {
    double log_sum = 0.0;
    for (double x : m.row(i)) log_sum += std::log(x);
    gm[i] = std::exp(log_sum / static_cast<double>(n));
  }
  return WeightVector::normalized(gm);
}

}  // namespace detail
}  // namespace pcafe
