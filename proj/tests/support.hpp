#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pcafe/ahp.hpp"
#include "pcafe/fahp.hpp"
#include "pcafe/fce.hpp"
#include "pcafe/hierarchy.hpp"
#include "pcafe/matrix.hpp"

#ifndef PCAFE_FIXTURE_DIR
#define PCAFE_FIXTURE_DIR "tests/fixtures"
#endif

namespace pcafe::testing {

inline std::string fixture(const std::string& name) { return std::string(PCAFE_FIXTURE_DIR) + "/" + name; }

// Hand-rolled generators over a seeded engine.
struct Gen {
  std::mt19937_64 g;
  explicit Gen(std::uint64_t seed) : g(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g); }
  std::size_t index(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(g); }

  std::vector<double> positive_vector(std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(0.05, 1.0);
    return v;
  }

  // a_ij = v_i / v_j; ratios stay inside the 1-9 scale when v spans < 9x
  SquareMatrix consistent_crisp(const std::vector<double>& v) {
    const std::size_t n = v.size();
    SquareMatrix m(n, 1.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = v[i] / v[j];
    return m;
  }

  std::vector<double> scale_bounded_vector(std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(1.0, 8.9);
    return v;
  }

  SquareMatrix random_crisp(std::size_t n) {
    SquareMatrix m(n, 1.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double v = std::exp(uniform(std::log(1.0 / 9.0), std::log(9.0)));
        m(i, j) = v;
        m(j, i) = 1.0 / v;
      }
    return m;
  }

  SquareMatrix random_fuzzy(std::size_t n) {
    SquareMatrix m(n, 0.5);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double v = uniform(0.1, 0.9);
        m(i, j) = v;
        m(j, i) = 1.0 - v;
      }
    return m;
  }

  std::vector<double> simplex(std::size_t m) {
    std::vector<double> z(m);
    double s = 0.0;
    for (auto& x : z) s += (x = uniform(0.0, 1.0));
    for (auto& x : z) x /= s;
    return z;
  }

  GradeDistribution distribution(std::size_t m) { return GradeDistribution(simplex(m)); }
};

// Principal eigenpair by power iteration, independent of the geometric-mean path.
struct Eigen {
  double lambda;
  std::vector<double> vec;
};

inline Eigen power_iteration(const SquareMatrix& a, int iters = 5000) {
  const std::size_t n = a.size();
  std::vector<double> x(n, 1.0 / static_cast<double>(n)), y(n);
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = 0.0;
      for (std::size_t j = 0; j < n; ++j) y[i] += a(i, j) * x[j];
    }
    double s = 0.0;
    for (double v : y) s += v;
    lambda = s;  // x sums to 1
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / s;
  }
  return {lambda, x};
}

inline std::vector<std::size_t> argsort_desc(const std::vector<double>& w) {
  std::vector<std::size_t> idx(w.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
  return idx;
}

inline SquareMatrix permute(const SquareMatrix& m, const std::vector<std::size_t>& p) {
  SquareMatrix out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) out(i, j) = m(p[i], p[j]);
  return out;
}

// Random tree with the given depth bound and fanout bound; every internal node has >= 2 children.
inline IndicatorNode random_tree(Gen& gen, std::size_t max_depth, std::size_t max_fanout, std::string prefix = "n") {
  IndicatorNode node{prefix, prefix, "", MetricKind::none, {}};
  if (max_depth <= 1) {
    node.metric_kind = MetricKind::subjective;
    return node;
  }
  const std::size_t k = gen.index(2, max_fanout);
  for (std::size_t c = 0; c < k; ++c) {
    const bool leaf = max_depth == 2 || gen.index(0, 2) == 0;
    node.children.push_back(random_tree(gen, leaf ? 1 : max_depth - 1, max_fanout, prefix + "." + std::to_string(c)));
  }
  return node;
}

}  // namespace pcafe::testing
