#pragma once

// Seeded generators and brute-force reference computations shared by the
// test binaries. Nothing here calls into the library's numerical routines.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "tsdapt/linalg.hpp"

namespace testing {

using tsdapt::linalg::Matrix;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal(double mean = 0.0, double sd = 1.0) { return std::normal_distribution<double>(mean, sd)(engine_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }
  std::mt19937_64& engine() { return engine_; }

  Matrix uniform_matrix(std::size_t r, std::size_t c, double lo = 0.0, double hi = 1.0) {
    Matrix m(r, c);
    for (double& v : m.data()) v = uniform(lo, hi);
    return m;
  }
  Matrix normal_matrix(std::size_t r, std::size_t c, double sd = 1.0) {
    Matrix m(r, c);
    for (double& v : m.data()) v = normal(0.0, sd);
    return m;
  }
  Matrix symmetric(std::size_t n) {
    Matrix m = normal_matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) m(i, j) = m(j, i);
    return m;
  }
  // Random SPD with eigenvalues roughly in [1, n + 1].
  Matrix spd(std::size_t n) {
    const Matrix g = normal_matrix(n, n);
    Matrix s(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double acc = i == j ? 1.0 : 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += g(k, i) * g(k, j);
        s(i, j) = acc;
      }
    return s;
  }
  // Random probability vector with entries bounded away from zero.
  std::vector<double> simplex(std::size_t n) {
    std::vector<double> w(n);
    double total = 0.0;
    for (double& v : w) total += (v = uniform(0.1, 1.0));
    for (double& v : w) v /= total;
    return w;
  }

 private:
  std::mt19937_64 engine_;
};

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  return out;
}

inline Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

inline double frobenius(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

inline Matrix identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

// Sample covariance by explicit double loop over entries.
inline Matrix covariance_oracle(const Matrix& x) {
  const std::size_t n = x.rows(), d = x.cols();
  std::vector<double> mean(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < n; ++i) mean[j] += x(i, j);
    mean[j] /= static_cast<double>(n);
  }
  Matrix c(d, d);
  const double denom = static_cast<double>(std::max<std::size_t>(n - 1, 1));
  for (std::size_t p = 0; p < d; ++p)
    for (std::size_t q = 0; q < d; ++q) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += (x(i, p) - mean[p]) * (x(i, q) - mean[q]);
      c(p, q) = acc / denom;
    }
  return c;
}

// Minimum of sum_i C(i, sigma(i)) / n over all permutations sigma.
inline double permutation_oracle(const Matrix& c) {
  const std::size_t n = c.rows();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += c(i, perm[i]);
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(n);
}

// Hungarian algorithm (shortest augmenting path form) for a square
// assignment; returns the minimum total cost.
inline double assignment_oracle(const Matrix& c) {
  const std::size_t n = c.rows();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = c(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double total = 0.0;
  for (std::size_t j = 1; j <= n; ++j) total += c(p[j] - 1, j - 1);
  return total;
}

// Uniform-weight m x n transport cost via the equivalent lcm(m,n) assignment:
// source i is split into L/m copies and target j into L/n copies.
inline double uniform_transport_oracle(const Matrix& c) {
  const std::size_t m = c.rows(), n = c.cols();
  const std::size_t l = std::lcm(m, n);
  Matrix big(l, l);
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < l; ++j) big(i, j) = c(i / (l / m), j / (l / n));
  return assignment_oracle(big) / static_cast<double>(l);
}

inline std::vector<double> row_sums(const Matrix& p) {
  std::vector<double> s(p.rows(), 0.0);
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = 0; j < p.cols(); ++j) s[i] += p(i, j);
  return s;
}

inline std::vector<double> col_sums(const Matrix& p) {
  std::vector<double> s(p.cols(), 0.0);
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = 0; j < p.cols(); ++j) s[j] += p(i, j);
  return s;
}

inline double max_marginal_error(const Matrix& p, const std::vector<double>& a, const std::vector<double>& b) {
  double e = 0.0;
  const auto r = row_sums(p), c = col_sums(p);
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(r[i] - a[i]));
  for (std::size_t j = 0; j < b.size(); ++j) e = std::max(e, std::abs(c[j] - b[j]));
  return e;
}

inline double inner(const Matrix& p, const Matrix& c) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = 0; j < p.cols(); ++j) s += p(i, j) * c(i, j);
  return s;
}

inline double sq_dist(const double* x, const double* y, std::size_t d) {
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
  return s;
}

// Biased Gaussian-kernel MMD^2 by explicit triple loops.
inline double kmmd_oracle(const Matrix& x, const Matrix& y, double sigma) {
  const std::size_t d = x.cols();
  auto k = [&](const double* u, const double* v) { return std::exp(-sq_dist(u, v, d) / (2.0 * sigma * sigma)); };
  auto mean_kernel = [&](const Matrix& p, const Matrix& q) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.rows(); ++i)
      for (std::size_t j = 0; j < q.rows(); ++j) s += k(&p.data()[i * d], &q.data()[j * d]);
    return s / static_cast<double>(p.rows() * q.rows());
  };
  return mean_kernel(x, x) + mean_kernel(y, y) - 2.0 * mean_kernel(x, y);
}

inline double mean_difference_oracle(const Matrix& x, const Matrix& y) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) mx += x(i, j);
    for (std::size_t i = 0; i < y.rows(); ++i) my += y(i, j);
    const double diff = mx / static_cast<double>(x.rows()) - my / static_cast<double>(y.rows());
    s += diff * diff;
  }
  return s;
}

// ||mean x x^T - mean y y^T||_F^2 over raw (uncentered) second moments.
inline double second_moment_oracle(const Matrix& x, const Matrix& y) {
  const std::size_t d = x.cols();
  double s = 0.0;
  for (std::size_t p = 0; p < d; ++p)
    for (std::size_t q = 0; q < d; ++q) {
      double mx = 0.0, my = 0.0;
      for (std::size_t i = 0; i < x.rows(); ++i) mx += x(i, p) * x(i, q);
      for (std::size_t i = 0; i < y.rows(); ++i) my += y(i, p) * y(i, q);
      const double diff = mx / static_cast<double>(x.rows()) - my / static_cast<double>(y.rows());
      s += diff * diff;
    }
  return s;
}

inline Matrix centered(Matrix x) {
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) m += x(i, j);
    m /= static_cast<double>(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) x(i, j) -= m;
  }
  return x;
}

}  // namespace testing
