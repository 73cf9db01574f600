#include "doctest.h"
#include "support.hpp"
#include "tsdapt/error.hpp"
#include "tsdapt/linalg.hpp"

using namespace tsdapt;
using namespace tsdapt::linalg;
using testing::Rng;

namespace {

void check_orthonormal_columns(const Matrix& v, double tol) {
  const Matrix g = testing::multiply(testing::transpose(v), v);
  CHECK(testing::max_abs_diff(g, testing::identity(v.cols())) <= tol);
}

Matrix reconstruct_eig(const SymEig& e) {
  const std::size_t n = e.values.size();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) out(i, j) += e.vectors(i, k) * e.values[k] * e.vectors(j, k);
  return out;
}

Matrix reconstruct_svd(const Svd& s) {
  Matrix out(s.u.rows(), s.v.rows());
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j)
      for (std::size_t k = 0; k < s.singular_values.size(); ++k)
        out(i, j) += s.u(i, k) * s.singular_values[k] * s.v(j, k);
  return out;
}

}  // namespace

TEST_CASE("matrix basics") {
  const Matrix a{{1, 2}, {3, 4}};
  CHECK(a.rows() == 2);
  CHECK(a(1, 0) == 3);
  CHECK(a.transpose()(0, 1) == 3);
  CHECK((a * Matrix::identity(2)) == a);
  CHECK(trace(a) == 5);
  CHECK(frobenius_norm(a) == doctest::Approx(std::sqrt(30.0)));
  Matrix e(0, 3);
  e.append_row(std::vector<double>{1, 2, 3});
  CHECK(e.rows() == 1);
  CHECK_THROWS_AS(e.append_row(std::vector<double>{1, 2}), Error);
  CHECK_THROWS_AS(Matrix({{1, 2}, {3}}), Error);
}

TEST_CASE("covariance of a rank-deficient column needs a ridge") {
  const Matrix x{{1, 0}, {-1, 0}};
  try {
    (void)covariance(x, 0.0);
    FAIL("expected DegenerateCovariance");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateCovariance);
  }
  const auto s = covariance(x, 1e-6);
  CHECK(s.matrix()(0, 0) == doctest::Approx(2 + 1e-6).epsilon(1e-15));
  CHECK(s.matrix()(1, 1) == doctest::Approx(1e-6).epsilon(1e-12));
  CHECK(s.matrix()(0, 1) == 0.0);
}

TEST_CASE("covariance of identical rows is the ridge") {
  const Matrix x{{3, -2, 5}, {3, -2, 5}};
  const auto s = covariance(x, 1e-6);
  CHECK(testing::max_abs_diff(s.matrix(), 1e-6 * testing::identity(3)) <= 1e-18);
}

TEST_CASE("covariance matches the double-loop oracle") {
  Rng rng(11);
  const Matrix x = rng.normal_matrix(50, 3);
  const auto s = covariance(x, 0.0);
  CHECK(testing::max_abs_diff(s.matrix(), testing::covariance_oracle(x)) <= 1e-12);
  double logdet = 0.0;
  for (std::size_t i = 0; i < 3; ++i) logdet += 2.0 * std::log(s.chol()(i, i));
  CHECK(s.logdet() == doctest::Approx(logdet).epsilon(1e-14));
}

TEST_CASE("covariance eigenvalues stay above the ridge") {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.index(8), d = 1 + rng.index(6);
    const double ridge = rng.uniform(1e-6, 1.0);
    const auto s = covariance(rng.normal_matrix(n, d), ridge);
    CHECK(testing::max_abs_diff(s.matrix(), testing::transpose(s.matrix())) == 0.0);
    for (double v : sym_eig(s.matrix()).values) CHECK(v >= ridge - 1e-12);
  }
}

TEST_CASE("default ridge follows trace over dimension") {
  const Matrix x{{0, 0}, {2, 4}};
  // variances 2 and 8
  CHECK(default_ridge(x) == doctest::Approx(1e-6 * 10.0 / 2.0));
  CHECK(default_ridge(Matrix{{1, 1}, {1, 1}}) == doctest::Approx(1e-12));
}

TEST_CASE("symmetric eigendecomposition examples") {
  const auto id = sym_eig(testing::identity(3));
  for (double v : id.values) CHECK(v == doctest::Approx(1.0));
  const auto d = sym_eig(Matrix{{2, 0}, {0, 1}});
  CHECK(d.values[0] == doctest::Approx(2.0));
  CHECK(d.values[1] == doctest::Approx(1.0));
  CHECK(std::abs(d.vectors(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(d.vectors(1, 1)) == doctest::Approx(1.0));
}

TEST_CASE("symmetric eigendecomposition reconstructs random inputs") {
  Rng rng(13);
  const Matrix a5 = rng.symmetric(5);
  const auto e5 = sym_eig(a5);
  CHECK(testing::max_abs_diff(reconstruct_eig(e5), a5) <= 1e-9);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.index(20);
    const Matrix a = rng.symmetric(n);
    const auto e = sym_eig(a);
    const double scale = testing::frobenius(a);
    REQUIRE(testing::frobenius(reconstruct_eig(e) - a) <= 1e-9 * scale);
    for (std::size_t i = 1; i < n; ++i) REQUIRE(e.values[i - 1] >= e.values[i]);
    if (trial % 50 == 0) check_orthonormal_columns(e.vectors, 1e-9);
    if (trial % 100 == 0) {
      // A v = lambda v column by column
      const Matrix av = testing::multiply(a, e.vectors);
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(av(i, k) - e.values[k] * e.vectors(i, k)) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("svd examples") {
  const auto s = svd(Matrix{{3, 0}, {0, 2}});
  CHECK(s.singular_values[0] == doctest::Approx(3.0));
  CHECK(s.singular_values[1] == doctest::Approx(2.0));
  const auto z = svd(Matrix(3, 2, 0.0));
  for (double v : z.singular_values) CHECK(v == 0.0);
  check_orthonormal_columns(z.u, 1e-12);
  check_orthonormal_columns(z.v, 1e-12);
}

TEST_CASE("svd reconstructs random inputs") {
  Rng rng(14);
  const Matrix a43 = rng.normal_matrix(4, 3);
  const auto s43 = svd(a43);
  CHECK(testing::frobenius(reconstruct_svd(s43) - a43) <= 1e-9 * testing::frobenius(a43));
  double sv_norm = 0.0;
  for (double v : s43.singular_values) sv_norm += v * v;
  CHECK(std::sqrt(sv_norm) == doctest::Approx(testing::frobenius(a43)).epsilon(1e-12));

  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t r = 1 + rng.index(20), c = 1 + rng.index(20);
    Matrix a = rng.normal_matrix(r, c);
    if (trial % 7 == 0 && c > 1)
      for (std::size_t i = 0; i < r; ++i) a(i, c - 1) = a(i, 0);  // rank deficient
    const auto s = svd(a);
    REQUIRE(s.singular_values.size() == std::min(r, c));
    REQUIRE(testing::frobenius(reconstruct_svd(s) - a) <= 1e-9 * std::max(testing::frobenius(a), 1.0));
    for (std::size_t i = 0; i < s.singular_values.size(); ++i) {
      REQUIRE(s.singular_values[i] >= 0.0);
      if (i > 0) REQUIRE(s.singular_values[i - 1] >= s.singular_values[i]);
    }
    if (trial % 50 == 0) {
      check_orthonormal_columns(s.u, 1e-9);
      check_orthonormal_columns(s.v, 1e-9);
    }
  }
}

TEST_CASE("spd solve") {
  const SpdEstimate id(testing::identity(3), 0.0);
  const Matrix b{{1, 2}, {3, 4}, {5, 6}};
  CHECK(testing::max_abs_diff(spd_solve(id, b), b) <= 1e-15);
  const SpdEstimate two(2.0 * testing::identity(3), 0.0);
  CHECK(testing::max_abs_diff(spd_solve(two, testing::identity(3)), 0.5 * testing::identity(3)) <= 1e-15);

  Rng rng(15);
  const SpdEstimate s(rng.spd(4), 0.0);
  const Matrix x = spd_solve(s, testing::identity(4));
  CHECK(testing::max_abs_diff(testing::multiply(x, s.matrix()), testing::identity(4)) <= 1e-9);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.index(10);
    const SpdEstimate t(rng.spd(n), 0.0);
    CHECK(testing::max_abs_diff(spd_solve(t, t.matrix()), testing::identity(n)) <= 1e-9);
  }
}

TEST_CASE("spd estimate rejects asymmetric input") {
  CHECK_THROWS_AS(SpdEstimate(Matrix{{1, 0.5}, {0, 1}}, 0.0), Error);
}

TEST_CASE("fractional powers") {
  const SpdEstimate id(testing::identity(2), 0.0);
  CHECK(testing::max_abs_diff(fractional_spd_power(id, 0.5), testing::identity(2)) <= 1e-12);
  const SpdEstimate d(Matrix{{4, 0}, {0, 9}}, 0.0);
  CHECK(testing::max_abs_diff(fractional_spd_power(d, 0.5), Matrix{{2, 0}, {0, 3}}) <= 1e-12);
  // Eigenvalue 1e-12 sits under the 1e-10 relative cutoff.
  const SpdEstimate near_singular(Matrix{{4, 0}, {0, 0}}, 1e-12);
  const Matrix inv_sqrt = fractional_spd_power(near_singular, -0.5);
  CHECK(inv_sqrt(0, 0) == doctest::Approx(0.5));
  CHECK(std::abs(inv_sqrt(1, 1)) <= 1e-12);

  Rng rng(16);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.index(8);
    const SpdEstimate s(rng.spd(n), 0.0);
    const Matrix r = fractional_spd_power(s, 0.5);
    CHECK(testing::frobenius(testing::multiply(r, r) - s.matrix()) <= 1e-9 * testing::frobenius(s.matrix()));
    const Matrix ri = fractional_spd_power(s, -0.5);
    CHECK(testing::max_abs_diff(testing::multiply(testing::multiply(ri, s.matrix()), ri), testing::identity(n)) <=
          1e-9);
  }
}

TEST_CASE("numerical rank") {
  CHECK(numerical_rank(sym_eig(Matrix{{1, 0, 0}, {0, 1e-3, 0}, {0, 0, 1e-12}})) == 2);
  CHECK(numerical_rank(sym_eig(Matrix(2, 2, 0.0))) == 0);
}
