#include <map>

#include "doctest.h"
#include "support.hpp"
#include "tsdapt/error.hpp"
#include "tsdapt/ot.hpp"

using namespace tsdapt;
using namespace tsdapt::ot;
using testing::Rng;

namespace {

CostMatrix raw_cost(Matrix c) {
  CostMatrix cm;
  cm.entries = std::move(c);
  return cm;
}

std::size_t nonzeros(const Matrix& p) {
  std::size_t n = 0;
  for (double v : p.data()) n += v > 0.0;
  return n;
}

// Weights k_i / total with integer k_i >= 1.
std::vector<int> integer_split(Rng& rng, std::size_t parts, int total) {
  std::vector<int> k(parts, 1);
  for (int r = total - static_cast<int>(parts); r > 0; --r) ++k[rng.index(parts)];
  return k;
}

// Transport with rational weights k_i/N as an N x N assignment.
double rational_transport_oracle(const Matrix& c, const std::vector<int>& ka, const std::vector<int>& kb, int total) {
  std::vector<std::size_t> row_of, col_of;
  for (std::size_t i = 0; i < ka.size(); ++i) row_of.insert(row_of.end(), ka[i], i);
  for (std::size_t j = 0; j < kb.size(); ++j) col_of.insert(col_of.end(), kb[j], j);
  Matrix big(total, total);
  for (int i = 0; i < total; ++i)
    for (int j = 0; j < total; ++j) big(i, j) = c(row_of[i], col_of[j]);
  return testing::assignment_oracle(big) / total;
}

}  // namespace

TEST_CASE("cost matrix examples") {
  const auto same = build_cost_matrix(Matrix{{1, 2}}, Matrix{{1, 2}}, CostMetric::SqEuclidean, CostNormalization::None);
  CHECK(same.entries == Matrix{{0}});
  const auto two = build_cost_matrix(Matrix{{0, 0}}, Matrix{{1, 1}}, CostMetric::SqEuclidean, CostNormalization::None);
  CHECK(two.entries == Matrix{{2}});
  const auto mx = build_cost_matrix(Matrix{{0}, {1}}, Matrix{{0}, {2}}, CostMetric::SqEuclidean, CostNormalization::Max);
  CHECK(mx.entries == Matrix{{0, 1}, {0.25, 0.25}});
  CHECK_FALSE(mx.normalization_skipped);
}

TEST_CASE("cost metrics") {
  const Matrix xs{{0, 0}}, xt{{3, 4}};
  CHECK(build_cost_matrix(xs, xt, CostMetric::Euclidean, CostNormalization::None).entries(0, 0) == 5.0);
  CHECK(build_cost_matrix(xs, xt, CostMetric::Cityblock, CostNormalization::None).entries(0, 0) == 7.0);
  CHECK(build_cost_matrix(xs, xt, CostMetric::Minkowski, CostNormalization::None, 3.0).entries(0, 0) ==
        doctest::Approx(std::cbrt(27.0 + 64.0)));
  const auto cos = build_cost_matrix(Matrix{{1, 0}, {0, 0}}, Matrix{{0, 2}, {3, 0}}, CostMetric::Cosine,
                                     CostNormalization::None);
  CHECK(cos.entries(0, 0) == doctest::Approx(1.0));
  CHECK(cos.entries(0, 1) == doctest::Approx(0.0));
  CHECK(cos.entries(1, 0) == 1.0);  // zero vector
  CHECK_THROWS_AS(build_cost_matrix(Matrix{{1, 2}}, Matrix{{1}}, CostMetric::SqEuclidean, CostNormalization::None),
                  Error);
  CHECK(parse_cost_metric("sqeuclidean") == CostMetric::SqEuclidean);
  CHECK(to_string(CostNormalization::LogLog) == "loglog");
  CHECK_THROWS_AS(parse_cost_normalization("sqrt"), Error);
}

TEST_CASE("cost normalizations") {
  Rng rng(21);
  const Matrix xs = rng.normal_matrix(5, 3), xt = rng.normal_matrix(4, 3);
  const Matrix raw = build_cost_matrix(xs, xt, CostMetric::SqEuclidean, CostNormalization::None).entries;
  const Matrix med = build_cost_matrix(xs, xt, CostMetric::SqEuclidean, CostNormalization::Median).entries;
  std::vector<double> sorted(raw.data().begin(), raw.data().end());
  std::sort(sorted.begin(), sorted.end());
  const double median = 0.5 * (sorted[9] + sorted[10]);
  for (std::size_t k = 0; k < 20; ++k) CHECK(med.data()[k] == doctest::Approx(raw.data()[k] / median));

  for (auto norm : {CostNormalization::Log, CostNormalization::LogLog}) {
    const Matrix m = build_cost_matrix(xs, xt, CostMetric::SqEuclidean, norm).entries;
    for (std::size_t p = 0; p < 20; ++p) {
      const double expect =
          norm == CostNormalization::Log ? std::log1p(raw.data()[p]) : std::log1p(std::log1p(raw.data()[p]));
      CHECK(m.data()[p] == doctest::Approx(expect).epsilon(1e-14));
      for (std::size_t q = 0; q < 20; ++q)
        if (raw.data()[p] < raw.data()[q]) CHECK(m.data()[p] <= m.data()[q]);
    }
  }

  const auto zero = build_cost_matrix(Matrix{{1}}, Matrix{{1}}, CostMetric::SqEuclidean, CostNormalization::Max);
  CHECK(zero.normalization_skipped);
  CHECK(zero.entries(0, 0) == 0.0);
  CHECK(build_cost_matrix(Matrix{{1}}, Matrix{{1}}, CostMetric::SqEuclidean, CostNormalization::LogLog).entries(0, 0) ==
        0.0);
}

TEST_CASE("emd small examples") {
  const std::vector<double> one{1.0};
  const auto p1 = solve_emd(one, one, raw_cost(Matrix{{7.5}}));
  CHECK(p1.plan == Matrix{{1}});
  CHECK(p1.transport_cost == 7.5);

  const std::vector<double> half{0.5, 0.5};
  const auto p2 = solve_emd(half, half, raw_cost(Matrix{{0, 1}, {1, 0}}));
  CHECK(p2.plan == Matrix{{0.5, 0}, {0, 0.5}});
  CHECK(p2.transport_cost == 0.0);
}

TEST_CASE("emd matches the permutation oracle on uniform square instances") {
  Rng rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 5;
    const Matrix c = rng.uniform_matrix(n, n, 0.0, 10.0);
    const auto w = uniform_weights(n);
    const auto plan = solve_emd(w, w, raw_cost(c));
    CHECK(plan.transport_cost == doctest::Approx(testing::permutation_oracle(c)).epsilon(1e-12));
    CHECK(testing::max_marginal_error(plan.plan, w, w) <= 1e-12);
    CHECK(nonzeros(plan.plan) <= 2 * n - 1);
  }
}

TEST_CASE("emd matches assignment oracles on rectangular and weighted instances") {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + rng.index(6), n = 1 + rng.index(6);
    const Matrix c = rng.uniform_matrix(m, n, 0.0, 5.0);
    const auto a = uniform_weights(m), b = uniform_weights(n);
    const auto plan = solve_emd(a, b, raw_cost(c));
    CHECK(plan.transport_cost == doctest::Approx(testing::uniform_transport_oracle(c)).epsilon(1e-10));
    CHECK(testing::max_marginal_error(plan.plan, a, b) <= 1e-12);
    CHECK(nonzeros(plan.plan) <= m + n - 1);
  }
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + rng.index(5), n = 1 + rng.index(5);
    const int total = 12;
    const auto ka = integer_split(rng, m, total), kb = integer_split(rng, n, total);
    std::vector<double> a, b;
    for (int k : ka) a.push_back(k / 12.0);
    for (int k : kb) b.push_back(k / 12.0);
    const Matrix c = rng.uniform_matrix(m, n, 0.0, 5.0);
    const auto plan = solve_emd(a, b, raw_cost(c));
    CHECK(plan.transport_cost == doctest::Approx(rational_transport_oracle(c, ka, kb, total)).epsilon(1e-10));
    CHECK(testing::max_marginal_error(plan.plan, a, b) <= 1e-9);
  }
}

TEST_CASE("emd handles degenerate and tied costs") {
  Rng rng(24);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.index(5);
    Matrix c(n, n);
    for (double& v : c.data()) v = static_cast<double>(rng.index(3));  // heavy ties
    const auto w = uniform_weights(n);
    const auto plan = solve_emd(w, w, raw_cost(c));
    CHECK(plan.transport_cost == doctest::Approx(testing::permutation_oracle(c)).epsilon(1e-12));
    CHECK(testing::max_marginal_error(plan.plan, w, w) <= 1e-12);
  }
}

TEST_CASE("emd prunes zero-mass rows and columns") {
  const std::vector<double> a{0.5, 0.0, 0.5}, b{0.0, 1.0};
  const auto plan = solve_emd(a, b, raw_cost(Matrix{{1, 2}, {0, 0}, {3, 4}}));
  CHECK(plan.plan == Matrix{{0, 0.5}, {0, 0}, {0, 0.5}});
  CHECK(plan.transport_cost == doctest::Approx(3.0));
}

TEST_CASE("emd rejects invalid weights") {
  const Matrix c{{0, 1}, {1, 0}};
  auto code_of = [&](std::vector<double> a, std::vector<double> b) {
    try {
      (void)solve_emd(a, b, raw_cost(c));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code_of({-0.5, 1.5}, {0.5, 0.5}) == ErrorCode::InvalidWeights);
  CHECK(code_of({std::nan(""), 0.5}, {0.5, 0.5}) == ErrorCode::InvalidWeights);
  CHECK(code_of({0.5, 0.6}, {0.5, 0.5}) == ErrorCode::InvalidWeights);
  CHECK_THROWS_AS(solve_emd(std::vector<double>{1.0}, std::vector<double>{0.5, 0.5}, raw_cost(c)), Error);
}

TEST_CASE("emd invariances") {
  Rng rng(25);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 2 + rng.index(5), n = 2 + rng.index(5);
    const Matrix c = rng.uniform_matrix(m, n);
    const auto a = rng.simplex(m), b = rng.simplex(n);
    const auto base = solve_emd(a, b, raw_cost(c));

    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    Matrix cp(m, n);
    std::vector<double> ap(m);
    for (std::size_t i = 0; i < m; ++i) {
      ap[i] = a[perm[i]];
      for (std::size_t j = 0; j < n; ++j) cp(i, j) = c(perm[i], j);
    }
    CHECK(solve_emd(ap, b, raw_cost(cp)).transport_cost == doctest::Approx(base.transport_cost).epsilon(1e-12));

    const double gamma = rng.uniform(0.1, 10.0);
    const auto scaled = solve_emd(a, b, raw_cost(gamma * c));
    CHECK(scaled.transport_cost == doctest::Approx(gamma * base.transport_cost).epsilon(1e-12));
    for (std::size_t k = 0; k < m * n; ++k) CHECK((scaled.plan.data()[k] > 0) == (base.plan.data()[k] > 0));
  }
}

TEST_CASE("emd on negative costs") {
  const auto w = uniform_weights(3);
  const Matrix c{{-1, 0, 0}, {0, -2, 0}, {0, 0, -3}};
  CHECK(solve_emd_raw(w, w, c).transport_cost == doctest::Approx(-2.0));
}

TEST_CASE("sinkhorn limits") {
  Rng rng(26);
  const auto a = rng.simplex(4), b = rng.simplex(3);
  const Matrix c = rng.uniform_matrix(4, 3);
  const auto wide = solve_sinkhorn(a, b, raw_cost(c), {1e6, 10000, 1e-9});
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(wide.plan(i, j) - a[i] * b[j]) <= 1e-6);

  const std::vector<double> half{0.5, 0.5};
  const auto sharp = solve_sinkhorn(half, half, raw_cost(Matrix{{0, 1}, {1, 0}}), {0.01, 10000, 1e-9});
  CHECK(sharp.converged);
  CHECK(sharp.transport_cost <= 0.01);  // within 1% of the unit scale; EMD cost is 0
  CHECK(sharp.transport_cost >= 0.0);
}

TEST_CASE("sinkhorn approaches emd from above") {
  Rng rng(27);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix c = rng.uniform_matrix(10, 10);
    const auto w = uniform_weights(10);
    const double emd = solve_emd(w, w, raw_cost(c)).transport_cost;
    const auto p = solve_sinkhorn(w, w, raw_cost(c), {1e-3, 100000, 1e-10});
    CHECK(p.converged);
    CHECK(p.transport_cost >= emd - 1e-9);
    CHECK(p.transport_cost <= emd * 1.01);
    CHECK(testing::max_marginal_error(p.plan, w, w) <= 1e-10);
  }
}

TEST_CASE("sinkhorn reports non-convergence") {
  Rng rng(28);
  const Matrix c = rng.uniform_matrix(8, 8);
  const auto w = uniform_weights(8);
  const auto p = solve_sinkhorn(w, w, raw_cost(c), {1e-3, 3, 1e-12});
  CHECK_FALSE(p.converged);
  CHECK(p.iterations == 3);
  const auto ok = solve_sinkhorn(w, w, raw_cost(c), {0.1, 10000, 1e-6});
  CHECK(ok.converged);
  double l1 = 0.0;
  for (double v : testing::col_sums(ok.plan)) l1 += std::abs(v - 0.125);
  CHECK(l1 <= 1e-6);
  CHECK_THROWS_AS(solve_sinkhorn(w, w, raw_cost(c), {0.0, 10, 1e-6}), Error);
}

TEST_CASE("laplacian-regularized emd") {
  Rng rng(29);
  const Matrix xs = rng.normal_matrix(6, 2), xt = rng.normal_matrix(6, 2);
  const auto cost = build_cost_matrix(xs, xt, CostMetric::SqEuclidean, CostNormalization::None);
  const auto w = uniform_weights(6);
  const auto emd = solve_emd(w, w, cost);

  const auto off = solve_emd_laplacian(w, w, cost, xs, xt, {0.0, 50, 1e-9});
  CHECK(off.plan == emd.plan);
  CHECK(off.transport_cost == emd.transport_cost);

  const std::vector<double> one{1.0};
  const auto single = solve_emd_laplacian(one, one, build_cost_matrix(Matrix{{1, 2}}, Matrix{{3, 4}},
                                                                      CostMetric::SqEuclidean, CostNormalization::None),
                                          Matrix{{1, 2}}, Matrix{{3, 4}}, {5.0, 50, 1e-9});
  CHECK(single.plan == Matrix{{1}});

  for (int trial = 0; trial < 20; ++trial) {
    const Matrix s = rng.normal_matrix(6, 3), t = rng.normal_matrix(6, 3);
    const auto c = build_cost_matrix(s, t, CostMetric::SqEuclidean, CostNormalization::None);
    const auto base = solve_emd(w, w, c);
    const auto reg = solve_emd_laplacian(w, w, c, s, t, {1.0, 50, 1e-9});
    CHECK(laplacian_objective(reg, c, s, t, 1.0) <= laplacian_objective(base, c, s, t, 1.0) + 1e-12);
    CHECK(testing::max_marginal_error(reg.plan, w, w) <= 1e-12);
    for (double v : reg.plan.data()) CHECK(v >= 0.0);
  }
}

TEST_CASE("knn laplacian structure") {
  Rng rng(30);
  const Matrix x = rng.normal_matrix(9, 2);
  const Matrix l = knn_laplacian(x, 1.0);
  for (std::size_t i = 0; i < 9; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < 9; ++j) {
      row += l(i, j);
      CHECK(l(i, j) == l(j, i));
      if (i != j) CHECK(l(i, j) <= 0.0);
    }
    CHECK(std::abs(row) <= 1e-12);
  }
  // Penalty is zero when the barycentric map is a pure translation.
  Matrix shifted = x;
  for (std::size_t i = 0; i < 9; ++i) shifted(i, 0) += 3.0;
  Matrix diag(9, 9);
  for (std::size_t i = 0; i < 9; ++i) diag(i, i) = 1.0 / 9.0;
  CHECK(std::abs(laplacian_penalty(diag, uniform_weights(9), x, shifted, l)) <= 1e-10);
}

TEST_CASE("class-regularized sinkhorn with the regularizer off") {
  Rng rng(31);
  const Matrix c = rng.uniform_matrix(6, 5);
  const auto a = uniform_weights(6), b = uniform_weights(5);
  const SinkhornOptions inner{0.1, 10000, 1e-9};
  const auto plain = solve_sinkhorn(a, b, raw_cost(c), inner);
  const std::vector<int> labels{0, 0, 1, 1, 2, 2};
  for (auto variant : {ClassRegVariant::LpL1, ClassRegVariant::L1L2}) {
    const auto reg = solve_sinkhorn_class_reg(a, b, raw_cost(c), labels, {variant, 0.0, 10, inner});
    CHECK(testing::max_abs_diff(reg.plan, plain.plan) <= 1e-9);
  }
  const std::vector<int> single(6, 4);
  const auto lp = solve_sinkhorn_class_reg(a, b, raw_cost(c), single, {ClassRegVariant::LpL1, 0.5, 10, inner});
  CHECK(testing::max_abs_diff(lp.plan, plain.plan) <= 1e-6);
  CHECK_THROWS_AS(solve_sinkhorn_class_reg(a, b, raw_cost(c), std::vector<int>{0, 1}, {}), Error);
}

TEST_CASE("class-regularized sinkhorn concentrates column mass on one class") {
  Rng rng(32);
  Matrix xs(0, 2), xt(0, 2);
  std::vector<int> labels;
  for (int cls = 0; cls < 2; ++cls)
    for (int k = 0; k < 6; ++k) {
      const double cx = cls == 0 ? 0.0 : 10.0;
      xs.append_row(std::vector<double>{cx + rng.normal(0, 0.3), rng.normal(0, 0.3)});
      xt.append_row(std::vector<double>{cx + rng.normal(0, 0.3), 5.0 + rng.normal(0, 0.3)});
      labels.push_back(cls);
    }
  const auto cost = build_cost_matrix(xs, xt, CostMetric::SqEuclidean, CostNormalization::Max);
  const auto a = uniform_weights(12), b = uniform_weights(12);
  for (auto variant : {ClassRegVariant::LpL1, ClassRegVariant::L1L2}) {
    const auto p = solve_sinkhorn_class_reg(a, b, cost, labels, {variant, 0.5, 10, {0.1, 10000, 1e-9}});
    CHECK(testing::max_marginal_error(p.plan, a, b) <= 1e-6);
    for (std::size_t j = 0; j < 12; ++j) {
      double mass[2] = {0, 0};
      for (std::size_t i = 0; i < 12; ++i) mass[labels[i]] += p.plan(i, j);
      CHECK(std::max(mass[0], mass[1]) / (mass[0] + mass[1]) >= 0.95);
    }
  }
}

TEST_CASE("wasserstein cost") {
  TransportPlan zero;
  zero.plan = Matrix{{0.5, 0}, {0, 0.5}};
  CHECK(wasserstein_cost(zero, raw_cost(Matrix(2, 2, 0.0))) == 0.0);
  CHECK(wasserstein_cost(zero, raw_cost(Matrix{{1, 9}, {9, 1}})) == 1.0);
  Rng rng(33);
  TransportPlan p;
  p.plan = rng.uniform_matrix(7, 4);
  const Matrix c = rng.uniform_matrix(7, 4);
  CHECK(wasserstein_cost(p, raw_cost(c)) == doctest::Approx(testing::inner(p.plan, c)).epsilon(1e-12));
}

TEST_CASE("out-of-sample transform") {
  SUBCASE("identity plan maps support rows to themselves") {
    Rng rng(34);
    const Matrix x = rng.normal_matrix(5, 3);
    const auto w = uniform_weights(5);
    const auto plan = solve_emd(w, w, build_cost_matrix(x, x, CostMetric::SqEuclidean, CostNormalization::None));
    const auto t = make_ot_transform(plan, x, x);
    for (std::size_t i = 0; i < 5; ++i) {
      const auto mapped = ot_transform_sample(t, x.row(i));
      for (std::size_t k = 0; k < 3; ++k) CHECK(mapped.values[k] == x(i, k));
    }
  }
  SUBCASE("two-point diagonal plan") {
    TransportPlan p;
    p.plan = Matrix{{0.5, 0}, {0, 0.5}};
    p.source_weights = p.target_weights = {0.5, 0.5};
    const auto t = make_ot_transform(p, Matrix{{0}, {10}}, Matrix{{1}, {11}});
    CHECK(ot_transform_sample(t, std::vector<double>{0.0}).values[0] == 1.0);
    CHECK(ot_transform_sample(t, std::vector<double>{10.0}).values[0] == 11.0);
    // Both supports move by +1, so any point does.
    CHECK(ot_transform_sample(t, std::vector<double>{4.0}).values[0] == doctest::Approx(5.0));
  }
  SUBCASE("single support point translates") {
    TransportPlan p;
    p.plan = Matrix{{1}};
    p.source_weights = p.target_weights = {1.0};
    const auto t = make_ot_transform(p, Matrix{{1, 1}}, Matrix{{4, -1}});
    const auto on = ot_transform_sample(t, std::vector<double>{1, 1});
    CHECK(on.values == std::vector<double>{4, -1});
    const auto off = ot_transform_sample(t, std::vector<double>{2, 0});
    CHECK(off.values[0] == doctest::Approx(5.0));
    CHECK(off.values[1] == doctest::Approx(-2.0));
  }
  SUBCASE("barycentric images follow the normalized plan rows") {
    Rng rng(35);
    const Matrix xs = rng.normal_matrix(4, 2), xt = rng.normal_matrix(6, 2);
    const auto plan = solve_sinkhorn(uniform_weights(4), uniform_weights(6),
                                     build_cost_matrix(xs, xt, CostMetric::SqEuclidean, CostNormalization::Max));
    const auto t = make_ot_transform(plan, xs, xt);
    for (std::size_t i = 0; i < 4; ++i) {
      double mass = 0.0;
      std::vector<double> img(2, 0.0);
      for (std::size_t j = 0; j < 6; ++j) {
        mass += plan.plan(i, j);
        for (std::size_t k = 0; k < 2; ++k) img[k] += plan.plan(i, j) * xt(j, k);
      }
      const auto mapped = ot_transform_sample(t, xs.row(i));
      for (std::size_t k = 0; k < 2; ++k) CHECK(mapped.values[k] == doctest::Approx(img[k] / mass).epsilon(1e-12));
      CHECK(mapped.values[0] == t.barycentric_images(i, 0));
    }
  }
  SUBCASE("far points fall back to the nearest support row") {
    TransportPlan p;
    p.plan = Matrix{{0.5, 0}, {0, 0.5}};
    p.source_weights = p.target_weights = {0.5, 0.5};
    const auto t = make_ot_transform(p, Matrix{{0}, {1}}, Matrix{{5}, {7}});
    const auto far = ot_transform_sample(t, std::vector<double>{1e6});
    CHECK(far.nearest_fallback);
    CHECK(far.values[0] == doctest::Approx(1e6 + 6.0));
    CHECK_FALSE(ot_transform_sample(t, std::vector<double>{0.3}).nearest_fallback);
  }
}
