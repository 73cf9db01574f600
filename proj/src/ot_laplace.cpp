#include <algorithm>
#include <cmath>
#include <numeric>

#include "ot_internal.hpp"
#include "tsdapt/error.hpp"
#include "tsdapt/ot.hpp"

namespace tsdapt::ot {

namespace {

// Y = diag(a)^-1 P Xt - Xs; rows with zero mass keep a zero displacement.
Matrix displacement(const Matrix& plan, std::span<const double> a, const Matrix& xs, const Matrix& xt,
                    bool subtract_source) {
  Matrix y = plan * xt;
  for (std::size_t i = 0; i < y.rows(); ++i) {
    for (std::size_t k = 0; k < y.cols(); ++k) {
      if (a[i] > 0.0)
        y(i, k) = y(i, k) / a[i] - (subtract_source ? xs(i, k) : 0.0);
      else
        y(i, k) = 0.0;
    }
  }
  return y;
}

// tr(A^T L B)
double laplacian_form(const Matrix& a, const Matrix& laplacian, const Matrix& b) {
  const Matrix lb = laplacian * b;
  return detail::frobenius_inner(a, lb);
}

}  // namespace

Matrix knn_laplacian(const Matrix& x, double bandwidth) {
  const std::size_t n = x.rows();
  Matrix weights(n, n);
  if (n >= 2) {
    const std::size_t k = std::min<std::size_t>(5, n - 1);
    std::vector<std::size_t> order(n);
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) dist[j] = linalg::squared_distance(x.row(i), x.row(j));
      std::iota(order.begin(), order.end(), 0);
      order.erase(order.begin() + static_cast<std::ptrdiff_t>(i));
      std::stable_sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) { return dist[p] < dist[q]; });
      for (std::size_t r = 0; r < k; ++r) {
        const std::size_t j = order[r];
        const double w = std::exp(-dist[j] / bandwidth);
        weights(i, j) = w;
        weights(j, i) = w;
      }
      order.resize(n);
    }
  }
  Matrix laplacian(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double degree = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      degree += weights(i, j);
      laplacian(i, j) = -weights(i, j);
    }
    laplacian(i, i) += degree;
  }
  return laplacian;
}

double laplacian_penalty(const Matrix& plan, std::span<const double> a, const Matrix& xs, const Matrix& xt,
                         const Matrix& laplacian) {
  const Matrix y = displacement(plan, a, xs, xt, true);
  return 2.0 * laplacian_form(y, laplacian, y);
}

double laplacian_objective(const TransportPlan& plan, const CostMatrix& cost, const Matrix& xs, const Matrix& xt,
                           double reg_lap) {
  const Matrix laplacian = knn_laplacian(xs, detail::median_squared_distance(xs));
  return detail::frobenius_inner(plan.plan, cost.entries) +
         reg_lap * laplacian_penalty(plan.plan, plan.source_weights, xs, xt, laplacian);
}

TransportPlan solve_emd_laplacian(std::span<const double> a, std::span<const double> b, const CostMatrix& cost,
                                  const Matrix& xs, const Matrix& xt, const LaplacianOptions& options) {
  if (xs.rows() != cost.n_source() || xt.rows() != cost.n_target() || xs.cols() != xt.cols())
    throw Error(ErrorCode::InvalidArgument, "solve_emd_laplacian: supports do not match the cost matrix");
  if (!(options.reg_lap >= 0.0) || !std::isfinite(options.reg_lap))
    throw Error(ErrorCode::InvalidArgument, "solve_emd_laplacian: reg_lap must be nonnegative");

  TransportPlan current = solve_emd(a, b, cost);
  if (options.reg_lap == 0.0 || xs.rows() < 2) return current;

  const Matrix& c = cost.entries;
  const double reg = options.reg_lap;
  const Matrix laplacian = knn_laplacian(xs, detail::median_squared_distance(xs));
  const Matrix xt_t = xt.transpose();
  std::size_t total_iter = current.iterations;

  Matrix& p = current.plan;
  for (std::size_t it = 0; it < options.max_cg_iter; ++it) {
    const Matrix y = displacement(p, a, xs, xt, true);
    // Gradient of 2 tr(Y^T L Y) with respect to P is 4 diag(a)^-1 L Y Xt^T.
    Matrix grad = laplacian * y * xt_t;
    for (std::size_t i = 0; i < grad.rows(); ++i)
      for (std::size_t j = 0; j < grad.cols(); ++j) grad(i, j) = a[i] > 0.0 ? 4.0 * grad(i, j) / a[i] : 0.0;
    Matrix linearized = c + reg * grad;

    const TransportPlan vertex = solve_emd_raw(a, b, linearized);
    total_iter += vertex.iterations;
    const Matrix direction = vertex.plan - p;
    const double slope = detail::frobenius_inner(linearized, direction);
    const double objective = detail::frobenius_inner(p, c) + reg * 2.0 * laplacian_form(y, laplacian, y);
    if (-slope <= options.tol * std::max(1.0, std::abs(objective))) break;

    const Matrix z = displacement(direction, a, xs, xt, false);
    const double curvature = 2.0 * reg * laplacian_form(z, laplacian, z);
    const double step = curvature > 0.0 ? std::clamp(-slope / (2.0 * curvature), 0.0, 1.0) : 1.0;
    if (step == 0.0) break;
    p = p + step * direction;
  }
  for (double& v : p.data()) v = std::max(v, 0.0);
  current.iterations = total_iter;
  current.transport_cost = detail::frobenius_inner(p, c);
  return current;
}

}  // namespace tsdapt::ot
