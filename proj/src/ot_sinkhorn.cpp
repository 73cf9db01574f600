#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "ot_internal.hpp"
#include "tsdapt/error.hpp"
#include "tsdapt/ot.hpp"

namespace tsdapt::ot {

namespace {

// Warm-start stages stop at this marginal violation; only the last stage
// (the requested epsilon) runs to the caller's tolerance.
constexpr double kStageTol = 1e-3;
constexpr std::size_t kStageIterCap = 200;
constexpr double kAnnealFactor = 4.0;
// Plain iterations at the final epsilon before Newton steps are tried.
constexpr std::size_t kNewtonAfter = 100;

class LogSinkhorn {
 public:
  LogSinkhorn(std::span<const double> a, std::span<const double> b, const Matrix& cost)
      : m_(a.size()), n_(b.size()), cost_(cost), f_(m_, 0.0), g_(n_, 0.0), scratch_(std::max(m_, n_)) {
    for (double v : a) log_a_.push_back(std::log(v));
    for (double v : b) log_b_.push_back(std::log(v));
    b_.assign(b.begin(), b.end());
  }

  // One g-update then one f-update; returns the L1 column-marginal violation
  // (row marginals are exact after the f-update).
  double iterate(double eps) {
    for (std::size_t j = 0; j < n_; ++j) {
      for (std::size_t i = 0; i < m_; ++i) scratch_[i] = (f_[i] - cost_(i, j)) / eps;
      g_[j] = eps * (log_b_[j] - log_sum_exp(m_));
    }
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) scratch_[j] = (g_[j] - cost_(i, j)) / eps;
      f_[i] = eps * (log_a_[i] - log_sum_exp(n_));
    }
    std::vector<double> col(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j) col[j] += std::exp((f_[i] + g_[j] - cost_(i, j)) / eps);
    double violation = 0.0;
    for (std::size_t j = 0; j < n_; ++j) violation += std::abs(col[j] - b_[j]);
    return violation;
  }

  // Damped Newton ascent on the dual
  //   D(f, g) = <f, a> + <g, b> - eps * sum exp((f_i + g_j - C_ij) / eps)
  // with the last g fixed to remove the constant shift. Returns false when
  // the system is singular or no step increases D, leaving f, g untouched.
  bool newton_step(double eps) {
    const std::size_t dim = m_ + n_ - 1;
    const Matrix p = plan(eps);
    std::vector<double> row(m_, 0.0), col(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        row[i] += p(i, j);
        col[j] += p(i, j);
      }
    Matrix h(dim, dim);
    Matrix grad(dim, 1);
    for (std::size_t i = 0; i < m_; ++i) {
      h(i, i) = row[i];
      grad(i, 0) = std::exp(log_a_[i]) - row[i];
      for (std::size_t j = 0; j + 1 < n_; ++j) h(i, m_ + j) = h(m_ + j, i) = p(i, j);
    }
    for (std::size_t j = 0; j + 1 < n_; ++j) {
      h(m_ + j, m_ + j) = col[j];
      grad(m_ + j, 0) = b_[j] - col[j];
    }
    double peak = 0.0;
    for (std::size_t k = 0; k < dim; ++k) peak = std::max(peak, h(k, k));
    if (!(peak > 0.0)) return false;
    Matrix step;
    try {
      step = linalg::spd_solve(linalg::SpdEstimate(std::move(h), 1e-13 * peak), grad);
    } catch (const Error&) {
      return false;
    }
    double slope = 0.0;
    for (std::size_t k = 0; k < dim; ++k) slope += grad(k, 0) * eps * step(k, 0);
    if (!(slope > 0.0)) return false;

    const double base = dual(eps, f_, g_);
    std::vector<double> f(m_), g(n_);
    for (double t = 1.0; t > 1e-10; t *= 0.5) {
      for (std::size_t i = 0; i < m_; ++i) f[i] = f_[i] + t * eps * step(i, 0);
      for (std::size_t j = 0; j < n_; ++j) g[j] = g_[j] + (j + 1 < n_ ? t * eps * step(m_ + j, 0) : 0.0);
      const double value = dual(eps, f, g);
      if (std::isfinite(value) && value >= base + 1e-4 * t * slope) {
        f_ = std::move(f);
        g_ = std::move(g);
        return true;
      }
    }
    return false;
  }

  Matrix plan(double eps) const {
    Matrix p(m_, n_);
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j) p(i, j) = std::exp((f_[i] + g_[j] - cost_(i, j)) / eps);
    return p;
  }

 private:
  double dual(double eps, const std::vector<double>& f, const std::vector<double>& g) const {
    double value = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < m_; ++i) value += std::exp(log_a_[i]) * f[i];
    for (std::size_t j = 0; j < n_; ++j) value += b_[j] * g[j];
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j) mass += std::exp((f[i] + g[j] - cost_(i, j)) / eps);
    return value - eps * mass;
  }

  double log_sum_exp(std::size_t count) const {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < count; ++k) peak = std::max(peak, scratch_[k]);
    double s = 0.0;
    for (std::size_t k = 0; k < count; ++k) s += std::exp(scratch_[k] - peak);
    return peak + std::log(s);
  }

  std::size_t m_, n_;
  const Matrix& cost_;
  std::vector<double> log_a_, log_b_, b_;
  std::vector<double> f_, g_;
  mutable std::vector<double> scratch_;
};

}  // namespace

TransportPlan solve_sinkhorn_raw(std::span<const double> a, std::span<const double> b, const Matrix& cost,
                                 const SinkhornOptions& options) {
  if (!(options.epsilon > 0.0) || !std::isfinite(options.epsilon))
    throw Error(ErrorCode::InvalidArgument, "solve_sinkhorn: epsilon must be positive");
  if (!(options.tol > 0.0) || options.max_iter == 0)
    throw Error(ErrorCode::InvalidArgument, "solve_sinkhorn: tol and max_iter must be positive");
  if (!cost.all_finite()) throw Error(ErrorCode::InvalidArgument, "solve_sinkhorn: non-finite cost");

  const auto support = detail::prune_weights(a, b, cost.rows(), cost.cols());
  const Matrix reduced = detail::reduce_cost(cost, support);
  double scale = 0.0;
  for (double v : reduced.data()) scale = std::max(scale, std::abs(v));

  std::vector<double> schedule;
  for (double e = scale; e > options.epsilon; e /= kAnnealFactor) schedule.push_back(e);
  schedule.push_back(options.epsilon);

  LogSinkhorn solver(support.a, support.b, reduced);
  TransportPlan out;
  out.converged = false;
  std::size_t used = 0;
  for (std::size_t stage = 0; stage < schedule.size() && used < options.max_iter; ++stage) {
    const bool last = stage + 1 == schedule.size();
    const double target = last ? options.tol : std::max(options.tol, kStageTol);
    const std::size_t stage_cap = last ? options.max_iter - used : std::min(kStageIterCap, options.max_iter - used);
    bool use_newton = true;
    for (std::size_t it = 0; it < stage_cap; ++it) {
      ++used;
      if (last && use_newton && it >= kNewtonAfter) use_newton = solver.newton_step(schedule[stage]);
      if (solver.iterate(schedule[stage]) <= target) {
        if (last) out.converged = true;
        break;
      }
    }
  }
  out.iterations = used;
  out.plan = detail::expand_plan(solver.plan(options.epsilon), support, cost.rows(), cost.cols());
  out.source_weights.assign(a.begin(), a.end());
  out.target_weights.assign(b.begin(), b.end());
  out.transport_cost = detail::frobenius_inner(out.plan, cost);
  return out;
}

TransportPlan solve_sinkhorn(std::span<const double> a, std::span<const double> b, const CostMatrix& cost,
                             const SinkhornOptions& options) {
  return solve_sinkhorn_raw(a, b, cost.entries, options);
}

namespace {

// Row indices grouped by label, groups ordered by label value.
std::vector<std::vector<std::size_t>> group_rows(std::span<const int> labels) {
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [label, rows] : groups) out.push_back(std::move(rows));
  return out;
}

double group_l2_penalty(const Matrix& p, const std::vector<std::vector<std::size_t>>& groups) {
  double total = 0.0;
  for (std::size_t j = 0; j < p.cols(); ++j) {
    for (const auto& rows : groups) {
      double s = 0.0;
      for (std::size_t i : rows) s += p(i, j) * p(i, j);
      total += std::sqrt(s);
    }
  }
  return total;
}

double entropic_objective(const Matrix& p, const Matrix& c, double eps, double eta,
                          const std::vector<std::vector<std::size_t>>& groups) {
  double value = detail::frobenius_inner(p, c);
  for (double x : p.data())
    if (x > 0.0) value += eps * x * std::log(x);
  return value + eta * group_l2_penalty(p, groups);
}

TransportPlan lpl1_mm(std::span<const double> a, std::span<const double> b, const CostMatrix& cost,
                      const std::vector<std::vector<std::size_t>>& groups, const ClassRegOptions& options) {
  // Majorization of sum_j sum_g (sum_{i in g} P_ij)^p with p = 1/2; the
  // constant keeps the derivative finite at empty blocks.
  constexpr double kPower = 0.5;
  constexpr double kSmoothing = 1e-3;
  const Matrix& c = cost.entries;
  Matrix weights(c.rows(), c.cols(), 0.0);
  TransportPlan plan;
  std::size_t total_iter = 0;
  for (std::size_t outer = 0; outer < std::max<std::size_t>(options.outer_iter, 1); ++outer) {
    Matrix regularized = c;
    if (options.eta != 0.0)
      for (std::size_t k = 0; k < regularized.data().size(); ++k)
        regularized.data()[k] += options.eta * weights.data()[k];
    plan = solve_sinkhorn_raw(a, b, regularized, options.inner);
    total_iter += plan.iterations;
    if (options.eta == 0.0) break;
    for (const auto& rows : groups) {
      for (std::size_t j = 0; j < c.cols(); ++j) {
        double mass = 0.0;
        for (std::size_t i : rows) mass += plan.plan(i, j);
        const double w = kPower * std::pow(mass + kSmoothing, kPower - 1.0);
        for (std::size_t i : rows) weights(i, j) = w;
      }
    }
  }
  plan.iterations = total_iter;
  plan.transport_cost = detail::frobenius_inner(plan.plan, c);
  return plan;
}

TransportPlan l1l2_gcg(std::span<const double> a, std::span<const double> b, const CostMatrix& cost,
                       const std::vector<std::vector<std::size_t>>& groups, const ClassRegOptions& options) {
  const Matrix& c = cost.entries;
  const double eps = options.inner.epsilon;
  const double eta = options.eta;
  TransportPlan current = solve_sinkhorn_raw(a, b, c, options.inner);
  std::size_t total_iter = current.iterations;
  bool converged = current.converged;
  if (eta != 0.0) {
    Matrix& p = current.plan;
    double objective = entropic_objective(p, c, eps, eta, groups);
    for (std::size_t outer = 0; outer < options.outer_iter; ++outer) {
      // Gradient of the group-l2 term: P_ij / ||P(g, j)||.
      Matrix group_grad(c.rows(), c.cols(), 0.0);
      for (std::size_t j = 0; j < c.cols(); ++j) {
        for (const auto& rows : groups) {
          double s = 0.0;
          for (std::size_t i : rows) s += p(i, j) * p(i, j);
          const double norm = std::sqrt(s);
          if (norm > 0.0)
            for (std::size_t i : rows) group_grad(i, j) = p(i, j) / norm;
        }
      }
      Matrix linearized = c;
      for (std::size_t k = 0; k < linearized.data().size(); ++k)
        linearized.data()[k] += eta * group_grad.data()[k];
      const TransportPlan step = solve_sinkhorn_raw(a, b, linearized, options.inner);
      total_iter += step.iterations;
      converged = converged && step.converged;

      const Matrix direction = step.plan - p;
      double slope = 0.0;
      for (std::size_t k = 0; k < p.data().size(); ++k) {
        const double x = p.data()[k];
        const double entropy_grad = x > 0.0 ? eps * (std::log(x) + 1.0) : 0.0;
        slope += (c.data()[k] + entropy_grad + eta * group_grad.data()[k]) * direction.data()[k];
      }
      if (!(slope < 0.0)) break;

      // Armijo backtracking on the full objective.
      double t = 1.0;
      Matrix trial;
      double trial_value = objective;
      bool accepted = false;
      for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
        trial = p + t * direction;
        trial_value = entropic_objective(trial, c, eps, eta, groups);
        if (trial_value <= objective + 1e-4 * t * slope) {
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
      const double decrease = objective - trial_value;
      p = std::move(trial);
      objective = trial_value;
      if (decrease <= 1e-12 * std::max(1.0, std::abs(objective))) break;
    }
  }
  current.iterations = total_iter;
  current.converged = converged;
  current.transport_cost = detail::frobenius_inner(current.plan, c);
  return current;
}

}  // namespace

TransportPlan solve_sinkhorn_class_reg(std::span<const double> a, std::span<const double> b,
                                       const CostMatrix& cost, std::span<const int> source_labels,
                                       const ClassRegOptions& options) {
  if (source_labels.size() != cost.n_source())
    throw Error(ErrorCode::InvalidArgument, "solve_sinkhorn_class_reg: one label per source row required");
  if (!(options.eta >= 0.0) || !std::isfinite(options.eta))
    throw Error(ErrorCode::InvalidArgument, "solve_sinkhorn_class_reg: eta must be nonnegative");
  const auto groups = group_rows(source_labels);
  if (options.variant == ClassRegVariant::LpL1) return lpl1_mm(a, b, cost, groups, options);
  return l1l2_gcg(a, b, cost, groups, options);
}

}  // namespace tsdapt::ot
