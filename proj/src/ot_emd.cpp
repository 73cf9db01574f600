#include <algorithm>
#include <cmath>
#include <limits>

#include "ot_internal.hpp"
#include "tsdapt/error.hpp"
#include "tsdapt/ot.hpp"

namespace tsdapt::ot {

namespace detail {

Support prune_weights(std::span<const double> a, std::span<const double> b, std::size_t rows, std::size_t cols) {
  if (a.size() != rows || b.size() != cols)
    throw Error(ErrorCode::InvalidWeights, "weight vector lengths do not match the cost matrix");
  auto check = [](std::span<const double> w, const char* side) {
    double total = 0.0;
    for (double v : w) {
      if (!std::isfinite(v) || v < 0.0)
        throw Error(ErrorCode::InvalidWeights, std::string(side) + " weights must be finite and nonnegative");
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-8)
      throw Error(ErrorCode::InvalidWeights, std::string(side) + " weights must sum to 1");
  };
  check(a, "source");
  check(b, "target");

  Support s;
  for (std::size_t i = 0; i < rows; ++i) {
    if (a[i] > 0.0) {
      s.a.push_back(a[i]);
      s.kept_rows.push_back(i);
    }
  }
  for (std::size_t j = 0; j < cols; ++j) {
    if (b[j] > 0.0) {
      s.b.push_back(b[j]);
      s.kept_cols.push_back(j);
    }
  }
  return s;
}

linalg::Matrix reduce_cost(const linalg::Matrix& cost, const Support& support) {
  linalg::Matrix out(support.kept_rows.size(), support.kept_cols.size());
  for (std::size_t i = 0; i < support.kept_rows.size(); ++i)
    for (std::size_t j = 0; j < support.kept_cols.size(); ++j)
      out(i, j) = cost(support.kept_rows[i], support.kept_cols[j]);
  return out;
}

linalg::Matrix expand_plan(const linalg::Matrix& reduced, const Support& support, std::size_t rows,
                           std::size_t cols) {
  linalg::Matrix out(rows, cols);
  for (std::size_t i = 0; i < support.kept_rows.size(); ++i)
    for (std::size_t j = 0; j < support.kept_cols.size(); ++j)
      out(support.kept_rows[i], support.kept_cols[j]) = reduced(i, j);
  return out;
}

double frobenius_inner(const linalg::Matrix& x, const linalg::Matrix& y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.data().size(); ++k) s += x.data()[k] * y.data()[k];
  return s;
}

}  // namespace detail

namespace {

// Transportation simplex on the bipartite spanning-tree basis. Rows are
// nodes [0, m), columns are nodes [m, m + n). Pricing is Dantzig's rule; after
// a run of degenerate pivots it switches to Bland's rule (lowest cell index
// for both entering and leaving) until the objective moves again.
class TransportationSimplex {
 public:
  TransportationSimplex(std::span<const double> a, std::span<const double> b, const linalg::Matrix& cost)
      : m_(a.size()), n_(b.size()), cost_(cost), basic_(m_ * n_, false) {
    double scale = 0.0;
    for (double v : cost_.data()) scale = std::max(scale, std::abs(v));
    tol_ = 1e-11 * std::max(scale, 1.0);
    northwest_corner(a, b);
  }

  std::size_t solve() {
    const std::size_t nodes = m_ + n_;
    u_.assign(m_, 0.0);
    v_.assign(n_, 0.0);
    parent_node_.assign(nodes, 0);
    parent_edge_.assign(nodes, 0);
    depth_.assign(nodes, 0);
    const std::size_t cap = std::max<std::size_t>(100000, 200 * m_ * n_);
    std::size_t degenerate_streak = 0;
    for (std::size_t iter = 0; iter < cap; ++iter) {
      build_tree();
      const bool bland = degenerate_streak > m_ + n_;
      const std::ptrdiff_t entering = price(bland);
      if (entering < 0) return iter;
      const bool moved = pivot(static_cast<std::size_t>(entering));
      degenerate_streak = moved ? 0 : degenerate_streak + 1;
    }
    throw Error(ErrorCode::NumericalFailure, "solve_emd: network simplex iteration cap reached");
  }

  linalg::Matrix plan() const {
    linalg::Matrix p(m_, n_);
    for (std::size_t e = 0; e < edge_cell_.size(); ++e)
      p(edge_cell_[e] / n_, edge_cell_[e] % n_) = std::max(flow_[e], 0.0);
    return p;
  }

 private:
  void add_edge(std::size_t i, std::size_t j, double flow) {
    edge_cell_.push_back(i * n_ + j);
    flow_.push_back(std::max(flow, 0.0));
    basic_[i * n_ + j] = true;
  }

  // Produces exactly m + n - 1 basic cells forming a spanning tree.
  void northwest_corner(std::span<const double> a, std::span<const double> b) {
    std::size_t i = 0, j = 0;
    double supply = a[0], demand = b[0];
    while (true) {
      if (i == m_ - 1 && j == n_ - 1) {
        add_edge(i, j, std::min(supply, demand));
        break;
      }
      if (i == m_ - 1 || (j < n_ - 1 && demand < supply)) {
        add_edge(i, j, demand);
        supply -= demand;
        demand = b[++j];
      } else {
        add_edge(i, j, supply);
        demand -= supply;
        supply = a[++i];
      }
    }
  }

  void build_tree() {
    const std::size_t nodes = m_ + n_;
    adj_start_.assign(nodes + 1, 0);
    for (std::size_t cell : edge_cell_) {
      ++adj_start_[cell / n_ + 1];
      ++adj_start_[m_ + cell % n_ + 1];
    }
    for (std::size_t k = 0; k < nodes; ++k) adj_start_[k + 1] += adj_start_[k];
    adj_.assign(2 * edge_cell_.size(), 0);
    std::vector<std::size_t> fill(adj_start_.begin(), adj_start_.end() - 1);
    for (std::size_t e = 0; e < edge_cell_.size(); ++e) {
      adj_[fill[edge_cell_[e] / n_]++] = e;
      adj_[fill[m_ + edge_cell_[e] % n_]++] = e;
    }

    visited_.assign(nodes, false);
    queue_.clear();
    queue_.push_back(0);
    visited_[0] = true;
    depth_[0] = 0;
    u_[0] = 0.0;
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const std::size_t node = queue_[head];
      for (std::size_t k = adj_start_[node]; k < adj_start_[node + 1]; ++k) {
        const std::size_t e = adj_[k];
        const std::size_t i = edge_cell_[e] / n_;
        const std::size_t j = edge_cell_[e] % n_;
        const std::size_t other = node < m_ ? m_ + j : i;
        if (visited_[other]) continue;
        visited_[other] = true;
        parent_node_[other] = node;
        parent_edge_[other] = e;
        depth_[other] = depth_[node] + 1;
        const double c = cost_(i, j);
        if (other >= m_)
          v_[j] = c - u_[i];
        else
          u_[i] = c - v_[j];
        queue_.push_back(other);
      }
    }
    if (queue_.size() != nodes) throw Error(ErrorCode::NumericalFailure, "solve_emd: basis is not a spanning tree");
  }

  std::ptrdiff_t price(bool bland) const {
    std::ptrdiff_t best = -1;
    double best_reduced = -tol_;
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        const std::size_t cell = i * n_ + j;
        if (basic_[cell]) continue;
        const double reduced = cost_(i, j) - u_[i] - v_[j];
        if (reduced < best_reduced) {
          best = static_cast<std::ptrdiff_t>(cell);
          if (bland) return best;
          best_reduced = reduced;
        }
      }
    }
    return best;
  }

  // Returns false for a degenerate (zero-step) pivot.
  bool pivot(std::size_t entering) {
    std::size_t row_node = entering / n_;
    std::size_t col_node = m_ + entering % n_;
    up_from_row_.clear();
    up_from_col_.clear();
    while (row_node != col_node) {
      if (depth_[row_node] >= depth_[col_node]) {
        up_from_row_.push_back(parent_edge_[row_node]);
        row_node = parent_node_[row_node];
      } else {
        up_from_col_.push_back(parent_edge_[col_node]);
        col_node = parent_node_[col_node];
      }
    }
    // Cycle after the entering cell: column side upward, then row side
    // downward. Signs alternate starting with a decrease.
    cycle_.assign(up_from_col_.begin(), up_from_col_.end());
    cycle_.insert(cycle_.end(), up_from_row_.rbegin(), up_from_row_.rend());

    std::size_t leaving = cycle_[0];
    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cycle_.size(); k += 2) {
      const std::size_t e = cycle_[k];
      if (flow_[e] < theta || (flow_[e] == theta && edge_cell_[e] < edge_cell_[leaving])) {
        theta = flow_[e];
        leaving = e;
      }
    }
    for (std::size_t k = 0; k < cycle_.size(); ++k) {
      const std::size_t e = cycle_[k];
      flow_[e] += (k % 2 == 0) ? -theta : theta;
    }
    basic_[edge_cell_[leaving]] = false;
    edge_cell_[leaving] = entering;
    flow_[leaving] = theta;
    basic_[entering] = true;
    return theta > 0.0;
  }

  std::size_t m_, n_;
  const linalg::Matrix& cost_;
  double tol_ = 0.0;
  std::vector<bool> basic_;
  std::vector<std::size_t> edge_cell_;
  std::vector<double> flow_;
  std::vector<double> u_, v_;
  std::vector<std::size_t> parent_node_, parent_edge_, depth_;
  std::vector<std::size_t> adj_start_, adj_, queue_;
  std::vector<bool> visited_;
  std::vector<std::size_t> up_from_row_, up_from_col_, cycle_;
};

}  // namespace

TransportPlan solve_emd_raw(std::span<const double> a, std::span<const double> b, const Matrix& cost) {
  if (!cost.all_finite()) throw Error(ErrorCode::InvalidArgument, "solve_emd: non-finite cost");
  const auto support = detail::prune_weights(a, b, cost.rows(), cost.cols());
  const Matrix reduced_cost = detail::reduce_cost(cost, support);

  TransportationSimplex simplex(support.a, support.b, reduced_cost);
  TransportPlan out;
  out.iterations = simplex.solve();
  out.plan = detail::expand_plan(simplex.plan(), support, cost.rows(), cost.cols());
  out.source_weights.assign(a.begin(), a.end());
  out.target_weights.assign(b.begin(), b.end());
  out.transport_cost = detail::frobenius_inner(out.plan, cost);
  out.converged = true;
  return out;
}

TransportPlan solve_emd(std::span<const double> a, std::span<const double> b, const CostMatrix& cost) {
  return solve_emd_raw(a, b, cost.entries);
}

}  // namespace tsdapt::ot
