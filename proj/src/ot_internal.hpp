#pragma once

#include <span>
#include <vector>

#include "tsdapt/linalg.hpp"

namespace tsdapt::ot::detail {

// Validated marginals with zero-mass entries pruned. kept_* map reduced
// indices back to the caller's indices.
struct Support {
  std::vector<double> a;
  std::vector<double> b;
  std::vector<std::size_t> kept_rows;
  std::vector<std::size_t> kept_cols;
};

Support prune_weights(std::span<const double> a, std::span<const double> b, std::size_t rows, std::size_t cols);

linalg::Matrix reduce_cost(const linalg::Matrix& cost, const Support& support);

// Scatters a reduced plan back into a full rows x cols matrix.
linalg::Matrix expand_plan(const linalg::Matrix& reduced, const Support& support, std::size_t rows,
                           std::size_t cols);

// Median squared distance over distinct row pairs of x; falls back to the
// mean of the nonzero pair distances, then to 1, so the result is positive.
double median_squared_distance(const linalg::Matrix& x);

double frobenius_inner(const linalg::Matrix& x, const linalg::Matrix& y);

}  // namespace tsdapt::ot::detail
