#pragma once

#include <cstddef>
#include <vector>

#include "tsdapt/linalg.hpp"

namespace tsdapt::coral {

using linalg::Matrix;

struct CoralTransform {
  Matrix a;  // d x d
  std::vector<double> source_mean;
  std::vector<double> target_mean;
  std::size_t rank_used = 0;
};

// Whitens with the pseudo-inverse square root of the source covariance and
// re-colors with the square root of the target covariance restricted to its
// leading r eigenpairs, r = min(rank C_S, rank C_T). A negative ridge selects
// default_ridge over the pooled rows.
CoralTransform coral_fit(const Matrix& xs, const Matrix& xt, double ridge = -1.0);

// (X - source_mean) A + target_mean, row-wise.
Matrix coral_apply(const CoralTransform& t, const Matrix& x);

}  // namespace tsdapt::coral
