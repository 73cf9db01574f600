#include "tsdapt/coral.hpp"

#include <algorithm>
#include <cmath>

#include "tsdapt/error.hpp"

namespace tsdapt::coral {

namespace {

// V[:, :r] diag(lambda^p) V[:, :r]^T; eigenvalues under the rank cutoff are
// dropped.
Matrix spectral_power(const linalg::SymEig& eig, std::size_t r, double p) {
  const std::size_t d = eig.vectors.rows();
  const double cutoff = linalg::kRankCutoff * std::max(eig.values.front(), 0.0);
  Matrix out(d, d);
  for (std::size_t k = 0; k < r; ++k) {
    const double lambda = eig.values[k];
    if (lambda <= cutoff) continue;
    const double w = std::pow(lambda, p);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) out(i, j) += eig.vectors(i, k) * w * eig.vectors(j, k);
  }
  return out;
}

}  // namespace

CoralTransform coral_fit(const Matrix& xs, const Matrix& xt, double ridge) {
  if (xs.cols() != xt.cols()) throw Error(ErrorCode::InvalidArgument, "coral_fit: dimension mismatch");
  if (xs.rows() == 0 || xt.rows() == 0) throw Error(ErrorCode::InvalidArgument, "coral_fit: empty input");
  if (ridge < 0.0) ridge = std::max(linalg::default_ridge(xs), linalg::default_ridge(xt));

  const linalg::SpdEstimate cs = linalg::covariance(xs, ridge);
  const linalg::SpdEstimate ct = linalg::covariance(xt, ridge);
  const linalg::SymEig eig_s = linalg::sym_eig(cs.matrix());
  const linalg::SymEig eig_t = linalg::sym_eig(ct.matrix());
  const std::size_t d = xs.cols();
  const std::size_t r = std::min(linalg::numerical_rank(eig_s), linalg::numerical_rank(eig_t));

  CoralTransform t;
  t.a = spectral_power(eig_s, d, -0.5) * spectral_power(eig_t, r, 0.5);
  t.source_mean = linalg::column_means(xs);
  t.target_mean = linalg::column_means(xt);
  t.rank_used = r;
  if (!t.a.all_finite()) throw Error(ErrorCode::NumericalFailure, "coral_fit: non-finite transform");
  return t;
}

Matrix coral_apply(const CoralTransform& t, const Matrix& x) {
  const std::size_t d = t.a.rows();
  if (x.cols() != d) throw Error(ErrorCode::InvalidArgument, "coral_apply: dimension mismatch");
  Matrix centered = x;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t k = 0; k < d; ++k) centered(i, k) -= t.source_mean[k];
  Matrix out = centered * t.a;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t k = 0; k < d; ++k) out(i, k) += t.target_mean[k];
  return out;
}

}  // namespace tsdapt::coral
