#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tsdapt/linalg.hpp"

namespace tsdapt::ot {

using linalg::Matrix;

enum class CostMetric { SqEuclidean, Euclidean, Cityblock, Cosine, Minkowski };
enum class CostNormalization { Median, Max, Log, LogLog, None };

CostMetric parse_cost_metric(const std::string& name);
CostNormalization parse_cost_normalization(const std::string& name);
std::string to_string(CostMetric metric);
std::string to_string(CostNormalization normalization);

struct CostMatrix {
  Matrix entries;  // n_source x n_target, finite and >= 0
  CostMetric metric = CostMetric::SqEuclidean;
  double minkowski_p = 2.0;
  CostNormalization normalization = CostNormalization::None;
  // Set when median/max normalization was requested on an all-zero matrix.
  bool normalization_skipped = false;

  std::size_t n_source() const noexcept { return entries.rows(); }
  std::size_t n_target() const noexcept { return entries.cols(); }
};

struct TransportPlan {
  Matrix plan;  // n_source x n_target
  std::vector<double> source_weights;
  std::vector<double> target_weights;
  double transport_cost = 0.0;  // <plan, C>, regularizers excluded
  bool converged = true;
  std::size_t iterations = 0;
};

// Pairwise metric cost followed by the requested normalization.
// log uses log(1+m) and loglog uses log(1+log(1+m)) so zero costs stay finite.
CostMatrix build_cost_matrix(const Matrix& xs, const Matrix& xt, CostMetric metric,
                             CostNormalization normalization, double minkowski_p = 2.0);

// Uniform probability vector of length n.
std::vector<double> uniform_weights(std::size_t n);

// Exact optimal transport by the transportation network simplex.
// Throws InvalidWeights for negative, non-finite or unbalanced weights.
TransportPlan solve_emd(std::span<const double> a, std::span<const double> b, const CostMatrix& cost);

// Same solver on an arbitrary real cost (used as the linear minimization
// oracle of conditional-gradient schemes, where gradients may be negative).
TransportPlan solve_emd_raw(std::span<const double> a, std::span<const double> b, const Matrix& cost);

struct SinkhornOptions {
  double epsilon = 0.1;
  std::size_t max_iter = 10000;
  double tol = 1e-6;  // L1 marginal violation
};

// Log-domain entropic transport. converged=false when max_iter is hit first.
TransportPlan solve_sinkhorn(std::span<const double> a, std::span<const double> b, const CostMatrix& cost,
                             const SinkhornOptions& options = {});
TransportPlan solve_sinkhorn_raw(std::span<const double> a, std::span<const double> b, const Matrix& cost,
                                 const SinkhornOptions& options = {});

struct LaplacianOptions {
  double reg_lap = 1.0;
  std::size_t max_cg_iter = 50;
  double tol = 1e-9;  // relative Frank-Wolfe gap
};

// Graph Laplacian of the symmetric k-nearest-neighbour graph of x with
// Gaussian weights exp(-d^2 / bandwidth); k = min(5, n-1).
Matrix knn_laplacian(const Matrix& x, double bandwidth);

// Laplacian displacement penalty 2 tr(Y^T L Y), Y = diag(a)^-1 P Xt - Xs.
double laplacian_penalty(const Matrix& plan, std::span<const double> a, const Matrix& xs, const Matrix& xt,
                         const Matrix& laplacian);

// <P,C> + reg_lap * laplacian_penalty(P), minimized by conditional gradient
// started from the EMD plan.
TransportPlan solve_emd_laplacian(std::span<const double> a, std::span<const double> b, const CostMatrix& cost,
                                  const Matrix& xs, const Matrix& xt, const LaplacianOptions& options = {});

// Objective value used by solve_emd_laplacian, exposed for verification.
double laplacian_objective(const TransportPlan& plan, const CostMatrix& cost, const Matrix& xs, const Matrix& xt,
                           double reg_lap);

enum class ClassRegVariant { LpL1, L1L2 };

struct ClassRegOptions {
  ClassRegVariant variant = ClassRegVariant::LpL1;
  double eta = 0.5;
  std::size_t outer_iter = 10;
  SinkhornOptions inner;
};

// Sinkhorn with a group-sparsity penalty over (source class, target column)
// blocks. LpL1 uses majorization-minimization with p = 1/2; L1L2 uses
// generalized conditional gradient on the group l2 norms.
TransportPlan solve_sinkhorn_class_reg(std::span<const double> a, std::span<const double> b,
                                       const CostMatrix& cost, std::span<const int> source_labels,
                                       const ClassRegOptions& options = {});

double wasserstein_cost(const TransportPlan& plan, const CostMatrix& cost);

// Fitted source -> target map with an out-of-sample extension.
struct OtTransform {
  TransportPlan plan;
  Matrix source_support;
  Matrix target_support;
  Matrix barycentric_images;  // one row per source-support row
  double oos_bandwidth = 1.0;
};

// Barycentric images are precomputed; bandwidth is the median squared
// distance among source-support rows (falls back to a positive value when
// every row coincides).
OtTransform make_ot_transform(TransportPlan plan, Matrix source_support, Matrix target_support);

struct MappedSample {
  std::vector<double> values;
  bool nearest_fallback = false;  // every kernel weight underflowed
};

// Support rows map to their barycentric image exactly. Other points are
// moved by the kernel-weighted average displacement (image - support row) of
// the source-support rows.
MappedSample ot_transform_sample(const OtTransform& transform, std::span<const double> x);

}  // namespace tsdapt::ot
