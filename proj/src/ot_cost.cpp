#include <algorithm>
#include <cmath>

#include "tsdapt/error.hpp"
#include "tsdapt/ot.hpp"

namespace tsdapt::ot {

namespace {

double metric_value(std::span<const double> x, std::span<const double> y, CostMetric metric, double p) {
  switch (metric) {
    case CostMetric::SqEuclidean:
      return linalg::squared_distance(x, y);
    case CostMetric::Euclidean:
      return std::sqrt(linalg::squared_distance(x, y));
    case CostMetric::Cityblock: {
      double s = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) s += std::abs(x[k] - y[k]);
      return s;
    }
    case CostMetric::Cosine: {
      const double nx = std::sqrt(linalg::dot(x, x));
      const double ny = std::sqrt(linalg::dot(y, y));
      if (nx == 0.0 || ny == 0.0) return 1.0;
      return std::max(0.0, 1.0 - linalg::dot(x, y) / (nx * ny));
    }
    case CostMetric::Minkowski: {
      double s = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) s += std::pow(std::abs(x[k] - y[k]), p);
      return std::pow(s, 1.0 / p);
    }
  }
  return 0.0;
}

double median_of(std::vector<double> values) {
  const std::size_t n = values.size();
  const std::size_t mid = n / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

}  // namespace

CostMetric parse_cost_metric(const std::string& name) {
  if (name == "sqeuclidean") return CostMetric::SqEuclidean;
  if (name == "euclidean") return CostMetric::Euclidean;
  if (name == "cityblock") return CostMetric::Cityblock;
  if (name == "cosine") return CostMetric::Cosine;
  if (name == "minkowski") return CostMetric::Minkowski;
  throw Error(ErrorCode::InvalidArgument, "unknown cost metric '" + name + "'");
}

CostNormalization parse_cost_normalization(const std::string& name) {
  if (name == "median") return CostNormalization::Median;
  if (name == "max") return CostNormalization::Max;
  if (name == "log") return CostNormalization::Log;
  if (name == "loglog") return CostNormalization::LogLog;
  if (name == "none") return CostNormalization::None;
  throw Error(ErrorCode::InvalidArgument, "unknown cost normalization '" + name + "'");
}

std::string to_string(CostMetric metric) {
  switch (metric) {
    case CostMetric::SqEuclidean: return "sqeuclidean";
    case CostMetric::Euclidean: return "euclidean";
    case CostMetric::Cityblock: return "cityblock";
    case CostMetric::Cosine: return "cosine";
    case CostMetric::Minkowski: return "minkowski";
  }
  return "?";
}

std::string to_string(CostNormalization normalization) {
  switch (normalization) {
    case CostNormalization::Median: return "median";
    case CostNormalization::Max: return "max";
    case CostNormalization::Log: return "log";
    case CostNormalization::LogLog: return "loglog";
    case CostNormalization::None: return "none";
  }
  return "?";
}

CostMatrix build_cost_matrix(const Matrix& xs, const Matrix& xt, CostMetric metric,
                             CostNormalization normalization, double minkowski_p) {
  if (xs.cols() != xt.cols())
    throw Error(ErrorCode::InvalidArgument, "build_cost_matrix: source and target dimensions differ");
  if (xs.rows() == 0 || xt.rows() == 0)
    throw Error(ErrorCode::InvalidArgument, "build_cost_matrix: empty support");
  if (metric == CostMetric::Minkowski && !(minkowski_p >= 1.0))
    throw Error(ErrorCode::InvalidArgument, "build_cost_matrix: minkowski p must be >= 1");

  CostMatrix cost;
  cost.metric = metric;
  cost.minkowski_p = minkowski_p;
  cost.normalization = normalization;
  cost.entries = Matrix(xs.rows(), xt.rows());
  for (std::size_t i = 0; i < xs.rows(); ++i)
    for (std::size_t j = 0; j < xt.rows(); ++j)
      cost.entries(i, j) = metric_value(xs.row(i), xt.row(j), metric, minkowski_p);

  auto values = cost.entries.data();
  switch (normalization) {
    case CostNormalization::Median:
    case CostNormalization::Max: {
      const double divisor = normalization == CostNormalization::Max
                                 ? *std::max_element(values.begin(), values.end())
                                 : median_of({values.begin(), values.end()});
      if (divisor > 0.0)
        for (double& v : values) v /= divisor;
      else
        cost.normalization_skipped = true;
      break;
    }
    case CostNormalization::Log:
      for (double& v : values) v = std::log1p(v);
      break;
    case CostNormalization::LogLog:
      for (double& v : values) v = std::log1p(std::log1p(v));
      break;
    case CostNormalization::None:
      break;
  }
  if (!cost.entries.all_finite())
    throw Error(ErrorCode::InvalidArgument, "build_cost_matrix: non-finite cost entries");
  return cost;
}

std::vector<double> uniform_weights(std::size_t n) {
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

double wasserstein_cost(const TransportPlan& plan, const CostMatrix& cost) {
  const Matrix& p = plan.plan;
  const Matrix& c = cost.entries;
  if (p.rows() != c.rows() || p.cols() != c.cols())
    throw Error(ErrorCode::InvalidArgument, "wasserstein_cost: shape mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < p.data().size(); ++k) s += p.data()[k] * c.data()[k];
  return s;
}

}  // namespace tsdapt::ot
