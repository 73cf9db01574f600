#include <algorithm>
#include <cmath>

#include "ot_internal.hpp"
#include "tsdapt/error.hpp"
#include "tsdapt/ot.hpp"

namespace tsdapt::ot {

namespace detail {

double median_squared_distance(const linalg::Matrix& x) {
  std::vector<double> d;
  d.reserve(x.rows() * (x.rows() - (x.rows() > 0)) / 2);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = i + 1; j < x.rows(); ++j) d.push_back(linalg::squared_distance(x.row(i), x.row(j)));
  if (d.empty()) return 1.0;
  const std::size_t mid = d.size() / 2;
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid), d.end());
  double median = d[mid];
  if (d.size() % 2 == 0) median = 0.5 * (median + *std::max_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid)));
  if (median > 0.0) return median;
  double sum = 0.0;
  std::size_t count = 0;
  for (double v : d) {
    if (v > 0.0) {
      sum += v;
      ++count;
    }
  }
  return count > 0 ? sum / static_cast<double>(count) : 1.0;
}

}  // namespace detail

OtTransform make_ot_transform(TransportPlan plan, Matrix source_support, Matrix target_support) {
  if (plan.plan.rows() != source_support.rows() || plan.plan.cols() != target_support.rows())
    throw Error(ErrorCode::InvalidArgument, "make_ot_transform: plan shape does not match the supports");
  if (source_support.cols() != target_support.cols())
    throw Error(ErrorCode::InvalidArgument, "make_ot_transform: support dimensions differ");

  OtTransform t;
  t.barycentric_images = Matrix(source_support.rows(), source_support.cols());
  for (std::size_t i = 0; i < source_support.rows(); ++i) {
    double mass = 0.0;
    for (std::size_t j = 0; j < target_support.rows(); ++j) mass += plan.plan(i, j);
    auto image = t.barycentric_images.row(i);
    if (mass <= 0.0) {
      std::copy(source_support.row(i).begin(), source_support.row(i).end(), image.begin());
      continue;
    }
    for (std::size_t j = 0; j < target_support.rows(); ++j) {
      const double w = plan.plan(i, j) / mass;
      if (w == 0.0) continue;
      for (std::size_t k = 0; k < image.size(); ++k) image[k] += w * target_support(j, k);
    }
  }
  t.oos_bandwidth = detail::median_squared_distance(source_support);
  t.plan = std::move(plan);
  t.source_support = std::move(source_support);
  t.target_support = std::move(target_support);
  return t;
}

MappedSample ot_transform_sample(const OtTransform& t, std::span<const double> x) {
  const Matrix& support = t.source_support;
  if (x.size() != support.cols())
    throw Error(ErrorCode::InvalidArgument, "ot_transform_sample: dimension mismatch");
  const std::size_t n = support.rows();

  std::vector<double> dist(n);
  std::size_t nearest = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = support.row(i);
    double max_abs = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) max_abs = std::max(max_abs, std::abs(x[k] - row[k]));
    if (max_abs <= 1e-12) {
      const auto image = t.barycentric_images.row(i);
      return {{image.begin(), image.end()}, false};
    }
    dist[i] = linalg::squared_distance(x, row);
    if (dist[i] < dist[nearest]) nearest = i;
  }

  MappedSample out;
  out.values.assign(x.begin(), x.end());
  std::vector<double> weights(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    weights[i] = std::exp(-dist[i] / t.oos_bandwidth);
    total += weights[i];
  }
  if (!(total > 0.0)) {
    std::fill(weights.begin(), weights.end(), 0.0);
    weights[nearest] = 1.0;
    total = 1.0;
    out.nearest_fallback = true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weights[i] / total;
    if (w == 0.0) continue;
    const auto image = t.barycentric_images.row(i);
    const auto row = support.row(i);
    for (std::size_t k = 0; k < x.size(); ++k) out.values[k] += w * (image[k] - row[k]);
  }
  return out;
}

}  // namespace tsdapt::ot
