#include "tsdapt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tsdapt/error.hpp"

namespace tsdapt::metrics {

namespace {

void require_same_dim(const Matrix& x, const Matrix& y, const char* who) {
  if (x.cols() != y.cols()) throw Error(ErrorCode::InvalidArgument, std::string(who) + ": dimension mismatch");
  if (x.rows() == 0 || y.rows() == 0) throw Error(ErrorCode::InvalidArgument, std::string(who) + ": empty input");
}

double gaussian(std::span<const double> u, std::span<const double> v, double two_sigma_sq) {
  return std::exp(-linalg::squared_distance(u, v) / two_sigma_sq);
}

// Mean kernel value over X x Y. The pair values are summed in both row-major
// and column-major order and averaged, so swapping X and Y gives the same
// bits.
double kernel_mean(const Matrix& x, const Matrix& y, double sigma) {
  const double two_sigma_sq = 2.0 * sigma * sigma;
  std::vector<double> k(x.rows() * y.rows());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < y.rows(); ++j) k[i * y.rows() + j] = gaussian(x.row(i), y.row(j), two_sigma_sq);
  double by_rows = 0.0;
  for (double v : k) by_rows += v;
  double by_cols = 0.0;
  for (std::size_t j = 0; j < y.rows(); ++j)
    for (std::size_t i = 0; i < x.rows(); ++i) by_cols += k[i * y.rows() + j];
  return 0.5 * (by_rows + by_cols) / static_cast<double>(x.rows() * y.rows());
}

double pearson(std::span<const double> x, std::span<const double> y, bool& zero_variance) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = x[k] - mx, dy = y[k] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    zero_variance = true;
    return 0.0;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double squared_difference_sum(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

double jeff(const linalg::SpdEstimate& c1, const linalg::SpdEstimate& c2) {
  const double t12 = linalg::trace(linalg::spd_solve(c1, c2.matrix()));
  const double t21 = linalg::trace(linalg::spd_solve(c2, c1.matrix()));
  return 0.5 * (t12 + t21) - static_cast<double>(c1.dim());
}

double stein(const linalg::SpdEstimate& c1, const linalg::SpdEstimate& c2) {
  Matrix mid = c1.matrix() + c2.matrix();
  for (double& v : mid.data()) v *= 0.5;
  const linalg::SpdEstimate m(std::move(mid), 0.0);
  return m.logdet() - 0.5 * (c1.logdet() + c2.logdet());
}

double standard_coral(const linalg::SpdEstimate& c1, const linalg::SpdEstimate& c2) {
  const double d = static_cast<double>(c1.dim());
  return squared_difference_sum(c1.matrix().data(), c2.matrix().data()) / (4.0 * d * d);
}

double coral_between(const linalg::SpdEstimate& c1, const linalg::SpdEstimate& c2, CoralVariant variant) {
  switch (variant) {
    case CoralVariant::Standard: return standard_coral(c1, c2);
    case CoralVariant::Jeff: return jeff(c1, c2);
    case CoralVariant::Stein: return stein(c1, c2);
  }
  return 0.0;
}

CoralVariant coral_variant_of(MetricTag tag) {
  if (tag == MetricTag::CoralJeff) return CoralVariant::Jeff;
  if (tag == MetricTag::CoralStein) return CoralVariant::Stein;
  return CoralVariant::Standard;
}

double mean_correlation(const Matrix& sample, const Matrix& reference, CorrelationKind kind) {
  double total = 0.0;
  for (std::size_t i = 0; i < sample.rows(); ++i) total += correlation(sample.row(i), reference, kind).value;
  return total / static_cast<double>(sample.rows());
}

}  // namespace

Orientation MetricKind::orientation() const noexcept {
  return (tag == MetricTag::CC || tag == MetricTag::PC) ? Orientation::Similarity : Orientation::Distance;
}

bool MetricKind::better(double a, double b) const noexcept {
  return orientation() == Orientation::Similarity ? a > b : a < b;
}

MetricTag parse_metric_tag(const std::string& name) {
  if (name == "CC") return MetricTag::CC;
  if (name == "PC") return MetricTag::PC;
  if (name == "MMD") return MetricTag::MMD;
  if (name == "kMMD") return MetricTag::KMMD;
  if (name == "HoMM") return MetricTag::HoMM;
  if (name == "CORAL") return MetricTag::Coral;
  if (name == "CORAL_Jeff") return MetricTag::CoralJeff;
  if (name == "CORAL_Stein") return MetricTag::CoralStein;
  throw Error(ErrorCode::InvalidArgument, "unknown selection metric '" + name + "'");
}

std::string to_string(MetricTag tag) {
  switch (tag) {
    case MetricTag::CC: return "CC";
    case MetricTag::PC: return "PC";
    case MetricTag::MMD: return "MMD";
    case MetricTag::KMMD: return "kMMD";
    case MetricTag::HoMM: return "HoMM";
    case MetricTag::Coral: return "CORAL";
    case MetricTag::CoralJeff: return "CORAL_Jeff";
    case MetricTag::CoralStein: return "CORAL_Stein";
  }
  return "?";
}

CorrelationResult correlation(std::span<const double> x, const Matrix& y, CorrelationKind kind) {
  if (x.size() != y.cols() || y.rows() == 0)
    throw Error(ErrorCode::InvalidArgument, "correlation: dimension mismatch or empty set");
  CorrelationResult out;
  double total = 0.0;
  for (std::size_t i = 0; i < y.rows(); ++i)
    total += kind == CorrelationKind::CC ? linalg::dot(x, y.row(i)) : pearson(x, y.row(i), out.zero_variance);
  out.value = total / static_cast<double>(y.rows());
  return out;
}

double mmd_linear(const Matrix& x, const Matrix& y) {
  require_same_dim(x, y, "mmd_linear");
  return squared_difference_sum(linalg::column_means(x), linalg::column_means(y));
}

double kmmd(const Matrix& x, const Matrix& y, double bandwidth) {
  require_same_dim(x, y, "kmmd");
  if (!(bandwidth > 0.0)) throw Error(ErrorCode::InvalidArgument, "kmmd: bandwidth must be positive");
  return (kernel_mean(x, x, bandwidth) + kernel_mean(y, y, bandwidth)) - 2.0 * kernel_mean(x, y, bandwidth);
}

double median_heuristic_bandwidth(const Matrix& x) {
  std::vector<double> d;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = i + 1; j < x.rows(); ++j) d.push_back(std::sqrt(linalg::squared_distance(x.row(i), x.row(j))));
  if (d.empty()) return 1.0;
  const std::size_t mid = d.size() / 2;
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid), d.end());
  double median = d[mid];
  if (d.size() % 2 == 0) median = 0.5 * (median + *std::max_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid)));
  return median > 0.0 ? median : 1.0;
}

MomentIndex make_moment_index(std::size_t dim, std::size_t order, std::size_t cap, std::uint64_t seed) {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "HoMM order must be >= 1");
  if (cap < 1) throw Error(ErrorCode::InvalidArgument, "HoMM subsample cap must be >= 1");
  if (dim < 1) throw Error(ErrorCode::InvalidArgument, "HoMM needs a positive dimension");
  MomentIndex index;
  index.order = order;
  index.dim = dim;
  double full = 1.0;
  for (std::size_t k = 0; k < order; ++k) full *= static_cast<double>(dim);

  if (full <= static_cast<double>(cap)) {
    const auto count = static_cast<std::size_t>(full);
    index.tuples.resize(count * order);
    std::vector<std::uint32_t> tuple(order, 0);
    for (std::size_t t = 0; t < count; ++t) {
      std::copy(tuple.begin(), tuple.end(), index.tuples.begin() + static_cast<std::ptrdiff_t>(t * order));
      for (std::size_t k = order; k-- > 0;) {
        if (++tuple[k] < dim) break;
        tuple[k] = 0;
      }
    }
    return index;
  }
  std::mt19937_64 rng(seed);
  index.tuples.resize(cap * order);
  for (auto& v : index.tuples) v = static_cast<std::uint32_t>(rng() % dim);
  index.rescale = full / static_cast<double>(cap);
  index.subsampled = true;
  return index;
}

std::vector<double> moment_tensor(const Matrix& x, const MomentIndex& index) {
  if (x.cols() != index.dim) throw Error(ErrorCode::InvalidArgument, "moment_tensor: dimension mismatch");
  const std::size_t count = index.size();
  std::vector<double> acc(count, 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto row = x.row(i);
    for (std::size_t t = 0; t < count; ++t) {
      double prod = 1.0;
      for (std::size_t k = 0; k < index.order; ++k) prod *= row[index.tuples[t * index.order + k]];
      acc[t] += prod;
    }
  }
  if (x.rows() > 0)
    for (double& v : acc) v /= static_cast<double>(x.rows());
  return acc;
}

double homm(const Matrix& x, const Matrix& y, std::size_t order, std::size_t cap, std::uint64_t seed) {
  require_same_dim(x, y, "homm");
  const MomentIndex index = make_moment_index(x.cols(), order, cap, seed);
  return squared_difference_sum(moment_tensor(x, index), moment_tensor(y, index)) * index.rescale;
}

double coral_distance(const Matrix& x, const Matrix& y, CoralVariant variant, double ridge) {
  require_same_dim(x, y, "coral_distance");
  if (!(ridge >= 0.0)) throw Error(ErrorCode::InvalidArgument, "coral_distance: ridge must be nonnegative");
  const linalg::SpdEstimate c1 = linalg::covariance(x, ridge);
  const linalg::SpdEstimate c2 = linalg::covariance(y, ridge);
  return coral_between(c1, c2, variant);
}

MetricKind resolve(MetricKind kind, const Matrix& data) {
  if (kind.tag == MetricTag::KMMD && !(kind.bandwidth > 0.0)) kind.bandwidth = median_heuristic_bandwidth(data);
  const bool coral_family =
      kind.tag == MetricTag::Coral || kind.tag == MetricTag::CoralJeff || kind.tag == MetricTag::CoralStein;
  if (coral_family && !(kind.ridge >= 0.0)) kind.ridge = linalg::default_ridge(data);
  if (kind.tag == MetricTag::HoMM && (kind.homm_order < 1 || kind.homm_cap < 1))
    throw Error(ErrorCode::InvalidArgument, "HoMM order and cap must be >= 1");
  return kind;
}

ReferenceSet::ReferenceSet(Matrix rows, const MetricKind& kind) : rows_(std::move(rows)), kind_(resolve(kind, rows_)) {
  if (rows_.rows() == 0) throw Error(ErrorCode::InvalidArgument, "ReferenceSet: empty reference");
  switch (kind_.tag) {
    case MetricTag::MMD:
      mean_ = linalg::column_means(rows_);
      break;
    case MetricTag::KMMD:
      kernel_self_mean_ = kernel_mean(rows_, rows_, kind_.bandwidth);
      break;
    case MetricTag::HoMM:
      moment_index_ = make_moment_index(rows_.cols(), kind_.homm_order, kind_.homm_cap, kind_.homm_seed);
      moments_ = moment_tensor(rows_, *moment_index_);
      break;
    case MetricTag::Coral:
    case MetricTag::CoralJeff:
    case MetricTag::CoralStein:
      cov_ = linalg::covariance(rows_, kind_.ridge);
      break;
    case MetricTag::CC:
    case MetricTag::PC:
      break;
  }
}

double ReferenceSet::score(const Matrix& sample) const {
  require_same_dim(sample, rows_, "ReferenceSet::score");
  switch (kind_.tag) {
    case MetricTag::CC: return mean_correlation(sample, rows_, CorrelationKind::CC);
    case MetricTag::PC: return mean_correlation(sample, rows_, CorrelationKind::PC);
    case MetricTag::MMD: return squared_difference_sum(linalg::column_means(sample), mean_);
    case MetricTag::KMMD:
      return (kernel_mean(sample, sample, kind_.bandwidth) + kernel_self_mean_) -
             2.0 * kernel_mean(sample, rows_, kind_.bandwidth);
    case MetricTag::HoMM:
      return squared_difference_sum(moment_tensor(sample, *moment_index_), moments_) * moment_index_->rescale;
    case MetricTag::Coral:
    case MetricTag::CoralJeff:
    case MetricTag::CoralStein:
      return coral_between(linalg::covariance(sample, kind_.ridge), *cov_, coral_variant_of(kind_.tag));
  }
  return 0.0;
}

double score(const MetricKind& kind, const Matrix& sample, const Matrix& reference) {
  const MetricKind k = resolve(kind, reference);
  switch (k.tag) {
    case MetricTag::CC: return mean_correlation(sample, reference, CorrelationKind::CC);
    case MetricTag::PC: return mean_correlation(sample, reference, CorrelationKind::PC);
    case MetricTag::MMD: return mmd_linear(sample, reference);
    case MetricTag::KMMD: return kmmd(sample, reference, k.bandwidth);
    case MetricTag::HoMM: return homm(sample, reference, k.homm_order, k.homm_cap, k.homm_seed);
    case MetricTag::Coral:
    case MetricTag::CoralJeff:
    case MetricTag::CoralStein:
      return coral_distance(sample, reference, coral_variant_of(k.tag), k.ridge);
  }
  return 0.0;
}

}  // namespace tsdapt::metrics
