#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsdapt/linalg.hpp"

namespace tsdapt::metrics {

using linalg::Matrix;

enum class MetricTag { CC, PC, MMD, KMMD, HoMM, Coral, CoralJeff, CoralStein };
enum class Orientation { Similarity, Distance };
enum class CorrelationKind { CC, PC };
enum class CoralVariant { Standard, Jeff, Stein };

struct MetricKind {
  MetricTag tag = MetricTag::KMMD;
  // kMMD Gaussian bandwidth sigma; <= 0 means "resolve by median heuristic".
  double bandwidth = 0.0;
  std::size_t homm_order = 3;
  std::size_t homm_cap = 1'000'000;
  std::uint64_t homm_seed = 0;
  // CORAL-family ridge; < 0 means "resolve from the reference data".
  double ridge = -1.0;

  Orientation orientation() const noexcept;
  // True when a > b is an improvement under this metric's orientation.
  bool better(double a, double b) const noexcept;
};

MetricTag parse_metric_tag(const std::string& name);
std::string to_string(MetricTag tag);

struct CorrelationResult {
  double value = 0.0;
  // PC only: a zero-variance vector was met and its coefficient taken as 0.
  bool zero_variance = false;
};

// CC: mean dot(x, y) over rows y. PC: mean Pearson coefficient over rows y.
CorrelationResult correlation(std::span<const double> x, const Matrix& y, CorrelationKind kind);

// ||mean(X) - mean(Y)||^2
double mmd_linear(const Matrix& x, const Matrix& y);

// Biased Gaussian-kernel MMD^2 with k(u,v) = exp(-||u-v||^2 / (2 sigma^2)).
double kmmd(const Matrix& x, const Matrix& y, double bandwidth);

// Median pairwise Euclidean distance among the rows of x (sigma for kMMD).
double median_heuristic_bandwidth(const Matrix& x);

// Index tuples used for order-p moment tensors: every tuple in lexicographic
// order when d^p <= cap, otherwise cap tuples drawn with a seeded generator.
struct MomentIndex {
  std::size_t order = 1;
  std::size_t dim = 0;
  std::vector<std::uint32_t> tuples;  // order entries per tuple, flattened
  double rescale = 1.0;               // d^p / tuple count
  bool subsampled = false;

  std::size_t size() const noexcept { return order == 0 ? 0 : tuples.size() / order; }
};

MomentIndex make_moment_index(std::size_t dim, std::size_t order, std::size_t cap, std::uint64_t seed);

// Mean over rows of prod_k x[t_k] for each tuple t.
std::vector<double> moment_tensor(const Matrix& x, const MomentIndex& index);

// ||mean x^{(p)} - mean y^{(p)}||_F^2 over the (possibly subsampled) index set.
double homm(const Matrix& x, const Matrix& y, std::size_t order, std::size_t cap, std::uint64_t seed);

// standard: ||C1 - C2||_F^2 / (4 d^2); Jeff: symmetrized KL trace form;
// Stein: logdet((C1+C2)/2) - (logdet C1 + logdet C2) / 2.
double coral_distance(const Matrix& x, const Matrix& y, CoralVariant variant, double ridge);

// Reference rows with per-metric caches so that scoring many candidate sets
// against the same reference avoids recomputing reference-only terms.
class ReferenceSet {
 public:
  // An unresolved bandwidth or ridge in kind is resolved from rows.
  ReferenceSet(Matrix rows, const MetricKind& kind);

  const Matrix& rows() const noexcept { return rows_; }
  const MetricKind& kind() const noexcept { return kind_; }

  // Same value as the standalone metric evaluated on (sample, rows()).
  double score(const Matrix& sample) const;

 private:
  Matrix rows_;
  MetricKind kind_;
  std::vector<double> mean_;
  double kernel_self_mean_ = 0.0;
  std::optional<MomentIndex> moment_index_;
  std::vector<double> moments_;
  std::optional<linalg::SpdEstimate> cov_;
};

// Fills in the median-heuristic bandwidth and default ridge from data when
// kind leaves them unresolved.
MetricKind resolve(MetricKind kind, const Matrix& data);

// Evaluates kind on (sample, reference); sample is a set of rows. CC/PC
// average the correlation of each sample row against the reference. An
// unresolved bandwidth or ridge is resolved from the reference rows.
double score(const MetricKind& kind, const Matrix& sample, const Matrix& reference);

}  // namespace tsdapt::metrics
