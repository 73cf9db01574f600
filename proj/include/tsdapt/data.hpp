#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tsdapt/embeddings.hpp"
#include "tsdapt/linalg.hpp"

namespace tsdapt::data {

inline constexpr std::size_t kClassCount = 10;
inline constexpr std::size_t kSeriesLength = 200;
inline constexpr std::size_t kWindow = 4;
inline constexpr std::size_t kEmbeddingDim = kSeriesLength / kWindow;
inline constexpr double kMaxNoise = 1.9;

enum class Domain { Target, Source };
enum class Split { Train, Adapt, Val };

std::string to_string(Domain domain);
std::string to_string(Split split);

struct SinusoidConfig {
  double noise_b = 0.0;
  Domain domain = Domain::Target;
  Split split = Split::Train;
  std::size_t samples_per_class = 100;
  std::uint64_t seed = 0;
};

struct RawDataset {
  linalg::Matrix series;  // n x kSeriesLength
  std::vector<int> labels;
  Domain domain = Domain::Target;
  Split split = Split::Train;
};

// Clean class signal sin(2 pi (k+1) t / 200), t = 0..199.
double clean_signal(int label, std::size_t t);

// Target rows get U(0, b) noise per step. Source rows are sign-flipped and get
// U(0, b/2) noise in the adaptation split and U(0, b) otherwise. Rows are
// class-major; the stream is keyed by (seed, domain, split).
RawDataset generate_sinusoidal(const SinusoidConfig& config);

// Non-overlapping window means of width 4 (piecewise aggregate approximation).
std::vector<double> extract_embedding(std::span<const double> series);

LabeledEmbeddings embed(const RawDataset& raw);

// Header: "tsdapt-embeddings,v1,<d>,<K>". Body rows: "label,v1,...,vd" with
// shortest round-trip decimal rendering, LF line endings.
void write_embeddings(std::ostream& out, const LabeledEmbeddings& data);
LabeledEmbeddings read_embeddings(std::istream& in);

void write_embeddings_file(const std::filesystem::path& path, const LabeledEmbeddings& data);
LabeledEmbeddings read_embeddings_file(const std::filesystem::path& path);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace tsdapt::data
