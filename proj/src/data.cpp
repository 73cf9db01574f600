#include "tsdapt/data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "tsdapt/error.hpp"

namespace tsdapt {

std::vector<std::size_t> LabeledEmbeddings::rows_of(int label) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) rows.push_back(i);
  return rows;
}

linalg::Matrix LabeledEmbeddings::class_rows(int label) const {
  const auto rows = rows_of(label);
  return linalg::select_rows(x, rows);
}

}  // namespace tsdapt

namespace tsdapt::data {

namespace {

// Uniform [0, 1) from the top 53 bits, identical on every standard library.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::string to_string(Domain domain) { return domain == Domain::Target ? "target" : "source"; }

std::string to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Adapt: return "adapt";
    case Split::Val: return "val";
  }
  return "?";
}

double clean_signal(int label, std::size_t t) {
  return std::sin(2.0 * std::numbers::pi * static_cast<double>(label + 1) * static_cast<double>(t) /
                  static_cast<double>(kSeriesLength));
}

RawDataset generate_sinusoidal(const SinusoidConfig& config) {
  if (!(config.noise_b >= 0.0 && config.noise_b <= kMaxNoise + 1e-12))
    throw Error(ErrorCode::InvalidArgument, "generate_sinusoidal: noise b must lie in [0, 1.9]");

  const bool source = config.domain == Domain::Source;
  const double sign = source ? -1.0 : 1.0;
  const double amplitude = (source && config.split == Split::Adapt) ? config.noise_b / 2.0 : config.noise_b;

  std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                    static_cast<std::uint32_t>(config.domain), static_cast<std::uint32_t>(config.split)};
  std::mt19937_64 rng(seq);

  RawDataset out;
  out.domain = config.domain;
  out.split = config.split;
  out.series = linalg::Matrix(kClassCount * config.samples_per_class, kSeriesLength);
  out.labels.reserve(kClassCount * config.samples_per_class);
  std::size_t row = 0;
  for (std::size_t k = 0; k < kClassCount; ++k) {
    for (std::size_t s = 0; s < config.samples_per_class; ++s, ++row) {
      for (std::size_t t = 0; t < kSeriesLength; ++t) {
        const double noise = amplitude * unit_uniform(rng);
        out.series(row, t) = sign * clean_signal(static_cast<int>(k), t) + noise;
      }
      out.labels.push_back(static_cast<int>(k));
    }
  }
  return out;
}

std::vector<double> extract_embedding(std::span<const double> series) {
  if (series.size() != kSeriesLength)
    throw Error(ErrorCode::InvalidLength, "extract_embedding: expected " + std::to_string(kSeriesLength) +
                                              " steps, got " + std::to_string(series.size()));
  std::vector<double> out(kEmbeddingDim);
  for (std::size_t j = 0; j < kEmbeddingDim; ++j) {
    double s = 0.0;
    for (std::size_t t = 0; t < kWindow; ++t) s += series[j * kWindow + t];
    out[j] = s / static_cast<double>(kWindow);
  }
  return out;
}

LabeledEmbeddings embed(const RawDataset& raw) {
  LabeledEmbeddings out;
  out.x = linalg::Matrix(raw.series.rows(), kEmbeddingDim);
  for (std::size_t i = 0; i < raw.series.rows(); ++i) {
    const auto e = extract_embedding(raw.series.row(i));
    std::copy(e.begin(), e.end(), out.x.row(i).begin());
  }
  out.labels = raw.labels;
  out.class_count = kClassCount;
  return out;
}

}  // namespace tsdapt::data
