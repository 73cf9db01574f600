#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tsdapt/pipeline.hpp"

namespace tsdapt::experiment {

enum class Mode { SyntheticSweep, FromFiles };

Mode parse_mode(const std::string& name);
std::string to_string(Mode mode);

// Noise levels the synthetic generator is swept over: k/10 for k = 0..19.
inline constexpr std::size_t kGridSize = 20;
double grid_value(std::size_t k);

struct ExperimentConfig {
  Mode mode = Mode::SyntheticSweep;
  pipeline::TransformKind transform = pipeline::TransformKind::Sinkhorn;
  pipeline::TransformParams params;
  metrics::MetricKind metric{metrics::MetricTag::KMMD};
  pipeline::ClassifierKind classifier = pipeline::ClassifierKind::NearestCentroid;
  std::vector<double> b_grid;  // canonical grid values, ascending
  std::vector<std::uint64_t> seeds;
  std::vector<pipeline::Bound> bounds{pipeline::Bound::Selected, pipeline::Bound::OracleUpper,
                                      pipeline::Bound::NoneLower};
  std::size_t target_per_class = 100;
  std::size_t adapt_per_class = 50;
  std::size_t val_per_class = 50;
  std::filesystem::path output_dir;

  ExperimentConfig();
};

// Applies one key=value setting. Throws ConfigError on an unknown key or a
// value that does not parse or violates the key's range.
void set_value(ExperimentConfig& config, const std::string& key, const std::string& value);

// Flat key=value lines; '#' starts a comment, blank lines are skipped and
// repeated keys are rejected. The result is validated.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

// Throws ConfigError when the grid or seed list is empty or a bound repeats.
void validate(const ExperimentConfig& config);

struct ResultRow {
  double b = 0.0;
  std::uint64_t seed = 0;
  pipeline::Bound bound = pipeline::Bound::Selected;
  std::string metric;
  std::string transform;
  double accuracy = 0.0;
};

// Order used for every CSV: b, seed, bound, metric, then transform.
bool row_less(const ResultRow& a, const ResultRow& b);

struct SummaryRow {
  double b = 0.0;
  pipeline::Bound bound = pipeline::Bound::Selected;
  std::string metric;
  std::string transform;
  std::size_t runs = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single run
};

std::vector<SummaryRow> summarize(std::vector<ResultRow> rows);

// Writes results.csv, summary.csv and accuracy.svg under dir (created if
// needed). Throws OutputError when anything cannot be written.
void emit_report(std::vector<ResultRow> rows, const std::filesystem::path& dir);

std::string render_results_csv(std::vector<ResultRow> rows);
std::string render_summary_csv(const std::vector<SummaryRow>& summary);
std::string render_plot_svg(const std::vector<SummaryRow>& summary);

struct SyntheticSplits {
  LabeledEmbeddings target_train;
  LabeledEmbeddings source_adapt;
  LabeledEmbeddings source_val;
};

SyntheticSplits make_synthetic_splits(const ExperimentConfig& config, double b, std::uint64_t seed);

// One (b, seed) point: fit, then evaluate every configured bound.
std::vector<ResultRow> run_point(const ExperimentConfig& config, double b, std::uint64_t seed);

// Worker count for the sweep: TSDAPT_THREADS when set to a positive integer,
// otherwise the hardware concurrency.
std::size_t thread_budget();

// Runs every (b, seed) point, possibly concurrently, and emits the report.
// A numerical failure at any point still writes the completed rows before
// the error is rethrown.
std::vector<ResultRow> run_synthetic_sweep(const ExperimentConfig& config, const std::filesystem::path& out_dir);

struct PhaseTimings {
  double fit_seconds = 0.0;
  double select_seconds = 0.0;
  double classify_seconds = 0.0;
};

struct FileRunResult {
  std::vector<pipeline::EvalReport> reports;  // one per configured bound
  PhaseTimings timings;
};

FileRunResult evaluate_splits(const ExperimentConfig& config, const SyntheticSplits& splits, std::uint64_t seed);

// Reads the three embedding files (InputError/ParseError), checks that their
// dimension and class count agree (InputError) and writes report_<bound>.csv
// and timings.csv under out_dir. The classifier is seeded with the first seed.
FileRunResult run_from_files(const ExperimentConfig& config, const std::filesystem::path& target_train,
                             const std::filesystem::path& source_adapt, const std::filesystem::path& source_val,
                             const std::filesystem::path& out_dir);

std::string render_eval_report_csv(const pipeline::EvalReport& report);

// Writes target_train.csv, source_adapt.csv and source_val.csv for one point.
void export_synthetic(const ExperimentConfig& config, double b, std::uint64_t seed,
                      const std::filesystem::path& out_dir);

}  // namespace tsdapt::experiment
