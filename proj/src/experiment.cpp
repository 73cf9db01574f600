#include "tsdapt/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "tsdapt/data.hpp"
#include "tsdapt/error.hpp"

namespace tsdapt::experiment {

namespace fs = std::filesystem;
using pipeline::Bound;

namespace {

[[noreturn]] void config_error(const std::string& key, const std::string& what) {
  throw Error(ErrorCode::ConfigError, "config key '" + key + "': " + what);
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) items.push_back(trim(item));
  if (!value.empty() && value.back() == ',') items.emplace_back();
  return items;
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out))
    config_error(key, "'" + value + "' is not a finite number");
  return out;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size())
    config_error(key, "'" + value + "' is not a non-negative integer");
  return out;
}

double positive(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (v <= 0.0) config_error(key, "must be > 0");
  return v;
}

double non_negative(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (v < 0.0) config_error(key, "must be >= 0");
  return v;
}

std::size_t at_least_one(const std::string& key, const std::string& value) {
  const auto v = to_unsigned(key, value);
  if (v == 0) config_error(key, "must be >= 1");
  return static_cast<std::size_t>(v);
}

template <typename F>
auto parse_named(const std::string& key, const std::string& value, F parse) {
  try {
    return parse(value);
  } catch (const Error& e) {
    config_error(key, e.what());
  }
}

std::vector<double> parse_grid(const std::string& value) {
  if (value == "full") {
    std::vector<double> grid;
    for (std::size_t k = 0; k < kGridSize; ++k) grid.push_back(grid_value(k));
    return grid;
  }
  std::set<std::size_t> picked;
  if (value.empty()) return {};
  for (const auto& item : split_list(value)) {
    const double v = to_double("b_grid", item);
    const double scaled = v * 10.0;
    const double k = std::round(scaled);
    if (k < 0.0 || k >= static_cast<double>(kGridSize) || std::abs(scaled - k) > 1e-8)
      config_error("b_grid", "'" + item + "' is not one of 0.0, 0.1, ..., 1.9");
    if (!picked.insert(static_cast<std::size_t>(k)).second) config_error("b_grid", "'" + item + "' repeats");
  }
  std::vector<double> grid;
  for (std::size_t k : picked) grid.push_back(grid_value(k));
  return grid;
}

std::vector<std::uint64_t> parse_seeds(const std::string& value) {
  std::vector<std::uint64_t> seeds;
  if (value.empty()) return seeds;
  std::set<std::uint64_t> seen;
  auto add = [&](std::uint64_t s) {
    if (!seen.insert(s).second) config_error("seeds", "seed " + std::to_string(s) + " repeats");
    seeds.push_back(s);
  };
  for (const auto& item : split_list(value)) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      add(to_unsigned("seeds", item));
      continue;
    }
    const auto lo = to_unsigned("seeds", trim(item.substr(0, dots)));
    const auto hi = to_unsigned("seeds", trim(item.substr(dots + 2)));
    if (lo > hi) config_error("seeds", "empty range '" + item + "'");
    if (hi - lo >= 100000) config_error("seeds", "range '" + item + "' is too long");
    for (std::uint64_t s = lo;; ++s) {
      add(s);
      if (s == hi) break;
    }
  }
  return seeds;
}

std::vector<Bound> parse_bounds(const std::string& value) {
  std::vector<Bound> bounds;
  if (value.empty()) return bounds;
  for (const auto& item : split_list(value)) bounds.push_back(parse_named("bounds", item, pipeline::parse_bound));
  return bounds;
}

std::string format_b(double b) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.1f", b);
  return buf;
}

std::string metric_name(const ExperimentConfig& config) { return metrics::to_string(config.metric.tag); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::OutputError, "cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::OutputError, "write failed for " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::OutputError, "cannot create output directory " + dir.string());
}

auto row_key(const ResultRow& r) { return std::tie(r.b, r.seed, r.bound, r.metric, r.transform); }

auto summary_key(const SummaryRow& r) { return std::tie(r.bound, r.metric, r.transform, r.b); }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

Mode parse_mode(const std::string& name) {
  if (name == "synthetic_sweep") return Mode::SyntheticSweep;
  if (name == "from_files") return Mode::FromFiles;
  throw Error(ErrorCode::InvalidArgument, "unknown mode '" + name + "'");
}

std::string to_string(Mode mode) { return mode == Mode::SyntheticSweep ? "synthetic_sweep" : "from_files"; }

double grid_value(std::size_t k) { return static_cast<double>(k) / 10.0; }

ExperimentConfig::ExperimentConfig() : b_grid(parse_grid("full")), seeds(parse_seeds("0..9")) {}

void set_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
  auto& p = c.params;
  if (key == "mode") c.mode = parse_named(key, value, parse_mode);
  else if (key == "transform") c.transform = parse_named(key, value, pipeline::parse_transform_kind);
  else if (key == "cost_metric") p.cost_metric = parse_named(key, value, ot::parse_cost_metric);
  else if (key == "minkowski_p") {
    p.minkowski_p = to_double(key, value);
    if (p.minkowski_p < 1.0) config_error(key, "must be >= 1");
  } else if (key == "cost_normalization") p.cost_normalization = parse_named(key, value, ot::parse_cost_normalization);
  else if (key == "epsilon") p.epsilon = positive(key, value);
  else if (key == "eta") p.eta = non_negative(key, value);
  else if (key == "reg_lap") p.reg_lap = non_negative(key, value);
  else if (key == "max_iter") p.max_iter = at_least_one(key, value);
  else if (key == "tol") p.tol = positive(key, value);
  else if (key == "outer_iter") p.outer_iter = at_least_one(key, value);
  else if (key == "max_cg_iter") p.max_cg_iter = at_least_one(key, value);
  else if (key == "coral_ridge") p.coral_ridge = value == "auto" ? -1.0 : non_negative(key, value);
  else if (key == "metric") c.metric.tag = parse_named(key, value, metrics::parse_metric_tag);
  else if (key == "kmmd_bandwidth") c.metric.bandwidth = value == "auto" ? 0.0 : positive(key, value);
  else if (key == "homm_order") c.metric.homm_order = at_least_one(key, value);
  else if (key == "homm_cap") c.metric.homm_cap = at_least_one(key, value);
  else if (key == "homm_seed") c.metric.homm_seed = to_unsigned(key, value);
  else if (key == "metric_ridge") c.metric.ridge = value == "auto" ? -1.0 : non_negative(key, value);
  else if (key == "classifier") c.classifier = parse_named(key, value, pipeline::parse_classifier_kind);
  else if (key == "b_grid") c.b_grid = parse_grid(value);
  else if (key == "seeds") c.seeds = parse_seeds(value);
  else if (key == "bounds") c.bounds = parse_bounds(value);
  else if (key == "target_per_class") c.target_per_class = at_least_one(key, value);
  else if (key == "adapt_per_class") c.adapt_per_class = at_least_one(key, value);
  else if (key == "val_per_class") c.val_per_class = at_least_one(key, value);
  else if (key == "output_dir") c.output_dir = value;
  else throw Error(ErrorCode::ConfigError, "unknown config key '" + key + "'");
}

void validate(const ExperimentConfig& c) {
  if (c.b_grid.empty()) throw Error(ErrorCode::ConfigError, "b_grid is empty");
  if (c.seeds.empty()) throw Error(ErrorCode::ConfigError, "seeds is empty");
  if (c.bounds.empty()) throw Error(ErrorCode::ConfigError, "bounds is empty");
  std::set<Bound> seen(c.bounds.begin(), c.bounds.end());
  if (seen.size() != c.bounds.size()) throw Error(ErrorCode::ConfigError, "bounds repeat");
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": empty key");
    if (!seen.insert(key).second)
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": key '" + key + "' repeats");
    set_value(config, key, value);
  }
  validate(config);
  return config;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config " + path.string());
  return parse_config(in);
}

bool row_less(const ResultRow& a, const ResultRow& b) { return row_key(a) < row_key(b); }

std::vector<SummaryRow> summarize(std::vector<ResultRow> rows) {
  std::sort(rows.begin(), rows.end(), row_less);
  std::map<std::tuple<Bound, std::string, std::string, double>, std::vector<double>> groups;
  for (const auto& r : rows) groups[{r.bound, r.metric, r.transform, r.b}].push_back(r.accuracy);
  std::vector<SummaryRow> out;
  for (const auto& [key, values] : groups) {
    SummaryRow s;
    std::tie(s.bound, s.metric, s.transform, s.b) = key;
    s.runs = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - s.mean) * (v - s.mean);
      s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const SummaryRow& a, const SummaryRow& b) { return summary_key(a) < summary_key(b); });
  return out;
}

std::string render_results_csv(std::vector<ResultRow> rows) {
  std::sort(rows.begin(), rows.end(), row_less);
  std::string out = "b,seed,bound,metric,transform,accuracy\n";
  for (const auto& r : rows)
    out += format_b(r.b) + ',' + std::to_string(r.seed) + ',' + pipeline::to_string(r.bound) + ',' + r.metric + ',' +
           r.transform + ',' + data::format_double(r.accuracy) + '\n';
  return out;
}

std::string render_summary_csv(const std::vector<SummaryRow>& summary) {
  std::string out = "b,bound,metric,transform,runs,mean,stddev\n";
  for (const auto& s : summary)
    out += format_b(s.b) + ',' + pipeline::to_string(s.bound) + ',' + s.metric + ',' + s.transform + ',' +
           std::to_string(s.runs) + ',' + data::format_double(s.mean) + ',' + data::format_double(s.stddev) + '\n';
  return out;
}

std::string render_plot_svg(const std::vector<SummaryRow>& summary) {
  constexpr double width = 720, height = 440, left = 60, right = 200, top = 20, bottom = 50;
  constexpr double plot_w = width - left - right, plot_h = height - top - bottom;
  constexpr double b_max = 1.9;
  auto px = [&](double b) { return left + plot_w * b / b_max; };
  auto py = [&](double acc) { return top + plot_h * (1.0 - std::clamp(acc, 0.0, 1.0)); };
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  static const char* const palette[] = {"#1f77b4", "#d62728", "#17becf", "#2ca02c", "#9467bd",
                                        "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<g id=\"axes\" stroke=\"black\" fill=\"none\">\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
      << top + plot_h << "\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h << "\"/>\n";
  svg << "</g>\n<g id=\"ticks\" fill=\"black\">\n";
  for (std::size_t k = 0; k < kGridSize; k += 2) {
    const double x = px(grid_value(k));
    svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << top + plot_h << "\" x2=\"" << fmt(x) << "\" y2=\""
        << top + plot_h + 5 << "\" stroke=\"black\"/>";
    svg << "<text x=\"" << fmt(x) << "\" y=\"" << top + plot_h + 18 << "\" text-anchor=\"middle\">"
        << format_b(grid_value(k)) << "</text>\n";
  }
  for (int k = 0; k <= 5; ++k) {
    const double y = py(k / 5.0);
    svg << "<line x1=\"" << left - 5 << "\" y1=\"" << fmt(y) << "\" x2=\"" << left << "\" y2=\"" << fmt(y)
        << "\" stroke=\"black\"/>";
    svg << "<text x=\"" << left - 8 << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">" << fmt(k / 5.0)
        << "</text>\n";
  }
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">noise b</text>\n";
  svg << "<text transform=\"translate(16 " << top + plot_h / 2
      << ") rotate(-90)\" text-anchor=\"middle\">accuracy</text>\n</g>\n";

  // One series per (bound, metric, transform); summary is already grouped.
  std::size_t series = 0;
  for (std::size_t i = 0; i < summary.size();) {
    std::size_t j = i;
    while (j < summary.size() && summary[j].bound == summary[i].bound && summary[j].metric == summary[i].metric &&
           summary[j].transform == summary[i].transform)
      ++j;
    const std::string color = palette[series % std::size(palette)];
    const std::string label = pipeline::to_string(summary[i].bound) + " (" + summary[i].transform + ", " +
                              summary[i].metric + ")";
    svg << "<g class=\"series\" data-bound=\"" << pipeline::to_string(summary[i].bound) << "\" data-metric=\""
        << summary[i].metric << "\" data-transform=\"" << summary[i].transform << "\">\n";
    svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
    for (std::size_t k = i; k < j; ++k)
      svg << fmt(px(summary[k].b)) << ',' << fmt(py(summary[k].mean + summary[k].stddev)) << ' ';
    for (std::size_t k = j; k-- > i;)
      svg << fmt(px(summary[k].b)) << ',' << fmt(py(summary[k].mean - summary[k].stddev)) << ' ';
    svg << "\"/>\n<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t k = i; k < j; ++k) svg << fmt(px(summary[k].b)) << ',' << fmt(py(summary[k].mean)) << ' ';
    svg << "\"/>\n";
    for (std::size_t k = i; k < j; ++k)
      svg << "<circle cx=\"" << fmt(px(summary[k].b)) << "\" cy=\"" << fmt(py(summary[k].mean))
          << "\" r=\"2.5\" fill=\"" << color << "\" data-b=\"" << format_b(summary[k].b) << "\" data-mean=\""
          << data::format_double(summary[k].mean) << "\" data-stddev=\"" << data::format_double(summary[k].stddev)
          << "\"/>\n";
    const double ly = top + 14.0 + 18.0 * static_cast<double>(series);
    svg << "<line x1=\"" << left + plot_w + 12 << "\" y1=\"" << fmt(ly - 4) << "\" x2=\"" << left + plot_w + 32
        << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>";
    svg << "<text x=\"" << left + plot_w + 38 << "\" y=\"" << fmt(ly) << "\">" << label << "</text>\n</g>\n";
    ++series;
    i = j;
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_report(std::vector<ResultRow> rows, const fs::path& dir) {
  ensure_dir(dir);
  std::sort(rows.begin(), rows.end(), row_less);
  const auto summary = summarize(rows);
  write_text(dir / "results.csv", render_results_csv(rows));
  write_text(dir / "summary.csv", render_summary_csv(summary));
  write_text(dir / "accuracy.svg", render_plot_svg(summary));
}

SyntheticSplits make_synthetic_splits(const ExperimentConfig& config, double b, std::uint64_t seed) {
  auto make = [&](data::Domain domain, data::Split split, std::size_t per_class) {
    return data::embed(data::generate_sinusoidal({b, domain, split, per_class, seed}));
  };
  return {make(data::Domain::Target, data::Split::Train, config.target_per_class),
          make(data::Domain::Source, data::Split::Adapt, config.adapt_per_class),
          make(data::Domain::Source, data::Split::Val, config.val_per_class)};
}

FileRunResult evaluate_splits(const ExperimentConfig& config, const SyntheticSplits& splits, std::uint64_t seed) {
  const auto& val = splits.source_val;
  FileRunResult result;

  auto clock = std::chrono::steady_clock::now();
  const auto transforms =
      pipeline::fit_class_transforms(splits.target_train, splits.source_adapt, config.transform, config.params);
  const auto classifier = pipeline::fit_classifier(splits.target_train, config.classifier, seed);
  result.timings.fit_seconds = seconds_since(clock);

  const bool wants_selected = std::find(config.bounds.begin(), config.bounds.end(), Bound::Selected) != config.bounds.end();
  const bool wants_oracle =
      std::find(config.bounds.begin(), config.bounds.end(), Bound::OracleUpper) != config.bounds.end();

  clock = std::chrono::steady_clock::now();
  std::vector<std::vector<double>> selected(wants_selected ? val.size() : 0);
  std::vector<std::vector<double>> oracle(wants_oracle ? val.size() : 0);
  if (wants_selected) {
    const pipeline::Selector selector(splits.target_train, config.metric);
    for (std::size_t i = 0; i < val.size(); ++i)
      selected[i] = pipeline::select_transform(val.x.row(i), transforms, selector).transformed_embedding;
  }
  if (wants_oracle) {
    for (std::size_t i = 0; i < val.size(); ++i) {
      const auto it = transforms.per_class.find(val.labels[i]);
      const auto x = val.x.row(i);
      oracle[i] = it == transforms.per_class.end() ? std::vector<double>(x.begin(), x.end())
                                                   : pipeline::apply_transform(it->second, x);
    }
  }
  result.timings.select_seconds = seconds_since(clock);

  clock = std::chrono::steady_clock::now();
  std::size_t classes = std::max(val.class_count, classifier.class_count());
  for (int label : val.labels) classes = std::max(classes, static_cast<std::size_t>(label) + 1);
  std::vector<int> predicted(val.size());
  for (Bound bound : config.bounds) {
    for (std::size_t i = 0; i < val.size(); ++i) {
      switch (bound) {
        case Bound::Selected: predicted[i] = classifier.predict(selected[i]); break;
        case Bound::OracleUpper: predicted[i] = classifier.predict(oracle[i]); break;
        case Bound::NoneLower: predicted[i] = classifier.predict(val.x.row(i)); break;
      }
    }
    result.reports.push_back(pipeline::tally(bound, val.labels, predicted, classes));
  }
  result.timings.classify_seconds = seconds_since(clock);
  return result;
}

std::vector<ResultRow> run_point(const ExperimentConfig& config, double b, std::uint64_t seed) {
  const auto splits = make_synthetic_splits(config, b, seed);
  const auto result = evaluate_splits(config, splits, seed);
  std::vector<ResultRow> rows;
  for (const auto& report : result.reports)
    rows.push_back({b, seed, report.bound, metric_name(config), pipeline::to_string(config.transform), report.accuracy});
  return rows;
}

std::size_t thread_budget() {
  if (const char* env = std::getenv("TSDAPT_THREADS")) {
    std::size_t n = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec == std::errc() && ptr == s.data() + s.size() && n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<ResultRow> run_synthetic_sweep(const ExperimentConfig& config, const fs::path& out_dir) {
  validate(config);
  struct Point {
    double b;
    std::uint64_t seed;
    std::vector<ResultRow> rows;
    std::exception_ptr error;
  };
  std::vector<Point> points;
  for (double b : config.b_grid)
    for (std::uint64_t seed : config.seeds) points.push_back({b, seed, {}, nullptr});

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        points[i].rows = run_point(config, points[i].b, points[i].seed);
      } catch (...) {
        points[i].error = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min(thread_budget(), points.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
  }

  std::vector<ResultRow> rows;
  std::exception_ptr first_error;
  for (auto& p : points) {
    if (p.error && !first_error) first_error = p.error;
    rows.insert(rows.end(), p.rows.begin(), p.rows.end());
  }
  emit_report(rows, out_dir);
  if (first_error) std::rethrow_exception(first_error);
  std::sort(rows.begin(), rows.end(), row_less);
  return rows;
}

std::string render_eval_report_csv(const pipeline::EvalReport& report) {
  const std::size_t k = report.confusion.size();
  std::string out = "class,count,correct,accuracy";
  for (std::size_t p = 0; p < k; ++p) out += ",pred_" + std::to_string(p);
  out += '\n';
  for (std::size_t c = 0; c < k; ++c) {
    out += std::to_string(c) + ',' + std::to_string(report.per_class_count[c]) + ',' +
           std::to_string(report.confusion[c][c]) + ',' + data::format_double(report.per_class_accuracy[c]);
    for (std::size_t p = 0; p < k; ++p) out += ',' + std::to_string(report.confusion[c][p]);
    out += '\n';
  }
  out += "all," + std::to_string(report.total) + ',' + std::to_string(report.correct) + ',' +
         data::format_double(report.accuracy);
  for (std::size_t p = 0; p < k; ++p) {
    std::size_t column = 0;
    for (std::size_t c = 0; c < k; ++c) column += report.confusion[c][p];
    out += ',' + std::to_string(column);
  }
  out += '\n';
  return out;
}

FileRunResult run_from_files(const ExperimentConfig& config, const fs::path& target_train,
                             const fs::path& source_adapt, const fs::path& source_val, const fs::path& out_dir) {
  validate(config);
  SyntheticSplits splits{data::read_embeddings_file(target_train), data::read_embeddings_file(source_adapt),
                         data::read_embeddings_file(source_val)};
  auto check = [&](const LabeledEmbeddings& other, const fs::path& path) {
    if (other.dim() != splits.target_train.dim())
      throw Error(ErrorCode::InputError, path.string() + ": dimension " + std::to_string(other.dim()) + " differs from " +
                                             std::to_string(splits.target_train.dim()) + " in " +
                                             target_train.string());
    if (other.class_count != splits.target_train.class_count)
      throw Error(ErrorCode::InputError, path.string() + ": class count " + std::to_string(other.class_count) +
                                             " differs from " + std::to_string(splits.target_train.class_count) +
                                             " in " + target_train.string());
  };
  check(splits.source_adapt, source_adapt);
  check(splits.source_val, source_val);

  auto result = evaluate_splits(config, splits, config.seeds.front());
  ensure_dir(out_dir);
  for (const auto& report : result.reports)
    write_text(out_dir / ("report_" + pipeline::to_string(report.bound) + ".csv"), render_eval_report_csv(report));
  const auto& t = result.timings;
  write_text(out_dir / "timings.csv", "phase,seconds\nfit," + data::format_double(t.fit_seconds) + "\nselect," +
                                          data::format_double(t.select_seconds) + "\nclassify," +
                                          data::format_double(t.classify_seconds) + '\n');
  return result;
}

void export_synthetic(const ExperimentConfig& config, double b, std::uint64_t seed, const fs::path& out_dir) {
  const auto splits = make_synthetic_splits(config, b, seed);
  ensure_dir(out_dir);
  data::write_embeddings_file(out_dir / "target_train.csv", splits.target_train);
  data::write_embeddings_file(out_dir / "source_adapt.csv", splits.source_adapt);
  data::write_embeddings_file(out_dir / "source_val.csv", splits.source_val);
}

}  // namespace tsdapt::experiment
