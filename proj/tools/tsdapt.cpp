#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "tsdapt/tsdapt.h"

namespace {

struct Overrides {
  std::optional<std::string> seed;
  std::optional<std::string> transform;
  std::optional<std::string> metric;
};

int report(tsdapt_status status) {
  if (status == TSDAPT_OK) return 0;
  std::fprintf(stderr, "tsdapt: %s: %s\n", tsdapt_status_name(status), tsdapt_last_error());
  return tsdapt_exit_code(status);
}

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Seed list, overrides the 'seeds' key (e.g. 3 or 0..9)");
  cmd->add_option("--transform", o.transform, "Transform kind, overrides the 'transform' key");
  cmd->add_option("--metric", o.metric, "Selection metric, overrides the 'metric' key");
}

// Loads the config (or the defaults) and applies command-line overrides.
tsdapt_status load(const std::string& path, const Overrides& o, tsdapt_config** config) {
  tsdapt_status s = path.empty() ? tsdapt_config_new(config) : tsdapt_config_load(path.c_str(), config);
  if (s != TSDAPT_OK) return s;
  const std::pair<const char*, const std::optional<std::string>*> keys[] = {
      {"seeds", &o.seed}, {"transform", &o.transform}, {"metric", &o.metric}};
  for (const auto& [key, value] : keys) {
    if (!value->has_value()) continue;
    s = tsdapt_config_set(*config, key, (*value)->c_str());
    if (s != TSDAPT_OK) return s;
  }
  return tsdapt_config_validate(*config);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Per-class domain adaptation of time-series embeddings"};
  app.set_version_flag("--version", tsdapt_version());
  app.require_subcommand(1);

  std::string config_path, out_dir;
  Overrides overrides;

  auto* sweep = app.add_subcommand("sweep", "Run the synthetic noise sweep");
  sweep->add_option("--config", config_path, "key=value config file")->required();
  sweep->add_option("--out", out_dir, "Output directory")->required();
  add_overrides(sweep, overrides);

  std::string target, adapt, val;
  auto* adapt_cmd = app.add_subcommand("adapt", "Adapt and evaluate embeddings read from files");
  adapt_cmd->add_option("--config", config_path, "key=value config file")->required();
  adapt_cmd->add_option("--target", target, "Target training embeddings")->required();
  adapt_cmd->add_option("--adapt", adapt, "Source adaptation embeddings")->required();
  adapt_cmd->add_option("--val", val, "Source validation embeddings")->required();
  adapt_cmd->add_option("--out", out_dir, "Output directory")->required();
  add_overrides(adapt_cmd, overrides);

  double b = 0.0;
  auto* export_cmd = app.add_subcommand("export", "Write one synthetic point as embedding files");
  export_cmd->add_option("--config", config_path, "key=value config file (defaults when omitted)");
  export_cmd->add_option("--b", b, "Noise level")->required()->check(CLI::Range(0.0, 1.9));
  export_cmd->add_option("--out", out_dir, "Output directory")->required();
  add_overrides(export_cmd, overrides);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  tsdapt_config* config = nullptr;
  if (tsdapt_status s = load(config_path, overrides, &config); s != TSDAPT_OK) {
    tsdapt_config_free(config);
    return report(s);
  }

  tsdapt_status status = TSDAPT_OK;
  if (*sweep) {
    std::size_t rows = 0;
    status = tsdapt_run_sweep(config, out_dir.c_str(), &rows);
    if (status == TSDAPT_OK) std::printf("wrote %zu result rows to %s\n", rows, out_dir.c_str());
  } else if (*adapt_cmd) {
    tsdapt_run* run = nullptr;
    status = tsdapt_run_adapt(config, target.c_str(), adapt.c_str(), val.c_str(), out_dir.c_str(), &run);
    if (status == TSDAPT_OK) {
      static const char* const names[] = {"selected", "oracle_upper", "none_lower"};
      for (std::size_t i = 0; i < tsdapt_run_report_count(run); ++i) {
        const tsdapt_report* r = tsdapt_run_report(run, i);
        std::printf("%-12s accuracy %.4f\n", names[tsdapt_report_bound(r)], tsdapt_report_accuracy(r));
      }
      std::printf("fit %.4fs  select %.4fs  classify %.4fs\n", tsdapt_run_fit_seconds(run),
                  tsdapt_run_select_seconds(run), tsdapt_run_classify_seconds(run));
    }
    tsdapt_run_free(run);
  } else if (*export_cmd) {
    // --seed picks the synthetic draw; 0 when omitted.
    const std::string seed = overrides.seed.value_or("0");
    std::uint64_t seed_value = 0;
    try {
      if (seed.empty() || seed.find_first_not_of("0123456789") != std::string::npos) throw std::invalid_argument(seed);
      seed_value = std::stoull(seed);
    } catch (const std::exception&) {
      std::fprintf(stderr, "tsdapt: --seed for export must be a single integer\n");
      tsdapt_config_free(config);
      return 2;
    }
    status = tsdapt_export_synthetic(config, b, seed_value, out_dir.c_str());
  }
  tsdapt_config_free(config);
  return report(status);
}
