#include "tsdapt/tsdapt.h"

#include <algorithm>
#include <new>
#include <string>

#include "tsdapt/data.hpp"
#include "tsdapt/error.hpp"
#include "tsdapt/experiment.hpp"

using namespace tsdapt;

struct tsdapt_config {
  experiment::ExperimentConfig config;
};

struct tsdapt_embeddings {
  LabeledEmbeddings data;
};

struct tsdapt_transforms {
  pipeline::ClassTransformSet set;
};

struct tsdapt_report {
  pipeline::EvalReport report;
};

struct tsdapt_run {
  std::vector<tsdapt_report> reports;
  experiment::PhaseTimings timings;
};

namespace {

thread_local std::string last_error;

tsdapt_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return TSDAPT_INVALID_ARGUMENT;
    case ErrorCode::DegenerateCovariance: return TSDAPT_DEGENERATE_COVARIANCE;
    case ErrorCode::NumericalFailure: return TSDAPT_NUMERICAL_FAILURE;
    case ErrorCode::InvalidWeights: return TSDAPT_INVALID_WEIGHTS;
    case ErrorCode::MissingTargetClass: return TSDAPT_MISSING_TARGET_CLASS;
    case ErrorCode::EmptyClass: return TSDAPT_EMPTY_CLASS;
    case ErrorCode::InvalidLength: return TSDAPT_INVALID_LENGTH;
    case ErrorCode::ParseError: return TSDAPT_PARSE_ERROR;
    case ErrorCode::ConfigError: return TSDAPT_CONFIG_ERROR;
    case ErrorCode::InputError: return TSDAPT_INPUT_ERROR;
    case ErrorCode::OutputError: return TSDAPT_OUTPUT_ERROR;
  }
  return TSDAPT_INTERNAL_ERROR;
}

tsdapt_status fail(tsdapt_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs body, translating exceptions into a status and the thread's message.
template <typename F>
tsdapt_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return TSDAPT_OK;
  } catch (const Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(TSDAPT_OUT_OF_MEMORY, "out of memory");
  } catch (const std::exception& e) {
    return fail(TSDAPT_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(TSDAPT_INTERNAL_ERROR, "unknown exception");
  }
}

bool missing(const void* p, const char* what, tsdapt_status& status) {
  if (p != nullptr) return false;
  status = fail(TSDAPT_INVALID_ARGUMENT, std::string(what) + " is null");
  return true;
}

pipeline::Bound to_bound(tsdapt_bound b) {
  switch (b) {
    case TSDAPT_BOUND_SELECTED: return pipeline::Bound::Selected;
    case TSDAPT_BOUND_ORACLE_UPPER: return pipeline::Bound::OracleUpper;
    case TSDAPT_BOUND_NONE_LOWER: return pipeline::Bound::NoneLower;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown bound");
}

tsdapt_bound from_bound(pipeline::Bound b) {
  switch (b) {
    case pipeline::Bound::Selected: return TSDAPT_BOUND_SELECTED;
    case pipeline::Bound::OracleUpper: return TSDAPT_BOUND_ORACLE_UPPER;
    case pipeline::Bound::NoneLower: return TSDAPT_BOUND_NONE_LOWER;
  }
  return TSDAPT_BOUND_SELECTED;
}

}  // namespace

extern "C" {

const char* tsdapt_version(void) { return "1.0.0"; }

const char* tsdapt_status_name(tsdapt_status status) {
  switch (status) {
    case TSDAPT_OK: return "ok";
    case TSDAPT_INVALID_ARGUMENT: return "invalid argument";
    case TSDAPT_DEGENERATE_COVARIANCE: return "degenerate covariance";
    case TSDAPT_NUMERICAL_FAILURE: return "numerical failure";
    case TSDAPT_INVALID_WEIGHTS: return "invalid weights";
    case TSDAPT_MISSING_TARGET_CLASS: return "missing target class";
    case TSDAPT_EMPTY_CLASS: return "empty class";
    case TSDAPT_INVALID_LENGTH: return "invalid length";
    case TSDAPT_PARSE_ERROR: return "parse error";
    case TSDAPT_CONFIG_ERROR: return "config error";
    case TSDAPT_INPUT_ERROR: return "input error";
    case TSDAPT_OUTPUT_ERROR: return "output error";
    case TSDAPT_OUT_OF_MEMORY: return "out of memory";
    case TSDAPT_INTERNAL_ERROR: return "internal error";
  }
  return "unknown status";
}

const char* tsdapt_last_error(void) { return last_error.c_str(); }

int tsdapt_exit_code(tsdapt_status status) {
  switch (status) {
    case TSDAPT_OK: return 0;
    case TSDAPT_INVALID_ARGUMENT:
    case TSDAPT_INVALID_WEIGHTS:
    case TSDAPT_MISSING_TARGET_CLASS:
    case TSDAPT_EMPTY_CLASS:
    case TSDAPT_INVALID_LENGTH:
    case TSDAPT_PARSE_ERROR:
    case TSDAPT_CONFIG_ERROR:
    case TSDAPT_INPUT_ERROR:
      return 2;
    case TSDAPT_DEGENERATE_COVARIANCE:
    case TSDAPT_NUMERICAL_FAILURE:
      return 3;
    case TSDAPT_OUTPUT_ERROR:
      return 4;
    default:
      return 1;
  }
}

tsdapt_status tsdapt_config_new(tsdapt_config** out) {
  tsdapt_status status;
  if (missing(out, "out", status)) return status;
  *out = nullptr;
  return guarded([&] { *out = new tsdapt_config{}; });
}

tsdapt_status tsdapt_config_load(const char* path, tsdapt_config** out) {
  tsdapt_status status;
  if (missing(path, "path", status) || missing(out, "out", status)) return status;
  *out = nullptr;
  return guarded([&] { *out = new tsdapt_config{experiment::load_config(path)}; });
}

tsdapt_status tsdapt_config_set(tsdapt_config* config, const char* key, const char* value) {
  tsdapt_status status;
  if (missing(config, "config", status) || missing(key, "key", status) || missing(value, "value", status))
    return status;
  return guarded([&] {
    experiment::ExperimentConfig updated = config->config;
    experiment::set_value(updated, key, value);
    config->config = std::move(updated);
  });
}

tsdapt_status tsdapt_config_validate(const tsdapt_config* config) {
  tsdapt_status status;
  if (missing(config, "config", status)) return status;
  return guarded([&] { experiment::validate(config->config); });
}

void tsdapt_config_free(tsdapt_config* config) { delete config; }

tsdapt_status tsdapt_run_sweep(const tsdapt_config* config, const char* out_dir, size_t* rows_written) {
  tsdapt_status status;
  if (missing(config, "config", status) || missing(out_dir, "out_dir", status)) return status;
  return guarded([&] {
    const auto rows = experiment::run_synthetic_sweep(config->config, out_dir);
    if (rows_written != nullptr) *rows_written = rows.size();
  });
}

tsdapt_status tsdapt_run_adapt(const tsdapt_config* config, const char* target_train, const char* source_adapt,
                               const char* source_val, const char* out_dir, tsdapt_run** out) {
  tsdapt_status status;
  if (missing(config, "config", status) || missing(target_train, "target_train", status) ||
      missing(source_adapt, "source_adapt", status) || missing(source_val, "source_val", status) ||
      missing(out_dir, "out_dir", status))
    return status;
  if (out != nullptr) *out = nullptr;
  return guarded([&] {
    auto result = experiment::run_from_files(config->config, target_train, source_adapt, source_val, out_dir);
    if (out == nullptr) return;
    auto* run = new tsdapt_run{};
    for (auto& r : result.reports) run->reports.push_back({std::move(r)});
    run->timings = result.timings;
    *out = run;
  });
}

tsdapt_status tsdapt_export_synthetic(const tsdapt_config* config, double b, uint64_t seed, const char* out_dir) {
  tsdapt_status status;
  if (missing(config, "config", status) || missing(out_dir, "out_dir", status)) return status;
  return guarded([&] { experiment::export_synthetic(config->config, b, seed, out_dir); });
}

size_t tsdapt_run_report_count(const tsdapt_run* run) { return run ? run->reports.size() : 0; }

const tsdapt_report* tsdapt_run_report(const tsdapt_run* run, size_t index) {
  if (run == nullptr || index >= run->reports.size()) return nullptr;
  return &run->reports[index];
}

double tsdapt_run_fit_seconds(const tsdapt_run* run) { return run ? run->timings.fit_seconds : 0.0; }
double tsdapt_run_select_seconds(const tsdapt_run* run) { return run ? run->timings.select_seconds : 0.0; }
double tsdapt_run_classify_seconds(const tsdapt_run* run) { return run ? run->timings.classify_seconds : 0.0; }

void tsdapt_run_free(tsdapt_run* run) { delete run; }

tsdapt_status tsdapt_embeddings_create(size_t rows, size_t cols, size_t class_count, const double* data,
                                       const int* labels, tsdapt_embeddings** out) {
  tsdapt_status status;
  if (missing(out, "out", status)) return status;
  *out = nullptr;
  if (rows > 0 && (missing(data, "data", status) || missing(labels, "labels", status))) return status;
  return guarded([&] {
    if (cols == 0) throw Error(ErrorCode::InvalidArgument, "embedding dimension must be positive");
    if (class_count == 0) throw Error(ErrorCode::InvalidArgument, "class count must be positive");
    LabeledEmbeddings e;
    e.class_count = class_count;
    e.x = linalg::Matrix(rows, cols);
    std::copy(data, data + rows * cols, e.x.data().begin());
    e.labels.assign(labels, labels + rows);
    for (int label : e.labels)
      if (label < 0 || static_cast<size_t>(label) >= class_count)
        throw Error(ErrorCode::InvalidArgument, "label " + std::to_string(label) + " outside [0, class_count)");
    *out = new tsdapt_embeddings{std::move(e)};
  });
}

tsdapt_status tsdapt_embeddings_read(const char* path, tsdapt_embeddings** out) {
  tsdapt_status status;
  if (missing(path, "path", status) || missing(out, "out", status)) return status;
  *out = nullptr;
  return guarded([&] { *out = new tsdapt_embeddings{data::read_embeddings_file(path)}; });
}

tsdapt_status tsdapt_embeddings_write(const tsdapt_embeddings* embeddings, const char* path) {
  tsdapt_status status;
  if (missing(embeddings, "embeddings", status) || missing(path, "path", status)) return status;
  return guarded([&] { data::write_embeddings_file(path, embeddings->data); });
}

size_t tsdapt_embeddings_rows(const tsdapt_embeddings* e) { return e ? e->data.size() : 0; }
size_t tsdapt_embeddings_cols(const tsdapt_embeddings* e) { return e ? e->data.dim() : 0; }
size_t tsdapt_embeddings_class_count(const tsdapt_embeddings* e) { return e ? e->data.class_count : 0; }
const double* tsdapt_embeddings_data(const tsdapt_embeddings* e) { return e ? e->data.x.data().data() : nullptr; }
const int* tsdapt_embeddings_labels(const tsdapt_embeddings* e) { return e ? e->data.labels.data() : nullptr; }
void tsdapt_embeddings_free(tsdapt_embeddings* e) { delete e; }

tsdapt_status tsdapt_fit_transforms(const tsdapt_config* config, const tsdapt_embeddings* target_train,
                                    const tsdapt_embeddings* source_adapt, tsdapt_transforms** out) {
  tsdapt_status status;
  if (missing(config, "config", status) || missing(target_train, "target_train", status) ||
      missing(source_adapt, "source_adapt", status) || missing(out, "out", status))
    return status;
  *out = nullptr;
  return guarded([&] {
    const auto& c = config->config;
    *out = new tsdapt_transforms{
        pipeline::fit_class_transforms(target_train->data, source_adapt->data, c.transform, c.params)};
  });
}

size_t tsdapt_transforms_unconverged(const tsdapt_transforms* t) { return t ? t->set.unconverged_plans : 0; }

tsdapt_status tsdapt_transforms_apply(const tsdapt_transforms* transforms, int label, const double* x, size_t dim,
                                      double* out) {
  tsdapt_status status;
  if (missing(transforms, "transforms", status) || missing(x, "x", status) || missing(out, "out", status))
    return status;
  return guarded([&] {
    const auto it = transforms->set.per_class.find(label);
    if (it == transforms->set.per_class.end())
      throw Error(ErrorCode::InvalidArgument, "no transform for class " + std::to_string(label));
    const auto mapped = pipeline::apply_transform(it->second, std::span<const double>(x, dim));
    if (mapped.size() != dim) throw Error(ErrorCode::InvalidArgument, "dimension does not match the transform");
    std::copy(mapped.begin(), mapped.end(), out);
  });
}

void tsdapt_transforms_free(tsdapt_transforms* transforms) { delete transforms; }

tsdapt_status tsdapt_evaluate(const tsdapt_config* config, const tsdapt_transforms* transforms,
                              const tsdapt_embeddings* target_train, const tsdapt_embeddings* source_val,
                              tsdapt_bound bound, tsdapt_report** out) {
  tsdapt_status status;
  if (missing(config, "config", status) || missing(transforms, "transforms", status) ||
      missing(target_train, "target_train", status) || missing(source_val, "source_val", status) ||
      missing(out, "out", status))
    return status;
  *out = nullptr;
  return guarded([&] {
    const auto& c = config->config;
    if (c.seeds.empty()) throw Error(ErrorCode::ConfigError, "seeds is empty");
    const auto classifier = pipeline::fit_classifier(target_train->data, c.classifier, c.seeds.front());
    *out = new tsdapt_report{pipeline::evaluate(source_val->data, transforms->set, target_train->data, c.metric,
                                                classifier, to_bound(bound))};
  });
}

tsdapt_bound tsdapt_report_bound(const tsdapt_report* r) { return r ? from_bound(r->report.bound) : TSDAPT_BOUND_SELECTED; }
double tsdapt_report_accuracy(const tsdapt_report* r) { return r ? r->report.accuracy : 0.0; }
size_t tsdapt_report_class_count(const tsdapt_report* r) { return r ? r->report.confusion.size() : 0; }

double tsdapt_report_class_accuracy(const tsdapt_report* r, size_t label) {
  if (r == nullptr || label >= r->report.per_class_accuracy.size()) return 0.0;
  return r->report.per_class_accuracy[label];
}

size_t tsdapt_report_confusion(const tsdapt_report* r, size_t truth, size_t predicted) {
  if (r == nullptr || truth >= r->report.confusion.size() || predicted >= r->report.confusion.size()) return 0;
  return r->report.confusion[truth][predicted];
}

void tsdapt_report_free(tsdapt_report* report) { delete report; }

}  // extern "C"
