#include "tsdapt/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "tsdapt/error.hpp"

namespace tsdapt::pipeline {

namespace {

ot::TransportPlan solve_plan(const ot::CostMatrix& cost, const Matrix& xs, const Matrix& xt, int label,
                             TransformKind kind, const TransformParams& params) {
  const auto a = ot::uniform_weights(xs.rows());
  const auto b = ot::uniform_weights(xt.rows());
  double epsilon = params.epsilon;
  if (params.cost_normalization == ot::CostNormalization::None) {
    const auto values = cost.entries.data();
    const double peak = *std::max_element(values.begin(), values.end());
    if (peak > 0.0) epsilon *= peak;
  }
  const ot::SinkhornOptions sinkhorn{epsilon, params.max_iter, params.tol};
  switch (kind) {
    case TransformKind::Emd:
      return ot::solve_emd(a, b, cost);
    case TransformKind::EmdLaplace:
      return ot::solve_emd_laplacian(a, b, cost, xs, xt, {params.reg_lap, params.max_cg_iter});
    case TransformKind::Sinkhorn:
      return ot::solve_sinkhorn(a, b, cost, sinkhorn);
    case TransformKind::SinkhornLpL1:
    case TransformKind::SinkhornL1L2: {
      const std::vector<int> labels(xs.rows(), label);
      const ot::ClassRegOptions options{
          kind == TransformKind::SinkhornLpL1 ? ot::ClassRegVariant::LpL1 : ot::ClassRegVariant::L1L2, params.eta,
          params.outer_iter, sinkhorn};
      return ot::solve_sinkhorn_class_reg(a, b, cost, labels, options);
    }
    case TransformKind::Coral:
      break;
  }
  throw Error(ErrorCode::InvalidArgument, "solve_plan: not an optimal transport kind");
}

std::size_t report_classes(const LabeledEmbeddings& data, const Classifier& classifier) {
  std::size_t k = std::max(data.class_count, classifier.class_count());
  for (int label : data.labels) k = std::max(k, static_cast<std::size_t>(label) + 1);
  return k;
}

}  // namespace

TransformKind parse_transform_kind(const std::string& name) {
  if (name == "emd") return TransformKind::Emd;
  if (name == "emd_laplace") return TransformKind::EmdLaplace;
  if (name == "sinkhorn") return TransformKind::Sinkhorn;
  if (name == "sinkhorn_lpl1") return TransformKind::SinkhornLpL1;
  if (name == "sinkhorn_l1l2") return TransformKind::SinkhornL1L2;
  if (name == "coral") return TransformKind::Coral;
  throw Error(ErrorCode::InvalidArgument, "unknown transform '" + name + "'");
}

std::string to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::Emd: return "emd";
    case TransformKind::EmdLaplace: return "emd_laplace";
    case TransformKind::Sinkhorn: return "sinkhorn";
    case TransformKind::SinkhornLpL1: return "sinkhorn_lpl1";
    case TransformKind::SinkhornL1L2: return "sinkhorn_l1l2";
    case TransformKind::Coral: return "coral";
  }
  return "?";
}

Bound parse_bound(const std::string& name) {
  if (name == "selected") return Bound::Selected;
  if (name == "oracle_upper") return Bound::OracleUpper;
  if (name == "none_lower") return Bound::NoneLower;
  throw Error(ErrorCode::InvalidArgument, "unknown bound '" + name + "'");
}

std::string to_string(Bound bound) {
  switch (bound) {
    case Bound::Selected: return "selected";
    case Bound::OracleUpper: return "oracle_upper";
    case Bound::NoneLower: return "none_lower";
  }
  return "?";
}

std::vector<double> apply_transform(const ClassTransform& transform, std::span<const double> x) {
  if (const auto* ot_map = std::get_if<ot::OtTransform>(&transform)) return ot::ot_transform_sample(*ot_map, x).values;
  const auto& coral_map = std::get<coral::CoralTransform>(transform);
  Matrix row(1, x.size());
  std::copy(x.begin(), x.end(), row.row(0).begin());
  const Matrix mapped = coral::coral_apply(coral_map, row);
  return {mapped.row(0).begin(), mapped.row(0).end()};
}

ClassTransformSet fit_class_transforms(const LabeledEmbeddings& target_train, const LabeledEmbeddings& source_adapt,
                                       TransformKind kind, const TransformParams& params) {
  if (target_train.dim() != source_adapt.dim())
    throw Error(ErrorCode::InvalidArgument, "fit_class_transforms: embedding dimensions differ");
  ClassTransformSet out;
  out.kind = kind;
  out.class_count = std::max(target_train.class_count, source_adapt.class_count);
  const std::set<int> classes(source_adapt.labels.begin(), source_adapt.labels.end());
  for (int label : classes) {
    Matrix xs = source_adapt.class_rows(label);
    Matrix xt = target_train.class_rows(label);
    if (xt.rows() == 0)
      throw Error(ErrorCode::MissingTargetClass,
                  "class " + std::to_string(label) + " has adaptation samples but no target samples");
    if (kind == TransformKind::Coral) {
      out.per_class.emplace(label, coral::coral_fit(xs, xt, params.coral_ridge));
      continue;
    }
    const auto cost = ot::build_cost_matrix(xs, xt, params.cost_metric, params.cost_normalization, params.minkowski_p);
    auto plan = solve_plan(cost, xs, xt, label, kind, params);
    if (!plan.converged) ++out.unconverged_plans;
    out.per_class.emplace(label, ot::make_ot_transform(std::move(plan), std::move(xs), std::move(xt)));
  }
  return out;
}

Selector::Selector(const LabeledEmbeddings& target_train, const metrics::MetricKind& metric)
    : metric_(metrics::resolve(metric, target_train.x)) {
  references_.resize(target_train.class_count);
  for (std::size_t k = 0; k < target_train.class_count; ++k) {
    Matrix rows = target_train.class_rows(static_cast<int>(k));
    if (rows.rows() > 0) references_[k].emplace(std::move(rows), metric_);
  }
}

const metrics::ReferenceSet* Selector::reference(int label) const {
  if (label < 0 || static_cast<std::size_t>(label) >= references_.size()) return nullptr;
  const auto& ref = references_[static_cast<std::size_t>(label)];
  return ref ? &*ref : nullptr;
}

SelectionResult select_transform(std::span<const double> sample, const ClassTransformSet& transforms,
                                 const Selector& selector) {
  SelectionResult sel;
  sel.orientation = selector.metric().orientation();
  sel.per_class_scores.assign(std::max(transforms.class_count, selector.class_count()),
                              std::numeric_limits<double>::quiet_NaN());
  bool have_best = false;
  double best_score = 0.0;
  Matrix candidate(1, sample.size());
  for (const auto& [label, transform] : transforms.per_class) {
    const metrics::ReferenceSet* reference = selector.reference(label);
    if (reference == nullptr) continue;
    std::vector<double> mapped = apply_transform(transform, sample);
    std::copy(mapped.begin(), mapped.end(), candidate.row(0).begin());
    const double value = reference->score(candidate);
    sel.per_class_scores[static_cast<std::size_t>(label)] = value;
    // Classes are visited in increasing order, so strict improvement keeps
    // the lowest id on ties.
    if (!have_best || selector.metric().better(value, best_score)) {
      have_best = true;
      best_score = value;
      sel.chosen_class = label;
      sel.transformed_embedding = std::move(mapped);
    }
  }
  if (!have_best) sel.transformed_embedding.assign(sample.begin(), sample.end());
  return sel;
}

Prediction select_and_classify(std::span<const double> sample, const ClassTransformSet& transforms,
                               const Selector& selector, const Classifier& classifier) {
  Prediction out;
  out.selection = select_transform(sample, transforms, selector);
  out.predicted = classifier.predict(out.selection.transformed_embedding);
  return out;
}

Prediction select_and_classify(std::span<const double> sample, const ClassTransformSet& transforms,
                               const LabeledEmbeddings& target_train, const metrics::MetricKind& metric,
                               const Classifier& classifier) {
  return select_and_classify(sample, transforms, Selector(target_train, metric), classifier);
}

EvalReport tally(Bound bound, std::span<const int> truth, std::span<const int> predicted, std::size_t class_count) {
  if (truth.size() != predicted.size()) throw Error(ErrorCode::InvalidArgument, "tally: length mismatch");
  const std::size_t k = class_count;
  EvalReport report;
  report.bound = bound;
  report.confusion.assign(k, std::vector<std::size_t>(k, 0));
  report.per_class_count.assign(k, 0);
  report.per_class_accuracy.assign(k, 0.0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || predicted[i] < 0 || static_cast<std::size_t>(truth[i]) >= k ||
        static_cast<std::size_t>(predicted[i]) >= k)
      throw Error(ErrorCode::InvalidArgument, "tally: label outside [0, class_count)");
    ++report.confusion[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(predicted[i])];
  }
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t p = 0; p < k; ++p) report.per_class_count[c] += report.confusion[c][p];
    report.total += report.per_class_count[c];
    report.correct += report.confusion[c][c];
    if (report.per_class_count[c] > 0)
      report.per_class_accuracy[c] =
          static_cast<double>(report.confusion[c][c]) / static_cast<double>(report.per_class_count[c]);
  }
  report.accuracy = report.total > 0 ? static_cast<double>(report.correct) / static_cast<double>(report.total) : 0.0;
  return report;
}

EvalReport evaluate(const LabeledEmbeddings& source_val, const ClassTransformSet& transforms, const Selector& selector,
                    const Classifier& classifier, Bound bound) {
  std::vector<int> predicted(source_val.size());
  for (std::size_t i = 0; i < source_val.size(); ++i) {
    const auto x = source_val.x.row(i);
    const int truth = source_val.labels[i];
    switch (bound) {
      case Bound::Selected:
        predicted[i] = select_and_classify(x, transforms, selector, classifier).predicted;
        break;
      case Bound::OracleUpper: {
        const auto it = transforms.per_class.find(truth);
        predicted[i] = it == transforms.per_class.end() ? classifier.predict(x)
                                                        : classifier.predict(apply_transform(it->second, x));
        break;
      }
      case Bound::NoneLower:
        predicted[i] = classifier.predict(x);
        break;
    }
  }
  return tally(bound, source_val.labels, predicted, report_classes(source_val, classifier));
}

EvalReport evaluate(const LabeledEmbeddings& source_val, const ClassTransformSet& transforms,
                    const LabeledEmbeddings& target_train, const metrics::MetricKind& metric,
                    const Classifier& classifier, Bound bound) {
  return evaluate(source_val, transforms, Selector(target_train, metric), classifier, bound);
}

}  // namespace tsdapt::pipeline
