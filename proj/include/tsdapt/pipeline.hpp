#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tsdapt/coral.hpp"
#include "tsdapt/embeddings.hpp"
#include "tsdapt/metrics.hpp"
#include "tsdapt/ot.hpp"

namespace tsdapt::pipeline {

using linalg::Matrix;

enum class TransformKind { Emd, EmdLaplace, Sinkhorn, SinkhornLpL1, SinkhornL1L2, Coral };

TransformKind parse_transform_kind(const std::string& name);
std::string to_string(TransformKind kind);

struct TransformParams {
  ot::CostMetric cost_metric = ot::CostMetric::SqEuclidean;
  double minkowski_p = 2.0;
  ot::CostNormalization cost_normalization = ot::CostNormalization::LogLog;
  // With normalization "none" the Sinkhorn family scales epsilon by max(C).
  double epsilon = 0.1;
  double eta = 0.5;
  double reg_lap = 1.0;
  std::size_t max_iter = 10000;
  double tol = 1e-6;
  std::size_t outer_iter = 10;
  std::size_t max_cg_iter = 50;
  double coral_ridge = -1.0;  // < 0: default ridge rule
};

using ClassTransform = std::variant<ot::OtTransform, coral::CoralTransform>;

struct ClassTransformSet {
  TransformKind kind = TransformKind::Sinkhorn;
  std::map<int, ClassTransform> per_class;
  std::size_t class_count = 0;
  std::size_t unconverged_plans = 0;  // Sinkhorn-family fits that hit max_iter
};

std::vector<double> apply_transform(const ClassTransform& transform, std::span<const double> x);

// One transform per class of source_adapt, fitted from that class's source
// rows to the same class's target rows with uniform weights.
// Throws MissingTargetClass when target_train lacks a source class.
ClassTransformSet fit_class_transforms(const LabeledEmbeddings& target_train, const LabeledEmbeddings& source_adapt,
                                       TransformKind kind, const TransformParams& params = {});

enum class ClassifierKind { NearestCentroid, LinearSoftmax };

ClassifierKind parse_classifier_kind(const std::string& name);
std::string to_string(ClassifierKind kind);

class Classifier {
 public:
  Classifier(ClassifierKind kind, std::size_t class_count, Matrix parameters);

  ClassifierKind kind() const noexcept { return kind_; }
  std::size_t class_count() const noexcept { return class_count_; }
  // Centroids (K x d) or softmax weights (K x (d+1), bias last).
  const Matrix& parameters() const noexcept { return parameters_; }

  int predict(std::span<const double> x) const;

 private:
  ClassifierKind kind_;
  std::size_t class_count_;
  Matrix parameters_;
};

inline constexpr std::size_t kSoftmaxEpochs = 500;
inline constexpr double kSoftmaxLearningRate = 0.1;

// Nearest centroid, or multinomial logistic regression trained by full-batch
// gradient descent from seeded weights and zero biases.
// Throws EmptyClass when a class in [0, class_count) has no sample.
Classifier fit_classifier(const LabeledEmbeddings& target_train, ClassifierKind kind, std::uint64_t seed = 0);

// Class-conditional reference sets of the target training data, prepared
// once for a resolved metric.
class Selector {
 public:
  Selector(const LabeledEmbeddings& target_train, const metrics::MetricKind& metric);

  const metrics::MetricKind& metric() const noexcept { return metric_; }
  std::size_t class_count() const noexcept { return references_.size(); }
  // Nullptr when the class has no target rows.
  const metrics::ReferenceSet* reference(int label) const;

 private:
  metrics::MetricKind metric_;
  std::vector<std::optional<metrics::ReferenceSet>> references_;
};

struct SelectionResult {
  int chosen_class = 0;
  std::vector<double> per_class_scores;  // NaN for classes without a candidate
  metrics::Orientation orientation = metrics::Orientation::Distance;
  std::vector<double> transformed_embedding;
};

struct Prediction {
  SelectionResult selection;
  int predicted = 0;
};

// Transforms the sample with every class transform and scores each result
// against that class's target rows. Ties go to the lowest class id.
SelectionResult select_transform(std::span<const double> sample, const ClassTransformSet& transforms,
                                 const Selector& selector);

// select_transform followed by classification of the chosen embedding.
Prediction select_and_classify(std::span<const double> sample, const ClassTransformSet& transforms,
                               const Selector& selector, const Classifier& classifier);
Prediction select_and_classify(std::span<const double> sample, const ClassTransformSet& transforms,
                               const LabeledEmbeddings& target_train, const metrics::MetricKind& metric,
                               const Classifier& classifier);

enum class Bound { Selected, OracleUpper, NoneLower };

Bound parse_bound(const std::string& name);
std::string to_string(Bound bound);

struct EvalReport {
  Bound bound = Bound::Selected;
  double accuracy = 0.0;
  std::vector<double> per_class_accuracy;  // 0 for classes without samples
  std::vector<std::size_t> per_class_count;
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
  std::size_t total = 0;
  std::size_t correct = 0;
};

// Accuracy, per-class accuracy and confusion from paired labels.
EvalReport tally(Bound bound, std::span<const int> truth, std::span<const int> predicted, std::size_t class_count);

EvalReport evaluate(const LabeledEmbeddings& source_val, const ClassTransformSet& transforms, const Selector& selector,
                    const Classifier& classifier, Bound bound);
EvalReport evaluate(const LabeledEmbeddings& source_val, const ClassTransformSet& transforms,
                    const LabeledEmbeddings& target_train, const metrics::MetricKind& metric,
                    const Classifier& classifier, Bound bound);

}  // namespace tsdapt::pipeline
