#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "tsdapt/error.hpp"
#include "tsdapt/pipeline.hpp"

namespace tsdapt::pipeline {

namespace {

// Box-Muller on 53-bit uniforms so the initialization is library independent.
double standard_normal(std::mt19937_64& rng) {
  const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void softmax_in_place(std::vector<double>& logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& v : logits) {
    v = std::exp(v - peak);
    total += v;
  }
  for (double& v : logits) v /= total;
}

Matrix train_softmax(const LabeledEmbeddings& data, std::size_t classes, std::uint64_t seed) {
  const std::size_t d = data.dim();
  const std::size_t n = data.size();
  std::mt19937_64 rng(seed);
  Matrix w(classes, d + 1);
  for (std::size_t k = 0; k < classes; ++k)
    for (std::size_t j = 0; j < d; ++j) w(k, j) = 0.01 * standard_normal(rng);

  Matrix grad(classes, d + 1);
  std::vector<double> probs(classes);
  for (std::size_t epoch = 0; epoch < kSoftmaxEpochs; ++epoch) {
    std::fill(grad.data().begin(), grad.data().end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = data.x.row(i);
      for (std::size_t k = 0; k < classes; ++k) {
        double z = w(k, d);
        for (std::size_t j = 0; j < d; ++j) z += w(k, j) * x[j];
        probs[k] = z;
      }
      softmax_in_place(probs);
      for (std::size_t k = 0; k < classes; ++k) {
        const double residual = probs[k] - (static_cast<std::size_t>(data.labels[i]) == k ? 1.0 : 0.0);
        for (std::size_t j = 0; j < d; ++j) grad(k, j) += residual * x[j];
        grad(k, d) += residual;
      }
    }
    const double step = kSoftmaxLearningRate / static_cast<double>(n);
    for (std::size_t k = 0; k < w.data().size(); ++k) w.data()[k] -= step * grad.data()[k];
  }
  return w;
}

}  // namespace

ClassifierKind parse_classifier_kind(const std::string& name) {
  if (name == "nearest_centroid") return ClassifierKind::NearestCentroid;
  if (name == "linear_softmax") return ClassifierKind::LinearSoftmax;
  throw Error(ErrorCode::InvalidArgument, "unknown classifier '" + name + "'");
}

std::string to_string(ClassifierKind kind) {
  return kind == ClassifierKind::NearestCentroid ? "nearest_centroid" : "linear_softmax";
}

Classifier::Classifier(ClassifierKind kind, std::size_t class_count, Matrix parameters)
    : kind_(kind), class_count_(class_count), parameters_(std::move(parameters)) {
  if (parameters_.rows() != class_count_)
    throw Error(ErrorCode::InvalidArgument, "Classifier: one parameter row per class required");
}

int Classifier::predict(std::span<const double> x) const {
  const std::size_t d = kind_ == ClassifierKind::NearestCentroid ? parameters_.cols() : parameters_.cols() - 1;
  if (x.size() != d) throw Error(ErrorCode::InvalidArgument, "Classifier::predict: dimension mismatch");
  int best = 0;
  double best_value = 0.0;
  for (std::size_t k = 0; k < class_count_; ++k) {
    const auto p = parameters_.row(k);
    double value;
    bool improves;
    if (kind_ == ClassifierKind::NearestCentroid) {
      value = linalg::squared_distance(x, p);
      improves = k == 0 || value < best_value;
    } else {
      value = p[d] + linalg::dot(x, p.first(d));
      improves = k == 0 || value > best_value;
    }
    if (improves) {
      best = static_cast<int>(k);
      best_value = value;
    }
  }
  return best;
}

Classifier fit_classifier(const LabeledEmbeddings& target_train, ClassifierKind kind, std::uint64_t seed) {
  const std::size_t classes = target_train.class_count;
  if (classes == 0 || target_train.size() == 0)
    throw Error(ErrorCode::EmptyClass, "fit_classifier: no training data");
  std::vector<std::size_t> counts(classes, 0);
  for (int label : target_train.labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= classes)
      throw Error(ErrorCode::InvalidArgument, "fit_classifier: label out of range");
    ++counts[static_cast<std::size_t>(label)];
  }
  for (std::size_t k = 0; k < classes; ++k)
    if (counts[k] == 0) throw Error(ErrorCode::EmptyClass, "fit_classifier: class " + std::to_string(k) + " is empty");

  if (kind == ClassifierKind::LinearSoftmax)
    return Classifier(kind, classes, train_softmax(target_train, classes, seed));

  Matrix centroids(classes, target_train.dim());
  for (std::size_t k = 0; k < classes; ++k) {
    const auto mean = linalg::column_means(target_train.class_rows(static_cast<int>(k)));
    std::copy(mean.begin(), mean.end(), centroids.row(k).begin());
  }
  return Classifier(kind, classes, std::move(centroids));
}

}  // namespace tsdapt::pipeline
