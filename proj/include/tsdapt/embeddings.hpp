#pragma once

#include <cstddef>
#include <vector>

#include "tsdapt/linalg.hpp"

namespace tsdapt {

// Embedding rows with one class label per row; labels lie in [0, class_count).
struct LabeledEmbeddings {
  linalg::Matrix x;
  std::vector<int> labels;
  std::size_t class_count = 0;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dim() const noexcept { return x.cols(); }

  // Row indices carrying the given label, in row order.
  std::vector<std::size_t> rows_of(int label) const;
  linalg::Matrix class_rows(int label) const;

  friend bool operator==(const LabeledEmbeddings&, const LabeledEmbeddings&) = default;
};

}  // namespace tsdapt
