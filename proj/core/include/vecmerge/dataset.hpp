#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vecmerge {

struct Document {
  std::string label;
  std::vector<std::string> tokens;
};

/// Labeled, tokenized documents. Every document label is in labels() and
/// every token list is non-empty.
class LabeledDataset {
 public:
  LabeledDataset() = default;
  /// Labels are collected in first-appearance order.
  explicit LabeledDataset(std::vector<Document> documents);
  /// Uses the given label order, which may list labels no document carries.
  LabeledDataset(std::vector<Document> documents, std::vector<std::string> labels);

  const std::vector<Document>& documents() const noexcept { return documents_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return documents_.size(); }
  bool empty() const noexcept { return documents_.empty(); }

  std::optional<std::size_t> label_index(std::string_view label) const;

 private:
  std::vector<Document> documents_;
  std::vector<std::string> labels_;
};

/// Documents of a followed by those of b, labelled with union_labels(a, b).
LabeledDataset concatenate(const LabeledDataset& a, const LabeledDataset& b);

/// Union of both label lists, a's order first.
std::vector<std::string> union_labels(const LabeledDataset& a, const LabeledDataset& b);

struct AnalogyQuestion {
  std::array<std::string, 4> words;  // a : b :: c : d
};

struct AnalogyCategory {
  std::string name;
  std::vector<AnalogyQuestion> questions;
};

/// Analogy questions grouped in uniquely named categories.
class AnalogyDataset {
 public:
  AnalogyDataset() = default;
  explicit AnalogyDataset(std::vector<AnalogyCategory> categories);

  const std::vector<AnalogyCategory>& categories() const noexcept { return categories_; }
  std::size_t question_count() const noexcept;

 private:
  std::vector<AnalogyCategory> categories_;
};

}  // namespace vecmerge
