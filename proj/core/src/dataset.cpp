#include "vecmerge/dataset.hpp"

#include <algorithm>
#include <unordered_set>

#include "vecmerge/errors.hpp"

namespace vecmerge {

namespace {

std::vector<std::string> collect_labels(const std::vector<Document>& documents) {
  std::vector<std::string> labels;
  std::unordered_set<std::string> seen;
  for (const auto& doc : documents) {
    if (seen.insert(doc.label).second) labels.push_back(doc.label);
  }
  return labels;
}

}  // namespace

LabeledDataset::LabeledDataset(std::vector<Document> documents)
    : LabeledDataset(documents, collect_labels(documents)) {}

LabeledDataset::LabeledDataset(std::vector<Document> documents, std::vector<std::string> labels)
    : documents_(std::move(documents)), labels_(std::move(labels)) {
  std::unordered_set<std::string> known;
  for (const auto& label : labels_) {
    if (label.empty()) throw ValidationError("empty label name");
    if (!known.insert(label).second) throw ValidationError("duplicate label '" + label + "'");
  }
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    const auto& doc = documents_[i];
    if (!known.count(doc.label)) {
      throw ValidationError("document " + std::to_string(i) + " has unknown label '" +
                            doc.label + "'");
    }
    if (doc.tokens.empty()) throw ValidationError("document " + std::to_string(i) + " is empty");
  }
}

std::optional<std::size_t> LabeledDataset::label_index(std::string_view label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

std::vector<std::string> union_labels(const LabeledDataset& a, const LabeledDataset& b) {
  std::vector<std::string> labels = a.labels();
  for (const auto& label : b.labels()) {
    if (std::find(labels.begin(), labels.end(), label) == labels.end()) labels.push_back(label);
  }
  return labels;
}

LabeledDataset concatenate(const LabeledDataset& a, const LabeledDataset& b) {
  std::vector<Document> docs = a.documents();
  docs.insert(docs.end(), b.documents().begin(), b.documents().end());
  return LabeledDataset(std::move(docs), union_labels(a, b));
}

AnalogyDataset::AnalogyDataset(std::vector<AnalogyCategory> categories)
    : categories_(std::move(categories)) {
  std::unordered_set<std::string> names;
  for (const auto& category : categories_) {
    if (!names.insert(category.name).second) {
      throw ValidationError("duplicate analogy category '" + category.name + "'");
    }
  }
}

std::size_t AnalogyDataset::question_count() const noexcept {
  std::size_t total = 0;
  for (const auto& category : categories_) total += category.questions.size();
  return total;
}

}  // namespace vecmerge
