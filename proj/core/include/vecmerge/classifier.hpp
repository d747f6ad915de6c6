#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vecmerge/dataset.hpp"
#include "vecmerge/embedding.hpp"
#include "vecmerge/linalg.hpp"

namespace vecmerge {

/// Bag-of-features linear classifier with a low-rank score matrix W = X·Vᵀ.
///
/// The hidden state of a document is the mean of its feature vectors
/// (rows of X); label scores are V·h and probabilities their softmax.
/// Features are words plus, for ngram_order 2, bigram keys "a_b".
struct LinearTextClassifier {
  EmbeddingModel features;
  Matrix outputs;  // K×d, row k scores labels[k]
  std::vector<std::string> labels;
  int ngram_order = 1;

  Index dim() const noexcept { return features.dim(); }
  Index label_count() const noexcept { return outputs.rows(); }
  std::optional<Index> label_index(std::string_view label) const;

  /// Throws ValidationError if the invariants do not hold.
  void validate() const;
};

inline constexpr char kNgramSeparator = '_';

std::string bigram_key(std::string_view first, std::string_view second);

/// Feature keys of a document in order: every token, then (order 2) every
/// consecutive bigram.
std::vector<std::string> feature_keys(std::span<const std::string> tokens, int ngram_order);

/// Whether a feature key names a plain word. Bigram keys are recognised by
/// the separator, so for order-2 models words containing '_' are treated as
/// n-grams.
bool is_word_key(std::string_view key, int ngram_order);

struct Featurized {
  Vector hidden;
  Index found = 0;
  Index unknown = 0;
};

/// Mean of the vectors of all feature keys present in the model. Unknown
/// keys are skipped; a document with no known key maps to the zero vector.
Featurized featurize(std::span<const std::string> tokens, const LinearTextClassifier& model);

Vector label_scores(std::span<const std::string> tokens, const LinearTextClassifier& model);

/// Numerically stable softmax.
Vector softmax(const Vector& scores);

Vector predict_proba(std::span<const std::string> tokens, const LinearTextClassifier& model);

/// Index of the first maximal entry.
Index argmax(const Vector& values);

/// Most probable label; ties go to the earlier label.
const std::string& predict(std::span<const std::string> tokens, const LinearTextClassifier& model);

/// Applies an orthogonal map jointly to features and outputs. With
/// orthogonal q the scores are unchanged since vᵀQᵀQx = vᵀx.
LinearTextClassifier map_classifier(const LinearTextClassifier& model, const Matrix& q);

struct TrainConfig {
  Index dim = 10;
  int epochs = 20;
  double learning_rate = 0.5;  // decays linearly to 0 over all updates
  int ngram_order = 2;
  std::uint64_t seed = 0;
  Index min_count = 1;

  void validate() const;
};

/// Trains with plain SGD on the softmax negative log likelihood.
///
/// Features are initialized uniformly in [−1/d, 1/d] and outputs at zero.
/// With warm_start (fine-tuning), the feature table is the union of the
/// warm-start keys and the training keys, shared keys start from the
/// warm-start vectors and outputs still start at zero. Deterministic for a
/// fixed seed.
LinearTextClassifier train(const LabeledDataset& data, const TrainConfig& config,
                           const LinearTextClassifier* warm_start = nullptr);

/// Mean negative log likelihood of the gold labels.
double mean_log_loss(const LinearTextClassifier& model, const LabeledDataset& data);

/// Two-model vote: the shared argmax when the models agree, otherwise the
/// label of the more confident model; an exact confidence tie goes to a.
std::string vote_ensemble(std::span<const std::string> tokens, const LinearTextClassifier& a,
                          const LinearTextClassifier& b);

/// Throws ValidationError unless both models carry the same label set.
void check_same_labels(const LinearTextClassifier& a, const LinearTextClassifier& b);

}  // namespace vecmerge
