#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "vecmerge/align.hpp"
#include "vecmerge/classifier.hpp"
#include "vecmerge/embedding.hpp"

namespace vecmerge {

struct MergeConfig {
  double alpha = 0.5;  // weight of the new model on shared tokens

  void validate() const;
};

struct MergeReport {
  Index old_only = 0;
  Index shared = 0;
  Index new_only = 0;
  bool non_orthogonal_map = false;
};

/// Merges an old model X into the space of a new model Y:
///   old-only token:  x·Q
///   shared token:    (1 − α)·x·Q + α·y
///   new-only token:  y
/// Output order is the new vocabulary followed by old-only tokens in old
/// order. The blend is evaluated with std::lerp, so α = 0 and α = 1 return
/// x·Q and y bit for bit, and x·Q == y is returned unchanged for any α.
EmbeddingModel merge_embeddings(const EmbeddingModel& old_model, const EmbeddingModel& new_model,
                                const OrthogonalMap& map, const MergeConfig& config,
                                MergeReport* report = nullptr);

/// Merges two low-rank classifiers: feature tables as in merge_embeddings,
/// output rows matched by label string and blended the same way. The map
/// must be orthogonal (to 1e-6), otherwise the old model's scores are not
/// preserved and NumericError is thrown.
LinearTextClassifier merge_classifiers(const LinearTextClassifier& old_model,
                                       const LinearTextClassifier& new_model,
                                       const OrthogonalMap& map, const MergeConfig& config,
                                       MergeReport* report = nullptr);

enum class PairSelection { all_common, top_norm };
enum class NormSource { new_model, old_model };

struct PairStrategy {
  PairSelection selection = PairSelection::all_common;
  Index budget = 1000;  // top_norm only
  NormSource norm_source = NormSource::new_model;

  /// "all-common" or "top-norm:N".
  static PairStrategy parse(std::string_view text);
  std::string to_string() const;
};

using KeyFilter = std::function<bool(std::string_view)>;

/// Training pairs from the tokens both models share (restricted by filter
/// when given). all-common keeps the new model's order; top-norm keeps the
/// budget tokens of largest norm, ties broken lexicographically.
PairedVectors select_training_pairs(const EmbeddingModel& old_model,
                                    const EmbeddingModel& new_model, const PairStrategy& strategy,
                                    const KeyFilter& filter = {});

/// Pairs over the word features of two classifiers (bigram keys excluded).
PairedVectors select_training_pairs(const LinearTextClassifier& old_model,
                                    const LinearTextClassifier& new_model,
                                    const PairStrategy& strategy);

}  // namespace vecmerge
