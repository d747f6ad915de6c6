#include "vecmerge/merge.hpp"

#include <algorithm>
#include <cmath>

#include "vecmerge/errors.hpp"
#include "vecmerge/text.hpp"

namespace vecmerge {

void MergeConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ValidationError("alpha must lie in [0, 1], got " + format_double(alpha));
  }
}

namespace {

void blend_into(Eigen::Ref<RowVector> out, const RowVector& mapped_old,
                const Eigen::Ref<const RowVector>& fresh, double alpha) {
  for (Index c = 0; c < out.size(); ++c) out[c] = std::lerp(mapped_old[c], fresh[c], alpha);
}

void check_map(const OrthogonalMap& map, Index dim) {
  if (map.matrix.rows() != dim || map.matrix.cols() != dim) {
    throw ValidationError("map dimension " + std::to_string(map.matrix.rows()) +
                          " does not match model dimension " + std::to_string(dim));
  }
}

}  // namespace

EmbeddingModel merge_embeddings(const EmbeddingModel& old_model, const EmbeddingModel& new_model,
                                const OrthogonalMap& map, const MergeConfig& config,
                                MergeReport* report) {
  config.validate();
  if (old_model.dim() != new_model.dim()) {
    throw ValidationError("cannot merge models of dimension " + std::to_string(old_model.dim()) +
                          " and " + std::to_string(new_model.dim()));
  }
  check_map(map, new_model.dim());

  MergeReport counts;
  counts.non_orthogonal_map = !is_orthogonal(map.matrix);

  std::vector<std::string> vocab = new_model.vocab();
  Index total = new_model.size();
  for (Index i = 0; i < old_model.size(); ++i) {
    if (!new_model.contains(old_model.token(i))) ++total;
  }
  Matrix merged(total, new_model.dim());

  for (Index i = 0; i < new_model.size(); ++i) {
    if (const auto old_row = old_model.find(new_model.token(i))) {
      blend_into(merged.row(i), map_row(old_model.row(*old_row), map.matrix), new_model.row(i),
                 config.alpha);
      ++counts.shared;
    } else {
      merged.row(i) = new_model.row(i);
      ++counts.new_only;
    }
  }
  Index next = new_model.size();
  for (Index i = 0; i < old_model.size(); ++i) {
    if (new_model.contains(old_model.token(i))) continue;
    merged.row(next++) = map_row(old_model.row(i), map.matrix);
    vocab.push_back(old_model.token(i));
    ++counts.old_only;
  }

  if (report) *report = counts;
  return EmbeddingModel(std::move(vocab), std::move(merged));
}

LinearTextClassifier merge_classifiers(const LinearTextClassifier& old_model,
                                       const LinearTextClassifier& new_model,
                                       const OrthogonalMap& map, const MergeConfig& config,
                                       MergeReport* report) {
  config.validate();
  old_model.validate();
  new_model.validate();
  if (old_model.dim() != new_model.dim()) {
    throw ValidationError("cannot merge classifiers of dimension " +
                          std::to_string(old_model.dim()) + " and " +
                          std::to_string(new_model.dim()));
  }
  check_same_labels(old_model, new_model);
  check_map(map, new_model.dim());
  const double error = orthogonality_error(map.matrix);
  if (!(error <= 1e-6)) {
    throw NumericError("classifier merge needs an orthogonal map (max |QᵀQ − I| = " +
                       format_double(error) + ")");
  }

  LinearTextClassifier merged;
  merged.features = merge_embeddings(old_model.features, new_model.features, map, config, report);
  merged.labels = new_model.labels;
  merged.ngram_order = std::max(old_model.ngram_order, new_model.ngram_order);
  merged.outputs.resize(new_model.outputs.rows(), new_model.dim());
  for (Index k = 0; k < new_model.label_count(); ++k) {
    const Index old_k = *old_model.label_index(new_model.labels[static_cast<std::size_t>(k)]);
    blend_into(merged.outputs.row(k), map_row(old_model.outputs.row(old_k), map.matrix),
               new_model.outputs.row(k), config.alpha);
  }
  return merged;
}

PairStrategy PairStrategy::parse(std::string_view text) {
  if (text == "all-common") return {};
  constexpr std::string_view prefix = "top-norm:";
  if (text.substr(0, prefix.size()) == prefix) {
    const auto budget = parse_integer(text.substr(prefix.size()));
    if (!budget || *budget < 1) {
      throw ValidationError("top-norm budget must be a positive integer in '" + std::string(text) +
                            "'");
    }
    return {PairSelection::top_norm, static_cast<Index>(*budget), NormSource::new_model};
  }
  throw ValidationError("unknown pair strategy '" + std::string(text) +
                        "' (expected all-common or top-norm:N)");
}

std::string PairStrategy::to_string() const {
  if (selection == PairSelection::all_common) return "all-common";
  return "top-norm:" + std::to_string(budget);
}

PairedVectors select_training_pairs(const EmbeddingModel& old_model,
                                    const EmbeddingModel& new_model, const PairStrategy& strategy,
                                    const KeyFilter& filter) {
  if (old_model.dim() != new_model.dim()) {
    throw ValidationError("models have different dimensions");
  }
  struct Candidate {
    Index old_row;
    Index new_row;
    double norm;
  };
  std::vector<Candidate> common;
  for (Index i = 0; i < new_model.size(); ++i) {
    const std::string& token = new_model.token(i);
    if (filter && !filter(token)) continue;
    if (const auto old_row = old_model.find(token)) {
      const double norm = strategy.norm_source == NormSource::new_model
                              ? new_model.row(i).norm()
                              : old_model.row(*old_row).norm();
      common.push_back({*old_row, i, norm});
    }
  }
  if (common.empty()) throw ValidationError("the two models share no vocabulary");

  if (strategy.selection == PairSelection::top_norm) {
    if (strategy.budget < 1) throw ValidationError("top-norm budget must be positive");
    const auto keep = std::min<std::size_t>(common.size(), static_cast<std::size_t>(strategy.budget));
    std::stable_sort(common.begin(), common.end(), [&](const Candidate& a, const Candidate& b) {
      if (a.norm != b.norm) return a.norm > b.norm;
      return new_model.token(a.new_row) < new_model.token(b.new_row);
    });
    common.resize(keep);
  }

  PairedVectors pairs;
  pairs.source.resize(static_cast<Index>(common.size()), new_model.dim());
  pairs.target.resize(static_cast<Index>(common.size()), new_model.dim());
  pairs.tokens.reserve(common.size());
  for (std::size_t r = 0; r < common.size(); ++r) {
    pairs.source.row(static_cast<Index>(r)) = old_model.row(common[r].old_row);
    pairs.target.row(static_cast<Index>(r)) = new_model.row(common[r].new_row);
    pairs.tokens.push_back(new_model.token(common[r].new_row));
  }
  return pairs;
}

PairedVectors select_training_pairs(const LinearTextClassifier& old_model,
                                    const LinearTextClassifier& new_model,
                                    const PairStrategy& strategy) {
  const int order = std::max(old_model.ngram_order, new_model.ngram_order);
  return select_training_pairs(old_model.features, new_model.features, strategy,
                               [order](std::string_view key) { return is_word_key(key, order); });
}

}  // namespace vecmerge
