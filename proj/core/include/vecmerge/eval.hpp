#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "vecmerge/align.hpp"
#include "vecmerge/classifier.hpp"
#include "vecmerge/dataset.hpp"
#include "vecmerge/embedding.hpp"
#include "vecmerge/merge.hpp"

namespace vecmerge {

using TokenSet = std::set<std::string>;

/// A question is out-of-vocab iff one of its four words is banned.
struct AnalogySplit {
  AnalogyDataset out_of_vocab;
  AnalogyDataset in_vocab;
  TokenSet banned;
};

/// Partitions every category, keeping question order. Categories stay
/// present (possibly empty) in both parts.
AnalogySplit split_analogy(const AnalogyDataset& data, const TokenSet& banned);

/// Samples max(1, floor(fraction·n)) distinct words from each category's
/// n-word vocabulary and returns the union. Requires 0 < fraction < 1.
TokenSet sample_banned(const AnalogyDataset& data, double fraction, std::uint64_t seed);

struct Tally {
  std::string name;
  std::size_t correct = 0;
  std::size_t total = 0;

  double accuracy() const noexcept {
    return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
  }
};

struct AnalogyScore {
  std::vector<Tally> categories;
  Tally overall{"all"};  // micro average
};

/// 3CosAdd on unit-normalized vectors: the answer is the vocabulary word
/// (other than a, b, c) most cosine-similar to b − a + c, ties to the lower
/// row. Questions with a missing word count as wrong.
AnalogyScore eval_analogy(const EmbeddingModel& model, const AnalogyDataset& data);

/// Fraction of documents whose predicted label equals the gold label.
double eval_accuracy(const LinearTextClassifier& model, const LabeledDataset& data);

/// Accuracy of vote_ensemble(a, b).
double eval_vote_accuracy(const LinearTextClassifier& a, const LinearTextClassifier& b,
                          const LabeledDataset& data);

struct ReportRow {
  std::string variant;
  std::string split;
  double accuracy = 0.0;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

/// Tab-separated "variant split accuracy" table with a header row.
void write_report(std::ostream& out, const std::vector<ReportRow>& rows);
std::string format_report(const std::vector<ReportRow>& rows);

/// Overall row, plus one row per category when verbose.
std::vector<ReportRow> analogy_rows(const std::string& variant, const std::string& split,
                                    const AnalogyScore& score, bool verbose);

struct ExperimentConfig {
  TrainConfig train;
  RcslsConfig rcsls;
  PairStrategy pairs{PairSelection::top_norm, 1000, NormSource::new_model};
  MergeConfig merge;
};

inline constexpr const char* kVariantS0 = "train-s0";
inline constexpr const char* kVariantS1 = "train-s1";
inline constexpr const char* kVariantUnion = "train-s0+s1";
inline constexpr const char* kVariantFineTune = "fine-tune";
inline constexpr const char* kVariantVote = "vote";
inline constexpr const char* kVariantMerged = "rcsls+fine";

struct ExperimentResult {
  std::vector<ReportRow> rows;  // the six variants above, in that order
  LinearTextClassifier merged;
  OrthogonalMap map;
};

/// Trains on each shard, on their union and a shard-1 fine-tune of the
/// shard-0 model, then aligns the shard-0 model to the fine-tuned one with
/// RCSLS and merges them. Every variant plus the two-model vote is scored
/// on the test set. Deterministic for fixed seeds.
ExperimentResult run_merge_experiment(const LabeledDataset& shard0, const LabeledDataset& shard1,
                                      const LabeledDataset& test, const ExperimentConfig& config);

}  // namespace vecmerge
