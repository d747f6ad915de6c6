#include "vecmerge/eval.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "vecmerge/errors.hpp"
#include "vecmerge/random.hpp"
#include "vecmerge/text.hpp"

namespace vecmerge {

AnalogySplit split_analogy(const AnalogyDataset& data, const TokenSet& banned) {
  std::vector<AnalogyCategory> out_parts;
  std::vector<AnalogyCategory> in_parts;
  for (const auto& category : data.categories()) {
    AnalogyCategory out{category.name, {}};
    AnalogyCategory in{category.name, {}};
    for (const auto& question : category.questions) {
      const bool hit = std::any_of(question.words.begin(), question.words.end(),
                                   [&](const std::string& w) { return banned.count(w) > 0; });
      (hit ? out : in).questions.push_back(question);
    }
    out_parts.push_back(std::move(out));
    in_parts.push_back(std::move(in));
  }
  return {AnalogyDataset(std::move(out_parts)), AnalogyDataset(std::move(in_parts)), banned};
}

TokenSet sample_banned(const AnalogyDataset& data, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ValidationError("banned fraction must lie strictly between 0 and 1");
  }
  Rng rng(seed);
  TokenSet banned;
  for (const auto& category : data.categories()) {
    std::vector<std::string> vocab;
    std::unordered_set<std::string> seen;
    for (const auto& question : category.questions) {
      for (const auto& word : question.words) {
        if (seen.insert(word).second) vocab.push_back(word);
      }
    }
    if (vocab.empty()) continue;
    // The epsilon keeps exact products such as 0.1·30 from rounding down.
    const auto wanted = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(vocab.size()) + 1e-9)));
    // Partial Fisher-Yates: the first `wanted` slots form a uniform sample.
    for (std::size_t i = 0; i < wanted; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.uniform_index(vocab.size() - i));
      std::swap(vocab[i], vocab[j]);
      banned.insert(vocab[i]);
    }
  }
  return banned;
}

AnalogyScore eval_analogy(const EmbeddingModel& model, const AnalogyDataset& data) {
  const Matrix unit = normalize_rows(model.vectors());
  AnalogyScore score;
  Vector query(model.dim());
  for (const auto& category : data.categories()) {
    Tally tally{category.name};
    for (const auto& question : category.questions) {
      ++tally.total;
      const auto a = model.find(question.words[0]);
      const auto b = model.find(question.words[1]);
      const auto c = model.find(question.words[2]);
      const auto d = model.find(question.words[3]);
      if (!a || !b || !c || !d) continue;
      query = (unit.row(*b) - unit.row(*a) + unit.row(*c)).transpose();
      const Vector sims = unit * query;
      Index best = -1;
      for (Index w = 0; w < sims.size(); ++w) {
        if (w == *a || w == *b || w == *c) continue;
        if (best < 0 || sims[w] > sims[best]) best = w;
      }
      if (best == *d) ++tally.correct;
    }
    score.overall.correct += tally.correct;
    score.overall.total += tally.total;
    score.categories.push_back(std::move(tally));
  }
  return score;
}

double eval_accuracy(const LinearTextClassifier& model, const LabeledDataset& data) {
  if (data.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& doc : data.documents()) {
    if (!model.label_index(doc.label)) {
      throw ValidationError("gold label '" + doc.label + "' is unknown to the model");
    }
    if (predict(doc.tokens, model) == doc.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double eval_vote_accuracy(const LinearTextClassifier& a, const LinearTextClassifier& b,
                          const LabeledDataset& data) {
  check_same_labels(a, b);
  if (data.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& doc : data.documents()) {
    if (!a.label_index(doc.label)) {
      throw ValidationError("gold label '" + doc.label + "' is unknown to the models");
    }
    if (vote_ensemble(doc.tokens, a, b) == doc.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

void write_report(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << format_report(rows);
}

std::string format_report(const std::vector<ReportRow>& rows) {
  std::string text = "variant\tsplit\taccuracy\n";
  for (const auto& row : rows) {
    text.append(row.variant).append("\t").append(row.split).append("\t");
    append_double(text, row.accuracy);
    text.push_back('\n');
  }
  return text;
}

std::vector<ReportRow> analogy_rows(const std::string& variant, const std::string& split,
                                    const AnalogyScore& score, bool verbose) {
  std::vector<ReportRow> rows;
  if (verbose) {
    for (const auto& tally : score.categories) {
      rows.push_back({variant, split + "/" + tally.name, tally.accuracy()});
    }
  }
  rows.push_back({variant, split, score.overall.accuracy()});
  return rows;
}

ExperimentResult run_merge_experiment(const LabeledDataset& shard0, const LabeledDataset& shard1,
                                      const LabeledDataset& test, const ExperimentConfig& config) {
  config.train.validate();
  config.rcsls.validate();
  config.merge.validate();

  // A shared label order keeps every model's output rows comparable.
  std::vector<std::string> labels = union_labels(shard0, shard1);
  for (const auto& label : test.labels()) {
    if (std::find(labels.begin(), labels.end(), label) == labels.end()) labels.push_back(label);
  }
  const LabeledDataset s0(shard0.documents(), labels);
  const LabeledDataset s1(shard1.documents(), labels);
  const LabeledDataset both = concatenate(s0, s1);

  const auto seeded = [&](std::uint64_t offset) {
    TrainConfig c = config.train;
    c.seed = config.train.seed + offset;
    return c;
  };
  const LinearTextClassifier model0 = train(s0, seeded(0));
  const LinearTextClassifier model1 = train(s1, seeded(1));
  const LinearTextClassifier model_union = train(both, seeded(2));
  const LinearTextClassifier fine_tuned = train(s1, seeded(3), &model0);

  const PairedVectors pairs = select_training_pairs(model0, fine_tuned, config.pairs);
  RcslsConfig rcsls = config.rcsls;
  rcsls.k = std::min(rcsls.k, pairs.size());
  OrthogonalMap map = rcsls_align(pairs, rcsls);
  LinearTextClassifier merged = merge_classifiers(model0, fine_tuned, map, config.merge);

  const std::string split = "test";
  ExperimentResult result;
  result.rows = {
      {kVariantS0, split, eval_accuracy(model0, test)},
      {kVariantS1, split, eval_accuracy(model1, test)},
      {kVariantUnion, split, eval_accuracy(model_union, test)},
      {kVariantFineTune, split, eval_accuracy(fine_tuned, test)},
      {kVariantVote, split, eval_vote_accuracy(model0, model1, test)},
      {kVariantMerged, split, eval_accuracy(merged, test)},
  };
  result.merged = std::move(merged);
  result.map = std::move(map);
  return result;
}

}  // namespace vecmerge
