#include "vecmerge/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "vecmerge/errors.hpp"
#include "vecmerge/random.hpp"

namespace vecmerge {

std::optional<Index> LinearTextClassifier::label_index(std::string_view label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) return std::nullopt;
  return static_cast<Index>(it - labels.begin());
}

void LinearTextClassifier::validate() const {
  if (ngram_order != 1 && ngram_order != 2) {
    throw ValidationError("n-gram order must be 1 or 2, got " + std::to_string(ngram_order));
  }
  if (labels.size() < 2) throw ValidationError("a classifier needs at least two labels");
  if (static_cast<Index>(labels.size()) != outputs.rows()) {
    throw ValidationError("output matrix rows do not match the label count");
  }
  if (outputs.cols() != features.dim()) {
    throw ValidationError("output dimension " + std::to_string(outputs.cols()) +
                          " differs from feature dimension " + std::to_string(features.dim()));
  }
  if (!outputs.allFinite()) throw ValidationError("output matrix has a non-finite entry");
  std::unordered_set<std::string_view> seen;
  for (const auto& label : labels) {
    if (label.empty()) throw ValidationError("empty label name");
    if (!seen.insert(label).second) throw ValidationError("duplicate label '" + label + "'");
  }
}

std::string bigram_key(std::string_view first, std::string_view second) {
  std::string key;
  key.reserve(first.size() + second.size() + 1);
  key.append(first);
  key.push_back(kNgramSeparator);
  key.append(second);
  return key;
}

std::vector<std::string> feature_keys(std::span<const std::string> tokens, int ngram_order) {
  std::vector<std::string> keys(tokens.begin(), tokens.end());
  if (ngram_order >= 2) {
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
      keys.push_back(bigram_key(tokens[i], tokens[i + 1]));
    }
  }
  return keys;
}

bool is_word_key(std::string_view key, int ngram_order) {
  return ngram_order < 2 || key.find(kNgramSeparator) == std::string_view::npos;
}

Featurized featurize(std::span<const std::string> tokens, const LinearTextClassifier& model) {
  Featurized out;
  out.hidden = Vector::Zero(model.dim());
  for (const auto& key : feature_keys(tokens, model.ngram_order)) {
    if (const auto row = model.features.find(key)) {
      out.hidden += model.features.row(*row).transpose();
      ++out.found;
    } else {
      ++out.unknown;
    }
  }
  if (out.found > 0) out.hidden /= static_cast<double>(out.found);
  return out;
}

Vector label_scores(std::span<const std::string> tokens, const LinearTextClassifier& model) {
  return model.outputs * featurize(tokens, model).hidden;
}

Vector softmax(const Vector& scores) {
  if (scores.size() == 0) return scores;
  const double top = scores.maxCoeff();
  Vector out = (scores.array() - top).exp().matrix();
  out /= out.sum();
  return out;
}

Vector predict_proba(std::span<const std::string> tokens, const LinearTextClassifier& model) {
  return softmax(label_scores(tokens, model));
}

Index argmax(const Vector& values) {
  Index best = 0;
  for (Index i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

const std::string& predict(std::span<const std::string> tokens, const LinearTextClassifier& model) {
  return model.labels[static_cast<std::size_t>(argmax(label_scores(tokens, model)))];
}

LinearTextClassifier map_classifier(const LinearTextClassifier& model, const Matrix& q) {
  if (q.rows() != model.dim() || q.cols() != model.dim()) {
    throw ValidationError("map dimension does not match the classifier dimension");
  }
  LinearTextClassifier out;
  out.features = EmbeddingModel(model.features.vocab(), map_rows(model.features.vectors(), q));
  out.outputs = map_rows(model.outputs, q);
  out.labels = model.labels;
  out.ngram_order = model.ngram_order;
  return out;
}

void TrainConfig::validate() const {
  if (dim < 1) throw ValidationError("train: dim must be at least 1");
  if (epochs < 1) throw ValidationError("train: epochs must be at least 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ValidationError("train: learning rate must be non-negative");
  }
  if (ngram_order != 1 && ngram_order != 2) throw ValidationError("train: n-gram order must be 1 or 2");
  if (min_count < 1) throw ValidationError("train: min count must be at least 1");
}

LinearTextClassifier train(const LabeledDataset& data, const TrainConfig& config,
                           const LinearTextClassifier* warm_start) {
  config.validate();
  if (data.labels().size() < 2) {
    throw ValidationError("train: need at least two labels, dataset has " +
                          std::to_string(data.labels().size()));
  }
  if (data.empty()) throw ValidationError("train: empty dataset");
  if (warm_start && warm_start->dim() != config.dim) {
    throw ValidationError("train: warm-start dimension " + std::to_string(warm_start->dim()) +
                          " differs from requested dim " + std::to_string(config.dim));
  }

  // Per-document feature keys and their corpus counts, first appearance order.
  std::vector<std::vector<std::string>> doc_keys;
  doc_keys.reserve(data.size());
  std::vector<std::string> order;
  std::unordered_map<std::string, Index> counts;
  for (const auto& doc : data.documents()) {
    doc_keys.push_back(feature_keys(doc.tokens, config.ngram_order));
    for (const auto& key : doc_keys.back()) {
      if (counts[key]++ == 0) order.push_back(key);
    }
  }

  std::vector<std::string> vocab;
  std::unordered_map<std::string, Index> row_of;
  const auto add_key = [&](const std::string& key) {
    if (row_of.emplace(key, static_cast<Index>(vocab.size())).second) vocab.push_back(key);
  };
  if (warm_start) {
    for (const auto& key : warm_start->features.vocab()) add_key(key);
  }
  for (const auto& key : order) {
    if (counts[key] >= config.min_count) add_key(key);
  }

  const Index d = config.dim;
  const Index label_count = static_cast<Index>(data.labels().size());
  Rng rng(config.seed);
  const double bound = 1.0 / static_cast<double>(d);
  Matrix features(static_cast<Index>(vocab.size()), d);
  for (Index r = 0; r < features.rows(); ++r) {
    for (Index c = 0; c < d; ++c) features(r, c) = rng.uniform(-bound, bound);
    if (warm_start) {
      if (const auto src = warm_start->features.find(vocab[static_cast<std::size_t>(r)])) {
        features.row(r) = warm_start->features.row(*src);
      }
    }
  }
  Matrix outputs = Matrix::Zero(label_count, d);

  std::vector<Index> gold(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    gold[i] = static_cast<Index>(*data.label_index(data.documents()[i].label));
  }

  const double total_steps = static_cast<double>(config.epochs) * static_cast<double>(data.size());
  double step = 0.0;
  std::vector<Index> rows;
  Vector hidden(d);
  Vector grad_hidden(d);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (const std::size_t doc : rng.permutation(data.size())) {
      const double lr = config.learning_rate * (1.0 - step / total_steps);
      step += 1.0;
      rows.clear();
      for (const auto& key : doc_keys[doc]) {
        if (const auto it = row_of.find(key); it != row_of.end()) rows.push_back(it->second);
      }
      if (rows.empty()) continue;
      hidden.setZero();
      for (Index r : rows) hidden += features.row(r).transpose();
      hidden /= static_cast<double>(rows.size());

      Vector residual = softmax(outputs * hidden);
      residual[gold[doc]] -= 1.0;
      grad_hidden.noalias() = outputs.transpose() * residual;
      outputs.noalias() -= lr * residual * hidden.transpose();
      const double share = lr / static_cast<double>(rows.size());
      for (Index r : rows) features.row(r) -= share * grad_hidden.transpose();
    }
  }

  LinearTextClassifier model;
  model.features = EmbeddingModel(std::move(vocab), std::move(features));
  model.outputs = std::move(outputs);
  model.labels = data.labels();
  model.ngram_order = config.ngram_order;
  model.validate();
  return model;
}

double mean_log_loss(const LinearTextClassifier& model, const LabeledDataset& data) {
  if (data.empty()) return 0.0;
  double total = 0.0;
  for (const auto& doc : data.documents()) {
    const auto k = model.label_index(doc.label);
    if (!k) throw ValidationError("label '" + doc.label + "' is unknown to the model");
    total -= std::log(predict_proba(doc.tokens, model)[*k]);
  }
  return total / static_cast<double>(data.size());
}

void check_same_labels(const LinearTextClassifier& a, const LinearTextClassifier& b) {
  std::vector<std::string> la = a.labels;
  std::vector<std::string> lb = b.labels;
  std::sort(la.begin(), la.end());
  std::sort(lb.begin(), lb.end());
  if (la != lb) throw ValidationError("the two classifiers have different label sets");
}

std::string vote_ensemble(std::span<const std::string> tokens, const LinearTextClassifier& a,
                          const LinearTextClassifier& b) {
  check_same_labels(a, b);
  const Vector pa = predict_proba(tokens, a);
  const Vector pb = predict_proba(tokens, b);
  const Index ia = argmax(pa);
  const Index ib = argmax(pb);
  const std::string& label_a = a.labels[static_cast<std::size_t>(ia)];
  const std::string& label_b = b.labels[static_cast<std::size_t>(ib)];
  if (label_a == label_b) return label_a;
  return pa[ia] >= pb[ib] ? label_a : label_b;
}

}  // namespace vecmerge
