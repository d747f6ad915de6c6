#include "vecmerge/embedding.hpp"

#include <cmath>

#include "vecmerge/errors.hpp"

namespace vecmerge {

EmbeddingModel::EmbeddingModel() : vectors_(0, 1) {}

EmbeddingModel::EmbeddingModel(std::vector<std::string> vocab, Matrix vectors)
    : vocab_(std::move(vocab)), vectors_(std::move(vectors)) {
  if (vectors_.cols() < 1) throw ValidationError("embedding dimension must be at least 1");
  if (static_cast<Index>(vocab_.size()) != vectors_.rows()) {
    throw ValidationError("vocabulary has " + std::to_string(vocab_.size()) +
                          " tokens but the matrix has " + std::to_string(vectors_.rows()) +
                          " rows");
  }
  if (!vectors_.allFinite()) throw ValidationError("embedding matrix has a non-finite entry");
  index_.reserve(vocab_.size());
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    if (vocab_[i].empty()) throw ValidationError("empty token at row " + std::to_string(i));
    if (!index_.emplace(vocab_[i], static_cast<Index>(i)).second) {
      throw ValidationError("duplicate token '" + vocab_[i] + "'");
    }
  }
}

EmbeddingModel EmbeddingModel::empty(Index dim) { return EmbeddingModel({}, Matrix(0, dim)); }

std::optional<Index> EmbeddingModel::find(std::string_view token) const {
  const auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

}  // namespace vecmerge
