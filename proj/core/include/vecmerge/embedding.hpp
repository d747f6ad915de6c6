#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vecmerge/linalg.hpp"

namespace vecmerge {

/// An ordered vocabulary with one d-dimensional vector per token.
///
/// Invariants, checked on construction: tokens are unique, the matrix has
/// one row per token, d >= 1 and every entry is finite. Instances are
/// immutable once built.
class EmbeddingModel {
 public:
  /// Empty model of dimension 1.
  EmbeddingModel();
  EmbeddingModel(std::vector<std::string> vocab, Matrix vectors);

  static EmbeddingModel empty(Index dim);

  Index size() const noexcept { return vectors_.rows(); }
  Index dim() const noexcept { return vectors_.cols(); }
  bool empty() const noexcept { return vocab_.empty(); }

  const std::vector<std::string>& vocab() const noexcept { return vocab_; }
  const Matrix& vectors() const noexcept { return vectors_; }
  const std::string& token(Index i) const { return vocab_[static_cast<std::size_t>(i)]; }
  auto row(Index i) const { return vectors_.row(i); }

  std::optional<Index> find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::vector<std::string> vocab_;
  Matrix vectors_;
  std::unordered_map<std::string, Index, Hash, std::equal_to<>> index_;
};

}  // namespace vecmerge
