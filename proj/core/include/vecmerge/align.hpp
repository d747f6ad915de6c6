#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vecmerge/linalg.hpp"

namespace vecmerge {

enum class AlignMethod { least_squares, procrustes, rcsls };

std::string_view to_string(AlignMethod method);
/// Accepts "least-squares" (alias "lsq"), "procrustes" and "rcsls".
AlignMethod parse_align_method(std::string_view text);

/// Row-matched vector sets: row i of source and row i of target belong to
/// the same token. Source rows come from the old model, target rows from the
/// new one.
struct PairedVectors {
  Matrix source;
  Matrix target;
  std::vector<std::string> tokens;

  Index size() const noexcept { return source.rows(); }
  Index dim() const noexcept { return source.cols(); }

  /// Throws ValidationError on a shape mismatch or empty pair set.
  void validate() const;
};

PairedVectors normalized(const PairedVectors& pairs);

/// A d×d map applied to row vectors as x·Q (Qᵀx in column convention),
/// taking old-model vectors into the new model's space.
struct OrthogonalMap {
  Matrix matrix;
  AlignMethod method = AlignMethod::procrustes;
  std::optional<double> final_loss;
  /// Set when the Procrustes minimizer is not unique (singular cross-covariance).
  bool non_unique = false;

  Index dim() const noexcept { return matrix.rows(); }
  static OrthogonalMap identity(Index dim, AlignMethod method = AlignMethod::procrustes);
};

/// argmin_Q (1/m)‖XQ − Y‖²_F without constraints. Throws NumericError when
/// the source has rank below d.
OrthogonalMap least_squares_align(const PairedVectors& pairs, bool normalize = false);

/// argmin_Q ‖XQ − Y‖_F over orthogonal Q: Q = U·Wᵀ for XᵀY = U·Σ·Wᵀ.
OrthogonalMap procrustes_align(const PairedVectors& pairs, bool normalize = false);

/// Nearest orthogonal matrix in Frobenius norm (polar factor U·Wᵀ).
Matrix project_orthogonal(const Matrix& m);

/// r×k table of pool indices.
class NeighborTable {
 public:
  NeighborTable() = default;
  NeighborTable(Index rows, Index k) : rows_(rows), k_(k), indices_(rows * k) {}

  Index rows() const noexcept { return rows_; }
  Index k() const noexcept { return k_; }
  std::span<const Index> row(Index r) const {
    return {indices_.data() + r * k_, static_cast<std::size_t>(k_)};
  }
  std::span<Index> row(Index r) { return {indices_.data() + r * k_, static_cast<std::size_t>(k_)}; }

  friend bool operator==(const NeighborTable&, const NeighborTable&) = default;

 private:
  Index rows_ = 0;
  Index k_ = 0;
  std::vector<Index> indices_;
};

/// For each query row, the k pool rows with the largest dot product, best
/// first; ties go to the lower pool index. Rows are expected to be unit norm.
NeighborTable knn_neighborhood(const Matrix& queries, const Matrix& pool, Index k);

/// Mean similarity of each query to its k nearest pool rows (the CSLS
/// penalty term r).
Vector mean_knn_similarity(const Matrix& queries, const Matrix& pool, Index k);

/// 2·xᵀy − r_x − r_y for unit x, y.
double csls_score(const Eigen::Ref<const RowVector>& x, const Eigen::Ref<const RowVector>& y,
                  double mean_knn_x, double mean_knn_y);

struct RcslsNeighborhoods {
  NeighborTable targets_of_source;  // N_Y(x_i Q): target rows nearest each mapped source
  NeighborTable sources_of_target;  // N_X(y_i): mapped source rows nearest each target
};

/// Neighborhoods used by rcsls_loss for map q, pooled over all pairs.
RcslsNeighborhoods rcsls_neighborhoods(const Matrix& q, const PairedVectors& pairs, Index k);

/// Mean over pairs of −2 x̃ᵀy + (1/k)Σ_{N_Y(x̃)} x̃ᵀy' + (1/k)Σ_{N_X(y)} x̃'ᵀy with x̃ = xQ.
/// Pairs must already be unit normalized.
double rcsls_loss(const Matrix& q, const PairedVectors& pairs, Index k);

/// Subgradient of the loss restricted to the pairs in batch (all pairs when
/// empty), neighborhoods frozen at q and pooled over all pairs.
Matrix rcsls_subgradient(const Matrix& q, const PairedVectors& pairs, Index k,
                         std::span<const Index> batch = {});

enum class RcslsInit { identity, procrustes };

struct RcslsConfig {
  Index k = 10;
  int epochs = 10;
  double learning_rate = 1.0;
  Index batch_size = 0;  // 0 means full batch
  std::uint64_t seed = 0;
  RcslsInit init = RcslsInit::procrustes;

  void validate() const;
};

struct RcslsEpoch {
  int epoch = 0;
  double loss = 0.0;
  double learning_rate = 0.0;
  bool improved = false;
};

/// Projected subgradient descent on the RCSLS loss over orthogonal maps.
/// Pairs are unit normalized internally. The returned map is the best
/// iterate seen, so its loss never exceeds the initial loss.
OrthogonalMap rcsls_align(const PairedVectors& pairs, const RcslsConfig& config,
                          const std::function<void(const RcslsEpoch&)>& on_epoch = {});

}  // namespace vecmerge
