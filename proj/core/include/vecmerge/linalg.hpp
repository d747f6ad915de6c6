#pragma once

#include <Eigen/Core>

namespace vecmerge {

using Index = Eigen::Index;

/// Row-per-item storage: row i of an embedding matrix is the vector of item i.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Scales every row to unit l2 norm. All-zero rows are left as zero.
Matrix normalize_rows(const Matrix& rows);

/// max |QᵀQ − I| over all entries.
double orthogonality_error(const Matrix& q);

inline bool is_orthogonal(const Matrix& q, double tolerance = 1e-6) {
  return q.rows() == q.cols() && orthogonality_error(q) <= tolerance;
}

/// Computes rows·Q with a fixed left-to-right summation order, so the same
/// inputs always give the same bits regardless of vectorization.
Matrix map_rows(const Matrix& rows, const Matrix& q);
RowVector map_row(const Eigen::Ref<const RowVector>& row, const Matrix& q);

}  // namespace vecmerge
