#include "vecmerge/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "vecmerge/errors.hpp"

namespace vecmerge {

Matrix normalize_rows(const Matrix& rows) {
  Matrix out = rows;
  for (Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm > 0.0) out.row(i) /= norm;
  }
  return out;
}

double orthogonality_error(const Matrix& q) {
  if (q.rows() != q.cols()) throw ValidationError("orthogonality check needs a square matrix");
  const Matrix gram = q.transpose() * q;
  double worst = 0.0;
  for (Index i = 0; i < gram.rows(); ++i) {
    for (Index j = 0; j < gram.cols(); ++j) {
      const double expected = i == j ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(gram(i, j) - expected));
    }
  }
  return worst;
}

RowVector map_row(const Eigen::Ref<const RowVector>& row, const Matrix& q) {
  if (row.size() != q.rows()) throw ValidationError("row/map dimension mismatch");
  RowVector out(q.cols());
  for (Index c = 0; c < q.cols(); ++c) {
    double acc = 0.0;
    for (Index j = 0; j < q.rows(); ++j) acc += row[j] * q(j, c);
    out[c] = acc;
  }
  return out;
}

Matrix map_rows(const Matrix& rows, const Matrix& q) {
  if (rows.cols() != q.rows()) throw ValidationError("row/map dimension mismatch");
  Matrix out(rows.rows(), q.cols());
  for (Index i = 0; i < rows.rows(); ++i) out.row(i) = map_row(rows.row(i), q);
  return out;
}

}  // namespace vecmerge
