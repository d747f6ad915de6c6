#pragma once

// Independent reference computations used by the tests. Nothing in here
// calls into the library's numeric routines; everything is explicit loops
// over raw arrays so that a bug in the implementation cannot hide behind a
// shared helper.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "vecmerge/classifier.hpp"
#include "vecmerge/linalg.hpp"

namespace vecmerge::oracle {

inline constexpr double kPi = 3.14159265358979323846;

inline Matrix random_matrix(std::mt19937_64& rng, Index rows, Index cols, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian with sign fix).
inline Matrix random_orthogonal(std::mt19937_64& rng, Index d) {
  const Eigen::MatrixXd g = random_matrix(rng, d, d);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < d; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  return q;
}

inline Matrix rotation2(double theta) {
  Matrix r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

inline double frobenius_residual(const Matrix& x, const Matrix& q, const Matrix& y) {
  double acc = 0.0;
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index c = 0; c < q.cols(); ++c) {
      double v = 0.0;
      for (Index j = 0; j < x.cols(); ++j) v += x(i, j) * q(j, c);
      const double diff = v - y(i, c);
      acc += diff * diff;
    }
  }
  return std::sqrt(acc);
}

/// Best residual over rotations R(θ) and reflections R(θ)·diag(1, −1),
/// θ on a grid of the given step.
inline double procrustes_grid_residual(const Matrix& x, const Matrix& y, double step) {
  Matrix flip = Matrix::Identity(2, 2);
  flip(1, 1) = -1.0;
  double best = std::numeric_limits<double>::infinity();
  const auto steps = static_cast<long>(std::ceil(2.0 * kPi / step));
  for (long s = 0; s <= steps; ++s) {
    const Matrix r = rotation2(static_cast<double>(s) * step);
    best = std::min(best, frobenius_residual(x, r, y));
    best = std::min(best, frobenius_residual(x, r * flip, y));
  }
  return best;
}

/// Solves (XᵀX) A = XᵀY for 2-column X by the explicit 2×2 inverse.
inline Matrix normal_equations_2x2(const Matrix& x, const Matrix& y) {
  double a = 0, b = 0, d = 0;
  for (Index i = 0; i < x.rows(); ++i) {
    a += x(i, 0) * x(i, 0);
    b += x(i, 0) * x(i, 1);
    d += x(i, 1) * x(i, 1);
  }
  const double det = a * d - b * b;
  Matrix inv(2, 2);
  inv << d / det, -b / det, -b / det, a / det;
  Matrix xty = Matrix::Zero(2, y.cols());
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < 2; ++j)
      for (Index c = 0; c < y.cols(); ++c) xty(j, c) += x(i, j) * y(i, c);
  Matrix out = Matrix::Zero(2, y.cols());
  for (Index r = 0; r < 2; ++r)
    for (Index c = 0; c < y.cols(); ++c)
      for (Index j = 0; j < 2; ++j) out(r, c) += inv(r, j) * xty(j, c);
  return out;
}

inline double dot_loop(const Matrix& a, Index i, const Matrix& b, Index j) {
  double acc = 0.0;
  for (Index c = 0; c < a.cols(); ++c) acc += a(i, c) * b(j, c);
  return acc;
}

/// Exhaustive sort of every pool row by dot product (ties to lower index).
inline std::vector<std::vector<Index>> brute_force_knn(const Matrix& queries, const Matrix& pool,
                                                       Index k) {
  std::vector<std::vector<Index>> out;
  for (Index r = 0; r < queries.rows(); ++r) {
    std::vector<std::pair<double, Index>> scored;
    for (Index j = 0; j < pool.rows(); ++j) scored.emplace_back(-dot_loop(queries, r, pool, j), j);
    std::sort(scored.begin(), scored.end());
    std::vector<Index> row;
    for (Index j = 0; j < k; ++j) row.push_back(scored[static_cast<std::size_t>(j)].second);
    out.push_back(std::move(row));
  }
  return out;
}

inline Matrix map_loop(const Matrix& x, const Matrix& q) {
  Matrix out = Matrix::Zero(x.rows(), q.cols());
  for (Index i = 0; i < x.rows(); ++i)
    for (Index c = 0; c < q.cols(); ++c)
      for (Index j = 0; j < x.cols(); ++j) out(i, c) += x(i, j) * q(j, c);
  return out;
}

/// RCSLS loss rebuilt from scratch: explicit mapping, dot products and
/// neighborhoods found by a full sort.
inline double brute_force_rcsls_loss(const Matrix& q, const Matrix& x, const Matrix& y, Index k) {
  const Matrix mapped = map_loop(x, q);
  const auto near_targets = brute_force_knn(mapped, y, k);
  const auto near_sources = brute_force_knn(y, mapped, k);
  double total = 0.0;
  for (Index i = 0; i < x.rows(); ++i) {
    double term = -2.0 * dot_loop(mapped, i, y, i);
    for (Index j : near_targets[static_cast<std::size_t>(i)]) term += dot_loop(mapped, i, y, j) / k;
    for (Index l : near_sources[static_cast<std::size_t>(i)]) term += dot_loop(mapped, l, y, i) / k;
    total += term;
  }
  return total / static_cast<double>(x.rows());
}

inline Matrix unit_rows_loop(const Matrix& m) {
  Matrix out = m;
  for (Index i = 0; i < m.rows(); ++i) {
    double n = 0.0;
    for (Index c = 0; c < m.cols(); ++c) n += m(i, c) * m(i, c);
    n = std::sqrt(n);
    if (n > 0)
      for (Index c = 0; c < m.cols(); ++c) out(i, c) /= n;
  }
  return out;
}

/// Nearest orthogonal matrix by random search over O(d) followed by a
/// coordinate search along the rotation generators.
inline Matrix nearest_orthogonal_by_search(const Matrix& m, std::mt19937_64& rng, long samples) {
  const Index d = m.rows();
  auto distance = [&](const Matrix& q) { return (m - q).norm(); };
  Matrix best = random_orthogonal(rng, d);
  double best_dist = distance(best);
  for (long s = 1; s < samples; ++s) {
    Matrix cand = random_orthogonal(rng, d);
    const double dist = distance(cand);
    if (dist < best_dist) {
      best = std::move(cand);
      best_dist = dist;
    }
  }
  double step = 0.1;
  while (step > 1e-12) {
    bool improved = false;
    for (Index a = 0; a < d; ++a) {
      for (Index b = a + 1; b < d; ++b) {
        for (double sign : {1.0, -1.0}) {
          Matrix g = Matrix::Identity(d, d);
          const double t = sign * step;
          g(a, a) = std::cos(t);
          g(b, b) = std::cos(t);
          g(a, b) = -std::sin(t);
          g(b, a) = std::sin(t);
          Matrix cand = best * g;
          const double dist = distance(cand);
          if (dist < best_dist) {
            best = std::move(cand);
            best_dist = dist;
            improved = true;
          }
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

inline std::vector<std::string> token_list(const std::string& prefix, Index n) {
  std::vector<std::string> out;
  for (Index i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

/// Classifier with Gaussian features and outputs over the given keys.
inline LinearTextClassifier random_classifier(std::mt19937_64& rng, std::vector<std::string> keys,
                                              std::vector<std::string> labels, Index d,
                                              int ngram_order = 1) {
  const auto n = static_cast<Index>(keys.size());
  const auto k = static_cast<Index>(labels.size());
  return {EmbeddingModel(std::move(keys), random_matrix(rng, n, d)), random_matrix(rng, k, d),
          std::move(labels), ngram_order};
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("vecmerge_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace vecmerge::oracle
