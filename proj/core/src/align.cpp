#include "vecmerge/align.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "vecmerge/errors.hpp"
#include "vecmerge/random.hpp"

namespace vecmerge {

std::string_view to_string(AlignMethod method) {
  switch (method) {
    case AlignMethod::least_squares:
      return "least-squares";
    case AlignMethod::procrustes:
      return "procrustes";
    case AlignMethod::rcsls:
      return "rcsls";
  }
  return "unknown";
}

AlignMethod parse_align_method(std::string_view text) {
  if (text == "least-squares" || text == "lsq") return AlignMethod::least_squares;
  if (text == "procrustes") return AlignMethod::procrustes;
  if (text == "rcsls") return AlignMethod::rcsls;
  throw ValidationError("unknown alignment method '" + std::string(text) + "'");
}

void PairedVectors::validate() const {
  if (source.rows() != target.rows() || source.cols() != target.cols()) {
    throw ValidationError("source and target pair matrices differ in shape");
  }
  if (source.rows() == 0) throw ValidationError("empty pair set");
  if (source.cols() == 0) throw ValidationError("pair vectors have dimension 0");
  if (!tokens.empty() && static_cast<Index>(tokens.size()) != source.rows()) {
    throw ValidationError("pair token list does not match the number of pairs");
  }
}

PairedVectors normalized(const PairedVectors& pairs) {
  return {normalize_rows(pairs.source), normalize_rows(pairs.target), pairs.tokens};
}

OrthogonalMap OrthogonalMap::identity(Index dim, AlignMethod method) {
  return {Matrix::Identity(dim, dim), method, std::nullopt, false};
}

OrthogonalMap least_squares_align(const PairedVectors& input, bool normalize) {
  input.validate();
  const PairedVectors pairs = normalize ? normalized(input) : input;
  const Eigen::MatrixXd source = pairs.source;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(source);
  if (qr.rank() < pairs.dim()) {
    throw NumericError("least squares: source vectors have rank " + std::to_string(qr.rank()) +
                       " < " + std::to_string(pairs.dim()) +
                       ", the normal equations are singular; use procrustes instead");
  }
  const Eigen::MatrixXd target = pairs.target;
  OrthogonalMap map;
  map.matrix = qr.solve(target);
  map.method = AlignMethod::least_squares;
  return map;
}

namespace {

struct PolarFactor {
  Matrix orthogonal;
  bool singular = false;
};

PolarFactor polar_factor(const Matrix& m) {
  const Eigen::MatrixXd dense = m;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense, Eigen::ComputeFullU | Eigen::ComputeFullV);
  PolarFactor out;
  out.orthogonal = svd.matrixU() * svd.matrixV().transpose();
  const auto& sigma = svd.singularValues();
  const double largest = sigma.size() ? sigma.maxCoeff() : 0.0;
  const double smallest = sigma.size() ? sigma.minCoeff() : 0.0;
  out.singular = largest == 0.0 || smallest <= 1e-12 * largest;
  return out;
}

// Indices of the k largest scores, best first, ties to the lower index.
void top_k(const double* scores, Index count, Index k, std::vector<Index>& scratch,
           std::span<Index> out) {
  scratch.resize(static_cast<std::size_t>(count));
  std::iota(scratch.begin(), scratch.end(), Index{0});
  const auto better = [scores](Index a, Index b) {
    return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
  };
  std::partial_sort(scratch.begin(), scratch.begin() + k, scratch.end(), better);
  std::copy_n(scratch.begin(), k, out.begin());
}

void check_k(Index k, Index pool) {
  if (k < 1) throw ValidationError("neighborhood size k must be at least 1");
  if (k > pool) {
    throw ValidationError("neighborhood size k=" + std::to_string(k) +
                          " exceeds the pool size " + std::to_string(pool));
  }
}

// Similarities between every mapped source row and every target row,
// S(i, j) = (x_i Q) · y_j, plus its transpose for column access.
struct Similarities {
  Matrix by_source;
  Matrix by_target;
};

Similarities rcsls_similarities(const Matrix& q, const PairedVectors& pairs) {
  if (q.rows() != pairs.dim() || q.cols() != pairs.dim()) {
    throw ValidationError("map dimension does not match the pair dimension");
  }
  const Matrix mapped = pairs.source * q;
  Similarities s;
  s.by_source = mapped * pairs.target.transpose();
  s.by_target = s.by_source.transpose();
  return s;
}

RcslsNeighborhoods neighborhoods_from(const Similarities& s, Index k) {
  const Index m = s.by_source.rows();
  RcslsNeighborhoods n{NeighborTable(m, k), NeighborTable(m, k)};
  std::vector<Index> scratch;
  for (Index i = 0; i < m; ++i) {
    top_k(s.by_source.row(i).data(), m, k, scratch, n.targets_of_source.row(i));
    top_k(s.by_target.row(i).data(), m, k, scratch, n.sources_of_target.row(i));
  }
  return n;
}

}  // namespace

OrthogonalMap procrustes_align(const PairedVectors& input, bool normalize) {
  input.validate();
  const PairedVectors pairs = normalize ? normalized(input) : input;
  const Matrix cross = pairs.source.transpose() * pairs.target;
  PolarFactor polar = polar_factor(cross);
  OrthogonalMap map;
  map.matrix = std::move(polar.orthogonal);
  map.method = AlignMethod::procrustes;
  map.non_unique = polar.singular;
  return map;
}

Matrix project_orthogonal(const Matrix& m) {
  if (m.rows() != m.cols()) throw ValidationError("can only project square matrices");
  if (!m.allFinite()) throw NumericError("cannot project a matrix with non-finite entries");
  return polar_factor(m).orthogonal;
}

NeighborTable knn_neighborhood(const Matrix& queries, const Matrix& pool, Index k) {
  check_k(k, pool.rows());
  if (queries.cols() != pool.cols()) throw ValidationError("query/pool dimension mismatch");
  const Matrix sims = queries * pool.transpose();
  NeighborTable table(queries.rows(), k);
  std::vector<Index> scratch;
  for (Index r = 0; r < queries.rows(); ++r) {
    top_k(sims.row(r).data(), pool.rows(), k, scratch, table.row(r));
  }
  return table;
}

Vector mean_knn_similarity(const Matrix& queries, const Matrix& pool, Index k) {
  const NeighborTable table = knn_neighborhood(queries, pool, k);
  Vector out(queries.rows());
  for (Index r = 0; r < queries.rows(); ++r) {
    double acc = 0.0;
    for (Index j : table.row(r)) acc += queries.row(r).dot(pool.row(j));
    out[r] = acc / static_cast<double>(k);
  }
  return out;
}

double csls_score(const Eigen::Ref<const RowVector>& x, const Eigen::Ref<const RowVector>& y,
                  double mean_knn_x, double mean_knn_y) {
  return 2.0 * x.dot(y) - mean_knn_x - mean_knn_y;
}

RcslsNeighborhoods rcsls_neighborhoods(const Matrix& q, const PairedVectors& pairs, Index k) {
  pairs.validate();
  check_k(k, pairs.size());
  return neighborhoods_from(rcsls_similarities(q, pairs), k);
}

double rcsls_loss(const Matrix& q, const PairedVectors& pairs, Index k) {
  pairs.validate();
  check_k(k, pairs.size());
  const Similarities s = rcsls_similarities(q, pairs);
  const RcslsNeighborhoods n = neighborhoods_from(s, k);
  const Index m = pairs.size();
  const double inv_k = 1.0 / static_cast<double>(k);
  double total = 0.0;
  for (Index i = 0; i < m; ++i) {
    double near_targets = 0.0;
    for (Index j : n.targets_of_source.row(i)) near_targets += s.by_source(i, j);
    double near_sources = 0.0;
    for (Index l : n.sources_of_target.row(i)) near_sources += s.by_target(i, l);
    total += -2.0 * s.by_source(i, i) + inv_k * near_targets + inv_k * near_sources;
  }
  return total / static_cast<double>(m);
}

Matrix rcsls_subgradient(const Matrix& q, const PairedVectors& pairs, Index k,
                         std::span<const Index> batch) {
  pairs.validate();
  check_k(k, pairs.size());
  const Similarities s = rcsls_similarities(q, pairs);
  const RcslsNeighborhoods n = neighborhoods_from(s, k);
  const Index m = pairs.size();
  const Index d = pairs.dim();
  const double inv_k = 1.0 / static_cast<double>(k);

  std::vector<Index> all;
  if (batch.empty()) {
    all.resize(static_cast<std::size_t>(m));
    std::iota(all.begin(), all.end(), Index{0});
    batch = all;
  }

  // d(x̃_i · y) / dQ = x_iᵀ y, so each pair contributes
  //   x_iᵀ (−2 y_i + (1/k) Σ_{N_Y} y_j) + (1/k) (Σ_{N_X} x_l)ᵀ y_i.
  Matrix grad = Matrix::Zero(d, d);
  RowVector target_side(d);
  RowVector source_side(d);
  for (Index i : batch) {
    if (i < 0 || i >= m) throw ValidationError("batch index out of range");
    target_side = -2.0 * pairs.target.row(i);
    for (Index j : n.targets_of_source.row(i)) target_side += inv_k * pairs.target.row(j);
    source_side.setZero();
    for (Index l : n.sources_of_target.row(i)) source_side += inv_k * pairs.source.row(l);
    grad.noalias() += pairs.source.row(i).transpose() * target_side;
    grad.noalias() += source_side.transpose() * pairs.target.row(i);
  }
  grad /= static_cast<double>(batch.size());
  return grad;
}

void RcslsConfig::validate() const {
  if (k < 1) throw ValidationError("rcsls: k must be at least 1");
  if (epochs < 0) throw ValidationError("rcsls: epochs must be non-negative");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ValidationError("rcsls: learning rate must be positive");
  }
  if (batch_size < 0) throw ValidationError("rcsls: batch size must be non-negative");
}

OrthogonalMap rcsls_align(const PairedVectors& input, const RcslsConfig& config,
                          const std::function<void(const RcslsEpoch&)>& on_epoch) {
  input.validate();
  config.validate();
  const PairedVectors pairs = normalized(input);
  const Index m = pairs.size();
  check_k(config.k, m);

  Matrix q = config.init == RcslsInit::identity ? Matrix(Matrix::Identity(pairs.dim(), pairs.dim()))
                                                : procrustes_align(pairs).matrix;
  Matrix best = q;
  double best_loss = rcsls_loss(q, pairs, config.k);
  double lr = config.learning_rate;
  const bool full_batch = config.batch_size == 0 || config.batch_size >= m;
  Rng rng(config.seed);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    if (full_batch) {
      q = project_orthogonal(q - lr * rcsls_subgradient(q, pairs, config.k));
    } else {
      const auto order = rng.permutation(static_cast<std::size_t>(m));
      std::vector<Index> batch;
      for (std::size_t start = 0; start < order.size();
           start += static_cast<std::size_t>(config.batch_size)) {
        const std::size_t stop =
            std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
        batch.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                     order.begin() + static_cast<std::ptrdiff_t>(stop));
        q = project_orthogonal(q - lr * rcsls_subgradient(q, pairs, config.k, batch));
      }
    }
    const double loss = rcsls_loss(q, pairs, config.k);
    const bool improved = loss < best_loss;
    if (improved) {
      best = q;
      best_loss = loss;
    } else {
      // Restart from the best iterate with a smaller step.
      q = best;
      lr *= 0.5;
    }
    if (on_epoch) on_epoch({epoch, loss, lr, improved});
  }

  OrthogonalMap map;
  map.matrix = std::move(best);
  map.method = AlignMethod::rcsls;
  map.final_loss = best_loss;
  return map;
}

}  // namespace vecmerge
