#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "vecmerge/align.hpp"
#include "vecmerge/errors.hpp"

using namespace vecmerge;
using oracle::random_matrix;
using oracle::random_orthogonal;

namespace {

PairedVectors make_pairs(Matrix source, Matrix target) {
  return {std::move(source), std::move(target), {}};
}

double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST(LeastSquares, IdentityAndScaling) {
  std::mt19937_64 rng(1);
  const Matrix x = random_matrix(rng, 12, 3);
  EXPECT_LE(max_abs_diff(least_squares_align(make_pairs(x, x)).matrix, Matrix::Identity(3, 3)), 1e-8);
  const auto scaled = least_squares_align(make_pairs(x, 2.0 * x));
  EXPECT_LE(max_abs_diff(scaled.matrix, 2.0 * Matrix::Identity(3, 3)), 1e-8);
  EXPECT_EQ(scaled.method, AlignMethod::least_squares);
}

TEST(LeastSquares, MatchesNormalEquationOracle) {
  std::mt19937_64 rng(2);
  const Matrix x = random_matrix(rng, 6, 2);
  Matrix a(2, 2);
  a << 1, 2, 3, 4;
  const Matrix y = x * a;
  const Matrix expected = oracle::normal_equations_2x2(x, y);
  const Matrix q = least_squares_align(make_pairs(x, y)).matrix;
  EXPECT_LE(max_abs_diff(q, expected), 1e-8);
  EXPECT_LE(max_abs_diff(q, a), 1e-8);

  // Noisy target: the returned residual is no worse than the oracle's.
  const Matrix noisy = y + random_matrix(rng, 6, 2, 0.1);
  const Matrix fit = least_squares_align(make_pairs(x, noisy)).matrix;
  const Matrix reference = oracle::normal_equations_2x2(x, noisy);
  EXPECT_LE(oracle::frobenius_residual(x, fit, noisy),
            oracle::frobenius_residual(x, reference, noisy) + 1e-12);
}

TEST(LeastSquares, RankDeficientSourceIsAnError) {
  Matrix x(4, 2);
  x << 1, 2, 2, 4, 3, 6, -1, -2;
  EXPECT_THROW(least_squares_align(make_pairs(x, x)), NumericError);
}

TEST(Procrustes, IdentityAndRotation) {
  std::mt19937_64 rng(3);
  const Matrix x = random_matrix(rng, 8, 2);
  const auto same = procrustes_align(make_pairs(x, x));
  EXPECT_LE(max_abs_diff(same.matrix, Matrix::Identity(2, 2)), 1e-8);
  EXPECT_FALSE(same.non_unique);

  Matrix r(2, 2);
  r << 0, -1, 1, 0;
  EXPECT_LE(max_abs_diff(procrustes_align(make_pairs(x, x * r)).matrix, r), 1e-8);
}

TEST(Procrustes, MatchesGridSearchOracle) {
  std::mt19937_64 rng(4);
  const Matrix x = random_matrix(rng, 10, 2);
  const Matrix y = x * oracle::rotation2(0.7) + random_matrix(rng, 10, 2, 0.01);
  const auto map = procrustes_align(make_pairs(x, y));
  const double residual = oracle::frobenius_residual(x, map.matrix, y);
  const double grid = oracle::procrustes_grid_residual(x, y, 1e-4);
  EXPECT_LE(std::abs(residual - grid), 1e-6);
  EXPECT_LE(residual, grid + 1e-12);
}

TEST(Procrustes, FlagsSingularCrossCovariance) {
  // Rank-1 data: any rotation about the data direction is optimal.
  Matrix x(3, 2);
  x << 1, 0, 2, 0, -1, 0;
  const auto map = procrustes_align(make_pairs(x, x));
  EXPECT_TRUE(map.non_unique);
  EXPECT_TRUE(is_orthogonal(map.matrix));
}

TEST(Procrustes, ShapeMismatch) {
  EXPECT_THROW(procrustes_align(make_pairs(Matrix::Zero(3, 2), Matrix::Zero(3, 3))),
               ValidationError);
  EXPECT_THROW(procrustes_align(make_pairs(Matrix(0, 2), Matrix(0, 2))), ValidationError);
}

TEST(ProjectOrthogonal, IdempotentAndScaledIdentity) {
  std::mt19937_64 rng(5);
  const Matrix q = random_orthogonal(rng, 5);
  EXPECT_LE(max_abs_diff(project_orthogonal(q), q), 1e-8);
  EXPECT_LE(max_abs_diff(project_orthogonal(3.0 * Matrix::Identity(4, 4)), Matrix::Identity(4, 4)),
            1e-12);
}

TEST(ProjectOrthogonal, MatchesSamplingOracle) {
  std::mt19937_64 rng(6);
  const Matrix m = random_matrix(rng, 3, 3);
  const Matrix projected = project_orthogonal(m);
  std::mt19937_64 search_rng(60);
  const Matrix searched = oracle::nearest_orthogonal_by_search(m, search_rng, 1'000'000);
  EXPECT_LE(max_abs_diff(projected, searched), 1e-6);
  EXPECT_LE((m - projected).norm(), (m - searched).norm() + 1e-12);
}

TEST(Knn, SelfIsNearestAndTieBreak) {
  std::mt19937_64 rng(7);
  const Matrix pool = normalize_rows(random_matrix(rng, 6, 4));
  const auto table = knn_neighborhood(pool.row(3), pool, 1);
  EXPECT_EQ(table.row(0)[0], 3);

  const Matrix basis = Matrix::Identity(4, 4);
  const auto tie = knn_neighborhood(basis.row(0), basis, 2);
  EXPECT_EQ(tie.row(0)[0], 0);
  EXPECT_EQ(tie.row(0)[1], 1);

  EXPECT_THROW(knn_neighborhood(pool, pool, 7), ValidationError);
}

TEST(Knn, MatchesBruteForceSort) {
  std::mt19937_64 rng(8);
  const Matrix pool = normalize_rows(random_matrix(rng, 20, 4));
  const Matrix queries = normalize_rows(random_matrix(rng, 5, 4));
  const auto table = knn_neighborhood(queries, pool, 3);
  const auto expected = oracle::brute_force_knn(queries, pool, 3);
  for (Index r = 0; r < 5; ++r) {
    const auto row = table.row(r);
    EXPECT_EQ(std::vector<Index>(row.begin(), row.end()), expected[static_cast<std::size_t>(r)]);
  }
}

TEST(Csls, DegenerateAndArithmetic) {
  RowVector x(2);
  x << 1, 0;
  EXPECT_DOUBLE_EQ(csls_score(x, x, 1.0, 1.0), 0.0);
  RowVector y(2);
  y << 0.5, std::sqrt(0.75);
  EXPECT_NEAR(csls_score(x, y, 0.5, 0.5), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(csls_score(x, y, 0.2, 0.1), csls_score(y, x, 0.1, 0.2));
}

TEST(Csls, MatchesRecomputationFromRawDots) {
  std::mt19937_64 rng(9);
  const Matrix xs = normalize_rows(random_matrix(rng, 10, 3));
  const Matrix ys = normalize_rows(random_matrix(rng, 10, 3));
  const Index k = 2;
  const Vector rx = mean_knn_similarity(xs, ys, k);
  const Vector ry = mean_knn_similarity(ys, xs, k);
  const auto nx = oracle::brute_force_knn(xs, ys, k);
  const auto ny = oracle::brute_force_knn(ys, xs, k);
  for (Index i = 0; i < 10; ++i) {
    for (Index j = 0; j < 10; ++j) {
      double r_x = 0, r_y = 0;
      for (Index n : nx[static_cast<std::size_t>(i)]) r_x += oracle::dot_loop(xs, i, ys, n) / k;
      for (Index n : ny[static_cast<std::size_t>(j)]) r_y += oracle::dot_loop(ys, j, xs, n) / k;
      const double expected = 2 * oracle::dot_loop(xs, i, ys, j) - r_x - r_y;
      EXPECT_NEAR(csls_score(xs.row(i), ys.row(j), rx[i], ry[j]), expected, 1e-12);
    }
  }
}

TEST(RcslsLoss, SinglePairSelfNeighbor) {
  Matrix x(1, 2);
  x << 0.6, 0.8;
  EXPECT_DOUBLE_EQ(rcsls_loss(Matrix::Identity(2, 2), make_pairs(x, x), 1), 0.0);
}

TEST(RcslsLoss, DeterministicAndMatchesBruteForce) {
  std::mt19937_64 rng(10);
  const auto pairs = normalized(make_pairs(random_matrix(rng, 8, 3), random_matrix(rng, 8, 3)));
  const Matrix q = random_orthogonal(rng, 3);
  const double first = rcsls_loss(q, pairs, 2);
  const double second = rcsls_loss(q, pairs, 2);
  EXPECT_EQ(std::memcmp(&first, &second, sizeof(double)), 0);
  EXPECT_NEAR(first, oracle::brute_force_rcsls_loss(q, pairs.source, pairs.target, 2), 1e-12);
  EXPECT_THROW(rcsls_loss(q, pairs, 9), ValidationError);
}

TEST(RcslsSubgradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(11);
  const auto pairs = normalized(make_pairs(random_matrix(rng, 30, 4), random_matrix(rng, 30, 4)));
  const Index k = 3;
  const Matrix q = random_orthogonal(rng, 4);
  const double h = 1e-5;
  const auto base = rcsls_neighborhoods(q, pairs, k);
  const Matrix grad = rcsls_subgradient(q, pairs, k);
  for (Index a = 0; a < 4; ++a) {
    for (Index b = 0; b < 4; ++b) {
      Matrix plus = q, minus = q;
      plus(a, b) += h;
      minus(a, b) -= h;
      // Only meaningful where the neighborhoods do not change.
      ASSERT_TRUE(rcsls_neighborhoods(plus, pairs, k).targets_of_source == base.targets_of_source);
      ASSERT_TRUE(rcsls_neighborhoods(minus, pairs, k).sources_of_target == base.sources_of_target);
      const double fd = (rcsls_loss(plus, pairs, k) - rcsls_loss(minus, pairs, k)) / (2 * h);
      EXPECT_LE(std::abs(fd - grad(a, b)) / std::max({std::abs(fd), std::abs(grad(a, b)), 1e-6}),
                1e-4);
    }
  }
}

TEST(RcslsSubgradient, BatchOfAllEqualsFullBatch) {
  std::mt19937_64 rng(12);
  const auto pairs = normalized(make_pairs(random_matrix(rng, 9, 3), random_matrix(rng, 9, 3)));
  const Matrix q = random_orthogonal(rng, 3);
  std::vector<Index> all(9);
  std::iota(all.begin(), all.end(), Index{0});
  EXPECT_LE(max_abs_diff(rcsls_subgradient(q, pairs, 2, all), rcsls_subgradient(q, pairs, 2)), 0.0);
}

TEST(RcslsAlign, ZeroEpochsReturnsInit) {
  std::mt19937_64 rng(13);
  const auto pairs = make_pairs(random_matrix(rng, 20, 3), random_matrix(rng, 20, 3));
  RcslsConfig config;
  config.k = 3;
  config.epochs = 0;
  config.init = RcslsInit::identity;
  const auto identity = rcsls_align(pairs, config);
  EXPECT_EQ(identity.matrix, Matrix(Matrix::Identity(3, 3)));
  EXPECT_EQ(identity.method, AlignMethod::rcsls);
  config.init = RcslsInit::procrustes;
  EXPECT_EQ(rcsls_align(pairs, config).matrix, procrustes_align(normalized(pairs)).matrix);
}

TEST(RcslsAlign, ExactRotationKeepsProcrustesLoss) {
  std::mt19937_64 rng(14);
  const Matrix x = random_matrix(rng, 40, 5);
  const Matrix r = random_orthogonal(rng, 5);
  const auto pairs = make_pairs(x, x * r);
  RcslsConfig config;
  config.k = 2;
  const auto unit = normalized(pairs);
  const double init_loss = rcsls_loss(procrustes_align(unit).matrix, unit, config.k);
  const auto map = rcsls_align(pairs, config);
  EXPECT_LE(*map.final_loss, init_loss + 1e-9);
  EXPECT_LE(rcsls_loss(map.matrix, unit, config.k), init_loss + 1e-9);
  EXPECT_LE(orthogonality_error(map.matrix), 1e-6);
}

TEST(RcslsAlign, DescendsFromIdentity) {
  std::mt19937_64 rng(15);
  const Matrix x = random_matrix(rng, 30, 4);
  const auto pairs = make_pairs(x, x * random_orthogonal(rng, 4) + random_matrix(rng, 30, 4, 0.1));
  RcslsConfig config;
  config.k = 3;
  config.init = RcslsInit::identity;
  config.learning_rate = 1.0;
  config.epochs = 10;
  const auto unit = normalized(pairs);
  const double initial = rcsls_loss(Matrix::Identity(4, 4), unit, config.k);
  int epochs_seen = 0;
  const auto map = rcsls_align(pairs, config, [&](const RcslsEpoch&) { ++epochs_seen; });
  EXPECT_EQ(epochs_seen, 10);
  EXPECT_LT(*map.final_loss, initial);
  EXPECT_DOUBLE_EQ(*map.final_loss, rcsls_loss(map.matrix, unit, config.k));
  EXPECT_LE(orthogonality_error(map.matrix), 1e-6);
}

TEST(RcslsAlign, MiniBatchIsSeededAndDeterministic) {
  std::mt19937_64 rng(16);
  const auto pairs = make_pairs(random_matrix(rng, 25, 3), random_matrix(rng, 25, 3));
  RcslsConfig config;
  config.k = 2;
  config.batch_size = 7;
  config.seed = 99;
  config.init = RcslsInit::identity;
  const auto a = rcsls_align(pairs, config);
  const auto b = rcsls_align(pairs, config);
  EXPECT_EQ(a.matrix, b.matrix);
  EXPECT_LE(*a.final_loss, rcsls_loss(Matrix::Identity(3, 3), normalized(pairs), 2) + 1e-9);
}

TEST(RcslsConfig, RejectsInvalid) {
  RcslsConfig c;
  c.k = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.learning_rate = 0.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.epochs = -1;
  EXPECT_THROW(c.validate(), ValidationError);
}
