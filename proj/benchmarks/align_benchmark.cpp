#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "vecmerge/align.hpp"
#include "vecmerge/classifier.hpp"
#include "vecmerge/random.hpp"

using namespace vecmerge;

namespace {

Matrix gaussian(Rng& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

PairedVectors make_pairs(Index n, Index d) {
  Rng rng(1);
  return normalized({gaussian(rng, n, d), gaussian(rng, n, d), {}});
}

}  // namespace

static void BM_Procrustes(benchmark::State& state) {
  const auto pairs = make_pairs(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(procrustes_align(pairs));
}
BENCHMARK(BM_Procrustes)->Args({1000, 10})->Args({1000, 50})->Args({5000, 100});

static void BM_Knn(benchmark::State& state) {
  const auto pairs = make_pairs(state.range(0), 50);
  for (auto _ : state) benchmark::DoNotOptimize(knn_neighborhood(pairs.source, pairs.target, 10));
}
BENCHMARK(BM_Knn)->Arg(500)->Arg(2000);

static void BM_RcslsLoss(benchmark::State& state) {
  const auto pairs = make_pairs(state.range(0), 50);
  const Matrix q = Matrix::Identity(50, 50);
  for (auto _ : state) benchmark::DoNotOptimize(rcsls_loss(q, pairs, 10));
}
BENCHMARK(BM_RcslsLoss)->Arg(500)->Arg(2000);

static void BM_RcslsStep(benchmark::State& state) {
  const auto pairs = make_pairs(state.range(0), 50);
  const Matrix q = Matrix::Identity(50, 50);
  for (auto _ : state) {
    const Matrix g = rcsls_subgradient(q, pairs, 10);
    benchmark::DoNotOptimize(project_orthogonal(q - g));
  }
}
BENCHMARK(BM_RcslsStep)->Arg(500)->Arg(2000);

static void BM_Train(benchmark::State& state) {
  Rng rng(3);
  std::vector<Document> docs;
  for (int i = 0; i < state.range(0); ++i) {
    Document doc{i % 2 ? "a" : "b", {}};
    for (int t = 0; t < 10; ++t) doc.tokens.push_back("w" + std::to_string(rng.uniform_index(500)));
    docs.push_back(std::move(doc));
  }
  const LabeledDataset data(docs);
  TrainConfig config;
  config.epochs = 5;
  for (auto _ : state) benchmark::DoNotOptimize(train(data, config));
}
BENCHMARK(BM_Train)->Arg(300)->Arg(3000);
BENCHMARK_MAIN();
