#include <benchmark/benchmark.h>

#include "namesift/namesift.h"
#include "synthetic_corpus.h"

namespace {

using namespace namesift;

Task bench_task(std::size_t related) {
  testing::SyntheticSpec spec;
  spec.tasks = 1;
  spec.entities = 5;
  spec.related_documents = related;
  spec.noise_documents = related / 2;
  spec.document_filler_tokens = 40;
  return testing::synthetic_corpus(spec).front();
}

void BM_BuildIndex(benchmark::State& state) {
  const auto task = bench_task(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_index(task));
  state.SetItemsProcessed(state.iterations() * task.documents.size());
}
BENCHMARK(BM_BuildIndex)->Arg(50)->Arg(200);

void BM_MapDocuments(benchmark::State& state) {
  const auto task = bench_task(200);
  ModelConfig config;
  config.model = static_cast<Model>(state.range(0));
  config.features.noise = NoiseMode::kIntersection;
  state.SetLabel(std::string(to_string(config.model)));
  for (auto _ : state) benchmark::DoNotOptimize(map_documents(task, config));
  state.SetItemsProcessed(state.iterations() * task.documents.size());
}
BENCHMARK(BM_MapDocuments)
    ->Arg(static_cast<int>(Model::kCosine))
    ->Arg(static_cast<int>(Model::kScore))
    ->Arg(static_cast<int>(Model::kScoreSmoothed))
    ->Arg(static_cast<int>(Model::kNbBernoulliLaplace))
    ->Arg(static_cast<int>(Model::kNbMultinomialJm));

std::vector<DocumentVector> bench_vectors(std::size_t related) {
  const auto task = bench_task(related);
  return document_vectors(task, clustering_eval_filter(task));
}

void BM_HacComplete(benchmark::State& state) {
  const auto docs = bench_vectors(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(hac_complete(docs, 5));
}
BENCHMARK(BM_HacComplete)->Arg(50)->Arg(200);

void BM_KMeans(benchmark::State& state) {
  const auto docs = bench_vectors(static_cast<std::size_t>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(kmeans(docs, 5, ++seed));
}
BENCHMARK(BM_KMeans)->Arg(50)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
