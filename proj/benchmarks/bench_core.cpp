#include <map>

#include <benchmark/benchmark.h>

#include "sibyl/dataio.hpp"
#include "sibyl/distributions.hpp"
#include "sibyl/explain.hpp"
#include "sibyl/neighbors.hpp"
#include "sibyl/present.hpp"

namespace {

using namespace sibyl;

const DemoCorpus& corpus(std::size_t n_cases) {
  static std::map<std::size_t, DemoCorpus> cache;
  auto it = cache.find(n_cases);
  if (it == cache.end()) it = cache.emplace(n_cases, make_demo_corpus(n_cases, 40, 1)).first;
  return it->second;
}

void BM_PredictRaw(benchmark::State& state) {
  const auto& demo = corpus(1000);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict_raw(demo.model, demo.reference.at(i++ % 1000)));
  }
}
BENCHMARK(BM_PredictRaw);

void BM_LocalContributions(benchmark::State& state) {
  const auto& demo = corpus(1000);
  const auto stats = compute_reference_stats(demo.model, demo.reference);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(local_contributions(demo.model, stats, demo.reference.at(i++ % 1000)));
  }
}
BENCHMARK(BM_LocalContributions);

void BM_MergeAndTopK(benchmark::State& state) {
  const auto& demo = corpus(1000);
  const auto stats = compute_reference_stats(demo.model, demo.reference);
  const auto schema = build_schema(demo.metas);
  const auto& record = demo.reference.at(0);
  const auto set = local_contributions(demo.model, stats, record);
  for (auto _ : state) {
    benchmark::DoNotOptimize(top_k(merge_contributions(schema, set, record)));
  }
}
BENCHMARK(BM_MergeAndTopK);

void BM_ShapleyBruteforce(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::pair<std::string, double>> w;
  for (std::size_t i = 0; i < n; ++i) w.emplace_back("f" + std::to_string(i), 0.1 * static_cast<double>(i + 1));
  const Model model(0.0, w, "y");
  ReferenceStats stats;
  stats.layout = model.layout();
  stats.means.assign(n, 0.5);
  stats.stds.assign(n, 1.0);
  const CaseRecord record("x", model.layout(), std::vector<double>(n, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(shapley_bruteforce(model, stats, record));
}
BENCHMARK(BM_ShapleyBruteforce)->Arg(4)->Arg(8)->Arg(12);

void BM_FindSimilar(benchmark::State& state) {
  const auto& demo = corpus(static_cast<std::size_t>(state.range(0)));
  const auto stats = build_standardizer(demo.reference);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(find_similar(demo.reference.at(i++ % demo.reference.size()), demo.reference, stats, 3));
  }
}
BENCHMARK(BM_FindSimilar)->Arg(1000)->Arg(10000);

void BM_GlobalImportance(benchmark::State& state) {
  const auto& demo = corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(global_importance(demo.model, demo.reference, demo.outcomes));
  }
}
BENCHMARK(BM_GlobalImportance)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_DistributionBundle(benchmark::State& state) {
  const auto& demo = corpus(10000);
  const auto schema = build_schema(demo.metas);
  const auto bins = fit_score_bins(demo.model, demo.reference);
  const SliceIndex index(demo.model, bins, demo.reference);
  int score = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(distribution_bundle(index, demo.reference, demo.outcomes, schema, RiskScore(score)));
    score = score % 20 + 1;
  }
}
BENCHMARK(BM_DistributionBundle)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
