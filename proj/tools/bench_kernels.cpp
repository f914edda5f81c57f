// Serial-vs-OpenMP comparison for the three hot kernels: brute-force kNN
// queries, all-entity corruption scoring, and batch explanation.
//
//   ./kgex_bench                      # all benchmarks
//   ./kgex_bench --benchmark_filter=knn

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "kgex/explainer.hpp"
#include "kgex/parallel.hpp"
#include "kgex/ranking.hpp"
#include "kgex/triple_store.hpp"

using namespace kgex;

namespace {

std::vector<double> random_points(std::size_t count, std::size_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> pts(count * dim);
    for (auto& x : pts) x = uniform_real(rng, -1, 1);
    return pts;
}

EmbeddingModel random_model(std::uint32_t entities, std::uint32_t relations, int k) {
    ModelConfig cfg;
    cfg.k = k;
    cfg.seed = 7;
    return EmbeddingModel::random_init(cfg, entities, relations);
}

TripleStore random_store(std::uint32_t entities, std::uint32_t relations, std::size_t triples) {
    std::mt19937_64 rng(11);
    std::set<Triple> seen;
    while (seen.size() < triples) {
        seen.insert({static_cast<EntityId>(uniform_index(rng, entities)),
                     static_cast<RelationId>(uniform_index(rng, relations)),
                     static_cast<EntityId>(uniform_index(rng, entities))});
    }
    auto entities_dict = std::make_shared<Dictionary>();
    auto relations_dict = std::make_shared<Dictionary>();
    for (std::uint32_t i = 0; i < entities; ++i) entities_dict->get_or_add("e" + std::to_string(i));
    for (std::uint32_t i = 0; i < relations; ++i) relations_dict->get_or_add("r" + std::to_string(i));
    return TripleStore({seen.begin(), seen.end()}, {}, {}, entities_dict, relations_dict);
}

struct ScopedDeterministic {
    bool saved = ThreadPolicy::deterministic;
    explicit ScopedDeterministic(bool on) { ThreadPolicy::deterministic = on; }
    ~ScopedDeterministic() { ThreadPolicy::deterministic = saved; }
};

// --- brute-force kNN query ---------------------------------------------------

void bm_knn_brute(benchmark::State& state, bool parallel) {
    const std::size_t count = static_cast<std::size_t>(state.range(0)), dim = 64, m = 25;
    auto pts = random_points(count, dim, 3);
    auto index = NeighborIndex::build(pts, count, dim, KnnBackend::brute_force);
    std::vector<double> query(dim, 0.1);
    ScopedDeterministic mode(!parallel);
    for (auto _ : state) {
        auto result = parallel ? index.query(query, m) : index.query_serial(query, m);
        benchmark::DoNotOptimize(result);
    }
    state.SetItemsProcessed(state.iterations() * count);
}

void bm_knn_tree(benchmark::State& state) {
    const std::size_t count = static_cast<std::size_t>(state.range(0)), dim = 64, m = 25;
    auto pts = random_points(count, dim, 3);
    auto index = NeighborIndex::build(pts, count, dim, KnnBackend::partition_tree);
    std::vector<double> query(dim, 0.1);
    for (auto _ : state) {
        auto result = index.query(query, m);
        benchmark::DoNotOptimize(result);
    }
    state.SetItemsProcessed(state.iterations() * count);
}

// --- all-entity corruption scoring -------------------------------------------

void bm_rank_kernel(benchmark::State& state, bool parallel) {
    const auto entities = static_cast<std::uint32_t>(state.range(0));
    auto model = random_model(entities, 8, 64);
    const Triple t{1, 2, 3};
    for (auto _ : state) {
        const auto count = parallel ? count_corruptions_above(model, t, false)
                                    : count_corruptions_above_serial(model, t, false);
        benchmark::DoNotOptimize(count);
    }
    state.SetItemsProcessed(state.iterations() * entities);
}

// --- batch explanation --------------------------------------------------------

void bm_explain_batch(benchmark::State& state, bool parallel) {
    const std::uint32_t entities = 2000;
    auto store = random_store(entities, 8, 10000);
    auto model = random_model(entities, 8, 32);
    const Calibrator calibrator(1.0, 0.0, 1.0, 0);
    auto indexes = ExplainIndexes::build(model, KnnBackend::partition_tree);
    ExplainConfig cfg;  // m = 25
    std::mt19937_64 rng(5);
    std::vector<Triple> targets;
    for (int i = 0; i < 64; ++i) {
        targets.push_back({static_cast<EntityId>(uniform_index(rng, entities)),
                           static_cast<RelationId>(uniform_index(rng, 8)),
                           static_cast<EntityId>(uniform_index(rng, entities))});
    }
    ScopedDeterministic mode(!parallel);
    for (auto _ : state) {
        auto results = explain_batch(model, calibrator, store, targets, cfg, &indexes);
        benchmark::DoNotOptimize(results);
    }
    state.SetItemsProcessed(state.iterations() * targets.size());
}

}  // namespace

BENCHMARK_CAPTURE(bm_knn_brute, serial, false)->Arg(5000)->Arg(20000);
BENCHMARK_CAPTURE(bm_knn_brute, openmp, true)->Arg(5000)->Arg(20000);
BENCHMARK(bm_knn_tree)->Arg(5000)->Arg(20000);
BENCHMARK_CAPTURE(bm_rank_kernel, serial, false)->Arg(5000)->Arg(20000);
BENCHMARK_CAPTURE(bm_rank_kernel, openmp, true)->Arg(5000)->Arg(20000);
BENCHMARK_CAPTURE(bm_explain_batch, serial, false);
BENCHMARK_CAPTURE(bm_explain_batch, openmp, true);

BENCHMARK_MAIN();
