#include <doctest.h>

#include <cmath>

#include "kgex/calibrator.hpp"
#include "kgex/parallel.hpp"
#include "kgex/ranking.hpp"
#include "kgex/trainer.hpp"
#include "support/test_support.hpp"

using namespace kgex;
using namespace kgex::testing;

namespace {

EmbeddingModel random_model(const TripleStore& store, std::uint64_t seed, int k = 8) {
    ModelConfig cfg;
    cfg.k = k;
    cfg.seed = seed;
    return EmbeddingModel::random_init(cfg, store.entity_count(), store.relation_count());
}

}  // namespace

TEST_CASE("a model that separates the true triple perfectly ranks it first") {
    auto store = make_store({{0, 0, 1}}, {}, {{2, 0, 3}}, 6, 1);
    auto model = random_model(store, 1, 4);
    // make (2,0,3) beat every corruption: o = s + p exactly, others far away
    for (EntityId e = 0; e < 6; ++e) {
        auto row = model.entity_vec_mut(e);
        for (int i = 0; i < 4; ++i) row[i] = 100.0 * (e + 1);
    }
    auto p = model.relation_vec_mut(0);
    for (int i = 0; i < 4; ++i) p[i] = 0.0;
    auto s = model.entity_vec_mut(2);
    auto o = model.entity_vec_mut(3);
    for (int i = 0; i < 4; ++i) o[i] = s[i];

    auto report = rank_filtered(model, store, store.test(), RankSide::object);
    REQUIRE(report.ranks.size() == 1);
    CHECK(report.ranks[0] == 1);
    CHECK(report.mrr == 1.0);
}

TEST_CASE("expected rank of a random model is about (e+1)/2") {
    // Monte-Carlo oracle over seeds
    const std::uint32_t e = 40;
    auto store = make_store({{0, 0, 1}}, {}, {{2, 0, 3}}, e, 1);
    double total = 0.0;
    const int runs = 400;
    for (int seed = 0; seed < runs; ++seed) {
        auto model = random_model(store, seed);
        auto report = rank_filtered(model, store, store.test(), RankSide::object);
        total += static_cast<double>(report.ranks[0]);
    }
    const double mean_rank = total / runs;
    const double expected = (e + 1) / 2.0;
    // std error of the mean is ~ e/sqrt(12*runs) ~ 0.58; allow 5 sigma
    CHECK(std::abs(mean_rank - expected) < 3.0);
}

TEST_CASE("filtered corruptions never affect the rank") {
    // two known-true objects for (0, 0, .): the second must be filtered out
    auto store = make_store({{0, 0, 1}, {0, 0, 2}}, {}, {{0, 0, 3}}, 5, 1);
    auto model = random_model(store, 3, 4);
    auto sub = model.entity_vec_mut(0);
    auto rel = model.relation_vec_mut(0);
    for (int i = 0; i < 4; ++i) {
        sub[i] = 1.0;
        rel[i] = 5.0;
    }
    auto o1 = model.entity_vec_mut(1), o2 = model.entity_vec_mut(2), o3 = model.entity_vec_mut(3),
         o4 = model.entity_vec_mut(4);
    for (int i = 0; i < 4; ++i) {
        o1[i] = sub[i] + 5.0;           // exact translation, best possible
        o2[i] = sub[i] + 5.0 + 0.001;   // near-exact, still above the target
        o3[i] = sub[i] + 5.0 + 0.01;    // the test object
        o4[i] = sub[i] + 5.0 + 100.0;   // far away
    }
    auto report = rank_filtered(model, store, store.test(), RankSide::object);
    // only the two filtered (known-true) corruptions outscore the target
    CHECK(report.ranks[0] == 1);
}

TEST_CASE("parallel and serial corruption counting agree bitwise") {
    std::mt19937_64 rng(8);
    auto store = random_store(rng, 200, 4, 400);
    auto model = random_model(store, 5, 16);
    for (int trial = 0; trial < 50; ++trial) {
        Triple t{static_cast<EntityId>(uniform_index(rng, 200)),
                 static_cast<RelationId>(uniform_index(rng, 4)),
                 static_cast<EntityId>(uniform_index(rng, 200))};
        for (bool side : {true, false}) {
            CHECK(count_corruptions_above(model, t, side) ==
                  count_corruptions_above_serial(model, t, side));
        }
    }
}

TEST_CASE("subject-side ranks count subject corruptions") {
    // two known-true subjects for (., 0, 2); target (3, 0, 2) ranks first
    auto store = make_store({{0, 0, 2}, {1, 0, 2}}, {}, {{3, 0, 2}}, 5, 1);
    ModelConfig mc;
    mc.k = 4;
    mc.seed = 2;
    auto model = EmbeddingModel::random_init(mc, 5, 1);
    auto rel = model.relation_vec_mut(0);
    auto obj = model.entity_vec_mut(2);
    for (int i = 0; i < 4; ++i) {
        rel[i] = 5.0;
        obj[i] = 10.0;
    }
    auto set_subject = [&](EntityId e, double offset) {
        auto row = model.entity_vec_mut(e);
        for (int i = 0; i < 4; ++i) row[i] = 5.0 + offset;
    };
    set_subject(0, 0.0);     // exact translation, filtered
    set_subject(1, 0.001);   // near-exact, filtered
    set_subject(3, 0.01);    // the test subject
    set_subject(2, 100.0);   // object entity doubles as a far corruption
    set_subject(4, 100.0);
    auto report = rank_filtered(model, store, store.test(), RankSide::subject);
    REQUIRE(report.ranks.size() == 1);
    CHECK(report.ranks[0] == 1);
}

TEST_CASE("MRR lies in (0,1] and hits are ordered") {
    std::mt19937_64 rng(21);
    auto store = random_store(rng, 50, 3, 200, 0, 30);
    auto model = random_model(store, 9);
    auto report = rank_filtered(model, store, store.test(), RankSide::both);
    CHECK(report.mrr > 0.0);
    CHECK(report.mrr <= 1.0);
    CHECK(report.hits1 <= report.hits10);
    CHECK(report.hits10 <= 1.0);
    CHECK(report.ranks.size() == store.test().size() * 2);
    for (auto r : report.ranks) CHECK(r >= 1);
}

TEST_CASE("rank metrics are identical before and after calibration") {
    auto store = memorization_toy_store(37);
    ModelConfig cfg;
    cfg.k = 8;
    cfg.learning_rate = 1e-2;
    cfg.max_epochs = 60;
    cfg.batch_size = 4;
    auto model = train(store, cfg);
    auto calibrator = Calibrator::fit(model, store, 1, 0);

    auto raw = rank_filtered(model, store, store.test(), RankSide::both);
    auto calibrated = rank_filtered(model, store, store.test(), RankSide::both, &calibrator);
    CHECK(raw.ranks == calibrated.ranks);
    CHECK(raw.mrr == calibrated.mrr);
}
