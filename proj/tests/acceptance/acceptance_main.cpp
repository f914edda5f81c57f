// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its tolerances in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <vector>

#include "kgex/explanation_graph.hpp"
#include "kgex/parallel.hpp"
#include "kgex/roar.hpp"
#include "kgex/snapshot.hpp"
#include "kgex/stats.hpp"
#include "kgex/trainer.hpp"
#include "support/test_support.hpp"

using namespace kgex;
using namespace kgex::testing;

namespace {

struct Check {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& why) {
        if (!ok) {
            pass = false;
            if (detail.tellp() > 0) detail << "; ";
            detail << why;
        }
    }
    void note(const std::string& text) {
        if (detail.tellp() > 0) detail << "; ";
        detail << text;
    }
};

int g_failures = 0;

void run_criterion(int id, const std::string& name, double budget_seconds,
                   const std::function<void(Check&)>& body) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(check);
    } catch (const std::exception& e) {
        check.require(false, std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (budget_seconds > 0) {
        check.require(seconds <= budget_seconds,
                      "exceeded time budget (" + std::to_string(seconds) + " s > " +
                          std::to_string(budget_seconds) + " s)");
    }
    if (!check.pass) ++g_failures;
    std::printf("[%s] criterion %2d: %s (%.1f s)%s%s\n", check.pass ? "PASS" : "FAIL", id,
                name.c_str(), seconds, check.detail.tellp() > 0 ? " -- " : "",
                check.detail.str().c_str());
    std::fflush(stdout);
}

// --- criterion 1 -------------------------------------------------------------

void criterion_knn_equivalence(Check& check) {
    std::mt19937_64 rng(101);
    const std::size_t count = 2000;
    std::size_t mismatches = 0;
    for (std::size_t dim : {std::size_t{8}, std::size_t{64}}) {
        std::vector<double> pts(count * dim);
        for (auto& x : pts) x = uniform_real(rng, -1, 1);
        // duplicated rows force distance ties across ids
        for (int i = 0; i < 50; ++i) {
            std::copy_n(pts.begin() + 2 * i * dim, dim, pts.begin() + (2 * i + 1) * dim);
        }
        auto brute = NeighborIndex::build(pts, count, dim, KnnBackend::brute_force);
        auto tree = NeighborIndex::build(pts, count, dim, KnnBackend::partition_tree);
        for (int q = 0; q < 500; ++q) {
            std::vector<double> query(dim);
            for (auto& x : query) x = uniform_real(rng, -1, 1);
            for (std::size_t m : {std::size_t{1}, std::size_t{25}, std::size_t{2000}}) {
                const auto a = brute.query(query, m);
                const auto b = tree.query(query, m);
                if (a.size() != b.size()) {
                    ++mismatches;
                    continue;
                }
                for (std::size_t i = 0; i < a.size(); ++i) {
                    if (a[i].id != b[i].id || a[i].distance != b[i].distance) {
                        ++mismatches;
                        break;
                    }
                }
            }
        }
    }
    check.require(mismatches == 0, std::to_string(mismatches) + " backend mismatches");
    check.note("500 queries x dims {8,64} x m {1,25,2000}, zero mismatches required");
}

// --- criterion 2 -------------------------------------------------------------

void criterion_explainer_oracle(Check& check) {
    std::mt19937_64 rng(202);
    std::size_t explains = 0, mismatches = 0;
    for (int graph = 0; graph < 20; ++graph) {
        const auto entities = static_cast<std::uint32_t>(50 + uniform_index(rng, 151));  // <= 200
        const auto relations = static_cast<std::uint32_t>(2 + uniform_index(rng, 5));
        const auto triples = std::min<std::size_t>(300 + uniform_index(rng, 1701),       // <= 2000
                                                   std::size_t(entities) * entities / 2);
        auto store = random_store(rng, entities, relations, triples);

        for (int seed = 0; seed < 5; ++seed) {
            ModelConfig cfg;
            cfg.k = 16;
            cfg.seed = mix_seed(graph, seed);
            auto model = EmbeddingModel::random_init(cfg, entities, relations);
            const Calibrator calibrator(1.0, 0.0, 1.0, 0);  // raw sigmoid; examples unaffected
            auto indexes = ExplainIndexes::build(model, KnnBackend::automatic);
            ExplainConfig ecfg;  // m = 25 default

            for (int t = 0; t < 50; ++t) {
                const Triple target{static_cast<EntityId>(uniform_index(rng, entities)),
                                    static_cast<RelationId>(uniform_index(rng, relations)),
                                    static_cast<EntityId>(uniform_index(rng, entities))};
                auto got = explain(model, calibrator, store, indexes, target, ecfg);
                auto s_nn = indexes.entities.query(model.entity_vec(target.subject), ecfg.m);
                auto o_nn = indexes.entities.query(model.entity_vec(target.object), ecfg.m);
                auto expected = exhaustive_example_oracle(store, target, s_nn, o_nn, ecfg);
                ++explains;
                if (got.examples.size() != expected.size()) {
                    ++mismatches;
                    continue;
                }
                for (std::size_t i = 0; i < expected.size(); ++i) {
                    if (!(got.examples[i].triple == expected[i].triple) ||
                        std::abs(got.examples[i].score - expected[i].score) > 1e-12) {
                        ++mismatches;
                        break;
                    }
                }
            }
        }
    }
    check.require(mismatches == 0, std::to_string(mismatches) + " oracle mismatches");
    check.note(std::to_string(explains) + " explanations vs exhaustive S*O oracle, scores to 1e-12");
}

// --- criterion 3 -------------------------------------------------------------

void criterion_memorization(Check& check) {
    auto store = memorization_toy_store();
    ModelConfig cfg;
    cfg.kind = ModelKind::TransE;
    cfg.k = 32;
    cfg.eta = 10;
    cfg.learning_rate = 1e-3;
    cfg.max_epochs = 200;
    cfg.batch_size = 2;
    auto model = train(store, cfg);
    auto report = rank_filtered(model, store, store.train(), RankSide::both);
    check.require(report.mrr >= 0.95, "filtered train MRR " + std::to_string(report.mrr) + " < 0.95");
    check.note("TransE k=32 eta=10 lr=1e-3, 200 epochs, 30 entities / 200 triples, MRR " +
               std::to_string(report.mrr));
}

// --- criterion 4 -------------------------------------------------------------

void criterion_gradient_checks(Check& check) {
    for (ModelKind kind : {ModelKind::TransE, ModelKind::DistMult, ModelKind::ComplEx}) {
        std::mt19937_64 rng(404);
        ModelConfig cfg;
        cfg.kind = kind;
        cfg.k = 6;
        cfg.seed = 11;
        auto model = EmbeddingModel::random_init(cfg, 12, 4);

        std::vector<Triple> positives;
        std::vector<std::vector<Corruption>> corruptions;
        for (int i = 0; i < 5; ++i) {
            positives.push_back({static_cast<EntityId>(uniform_index(rng, 12)),
                                 static_cast<RelationId>(uniform_index(rng, 4)),
                                 static_cast<EntityId>(uniform_index(rng, 12))});
            std::vector<Corruption> cs(6);
            for (auto& c : cs) {
                c.corrupt_subject = uniform_index(rng, 2) == 0;
                c.entity = static_cast<EntityId>(uniform_index(rng, 12));
            }
            corruptions.push_back(cs);
        }

        GradBuffer grad;
        grad.init(12, 4, model.dim());
        batch_loss_and_grad(model, positives, corruptions, 1e-3, grad);

        auto loss_at = [&]() {
            GradBuffer scratch;
            scratch.init(12, 4, model.dim());
            return batch_loss_and_grad(model, positives, corruptions, 1e-3, scratch);
        };
        const double h = 1e-5;
        double worst = 0.0;
        auto probe = [&](double analytic, double* param) {
            const double saved = *param;
            *param = saved + h;
            const double up = loss_at();
            *param = saved - h;
            const double down = loss_at();
            *param = saved;
            const double numeric = (up - down) / (2.0 * h);
            const double rel =
                std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-3});
            worst = std::max(worst, rel);
        };
        const std::size_t d = model.dim();
        for (EntityId e : grad.touched_entities) {
            for (std::size_t i = 0; i < d; ++i) {
                probe(grad.entity_grad[e * d + i], &model.entity_table_mut()[e * d + i]);
            }
        }
        for (RelationId r : grad.touched_relations) {
            for (std::size_t i = 0; i < d; ++i) {
                probe(grad.relation_grad[r * d + i], &model.relation_table_mut()[r * d + i]);
            }
        }
        check.require(worst <= 1e-4, std::string(to_string(kind)) + " worst relative error " +
                                         std::to_string(worst) + " > 1e-4");
    }
    check.note("central differences h=1e-5, all three model kinds, rel err <= 1e-4");
}

// --- criterion 5 -------------------------------------------------------------

void criterion_calibration(Check& check) {
    double brier_pre_sum = 0, brier_post_sum = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto store = structured_store(seed, 10, 3, 3, 20, 20);
        ModelConfig cfg;
        cfg.k = 8;
        cfg.learning_rate = 1e-2;
        cfg.max_epochs = 80;
        cfg.batch_size = 4;
        cfg.seed = seed;
        auto model = train(store, cfg);
        auto calibrator = Calibrator::fit(model, store, 1, seed);

        // held-out labeled sample with fresh corruptions
        auto sample = calibration_sample(model, store, 1, mix_seed(seed, 99));
        const auto [lo_it, hi_it] = std::minmax_element(sample.scores.begin(), sample.scores.end());
        const double lo = *lo_it, hi = *hi_it;
        std::vector<double> pre, post;
        for (double s : sample.scores) {
            pre.push_back(hi > lo ? (s - lo) / (hi - lo) : 0.5);
            const double p = calibrator.calibrate(s);
            check.require(p > 0.0 && p < 1.0, "calibrated output outside (0,1)");
            post.push_back(p);
        }
        brier_pre_sum += brier_score(pre, sample.labels);
        brier_post_sum += brier_score(post, sample.labels);

        auto raw_ranks = rank_filtered(model, store, store.test(), RankSide::both);
        auto cal_ranks = rank_filtered(model, store, store.test(), RankSide::both, &calibrator);
        check.require(raw_ranks.ranks == cal_ranks.ranks,
                      "rank metrics changed under calibration (seed " + std::to_string(seed) + ")");
    }
    check.require(brier_post_sum <= brier_pre_sum,
                  "mean Brier after calibration " + std::to_string(brier_post_sum / 5) +
                      " > before " + std::to_string(brier_pre_sum / 5));
    check.note("5 seeds; Brier " + std::to_string(brier_pre_sum / 5) + " -> " +
               std::to_string(brier_post_sum / 5));
}

// --- criterion 6 -------------------------------------------------------------

// Star toy: predicate 0 holds exactly 30 train triples (a_i -> hub) and the
// target (a_t -> hub) is held out in test; background relations keep the a
// entities interchangeable and give calibration a class-independent anchor.
struct RoarToy {
    TripleStore store;
    EmbeddingModel model;
    Calibrator calibrator;
    ExplainIndexes indexes;
    Triple target;
    Explanation explanation;
};

RoarToy make_roar_toy(std::uint64_t seed) {
    const EntityId hub = 31;
    std::vector<Triple> background;
    for (EntityId a = 0; a <= 30; ++a) {
        for (EntityId c = 32; c <= 36; ++c) background.push_back({a, 1, c});
    }
    for (EntityId c = 32; c <= 36; ++c) {
        for (EntityId d = 37; d <= 41; ++d) background.push_back({c, 2, d});
    }
    std::mt19937_64 rng(seed);
    std::shuffle(background.begin(), background.end(), rng);
    std::vector<Triple> valid(background.begin(), background.begin() + 12);
    std::vector<Triple> test(background.begin() + 12, background.begin() + 17);
    std::vector<Triple> train_triples(background.begin() + 17, background.end());

    const auto target_subject = static_cast<EntityId>(uniform_index(rng, 31));
    for (EntityId a = 0; a <= 30; ++a) {
        if (a != target_subject) train_triples.push_back({a, 0, hub});
    }
    const Triple target{target_subject, 0, hub};
    test.push_back(target);
    auto store = make_store(std::move(train_triples), std::move(valid), std::move(test), 42, 3);

    ModelConfig cfg;
    cfg.k = 8;
    cfg.eta = 5;
    cfg.learning_rate = 1e-2;
    cfg.max_epochs = 60;
    cfg.batch_size = 2;
    cfg.seed = seed;
    auto model = train(store, cfg);
    auto calibrator = Calibrator::fit(model, store, 1, seed);
    auto indexes = ExplainIndexes::build(model);

    ExplainConfig ecfg;
    ecfg.m = 2;
    auto explanation = explain(model, calibrator, store, indexes, target, ecfg);
    if (explanation.examples.empty()) {
        throw Error("roar toy: explanation none-found (seed " + std::to_string(seed) + ")");
    }
    return {std::move(store), std::move(model), std::move(calibrator), std::move(indexes), target,
            std::move(explanation)};
}

void criterion_roar(Check& check) {
    // exact zero-mutation identity
    {
        auto store = structured_store(606, 10, 3, 3, 10, 10);
        ModelConfig cfg;
        cfg.k = 8;
        cfg.learning_rate = 1e-2;
        cfg.batch_size = 2;
        cfg.max_epochs = 20;
        Scenario scenario{RoarKind::roar, RoarSubset::top1, {20}, ExplainerKind::example, 0};
        auto report = run_roar_with_mutation(store, cfg, store.test().front(), Mutation{}, scenario);
        for (const auto& row : report.rows) {
            check.require(row.mean_diff_pct == 0.0 && row.target_diff_pct == 0.0,
                          "zero-mutation differences not exactly zero");
            check.require(row.pearson_r == 1.0, "zero-mutation Pearson r != 1");
            check.require(std::abs(row.slope - 1.0) <= 1e-9, "zero-mutation slope off by > 1e-9");
        }
    }

    // trend over 5 seeds at the first checkpoint; the retrained runs use a
    // gentler learning rate so evidence effects dominate trajectory noise
    const int first_checkpoint = 20;
    double rev_all = 0, rev_one = 0, roar_one = 0;
    int seeds_used = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto toy = make_roar_toy(seed);
        ModelConfig cfg = toy.model.config();
        cfg.learning_rate = 3e-3;
        auto run_one = [&](RoarKind kind, RoarSubset subset) {
            Scenario scenario{kind, subset, {first_checkpoint}, ExplainerKind::example, seed};
            auto report = run_roar(toy.store, cfg, toy.target, toy.explanation, scenario);
            return report.rows.front().target_diff_pct;
        };
        rev_all += run_one(RoarKind::rev_roar, RoarSubset::all);
        rev_one += run_one(RoarKind::rev_roar, RoarSubset::top1);
        roar_one += run_one(RoarKind::roar, RoarSubset::top1);
        ++seeds_used;
    }
    rev_all /= seeds_used;
    rev_one /= seeds_used;
    roar_one /= seeds_used;
    std::ostringstream trend;
    trend << "mean drops (pp) at epoch " << first_checkpoint << ": rev-all " << rev_all
          << ", rev-1 " << rev_one << ", roar-1 " << roar_one;
    check.note(trend.str());
    check.require(rev_all >= rev_one, "rev-ROAR-all drop < rev-ROAR-1 drop");
    check.require(rev_one >= roar_one, "rev-ROAR-1 drop < ROAR-1 drop");
    check.require(roar_one >= -1.0, "ROAR-1 drop below -1 percentage point");
}

// --- criterion 7 -------------------------------------------------------------

void criterion_baseline_plumbing(Check& check) {
    // paired rows from the comparison harness
    {
        auto store = structured_store(707, 10, 3, 3, 10, 10);
        ModelConfig cfg;
        cfg.k = 8;
        cfg.learning_rate = 1e-2;
        cfg.batch_size = 2;
        cfg.max_epochs = 30;
        auto model = train(store, cfg);
        auto calibrator = Calibrator::fit(model, store, 1, 0);
        auto indexes = ExplainIndexes::build(model);
        ExplainConfig ecfg;
        ecfg.m = 8;
        Triple target{};
        bool found = false;
        for (const Triple& t : store.test()) {
            auto e = explain(model, calibrator, store, indexes, t, ecfg);
            if (!e.examples.empty()) {
                target = t;
                found = true;
                break;
            }
        }
        check.require(found, "no explainable target on the comparison toy");
        if (found) {
            ScenarioGrid grid;
            grid.kinds = {RoarKind::roar};
            grid.subsets = {RoarSubset::top1};
            grid.checkpoints = {20};
            auto rows = compare_explainers(store, cfg, model, calibrator, indexes, target, ecfg,
                                           grid);
            check.require(rows.size() == 2, "expected one example row paired with one random row");
            bool has_example = false, has_random = false;
            for (const auto& r : rows) {
                if (r.explainer == ExplainerKind::example) has_example = true;
                if (r.explainer == ExplainerKind::random_baseline) has_random = true;
            }
            check.require(has_example && has_random, "missing a paired explainer row");
        }
    }

    // soundness invariant across 1,000 generated explanations
    {
        std::mt19937_64 rng(777);
        std::size_t produced = 0, violations = 0;
        while (produced < 1000) {
            const auto entities = static_cast<std::uint32_t>(40 + uniform_index(rng, 80));
            auto store = random_store(rng, entities, 4, 400);
            ModelConfig cfg;
            cfg.k = 8;
            cfg.seed = produced;
            auto model = EmbeddingModel::random_init(cfg, entities, 4);
            const Calibrator calibrator(1.0, 0.0, 1.0, 0);
            auto indexes = ExplainIndexes::build(model);
            ExplainConfig ecfg;
            ecfg.m = 15;
            for (int t = 0; t < 100 && produced < 1000; ++t) {
                const Triple target{static_cast<EntityId>(uniform_index(rng, entities)),
                                    static_cast<RelationId>(uniform_index(rng, 4)),
                                    static_cast<EntityId>(uniform_index(rng, entities))};
                auto e = explain(model, calibrator, store, indexes, target, ecfg);
                ++produced;
                for (const auto& ex : e.examples) {
                    if (!store.contains(ex.triple) || ex.triple.predicate != target.predicate ||
                        ex.triple == target) {
                        ++violations;
                    }
                }
            }
        }
        check.require(violations == 0,
                      std::to_string(violations) + " soundness violations in 1000 explanations");
    }

    // chi-square uniformity of the random baseline
    {
        std::vector<Triple> train;
        for (EntityId i = 0; i < 10; ++i) train.push_back({i, 0, static_cast<EntityId>(i + 10)});
        auto store = make_store(train, {}, {}, 20, 1);
        const Triple target{0, 0, 5};
        std::map<Triple, int> counts;
        const int draws = 10000;
        for (int i = 0; i < draws; ++i) {
            auto result = explain_random_baseline(store, target, 1, 50000 + i);
            counts[result.examples.at(0).triple]++;
        }
        double chi2 = 0.0;
        const double expected = draws / 10.0;
        for (const auto& [t, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
        const double p = chi2_sf(chi2, 9);
        check.require(p > 0.01, "chi-square uniformity p = " + std::to_string(p) + " <= 0.01");
        check.note("chi2 p = " + std::to_string(p));
    }
}

// --- criterion 8 -------------------------------------------------------------

void criterion_batch_mode(Check& check) {
    // element-wise equality on a trained pipeline
    {
        auto store = structured_store(808, 8, 5, 3, 24, 24);
        ModelConfig cfg;
        cfg.k = 8;
        cfg.learning_rate = 1e-2;
        cfg.batch_size = 8;
        cfg.max_epochs = 40;
        auto model = train(store, cfg);
        auto calibrator = Calibrator::fit(model, store, 1, 0);
        auto indexes = ExplainIndexes::build(model);
        ExplainConfig ecfg;
        ecfg.m = 10;
        auto batch = explain_batch(model, calibrator, store, store.test(), ecfg, &indexes);
        for (std::size_t i = 0; i < store.test().size(); ++i) {
            auto single = explain(model, calibrator, store, indexes, store.test()[i], ecfg);
            bool equal = batch[i].ok() &&
                         batch[i].explanation->examples.size() == single.examples.size() &&
                         batch[i].explanation->target_probability == single.target_probability;
            if (equal) {
                for (std::size_t j = 0; j < single.examples.size(); ++j) {
                    const auto& a = batch[i].explanation->examples[j];
                    const auto& b = single.examples[j];
                    if (!(a.triple == b.triple) || a.score != b.score) {
                        equal = false;
                        break;
                    }
                }
            }
            check.require(equal, "batch result " + std::to_string(i) + " differs from sequential");
        }
    }

    // throughput smoke at e=5000, k=64, m=25
    {
        std::mt19937_64 rng(888);
        const std::uint32_t entities = 5000;
        auto store = random_store(rng, entities, 8, 20000);
        ModelConfig cfg;
        cfg.k = 64;
        cfg.seed = 1;
        auto model = EmbeddingModel::random_init(cfg, entities, 8);
        const Calibrator calibrator(1.0, 0.0, 1.0, 0);
        ExplainConfig ecfg;  // m = 25
        std::vector<Triple> targets;
        for (int i = 0; i < 200; ++i) {
            targets.push_back({static_cast<EntityId>(uniform_index(rng, entities)),
                               static_cast<RelationId>(uniform_index(rng, 8)),
                               static_cast<EntityId>(uniform_index(rng, entities))});
        }
        const auto start = std::chrono::steady_clock::now();
        auto results = explain_batch(model, calibrator, store, targets, ecfg, nullptr,
                                     KnnBackend::automatic);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const double per_triple_ms = seconds * 1000.0 / targets.size();
        check.require(per_triple_ms <= 100.0,
                      "batch throughput " + std::to_string(per_triple_ms) + " ms/triple > 100");
        check.note("throughput " + std::to_string(per_triple_ms) +
                   " ms/triple at e=5000, k=64, m=25 (index build included)");
        (void)results;
    }
}

// --- criterion 9 -------------------------------------------------------------

void criterion_prototype_algebra(Check& check) {
    std::mt19937_64 rng(909);
    for (int graph = 0; graph < 20; ++graph) {
        auto store = random_store(rng, 30, 5, 150);
        const Triple target = store.train()[uniform_index(rng, store.train().size())];
        std::vector<Triple> examples;
        for (int i = 0; i < 3; ++i) {
            examples.push_back(store.train()[uniform_index(rng, store.train().size())]);
        }
        for (int n : {1, 2}) {
            auto strict = aggregate_prototype(store, target, examples, n, PrototypeStrategy::strict);
            auto permissive =
                aggregate_prototype(store, target, examples, n, PrototypeStrategy::permissive);

            // oracle: recompute per-level predicate sets by direct enumeration
            auto level_predicates = [&](const Triple& t) {
                auto hood = triple_neighbourhood(store, t, n);
                return hood.predicates;
            };
            auto target_preds = level_predicates(target);
            std::vector<std::vector<std::set<RelationId>>> example_preds;
            for (const Triple& ex : examples) example_preds.push_back(level_predicates(ex));

            for (int h = 0; h < n; ++h) {
                std::map<RelationId, int> expected_perm;
                for (RelationId p : target_preds[h]) {
                    int c = 0;
                    for (const auto& ep : example_preds) {
                        if (ep[h].count(p)) ++c;
                    }
                    if (c > 0) expected_perm[p] = c;
                }
                check.require(permissive.levels[h] == expected_perm,
                              "permissive level mismatch vs enumeration oracle");
                for (const auto& [p, w] : strict.levels[h]) {
                    check.require(w == 1, "strict weight != 1");
                    auto it = permissive.levels[h].find(p);
                    const bool contained = it != permissive.levels[h].end() && it->second >= 1 &&
                                           it->second <= static_cast<int>(examples.size());
                    check.require(contained, "strict predicate missing from permissive prototype");
                    if (it != permissive.levels[h].end()) {
                        check.require(it->second == static_cast<int>(examples.size()),
                                      "strict predicate without full example support");
                    }
                }
                for (const auto& [p, w] : permissive.levels[h]) {
                    check.require(w >= 1 && w <= static_cast<int>(examples.size()),
                                  "permissive weight outside [1, example count]");
                }
            }
        }
    }
    check.note("20 random graphs, n in {1,2}, strict subset of permissive with bounded weights");
}

}  // namespace

int main() {
    std::printf("kgex acceptance suite\n");
    run_criterion(1, "kNN backends equal the exhaustive oracle", 5.0, criterion_knn_equivalence);
    run_criterion(2, "explainer equals the exhaustive S*O oracle", 60.0, criterion_explainer_oracle);
    run_criterion(3, "toy-graph memorization reaches filtered train MRR >= 0.95", 120.0,
                  criterion_memorization);
    run_criterion(4, "analytic gradients match finite differences", 0.0, criterion_gradient_checks);
    run_criterion(5, "calibration improves Brier and preserves ranking", 0.0, criterion_calibration);
    run_criterion(6, "ROAR identity and evidence-removal trend", 600.0, criterion_roar);
    run_criterion(7, "baseline comparison plumbing, soundness, uniformity", 0.0,
                  criterion_baseline_plumbing);
    run_criterion(8, "batch mode equals sequential and meets throughput", 0.0, criterion_batch_mode);
    run_criterion(9, "prototype algebra matches the enumeration oracle", 0.0,
                  criterion_prototype_algebra);
    std::printf("[DOCUMENTED] criterion 10: full-scale benchmark reproduction is a documented "
                "multi-hour profile (see README), not a gating check\n");

    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
