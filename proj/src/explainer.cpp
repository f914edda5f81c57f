#include "kgex/explainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "kgex/parallel.hpp"

namespace kgex {

const char* to_string(PrototypeStrategy strategy) {
    return strategy == PrototypeStrategy::strict ? "strict" : "permissive";
}

PrototypeStrategy prototype_strategy_from_string(const std::string& name) {
    if (name == "strict") return PrototypeStrategy::strict;
    if (name == "permissive") return PrototypeStrategy::permissive;
    throw Error("unknown prototype strategy: " + name + " (expected strict|permissive)");
}

void ExplainConfig::validate() const {
    if (m < 1) throw Error("explain config: m must be >= 1");
    if (subject_weight < 0 || object_weight < 0)
        throw Error("explain config: weights must be non-negative");
    if (std::abs(subject_weight + object_weight - 1.0) > 1e-12)
        throw Error("explain config: subject and object weights must sum to 1");
    if (hops < 1) throw Error("explain config: hops must be >= 1");
}

ExplainIndexes ExplainIndexes::build(const EmbeddingModel& model, KnnBackend backend,
                                     bool with_relations) {
    ExplainIndexes indexes{NeighborIndex::for_entities(model, backend), std::nullopt,
                           model.fingerprint()};
    if (with_relations) indexes.relations = NeighborIndex::for_relations(model, backend);
    return indexes;
}

namespace {

void check_target_ids(const EmbeddingModel& model, const Triple& target) {
    if (target.subject >= model.entity_count() || target.object >= model.entity_count() ||
        target.predicate >= model.relation_count()) {
        throw Error("explain: target ids out of range");
    }
}

void check_compatibility(const EmbeddingModel& model, const Calibrator& calibrator,
                         const ExplainIndexes& indexes) {
    if (!calibrator.fitted()) throw Error("explain: calibrator not fitted");
    if (indexes.model_fingerprint != model.fingerprint())
        throw Error("explain: stale index (built from a different model state)");
    // fingerprint 0 marks a calibrator fitted outside the model pipeline
    if (calibrator.model_fingerprint() != 0 && calibrator.model_fingerprint() != model.fingerprint())
        throw Error("explain: calibrator was fitted on a different model");
}

// Steps shared by the single and batch paths: cartesian product of the two
// neighbour sets, membership filter, weighted scores, ascending sort.
std::vector<ExampleTriple> filter_examples(const TripleStore& store, const Triple& target,
                                           const NeighbourSet& subject_neighbours,
                                           const NeighbourSet& object_neighbours,
                                           std::span<const RelationId> predicates,
                                           const ExplainConfig& config) {
    std::vector<ExampleTriple> examples;
    for (const Neighbour& s : subject_neighbours) {
        for (const Neighbour& o : object_neighbours) {
            for (RelationId p : predicates) {
                const Triple candidate{s.id, p, o.id};
                if (candidate == target) continue;
                if (!store.contains(candidate)) continue;
                const double score =
                    config.subject_weight * s.distance + config.object_weight * o.distance;
                examples.push_back({candidate, score, s.distance, o.distance});
            }
        }
    }
    std::sort(examples.begin(), examples.end(), [](const ExampleTriple& a, const ExampleTriple& b) {
        return a.score < b.score || (a.score == b.score && a.triple < b.triple);
    });
    if (config.max_examples > 0 && examples.size() > config.max_examples) {
        examples.resize(config.max_examples);
    }
    return examples;
}

Explanation build_explanation(const EmbeddingModel& model, const Calibrator& calibrator,
                              const TripleStore& store, const Triple& target,
                              const NeighbourSet& subject_neighbours,
                              const NeighbourSet& object_neighbours,
                              const std::vector<RelationId>& predicates,
                              const ExplainConfig& config) {
    Explanation result;
    result.target = target;
    result.target_probability = calibrator.calibrate(model.score(target));
    result.examples =
        filter_examples(store, target, subject_neighbours, object_neighbours, predicates, config);
    result.status = result.examples.empty() ? ExplanationStatus::none_found : ExplanationStatus::found;
    return result;
}

std::vector<RelationId> candidate_predicates(const EmbeddingModel& model,
                                             const ExplainIndexes& indexes, const Triple& target,
                                             const ExplainConfig& config) {
    if (config.same_predicate_only) return {target.predicate};
    if (!indexes.relations)
        throw Error("explain: predicate-neighbour mode needs a relation index (build with relations)");
    NeighbourSet near = indexes.relations->query(model.relation_vec(target.predicate), config.m);
    std::vector<RelationId> predicates;
    predicates.reserve(near.size());
    for (const Neighbour& n : near) predicates.push_back(n.id);
    return predicates;
}

}  // namespace

Explanation explain(const EmbeddingModel& model, const Calibrator& calibrator,
                    const TripleStore& store, const ExplainIndexes& indexes, const Triple& target,
                    const ExplainConfig& config) {
    config.validate();
    check_target_ids(model, target);
    check_compatibility(model, calibrator, indexes);

    const NeighbourSet subject_neighbours = indexes.entities.query(model.entity_vec(target.subject), config.m);
    const NeighbourSet object_neighbours = indexes.entities.query(model.entity_vec(target.object), config.m);
    const auto predicates = candidate_predicates(model, indexes, target, config);
    return build_explanation(model, calibrator, store, target, subject_neighbours, object_neighbours,
                             predicates, config);
}

std::vector<BatchEntry> explain_batch(const EmbeddingModel& model, const Calibrator& calibrator,
                                      const TripleStore& store, std::span<const Triple> targets,
                                      const ExplainConfig& config, const ExplainIndexes* prebuilt,
                                      KnnBackend backend) {
    config.validate();
    std::optional<ExplainIndexes> local;
    if (!prebuilt) {
        local = ExplainIndexes::build(model, backend, !config.same_predicate_only);
        prebuilt = &*local;
    }
    check_compatibility(model, calibrator, *prebuilt);

    // one neighbour query per distinct endpoint entity
    std::vector<EntityId> unique_entities;
    unique_entities.reserve(targets.size() * 2);
    for (const Triple& t : targets) {
        if (t.subject < model.entity_count()) unique_entities.push_back(t.subject);
        if (t.object < model.entity_count()) unique_entities.push_back(t.object);
    }
    std::sort(unique_entities.begin(), unique_entities.end());
    unique_entities.erase(std::unique(unique_entities.begin(), unique_entities.end()),
                          unique_entities.end());

    std::unordered_map<EntityId, NeighbourSet> cache;
    cache.reserve(unique_entities.size() * 2);
    for (EntityId e : unique_entities) cache.emplace(e, NeighbourSet{});
    {
        const int nt = ThreadPolicy::threads();
        const auto n = static_cast<std::int64_t>(unique_entities.size());
#ifdef _OPENMP
#pragma omp parallel for num_threads(nt) schedule(dynamic, 8) if (nt > 1)
#endif
        for (std::int64_t i = 0; i < n; ++i) {
            const EntityId e = unique_entities[i];
            cache[e] = prebuilt->entities.query(model.entity_vec(e), config.m);
        }
    }

    std::vector<BatchEntry> results(targets.size());
    {
        const int nt = ThreadPolicy::threads();
        const auto n = static_cast<std::int64_t>(targets.size());
#ifdef _OPENMP
#pragma omp parallel for num_threads(nt) schedule(dynamic, 4) if (nt > 1)
#endif
        for (std::int64_t i = 0; i < n; ++i) {
            const Triple& target = targets[i];
            try {
                check_target_ids(model, target);
                const auto predicates = candidate_predicates(model, *prebuilt, target, config);
                results[i].explanation = build_explanation(model, calibrator, store, target,
                                                           cache.at(target.subject),
                                                           cache.at(target.object), predicates, config);
            } catch (const std::exception& e) {
                results[i].error = e.what();
            }
        }
    }
    return results;
}

Explanation explain_random_baseline(const TripleStore& store, const Triple& target,
                                    std::size_t count, std::uint64_t seed) {
    if (count < 1) throw Error("random baseline: count must be >= 1");
    if (target.predicate >= store.relation_count())
        throw Error("random baseline: predicate id out of range");

    std::vector<Triple> pool;
    for (std::uint32_t idx : store.triples_with_predicate(target.predicate)) {
        const Triple& t = store.train()[idx];
        if (t != target) pool.push_back(t);
    }

    Explanation result;
    result.target = target;
    result.target_probability = std::numeric_limits<double>::quiet_NaN();
    result.scored = false;
    if (pool.empty()) {
        result.status = ExplanationStatus::none_found;
        return result;
    }

    std::mt19937_64 rng(seed);
    const std::size_t take = std::min(count, pool.size());
    for (std::size_t i = 0; i < take; ++i) {
        std::swap(pool[i], pool[i + uniform_index(rng, pool.size() - i)]);
        constexpr double na = std::numeric_limits<double>::quiet_NaN();
        result.examples.push_back({pool[i], na, na, na});
    }
    result.status = ExplanationStatus::found;
    return result;
}

Triple select_target(const EmbeddingModel& model, const Calibrator& calibrator,
                     const TripleStore& store) {
    if (store.test().empty()) throw Error("select_target: test split is empty");

    bool found = false;
    Triple best{};
    double best_prob = -1.0;
    for (const Triple& t : store.test()) {
        if (t.subject == t.object) continue;  // circular
        const double prob = calibrator.calibrate(model.score(t));
        if (prob > best_prob) {
            best_prob = prob;
            best = t;
            found = true;
        }
    }
    if (!found) throw Error("select_target: every test triple is circular (subject == object)");
    return best;
}

}  // namespace kgex
