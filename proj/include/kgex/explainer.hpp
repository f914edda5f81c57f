#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgex/calibrator.hpp"
#include "kgex/embedding_model.hpp"
#include "kgex/neighbor_index.hpp"
#include "kgex/triple_store.hpp"

namespace kgex {

enum class PrototypeStrategy { strict, permissive };

const char* to_string(PrototypeStrategy strategy);
PrototypeStrategy prototype_strategy_from_string(const std::string& name);

struct ExplainConfig {
    std::size_t m = 25;             // neighbours per endpoint
    double subject_weight = 0.5;    // weights must sum to 1
    double object_weight = 0.5;
    std::size_t max_examples = 0;   // 0 = unlimited
    bool same_predicate_only = true;
    int hops = 1;                   // neighbourhood depth for the prototype
    PrototypeStrategy strategy = PrototypeStrategy::permissive;

    void validate() const;
};

struct ExampleTriple {
    Triple triple;
    double score;             // subject_weight*subject_distance + object_weight*object_distance
    double subject_distance;  // lower = closer
    double object_distance;
};

enum class ExplanationStatus { found, none_found };

struct Explanation {
    Triple target{};
    double target_probability = 0.0;  // NaN for the random baseline (no model involved)
    std::vector<ExampleTriple> examples;
    ExplanationStatus status = ExplanationStatus::none_found;
    bool scored = true;  // false for the random baseline: distances not applicable
};

// Entity index queried with both endpoints of the target; the relation index
// only exists for the experimental predicate-neighbour mode.
struct ExplainIndexes {
    NeighborIndex entities;
    std::optional<NeighborIndex> relations;
    std::uint64_t model_fingerprint = 0;

    static ExplainIndexes build(const EmbeddingModel& model,
                                KnnBackend backend = KnnBackend::automatic,
                                bool with_relations = false);
};

// Influential-example search: the target's endpoints are looked up in the
// embedding space (m neighbours each, with distances), the cartesian product
// of the two neighbour sets is filtered down to known train triples carrying
// the target's predicate, and survivors are ranked by the weighted endpoint
// distance (lower = closer). An empty survivor set is a valid none-found
// result, not an error.
Explanation explain(const EmbeddingModel& model, const Calibrator& calibrator,
                    const TripleStore& store, const ExplainIndexes& indexes, const Triple& target,
                    const ExplainConfig& config);

struct BatchEntry {
    std::optional<Explanation> explanation;
    std::string error;  // non-empty when this target failed
    bool ok() const { return explanation.has_value(); }
};

// Batch mode: neighbour queries are deduplicated per entity and evaluated in
// parallel; each entry equals the sequential explain() result exactly and
// output order matches input order. Per-target failures land in their slot
// without aborting the batch.
std::vector<BatchEntry> explain_batch(const EmbeddingModel& model, const Calibrator& calibrator,
                                      const TripleStore& store, std::span<const Triple> targets,
                                      const ExplainConfig& config,
                                      const ExplainIndexes* prebuilt = nullptr,
                                      KnnBackend backend = KnnBackend::automatic);

// Uniform sample (without replacement) of train triples sharing the target's
// predicate, target excluded; no usable distances, so entries are unscored.
Explanation explain_random_baseline(const TripleStore& store, const Triple& target,
                                    std::size_t count, std::uint64_t seed);

// Highest-calibrated-probability test triple whose subject differs from its
// object; ties resolve to the earliest test triple.
Triple select_target(const EmbeddingModel& model, const Calibrator& calibrator,
                     const TripleStore& store);

}  // namespace kgex
