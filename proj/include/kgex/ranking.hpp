#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "kgex/embedding_model.hpp"
#include "kgex/triple_store.hpp"

namespace kgex {

class Calibrator;

enum class RankSide { subject, object, both };

struct RankReport {
    // One filtered rank per (triple, side); with RankSide::both the subject
    // rank precedes the object rank for each triple.
    std::vector<std::int64_t> ranks;
    double mrr = 0.0;
    double hits1 = 0.0;
    double hits10 = 0.0;
};

// Known-true lookups over train + valid + test, used to drop corruptions
// that are themselves true triples.
class FilterIndex {
public:
    explicit FilterIndex(const TripleStore& store);

    std::span<const EntityId> objects(EntityId s, RelationId p) const;
    std::span<const EntityId> subjects(EntityId o, RelationId p) const;
    bool contains(const Triple& t) const;

private:
    static std::uint64_t key(std::uint32_t a, std::uint32_t b) {
        return (std::uint64_t(a) << 32) | b;
    }
    std::unordered_map<std::uint64_t, std::vector<EntityId>> objects_for_sp_;
    std::unordered_map<std::uint64_t, std::vector<EntityId>> subjects_for_op_;
};

// Count of entities whose corruption of `t` on the given side scores strictly
// above the true triple's score. The OpenMP path and the serial reference are
// bitwise-identical (integer reduction over exact comparisons).
std::int64_t count_corruptions_above(const EmbeddingModel& model, const Triple& t, bool corrupt_subject);
std::int64_t count_corruptions_above_serial(const EmbeddingModel& model, const Triple& t,
                                            bool corrupt_subject);

// Filtered ranking: rank = 1 + #(strictly higher corruptions not present in
// train/valid/test). Ties count only strictly-higher scores (optimistic).
// When `calibrator` is given, ranking keys are calibrated probabilities.
RankReport rank_filtered(const EmbeddingModel& model, const TripleStore& store,
                         std::span<const Triple> triples, RankSide side,
                         const Calibrator* calibrator = nullptr);
RankReport rank_filtered(const EmbeddingModel& model, const FilterIndex& filter,
                         std::span<const Triple> triples, RankSide side,
                         const Calibrator* calibrator = nullptr);

}  // namespace kgex
