#include "kgex/ranking.hpp"

#include <algorithm>

#include "kgex/calibrator.hpp"
#include "kgex/parallel.hpp"

namespace kgex {

FilterIndex::FilterIndex(const TripleStore& store) {
    auto ingest = [&](const std::vector<Triple>& split) {
        for (const Triple& t : split) {
            objects_for_sp_[key(t.subject, t.predicate)].push_back(t.object);
            subjects_for_op_[key(t.object, t.predicate)].push_back(t.subject);
        }
    };
    ingest(store.train());
    ingest(store.valid());
    ingest(store.test());
    for (auto& [k, v] : objects_for_sp_) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    for (auto& [k, v] : subjects_for_op_) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
}

std::span<const EntityId> FilterIndex::objects(EntityId s, RelationId p) const {
    auto it = objects_for_sp_.find(key(s, p));
    if (it == objects_for_sp_.end()) return {};
    return it->second;
}

std::span<const EntityId> FilterIndex::subjects(EntityId o, RelationId p) const {
    auto it = subjects_for_op_.find(key(o, p));
    if (it == subjects_for_op_.end()) return {};
    return it->second;
}

bool FilterIndex::contains(const Triple& t) const {
    auto objs = objects(t.subject, t.predicate);
    return std::binary_search(objs.begin(), objs.end(), t.object);
}

std::int64_t count_corruptions_above_serial(const EmbeddingModel& model, const Triple& t,
                                            bool corrupt_subject) {
    const double true_score = model.score(t);
    const auto e = static_cast<std::int64_t>(model.entity_count());
    std::int64_t count = 0;
    for (std::int64_t i = 0; i < e; ++i) {
        Triple c = t;
        (corrupt_subject ? c.subject : c.object) = static_cast<EntityId>(i);
        if (model.score(c) > true_score) ++count;
    }
    return count;
}

std::int64_t count_corruptions_above(const EmbeddingModel& model, const Triple& t, bool corrupt_subject) {
    const int nt = ThreadPolicy::threads();
    if (nt <= 1) return count_corruptions_above_serial(model, t, corrupt_subject);

    const double true_score = model.score(t);
    const auto e = static_cast<std::int64_t>(model.entity_count());
    std::int64_t count = 0;
#ifdef _OPENMP
#pragma omp parallel for num_threads(nt) schedule(static) reduction(+ : count)
#endif
    for (std::int64_t i = 0; i < e; ++i) {
        Triple c = t;
        (corrupt_subject ? c.subject : c.object) = static_cast<EntityId>(i);
        if (model.score(c) > true_score) ++count;
    }
    return count;
}

namespace {

std::int64_t filtered_rank(const EmbeddingModel& model, const FilterIndex& filter, const Triple& t,
                           bool corrupt_subject, const Calibrator* calibrator) {
    // Calibration is strictly monotone, so comparing calibrated values gives
    // the same counts; both keys go through the same transform.
    auto rank_key = [&](double raw) { return calibrator ? calibrator->calibrate(raw) : raw; };
    const double true_key = rank_key(model.score(t));

    std::int64_t higher = 0;
    if (calibrator == nullptr) {
        higher = count_corruptions_above(model, t, corrupt_subject);
    } else {
        const auto e = static_cast<std::int64_t>(model.entity_count());
        std::int64_t count = 0;
        const int nt = ThreadPolicy::threads();
#ifdef _OPENMP
#pragma omp parallel for num_threads(nt) schedule(static) reduction(+ : count) if (nt > 1)
#endif
        for (std::int64_t i = 0; i < e; ++i) {
            Triple c = t;
            (corrupt_subject ? c.subject : c.object) = static_cast<EntityId>(i);
            if (rank_key(model.score(c)) > true_key) ++count;
        }
        higher = count;
    }

    // Remove known-true corruptions that landed in the strictly-higher set.
    auto known = corrupt_subject ? filter.subjects(t.object, t.predicate)
                                 : filter.objects(t.subject, t.predicate);
    std::int64_t known_higher = 0;
    for (EntityId e2 : known) {
        Triple c = t;
        (corrupt_subject ? c.subject : c.object) = e2;
        if (rank_key(model.score(c)) > true_key) ++known_higher;
    }
    return 1 + higher - known_higher;
}

}  // namespace

RankReport rank_filtered(const EmbeddingModel& model, const FilterIndex& filter,
                         std::span<const Triple> triples, RankSide side,
                         const Calibrator* calibrator) {
    RankReport report;
    report.ranks.reserve(triples.size() * (side == RankSide::both ? 2 : 1));
    for (const Triple& t : triples) {
        if (side == RankSide::subject || side == RankSide::both) {
            report.ranks.push_back(filtered_rank(model, filter, t, true, calibrator));
        }
        if (side == RankSide::object || side == RankSide::both) {
            report.ranks.push_back(filtered_rank(model, filter, t, false, calibrator));
        }
    }
    if (!report.ranks.empty()) {
        double rr = 0.0;
        std::int64_t h1 = 0, h10 = 0;
        for (std::int64_t r : report.ranks) {
            rr += 1.0 / static_cast<double>(r);
            if (r <= 1) ++h1;
            if (r <= 10) ++h10;
        }
        const auto n = static_cast<double>(report.ranks.size());
        report.mrr = rr / n;
        report.hits1 = static_cast<double>(h1) / n;
        report.hits10 = static_cast<double>(h10) / n;
    }
    return report;
}

RankReport rank_filtered(const EmbeddingModel& model, const TripleStore& store,
                         std::span<const Triple> triples, RankSide side,
                         const Calibrator* calibrator) {
    FilterIndex filter(store);
    return rank_filtered(model, filter, triples, side, calibrator);
}

}  // namespace kgex
