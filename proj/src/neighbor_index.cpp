#include "kgex/neighbor_index.hpp"

#include <algorithm>
#include <cmath>

#include "kgex/parallel.hpp"

namespace kgex {

const char* to_string(KnnBackend backend) {
    switch (backend) {
        case KnnBackend::brute_force: return "brute-force";
        case KnnBackend::partition_tree: return "partition-tree";
        case KnnBackend::automatic: return "auto";
    }
    return "?";
}

KnnBackend knn_backend_from_string(const std::string& name) {
    if (name == "brute-force" || name == "brute") return KnnBackend::brute_force;
    if (name == "partition-tree" || name == "tree") return KnnBackend::partition_tree;
    if (name == "auto") return KnnBackend::automatic;
    throw Error("unknown kNN backend: " + name + " (expected brute-force|partition-tree|auto)");
}

class NeighborIndex::TopM {
public:
    explicit TopM(std::size_t m) : m_(m) { heap_.reserve(m); }

    void offer(Candidate c) {
        if (heap_.size() < m_) {
            heap_.push_back(c);
            std::push_heap(heap_.begin(), heap_.end());
        } else if (c < heap_.front()) {
            std::pop_heap(heap_.begin(), heap_.end());
            heap_.back() = c;
            std::push_heap(heap_.begin(), heap_.end());
        }
    }

    bool full() const { return heap_.size() == m_; }
    double worst_d2() const { return heap_.front().d2; }

    std::vector<Candidate> sorted() && {
        std::sort(heap_.begin(), heap_.end());
        return std::move(heap_);
    }
    const std::vector<Candidate>& raw() const { return heap_; }

private:
    std::size_t m_;
    std::vector<Candidate> heap_;  // max-heap under Candidate::operator<
};

double NeighborIndex::dist2(std::span<const double> a, const double* b) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

NeighborIndex NeighborIndex::build(std::span<const double> points, std::size_t count, std::size_t dim,
                                   KnnBackend backend, std::size_t auto_tree_threshold) {
    if (count == 0 || dim == 0) throw Error("kNN index: empty point set");
    if (points.size() != count * dim) throw Error("kNN index: point buffer size mismatch");
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            if (!std::isfinite(points[i * dim + j])) {
                throw Error("kNN index: non-finite coordinate in point " + std::to_string(i));
            }
        }
    }

    NeighborIndex index;
    index.points_.assign(points.begin(), points.end());
    index.count_ = count;
    index.dim_ = dim;
    index.backend_ = backend == KnnBackend::automatic
                         ? (count >= auto_tree_threshold ? KnnBackend::partition_tree
                                                         : KnnBackend::brute_force)
                         : backend;
    std::uint64_t h = fnv1a64(&count, sizeof(count));
    h = fnv1a64(&dim, sizeof(dim), h);
    index.fingerprint_ = fnv1a64(points.data(), points.size() * sizeof(double), h);

    if (index.backend_ == KnnBackend::partition_tree) {
        index.order_.resize(count);
        for (std::uint32_t i = 0; i < count; ++i) index.order_[i] = i;
        index.nodes_.reserve(2 * count / 8 + 2);
        index.root_ = index.build_tree(0, static_cast<std::uint32_t>(count));
    }
    return index;
}

NeighborIndex NeighborIndex::for_entities(const EmbeddingModel& model, KnnBackend backend) {
    try {
        return build(model.entity_table(), model.entity_count(),
                     static_cast<std::size_t>(model.dim()), backend);
    } catch (const Error& e) {
        throw Error(std::string("entity index: ") + e.what());
    }
}

NeighborIndex NeighborIndex::for_relations(const EmbeddingModel& model, KnnBackend backend) {
    return build(model.relation_table(), model.relation_count(),
                 static_cast<std::size_t>(model.dim()), backend);
}

std::uint32_t NeighborIndex::build_tree(std::uint32_t begin, std::uint32_t end) {
    constexpr std::uint32_t kLeafSize = 16;
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();

    if (end - begin <= kLeafSize) {
        // deterministic leaf layout
        std::sort(order_.begin() + begin, order_.begin() + end);
        nodes_[id].begin = begin;
        nodes_[id].end = end;
        return id;
    }

    // split on the widest axis; ties go to the lowest axis
    int axis = 0;
    double best_spread = -1.0;
    for (std::size_t a = 0; a < dim_; ++a) {
        double lo = row(order_[begin])[a], hi = lo;
        for (std::uint32_t i = begin + 1; i < end; ++i) {
            const double v = row(order_[i])[a];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > best_spread) {
            best_spread = hi - lo;
            axis = static_cast<int>(a);
        }
    }

    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t lhs, std::uint32_t rhs) {
                         const double a = row(lhs)[axis], b = row(rhs)[axis];
                         return a < b || (a == b && lhs < rhs);
                     });
    const double split = row(order_[mid])[axis];

    nodes_[id].axis = axis;
    nodes_[id].split = split;
    const std::uint32_t left = build_tree(begin, mid);
    const std::uint32_t right = build_tree(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

void NeighborIndex::query_tree(std::uint32_t node_id, std::span<const double> point, std::size_t m,
                               const std::unordered_set<EntityId>* exclude, TopM& best) const {
    const Node& node = nodes_[node_id];
    if (node.axis < 0) {
        for (std::uint32_t i = node.begin; i < node.end; ++i) {
            const std::uint32_t idx = order_[i];
            if (exclude && exclude->count(idx)) continue;
            best.offer({dist2(point, row(idx)), idx});
        }
        return;
    }

    const double delta = point[node.axis] - node.split;
    const std::uint32_t near = delta <= 0.0 ? node.left : node.right;
    const std::uint32_t far = delta <= 0.0 ? node.right : node.left;
    query_tree(near, point, m, exclude, best);
    // the far side cannot be closer than the splitting plane
    if (!best.full() || delta * delta <= best.worst_d2()) {
        query_tree(far, point, m, exclude, best);
    }
}

NeighbourSet NeighborIndex::query_serial(std::span<const double> point, std::size_t m,
                                         const std::unordered_set<EntityId>* exclude) const {
    if (point.size() != dim_) {
        throw Error("kNN query: point has dimension " + std::to_string(point.size()) + ", index has " +
                    std::to_string(dim_));
    }
    if (m < 1) throw Error("kNN query: m must be >= 1");

    TopM best(m);
    if (backend_ == KnnBackend::partition_tree) {
        query_tree(root_, point, m, exclude, best);
    } else {
        for (std::uint32_t i = 0; i < count_; ++i) {
            if (exclude && exclude->count(i)) continue;
            best.offer({dist2(point, row(i)), i});
        }
    }

    NeighbourSet result;
    auto sorted = std::move(best).sorted();
    result.reserve(sorted.size());
    for (const Candidate& c : sorted) result.push_back({c.id, std::sqrt(c.d2)});
    return result;
}

NeighbourSet NeighborIndex::brute_force_parallel(std::span<const double> point, std::size_t m,
                                                 const std::unordered_set<EntityId>* exclude) const {
    const int nt = ThreadPolicy::threads();
    std::vector<std::vector<Candidate>> partials(nt);

#ifdef _OPENMP
#pragma omp parallel num_threads(nt)
    {
        const int tid = omp_get_thread_num();
        TopM local(m);
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(count_); ++i) {
            const auto idx = static_cast<std::uint32_t>(i);
            if (exclude && exclude->count(idx)) continue;
            local.offer({dist2(point, row(idx)), idx});
        }
        partials[tid] = std::move(local).sorted();
    }
#endif

    // the m best under the (d2, id) total order do not depend on scan order
    TopM merged(m);
    for (const auto& part : partials) {
        for (const Candidate& c : part) merged.offer(c);
    }
    NeighbourSet result;
    auto sorted = std::move(merged).sorted();
    result.reserve(sorted.size());
    for (const Candidate& c : sorted) result.push_back({c.id, std::sqrt(c.d2)});
    return result;
}

NeighbourSet NeighborIndex::query(std::span<const double> point, std::size_t m,
                                  const std::unordered_set<EntityId>* exclude) const {
    const int nt = ThreadPolicy::threads();
    if (backend_ == KnnBackend::brute_force && nt > 1 && count_ >= 4096) {
        if (point.size() != dim_) {
            throw Error("kNN query: point has dimension " + std::to_string(point.size()) +
                        ", index has " + std::to_string(dim_));
        }
        if (m < 1) throw Error("kNN query: m must be >= 1");
        return brute_force_parallel(point, m, exclude);
    }
    return query_serial(point, m, exclude);
}

}  // namespace kgex
