#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "kgex/embedding_model.hpp"

namespace kgex {

enum class KnnBackend { brute_force, partition_tree, automatic };

const char* to_string(KnnBackend backend);
KnnBackend knn_backend_from_string(const std::string& name);

struct Neighbour {
    EntityId id;
    double distance;
};
using NeighbourSet = std::vector<Neighbour>;

// Exact m-nearest-neighbour search over a fixed point set (Euclidean).
// Both backends return identical results: candidates are ordered by
// (squared distance, id), so ties break toward the lower id everywhere.
// A built index is immutable and supports concurrent queries.
class NeighborIndex {
public:
    static constexpr std::size_t kAutoTreeThreshold = 1000;  // automatic -> tree when count >= this

    static NeighborIndex build(std::span<const double> points, std::size_t count, std::size_t dim,
                               KnnBackend backend = KnnBackend::automatic,
                               std::size_t auto_tree_threshold = kAutoTreeThreshold);

    // Index over the model's entity table; remembers the table fingerprint so
    // consumers can detect a stale index after retraining.
    static NeighborIndex for_entities(const EmbeddingModel& model,
                                      KnnBackend backend = KnnBackend::automatic);
    static NeighborIndex for_relations(const EmbeddingModel& model,
                                       KnnBackend backend = KnnBackend::automatic);

    NeighbourSet query(std::span<const double> point, std::size_t m,
                       const std::unordered_set<EntityId>* exclude = nullptr) const;
    NeighbourSet query_serial(std::span<const double> point, std::size_t m,
                              const std::unordered_set<EntityId>* exclude = nullptr) const;

    KnnBackend backend() const { return backend_; }
    std::size_t size() const { return count_; }
    std::size_t dim() const { return dim_; }
    std::uint64_t fingerprint() const { return fingerprint_; }

private:
    struct Node {
        int axis = -1;          // -1 marks a leaf
        double split = 0.0;
        std::uint32_t left = 0, right = 0;     // children for internal nodes
        std::uint32_t begin = 0, end = 0;       // point range for leaves
    };

    struct Candidate {
        double d2;
        EntityId id;
        bool operator<(const Candidate& other) const {
            return d2 < other.d2 || (d2 == other.d2 && id < other.id);
        }
    };

    // bounded worst-first heap of the m best candidates seen so far
    class TopM;

    const double* row(std::size_t i) const { return points_.data() + i * dim_; }
    double dist2(std::span<const double> a, const double* b) const;
    std::uint32_t build_tree(std::uint32_t begin, std::uint32_t end);
    void query_tree(std::uint32_t node, std::span<const double> point, std::size_t m,
                    const std::unordered_set<EntityId>* exclude, TopM& best) const;
    NeighbourSet brute_force_parallel(std::span<const double> point, std::size_t m,
                                      const std::unordered_set<EntityId>* exclude) const;

    std::vector<double> points_;
    std::size_t count_ = 0, dim_ = 0;
    KnnBackend backend_ = KnnBackend::brute_force;
    std::uint64_t fingerprint_ = 0;

    std::vector<std::uint32_t> order_;  // tree leaves index into this permutation
    std::vector<Node> nodes_;
    std::uint32_t root_ = 0;
};

}  // namespace kgex
