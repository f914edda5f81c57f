#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "kgex/types.hpp"

namespace kgex {

// Bidirectional label <-> dense-id map.
class Dictionary {
public:
    EntityId get_or_add(const std::string& label);
    std::optional<std::uint32_t> find(const std::string& label) const;
    const std::string& label(std::uint32_t id) const;
    std::uint32_t size() const { return static_cast<std::uint32_t>(labels_.size()); }

    // Two-column TSV: id<TAB>label.
    void export_tsv(std::ostream& out) const;

    // Closest labels by edit distance, for error messages.
    std::vector<std::string> nearest(const std::string& label, std::size_t count) const;

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::uint32_t> ids_;
};

struct LoadResult {
    std::vector<Triple> triples;
    std::size_t duplicates_collapsed = 0;
};

// Parses one tab-separated split file (subject<TAB>predicate<TAB>object per
// line, UTF-8, no header). New labels extend the dictionaries unless
// allow_new_labels is false, in which case unseen labels are a policy error
// listing every offender. Duplicate lines collapse into one triple.
LoadResult load_tsv(const std::string& path, Dictionary& entities, Dictionary& relations,
                    bool allow_new_labels = true);

struct NeighbourhoodSlice {
    EntityId center = 0;
    // levels[h-1] holds the triples first reached at hop level h, sorted by (s,p,o).
    std::vector<std::vector<Triple>> levels;
    // per-level predicate multiset
    std::vector<std::map<RelationId, int>> predicate_counts;
};

// Indexed train/valid/test triples. Construction builds a train membership
// set, a by-predicate partition of train, and an undirected incidence list
// (a triple is incident to both endpoints). All read paths are safe under
// concurrent readers; mutate() returns a fresh store and never touches this
// one.
class TripleStore {
public:
    TripleStore(std::vector<Triple> train, std::vector<Triple> valid, std::vector<Triple> test,
                std::shared_ptr<const Dictionary> entities, std::shared_ptr<const Dictionary> relations);

    const std::vector<Triple>& train() const { return train_; }
    const std::vector<Triple>& valid() const { return valid_; }
    const std::vector<Triple>& test() const { return test_; }

    std::uint32_t entity_count() const;
    std::uint32_t relation_count() const;
    const Dictionary& entities() const { return *entities_; }
    const Dictionary& relations() const { return *relations_; }
    std::shared_ptr<const Dictionary> entities_ptr() const { return entities_; }
    std::shared_ptr<const Dictionary> relations_ptr() const { return relations_; }

    // Train-split membership.
    bool contains(const Triple& t) const { return membership_.count(t) != 0; }

    // Indices into train() for the given predicate / incident entity.
    const std::vector<std::uint32_t>& triples_with_predicate(RelationId p) const;
    const std::vector<std::uint32_t>& incident(EntityId e) const;

    // Breadth-first neighbourhood expansion over undirected incidence.
    // A triple lands at level 1 + min(dist(subject), dist(object)); level 1
    // is exactly the incidence list of `center`.
    NeighbourhoodSlice n_hop(EntityId center, int n) const;

    // New store with `remove` taken out of train and `add` appended.
    // Every removal must exist in train; additions must not collide with the
    // remaining train triples or each other.
    TripleStore mutate(const std::vector<Triple>& remove, const std::vector<Triple>& add) const;

private:
    void check_ids(const std::vector<Triple>& split, const char* name) const;

    std::vector<Triple> train_, valid_, test_;
    std::shared_ptr<const Dictionary> entities_, relations_;
    std::unordered_set<Triple, TripleHash> membership_;
    std::vector<std::vector<std::uint32_t>> by_predicate_;
    std::vector<std::vector<std::uint32_t>> adjacency_;
};

}  // namespace kgex
