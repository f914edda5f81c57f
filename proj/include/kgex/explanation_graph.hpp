#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "kgex/explainer.hpp"
#include "kgex/triple_store.hpp"

namespace kgex {

// Per-hop-level predicate weights aggregated over example neighbourhoods.
// strict: predicate present at that level in every example neighbourhood and
// in the target's (weight 1). permissive: weight = number of examples whose
// level-h neighbourhood holds the predicate, kept only when the target's
// level-h neighbourhood holds it too.
struct PrototypeGraph {
    PrototypeStrategy strategy = PrototypeStrategy::permissive;
    std::vector<std::map<RelationId, int>> levels;  // levels[h-1]: predicate -> weight

    int weight(int level, RelationId predicate) const;
    bool empty() const;
};

// Neighbourhood of a triple: union of its endpoints' n-hop slices, each
// triple at its first-reach level, the triple itself removed.
struct TripleNeighbourhood {
    std::vector<std::vector<Triple>> levels;
    std::vector<std::set<RelationId>> predicates;
};

TripleNeighbourhood triple_neighbourhood(const TripleStore& store, const Triple& t, int n);

PrototypeGraph aggregate_prototype(const TripleStore& store, const Triple& target,
                                   std::span<const Triple> examples, int n,
                                   PrototypeStrategy strategy);

struct WeightedTriple {
    Triple triple;
    int level;
    double weight;
};

enum class MetaLinkRole { similar_subject, similar_object };

struct MetaLink {
    MetaLinkRole role;
    EntityId target_endpoint;
    EntityId example_endpoint;
    double distance;
    std::size_t example_index;
};

// Two-plane explanation graph: the target plane carries the target triple's
// weighted n-hop neighbourhood, the examples plane the scored examples, and
// one similar-subject plus one similar-object meta-link joins each example to
// the target's endpoints.
struct ExplanationGraph {
    Triple target{};
    double target_probability = 0.0;
    int hops = 1;
    std::vector<WeightedTriple> target_plane;
    std::vector<ExampleTriple> examples_plane;
    std::vector<MetaLink> meta_links;
    PrototypeGraph prototype;
};

ExplanationGraph assemble(const Triple& target, double target_probability,
                          std::span<const ExampleTriple> examples, const PrototypeGraph& prototype,
                          const TripleStore& store, int n);

enum class GraphFormat { json, dot };
GraphFormat graph_format_from_string(const std::string& name);

// Byte-stable serializations with dictionary labels; the DOT form clusters
// the two planes and dashes the meta-links.
std::string export_graph(const ExplanationGraph& graph, const TripleStore& store, GraphFormat format);

}  // namespace kgex
