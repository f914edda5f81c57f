#include "kgex/explanation_graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace kgex {

int PrototypeGraph::weight(int level, RelationId predicate) const {
    if (level < 1 || level > static_cast<int>(levels.size())) return 0;
    auto it = levels[level - 1].find(predicate);
    return it == levels[level - 1].end() ? 0 : it->second;
}

bool PrototypeGraph::empty() const {
    for (const auto& level : levels) {
        if (!level.empty()) return false;
    }
    return true;
}

TripleNeighbourhood triple_neighbourhood(const TripleStore& store, const Triple& t, int n) {
    const NeighbourhoodSlice subject_slice = store.n_hop(t.subject, n);
    const NeighbourhoodSlice object_slice =
        t.object == t.subject ? subject_slice : store.n_hop(t.object, n);

    // first-reach: a triple seen from both endpoints keeps its minimum level
    std::map<Triple, int> level_of;
    for (int h = 0; h < n; ++h) {
        for (const auto* slice : {&subject_slice, &object_slice}) {
            if (h >= static_cast<int>(slice->levels.size())) continue;
            for (const Triple& x : slice->levels[h]) {
                auto [it, inserted] = level_of.emplace(x, h + 1);
                if (!inserted) it->second = std::min(it->second, h + 1);
            }
        }
    }
    level_of.erase(t);

    TripleNeighbourhood result;
    result.levels.resize(n);
    result.predicates.resize(n);
    for (const auto& [triple, level] : level_of) {
        result.levels[level - 1].push_back(triple);
        result.predicates[level - 1].insert(triple.predicate);
    }
    return result;
}

PrototypeGraph aggregate_prototype(const TripleStore& store, const Triple& target,
                                   std::span<const Triple> examples, int n,
                                   PrototypeStrategy strategy) {
    if (n < 1) throw Error("aggregate_prototype: n must be >= 1");

    PrototypeGraph prototype;
    prototype.strategy = strategy;
    prototype.levels.resize(n);
    if (examples.empty()) return prototype;

    const TripleNeighbourhood target_hood = triple_neighbourhood(store, target, n);
    std::vector<TripleNeighbourhood> example_hoods;
    example_hoods.reserve(examples.size());
    for (const Triple& ex : examples) example_hoods.push_back(triple_neighbourhood(store, ex, n));

    for (int h = 0; h < n; ++h) {
        std::map<RelationId, int> counts;
        for (const auto& hood : example_hoods) {
            for (RelationId p : hood.predicates[h]) counts[p]++;
        }
        for (const auto& [p, count] : counts) {
            if (!target_hood.predicates[h].count(p)) continue;
            if (strategy == PrototypeStrategy::strict) {
                if (count == static_cast<int>(examples.size())) prototype.levels[h][p] = 1;
            } else {
                prototype.levels[h][p] = count;
            }
        }
    }
    return prototype;
}

ExplanationGraph assemble(const Triple& target, double target_probability,
                          std::span<const ExampleTriple> examples, const PrototypeGraph& prototype,
                          const TripleStore& store, int n) {
    ExplanationGraph graph;
    graph.target = target;
    graph.target_probability = target_probability;
    graph.hops = n;
    graph.prototype = prototype;

    const TripleNeighbourhood hood = triple_neighbourhood(store, target, n);
    for (int h = 0; h < n; ++h) {
        for (const Triple& t : hood.levels[h]) {
            graph.target_plane.push_back(
                {t, h + 1, static_cast<double>(prototype.weight(h + 1, t.predicate))});
        }
    }

    graph.examples_plane.assign(examples.begin(), examples.end());
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const ExampleTriple& ex = examples[i];
        graph.meta_links.push_back({MetaLinkRole::similar_subject, target.subject,
                                    ex.triple.subject, ex.subject_distance, i});
        graph.meta_links.push_back({MetaLinkRole::similar_object, target.object, ex.triple.object,
                                    ex.object_distance, i});
    }
    return graph;
}

GraphFormat graph_format_from_string(const std::string& name) {
    if (name == "json") return GraphFormat::json;
    if (name == "dot") return GraphFormat::dot;
    throw Error("unknown graph format: " + name + " (expected json|dot)");
}

namespace {

using nlohmann::json;

json number_or_null(double x) {
    if (std::isnan(x)) return nullptr;
    return x;
}

json graph_to_json(const ExplanationGraph& graph, const TripleStore& store) {
    const Dictionary& ents = store.entities();
    const Dictionary& rels = store.relations();

    json doc;
    doc["schema"] = "explanation-graph/1";
    doc["hops"] = graph.hops;
    doc["target"] = {{"subject", ents.label(graph.target.subject)},
                     {"predicate", rels.label(graph.target.predicate)},
                     {"object", ents.label(graph.target.object)},
                     {"probability", number_or_null(graph.target_probability)}};

    doc["target_plane"] = json::array();
    for (const WeightedTriple& wt : graph.target_plane) {
        doc["target_plane"].push_back({{"subject", ents.label(wt.triple.subject)},
                                       {"predicate", rels.label(wt.triple.predicate)},
                                       {"object", ents.label(wt.triple.object)},
                                       {"level", wt.level},
                                       {"weight", wt.weight}});
    }

    doc["examples_plane"] = json::array();
    for (const ExampleTriple& ex : graph.examples_plane) {
        doc["examples_plane"].push_back({{"subject", ents.label(ex.triple.subject)},
                                         {"predicate", rels.label(ex.triple.predicate)},
                                         {"object", ents.label(ex.triple.object)},
                                         {"score", number_or_null(ex.score)},
                                         {"subject_distance", number_or_null(ex.subject_distance)},
                                         {"object_distance", number_or_null(ex.object_distance)}});
    }

    doc["meta_links"] = json::array();
    for (const MetaLink& link : graph.meta_links) {
        doc["meta_links"].push_back(
            {{"kind", link.role == MetaLinkRole::similar_subject ? "similar-subject" : "similar-object"},
             {"target_endpoint", ents.label(link.target_endpoint)},
             {"example_endpoint", ents.label(link.example_endpoint)},
             {"distance", number_or_null(link.distance)},
             {"example", link.example_index}});
    }

    doc["prototype"] = {{"strategy", to_string(graph.prototype.strategy)}, {"levels", json::array()}};
    for (std::size_t h = 0; h < graph.prototype.levels.size(); ++h) {
        json level = {{"level", h + 1}, {"predicates", json::array()}};
        for (const auto& [p, w] : graph.prototype.levels[h]) {
            level["predicates"].push_back({{"predicate", rels.label(p)}, {"weight", w}});
        }
        doc["prototype"]["levels"].push_back(level);
    }
    return doc;
}

std::string dot_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

std::string format_weight(double w) {
    std::ostringstream os;
    if (std::isnan(w)) {
        os << "n/a";
    } else {
        os.precision(6);
        os << w;
    }
    return os.str();
}

std::string graph_to_dot(const ExplanationGraph& graph, const TripleStore& store) {
    const Dictionary& ents = store.entities();
    const Dictionary& rels = store.relations();

    // plane-local node instances: the same entity renders once per plane
    std::set<EntityId> target_entities{graph.target.subject, graph.target.object};
    for (const WeightedTriple& wt : graph.target_plane) {
        target_entities.insert(wt.triple.subject);
        target_entities.insert(wt.triple.object);
    }
    std::set<EntityId> example_entities;
    for (const ExampleTriple& ex : graph.examples_plane) {
        example_entities.insert(ex.triple.subject);
        example_entities.insert(ex.triple.object);
    }

    std::ostringstream out;
    out << "digraph explanation {\n";
    out << "  rankdir=LR;\n";
    out << "  node [shape=ellipse];\n";

    out << "  subgraph cluster_target_plane {\n";
    out << "    label=\"target plane\";\n";
    for (EntityId e : target_entities) {
        out << "    t" << e << " [label=\"" << dot_escape(ents.label(e)) << "\"];\n";
    }
    out << "    t" << graph.target.subject << " -> t" << graph.target.object << " [label=\""
        << dot_escape(rels.label(graph.target.predicate)) << "\", penwidth=2, color=red];\n";
    for (const WeightedTriple& wt : graph.target_plane) {
        out << "    t" << wt.triple.subject << " -> t" << wt.triple.object << " [label=\""
            << dot_escape(rels.label(wt.triple.predicate)) << "\", weight=\""
            << format_weight(wt.weight) << "\", level=\"" << wt.level << "\"];\n";
    }
    out << "  }\n";

    out << "  subgraph cluster_examples_plane {\n";
    out << "    label=\"examples plane\";\n";
    for (EntityId e : example_entities) {
        out << "    e" << e << " [label=\"" << dot_escape(ents.label(e)) << "\"];\n";
    }
    for (const ExampleTriple& ex : graph.examples_plane) {
        out << "    e" << ex.triple.subject << " -> e" << ex.triple.object << " [label=\""
            << dot_escape(rels.label(ex.triple.predicate)) << "\", score=\""
            << format_weight(ex.score) << "\"];\n";
    }
    out << "  }\n";

    for (const MetaLink& link : graph.meta_links) {
        out << "  t" << link.target_endpoint << " -> e" << link.example_endpoint
            << " [style=dashed, dir=none, label=\""
            << (link.role == MetaLinkRole::similar_subject ? "similar-subject" : "similar-object")
            << "\", distance=\"" << format_weight(link.distance) << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace

std::string export_graph(const ExplanationGraph& graph, const TripleStore& store, GraphFormat format) {
    if (format == GraphFormat::json) return graph_to_json(graph, store).dump(2) + "\n";
    return graph_to_dot(graph, store);
}

}  // namespace kgex
