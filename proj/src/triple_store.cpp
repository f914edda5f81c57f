#include "kgex/triple_store.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

namespace kgex {

EntityId Dictionary::get_or_add(const std::string& label) {
    auto it = ids_.find(label);
    if (it != ids_.end()) return it->second;
    auto id = static_cast<std::uint32_t>(labels_.size());
    labels_.push_back(label);
    ids_.emplace(label, id);
    return id;
}

std::optional<std::uint32_t> Dictionary::find(const std::string& label) const {
    auto it = ids_.find(label);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

const std::string& Dictionary::label(std::uint32_t id) const {
    if (id >= labels_.size()) throw Error("dictionary id out of range: " + std::to_string(id));
    return labels_[id];
}

void Dictionary::export_tsv(std::ostream& out) const {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        out << i << '\t' << labels_[i] << '\n';
    }
}

namespace {

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t prev = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t cur = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, prev + (a[i - 1] == b[j - 1] ? 0 : 1)});
            prev = cur;
        }
    }
    return row[b.size()];
}

}  // namespace

std::vector<std::string> Dictionary::nearest(const std::string& label, std::size_t count) const {
    std::vector<std::pair<std::size_t, std::uint32_t>> scored;
    scored.reserve(labels_.size());
    for (std::uint32_t i = 0; i < labels_.size(); ++i) {
        scored.emplace_back(edit_distance(label, labels_[i]), i);
    }
    count = std::min(count, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + count, scored.end());
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(labels_[scored[i].second]);
    return out;
}

LoadResult load_tsv(const std::string& path, Dictionary& entities, Dictionary& relations,
                    bool allow_new_labels) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open triple file: " + path);

    LoadResult result;
    std::unordered_set<Triple, TripleHash> seen;
    std::vector<std::string> unknown;
    std::string line;
    std::size_t line_no = 0;

    auto resolve = [&](const std::string& label, Dictionary& dict) -> std::optional<std::uint32_t> {
        if (allow_new_labels) return dict.get_or_add(label);
        auto id = dict.find(label);
        if (!id) unknown.push_back(label);
        return id;
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::size_t t1 = line.find('\t');
        std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
            throw Error(path + ":" + std::to_string(line_no) + ": expected 3 tab-separated fields");
        }
        std::string s = line.substr(0, t1);
        std::string p = line.substr(t1 + 1, t2 - t1 - 1);
        std::string o = line.substr(t2 + 1);
        if (s.empty() || p.empty() || o.empty()) {
            throw Error(path + ":" + std::to_string(line_no) + ": empty field");
        }

        auto sid = resolve(s, entities);
        auto pid = resolve(p, relations);
        auto oid = resolve(o, entities);
        if (!sid || !pid || !oid) continue;  // collecting offenders

        Triple t{*sid, *pid, *oid};
        if (seen.insert(t).second) {
            result.triples.push_back(t);
        } else {
            ++result.duplicates_collapsed;
        }
    }

    if (!unknown.empty()) {
        std::sort(unknown.begin(), unknown.end());
        unknown.erase(std::unique(unknown.begin(), unknown.end()), unknown.end());
        std::ostringstream msg;
        msg << path << ": " << unknown.size() << " label(s) not in the frozen dictionaries:";
        std::size_t shown = std::min<std::size_t>(unknown.size(), 20);
        for (std::size_t i = 0; i < shown; ++i) msg << ' ' << unknown[i];
        if (shown < unknown.size()) msg << " ...";
        throw Error(msg.str());
    }
    return result;
}

TripleStore::TripleStore(std::vector<Triple> train, std::vector<Triple> valid, std::vector<Triple> test,
                         std::shared_ptr<const Dictionary> entities,
                         std::shared_ptr<const Dictionary> relations)
    : train_(std::move(train)),
      valid_(std::move(valid)),
      test_(std::move(test)),
      entities_(std::move(entities)),
      relations_(std::move(relations)) {
    if (!entities_ || !relations_) throw Error("TripleStore requires dictionaries");
    check_ids(train_, "train");
    check_ids(valid_, "valid");
    check_ids(test_, "test");

    membership_.reserve(train_.size() * 2);
    by_predicate_.assign(relation_count(), {});
    adjacency_.assign(entity_count(), {});
    for (std::uint32_t i = 0; i < train_.size(); ++i) {
        const Triple& t = train_[i];
        if (!membership_.insert(t).second) {
            throw Error("duplicate triple in train split at index " + std::to_string(i));
        }
        by_predicate_[t.predicate].push_back(i);
        adjacency_[t.subject].push_back(i);
        if (t.object != t.subject) adjacency_[t.object].push_back(i);
    }
}

std::uint32_t TripleStore::entity_count() const { return entities_->size(); }
std::uint32_t TripleStore::relation_count() const { return relations_->size(); }

void TripleStore::check_ids(const std::vector<Triple>& split, const char* name) const {
    for (const Triple& t : split) {
        if (t.subject >= entity_count() || t.object >= entity_count() || t.predicate >= relation_count()) {
            throw Error(std::string(name) + " split contains out-of-range ids");
        }
    }
}

const std::vector<std::uint32_t>& TripleStore::triples_with_predicate(RelationId p) const {
    if (p >= by_predicate_.size()) throw Error("predicate id out of range: " + std::to_string(p));
    return by_predicate_[p];
}

const std::vector<std::uint32_t>& TripleStore::incident(EntityId e) const {
    if (e >= adjacency_.size()) throw Error("entity id out of range: " + std::to_string(e));
    return adjacency_[e];
}

NeighbourhoodSlice TripleStore::n_hop(EntityId center, int n) const {
    if (n < 1) throw Error("n_hop requires n >= 1");
    if (center >= entity_count()) throw Error("entity id out of range: " + std::to_string(center));

    NeighbourhoodSlice slice;
    slice.center = center;
    slice.levels.resize(n);
    slice.predicate_counts.resize(n);

    std::unordered_set<EntityId> visited{center};
    std::unordered_set<std::uint32_t> taken;
    std::vector<EntityId> frontier{center};

    for (int h = 1; h <= n && !frontier.empty(); ++h) {
        std::vector<EntityId> next;
        for (EntityId u : frontier) {
            for (std::uint32_t idx : adjacency_[u]) {
                if (!taken.insert(idx).second) continue;
                const Triple& t = train_[idx];
                slice.levels[h - 1].push_back(t);
                for (EntityId v : {t.subject, t.object}) {
                    if (visited.insert(v).second) next.push_back(v);
                }
            }
        }
        frontier = std::move(next);
    }

    for (int h = 0; h < n; ++h) {
        auto& level = slice.levels[h];
        std::sort(level.begin(), level.end());
        for (const Triple& t : level) slice.predicate_counts[h][t.predicate]++;
    }
    return slice;
}

TripleStore TripleStore::mutate(const std::vector<Triple>& remove, const std::vector<Triple>& add) const {
    std::unordered_set<Triple, TripleHash> to_remove;
    std::vector<Triple> missing;
    for (const Triple& t : remove) {
        if (!contains(t)) {
            missing.push_back(t);
        } else {
            to_remove.insert(t);
        }
    }
    if (!missing.empty()) {
        std::ostringstream msg;
        msg << "mutate: " << missing.size() << " removal target(s) not in train:";
        std::size_t shown = std::min<std::size_t>(missing.size(), 10);
        for (std::size_t i = 0; i < shown; ++i) {
            const Triple& t = missing[i];
            msg << " (" << t.subject << ',' << t.predicate << ',' << t.object << ')';
        }
        if (shown < missing.size()) msg << " ...";
        throw Error(msg.str());
    }

    std::vector<Triple> new_train;
    new_train.reserve(train_.size() - to_remove.size() + add.size());
    for (const Triple& t : train_) {
        if (!to_remove.count(t)) new_train.push_back(t);
    }
    std::unordered_set<Triple, TripleHash> present(new_train.begin(), new_train.end());
    for (const Triple& t : add) {
        if (!present.insert(t).second) {
            throw Error("mutate: addition already present in train: (" + std::to_string(t.subject) + ',' +
                        std::to_string(t.predicate) + ',' + std::to_string(t.object) + ')');
        }
        new_train.push_back(t);
    }
    return TripleStore(std::move(new_train), valid_, test_, entities_, relations_);
}

}  // namespace kgex
