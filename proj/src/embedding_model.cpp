#include "kgex/embedding_model.hpp"

#include <cmath>
#include <random>

namespace kgex {

const char* to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::TransE: return "transe";
        case ModelKind::DistMult: return "distmult";
        case ModelKind::ComplEx: return "complex";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "transe") return ModelKind::TransE;
    if (name == "distmult") return ModelKind::DistMult;
    if (name == "complex") return ModelKind::ComplEx;
    throw Error("unknown model kind: " + name + " (expected transe|distmult|complex)");
}

void ModelConfig::validate() const {
    if (k < 1) throw Error("model config: k must be >= 1");
    if (eta < 1) throw Error("model config: eta must be >= 1");
    if (!(learning_rate > 0)) throw Error("model config: learning rate must be > 0");
    if (l2_lambda < 0) throw Error("model config: l2 lambda must be >= 0");
    if (max_epochs < 0) throw Error("model config: max epochs must be >= 0");
    if (batch_size < 1) throw Error("model config: batch size must be >= 1");
    if (early_stopping.patience < 0) throw Error("model config: patience must be >= 0");
    if (early_stopping.patience > 0 && early_stopping.check_interval < 1)
        throw Error("model config: check interval must be >= 1");
}

EmbeddingModel EmbeddingModel::random_init(const ModelConfig& config, std::uint32_t entity_count,
                                           std::uint32_t relation_count) {
    config.validate();
    if (entity_count == 0 || relation_count == 0)
        throw Error("model init requires at least one entity and one relation");

    EmbeddingModel m;
    m.config_ = config;
    m.entity_count_ = entity_count;
    m.relation_count_ = relation_count;
    const std::size_t d = static_cast<std::size_t>(config.dim());
    m.entity_table_.resize(entity_count * d);
    m.relation_table_.resize(relation_count * d);

    const double bound = 6.0 / std::sqrt(static_cast<double>(config.k));
    std::mt19937_64 rng(config.seed);
    for (double& x : m.entity_table_) x = uniform_real(rng, -bound, bound);
    for (double& x : m.relation_table_) x = uniform_real(rng, -bound, bound);
    return m;
}

std::span<const double> EmbeddingModel::entity_vec(EntityId e) const {
    if (e >= entity_count_) throw Error("entity id out of range: " + std::to_string(e));
    const std::size_t d = static_cast<std::size_t>(dim());
    return {entity_table_.data() + e * d, d};
}

std::span<const double> EmbeddingModel::relation_vec(RelationId r) const {
    if (r >= relation_count_) throw Error("relation id out of range: " + std::to_string(r));
    const std::size_t d = static_cast<std::size_t>(dim());
    return {relation_table_.data() + r * d, d};
}

std::span<double> EmbeddingModel::entity_vec_mut(EntityId e) {
    const std::size_t d = static_cast<std::size_t>(dim());
    return {entity_table_.data() + e * d, d};
}

std::span<double> EmbeddingModel::relation_vec_mut(RelationId r) {
    const std::size_t d = static_cast<std::size_t>(dim());
    return {relation_table_.data() + r * d, d};
}

double EmbeddingModel::score(const Triple& t) const {
    return score_vectors(config_.kind, entity_vec(t.subject), relation_vec(t.predicate),
                         entity_vec(t.object));
}

std::uint64_t EmbeddingModel::entity_fingerprint() const {
    std::uint64_t h = fnv1a64(&entity_count_, sizeof(entity_count_));
    const int d = dim();
    h = fnv1a64(&d, sizeof(d), h);
    return fnv1a64(entity_table_.data(), entity_table_.size() * sizeof(double), h);
}

std::uint64_t EmbeddingModel::fingerprint() const {
    std::uint64_t h = entity_fingerprint();
    h = fnv1a64(&relation_count_, sizeof(relation_count_), h);
    return fnv1a64(relation_table_.data(), relation_table_.size() * sizeof(double), h);
}

bool EmbeddingModel::all_finite() const {
    for (double x : entity_table_)
        if (!std::isfinite(x)) return false;
    for (double x : relation_table_)
        if (!std::isfinite(x)) return false;
    return true;
}

double score_vectors(ModelKind kind, std::span<const double> s, std::span<const double> p,
                     std::span<const double> o) {
    const std::size_t d = s.size();
    switch (kind) {
        case ModelKind::TransE: {
            double sq = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                const double diff = s[i] + p[i] - o[i];
                sq += diff * diff;
            }
            return -std::sqrt(sq);
        }
        case ModelKind::DistMult: {
            double sum = 0.0;
            for (std::size_t i = 0; i < d; ++i) sum += s[i] * p[i] * o[i];
            return sum;
        }
        case ModelKind::ComplEx: {
            // Re(sum_i s_i * p_i * conj(o_i)), interleaved [re, im] layout
            double sum = 0.0;
            for (std::size_t i = 0; i + 1 < d; i += 2) {
                const double sr = s[i], si = s[i + 1];
                const double pr = p[i], pi = p[i + 1];
                const double orr = o[i], oi = o[i + 1];
                sum += (sr * pr - si * pi) * orr + (sr * pi + si * pr) * oi;
            }
            return sum;
        }
    }
    return 0.0;
}

void accumulate_score_gradient(ModelKind kind, std::span<const double> s, std::span<const double> p,
                               std::span<const double> o, double factor, std::span<double> grad_s,
                               std::span<double> grad_p, std::span<double> grad_o) {
    const std::size_t d = s.size();
    switch (kind) {
        case ModelKind::TransE: {
            double sq = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                const double diff = s[i] + p[i] - o[i];
                sq += diff * diff;
            }
            const double norm = std::sqrt(sq);
            if (norm == 0.0) return;  // score flat at the exact-translation point
            const double scale = -factor / norm;
            for (std::size_t i = 0; i < d; ++i) {
                const double diff = s[i] + p[i] - o[i];
                grad_s[i] += scale * diff;
                grad_p[i] += scale * diff;
                grad_o[i] -= scale * diff;
            }
            return;
        }
        case ModelKind::DistMult: {
            for (std::size_t i = 0; i < d; ++i) {
                grad_s[i] += factor * p[i] * o[i];
                grad_p[i] += factor * s[i] * o[i];
                grad_o[i] += factor * s[i] * p[i];
            }
            return;
        }
        case ModelKind::ComplEx: {
            for (std::size_t i = 0; i + 1 < d; i += 2) {
                const double sr = s[i], si = s[i + 1];
                const double pr = p[i], pi = p[i + 1];
                const double orr = o[i], oi = o[i + 1];
                grad_s[i] += factor * (pr * orr + pi * oi);
                grad_s[i + 1] += factor * (-pi * orr + pr * oi);
                grad_p[i] += factor * (sr * orr + si * oi);
                grad_p[i + 1] += factor * (-si * orr + sr * oi);
                grad_o[i] += factor * (sr * pr - si * pi);
                grad_o[i + 1] += factor * (sr * pi + si * pr);
            }
            return;
        }
    }
}

}  // namespace kgex
