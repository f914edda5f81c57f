#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kgex/types.hpp"

namespace kgex {

enum class ModelKind { TransE, DistMult, ComplEx };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct EarlyStopping {
    int patience = 0;  // epochs without validation-MRR improvement; 0 disables
    int check_interval = 10;
};

struct ModelConfig {
    ModelKind kind = ModelKind::TransE;
    int k = 32;            // embedding dimension (ComplEx rows are 2k wide)
    int eta = 10;          // negatives per positive
    double learning_rate = 1e-3;
    double l2_lambda = 1e-4;
    int max_epochs = 200;
    int batch_size = 512;
    EarlyStopping early_stopping;
    std::uint64_t seed = 0;

    int dim() const { return kind == ModelKind::ComplEx ? 2 * k : k; }
    void validate() const;
};

// Dense per-entity / per-relation vectors plus the scoring function.
// ComplEx rows interleave real/imaginary parts: [re0, im0, re1, im1, ...].
class EmbeddingModel {
public:
    // Uniform init in [-6/sqrt(k), +6/sqrt(k)] per coordinate, seeded.
    static EmbeddingModel random_init(const ModelConfig& config, std::uint32_t entity_count,
                                      std::uint32_t relation_count);

    double score(const Triple& t) const;

    std::span<const double> entity_vec(EntityId e) const;
    std::span<const double> relation_vec(RelationId r) const;
    std::span<double> entity_vec_mut(EntityId e);
    std::span<double> relation_vec_mut(RelationId r);

    const ModelConfig& config() const { return config_; }
    std::uint32_t entity_count() const { return entity_count_; }
    std::uint32_t relation_count() const { return relation_count_; }
    int dim() const { return config_.dim(); }
    int trained_epochs() const { return trained_epochs_; }
    void set_trained_epochs(int epochs) { trained_epochs_ = epochs; }

    const std::vector<double>& entity_table() const { return entity_table_; }
    const std::vector<double>& relation_table() const { return relation_table_; }
    std::vector<double>& entity_table_mut() { return entity_table_; }
    std::vector<double>& relation_table_mut() { return relation_table_; }

    // Detects stale derived structures (kNN indexes, calibrators).
    std::uint64_t entity_fingerprint() const;
    std::uint64_t fingerprint() const;

    bool all_finite() const;

private:
    EmbeddingModel() = default;

    ModelConfig config_;
    std::uint32_t entity_count_ = 0, relation_count_ = 0;
    std::vector<double> entity_table_, relation_table_;
    int trained_epochs_ = 0;

    friend struct SnapshotCodec;
};

// Raw score for explicit vectors; `dim` is the row width.
double score_vectors(ModelKind kind, std::span<const double> s, std::span<const double> p,
                     std::span<const double> o);

// Accumulates d(score)/d{s,p,o} scaled by `factor` into the grad spans.
void accumulate_score_gradient(ModelKind kind, std::span<const double> s, std::span<const double> p,
                               std::span<const double> o, double factor, std::span<double> grad_s,
                               std::span<double> grad_p, std::span<double> grad_o);

}  // namespace kgex
