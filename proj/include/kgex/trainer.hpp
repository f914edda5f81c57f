#pragma once

#include <functional>
#include <span>
#include <vector>

#include "kgex/embedding_model.hpp"
#include "kgex/ranking.hpp"
#include "kgex/triple_store.hpp"

namespace kgex {

struct Corruption {
    bool corrupt_subject;
    EntityId entity;
};

// Sparse gradient accumulator: dense tables plus touched-row bookkeeping so
// clearing and the optimizer step only walk rows the batch actually used.
struct GradBuffer {
    void init(std::size_t entity_count, std::size_t relation_count, std::size_t dim);
    void clear();
    std::span<double> entity_row(EntityId e);
    std::span<double> relation_row(RelationId r);

    std::vector<double> entity_grad, relation_grad;
    std::vector<std::uint8_t> entity_touched, relation_touched;
    std::vector<EntityId> touched_entities;
    std::vector<RelationId> touched_relations;
    std::size_t dim = 0;
};

// Batch objective: mean multiclass-NLL over the positives (softmax of the
// positive among itself and its non-colliding corruptions) plus
// l2_lambda * sum of squared norms of every embedding row the batch touches.
// Gradients are accumulated into `grad`. Deterministic given the explicit
// corruption lists; the trainer and the finite-difference tests share it.
double batch_loss_and_grad(const EmbeddingModel& model, std::span<const Triple> positives,
                           std::span<const std::vector<Corruption>> corruptions, double l2_lambda,
                           GradBuffer& grad);

struct TrainLogRow {
    int epoch;
    double loss;
    double val_mrr;  // NaN on epochs without a validation check
};

// Mini-batch Adam on the multiclass-NLL objective. Reproducible given the
// config seed; with ThreadPolicy::deterministic (or one thread) the gradient
// reduction is sequential and two runs are bitwise equal.
class Trainer {
public:
    Trainer(const TripleStore& store, ModelConfig config);

    // Advances training through `target_epoch` (1-based, inclusive), calling
    // on_epoch after each completed epoch. Returns the last epoch actually
    // trained; early stopping may end the run sooner and restores the
    // best-validation-MRR parameters.
    int train_to(int target_epoch,
                 const std::function<void(int, const EmbeddingModel&)>& on_epoch = {});

    const EmbeddingModel& model() const { return model_; }
    EmbeddingModel take_model();
    const std::vector<TrainLogRow>& log() const { return log_; }
    int epochs_done() const { return epochs_done_; }
    bool stopped_early() const { return stopped_; }

private:
    double run_epoch(int epoch);
    void adam_step(GradBuffer& grad);
    double validation_mrr();

    const TripleStore& store_;
    ModelConfig config_;
    EmbeddingModel model_;
    FilterIndex filter_;
    std::mt19937_64 rng_;

    std::vector<double> adam_m_entity_, adam_v_entity_, adam_m_relation_, adam_v_relation_;
    std::int64_t adam_steps_ = 0;

    std::vector<GradBuffer> thread_grads_;
    std::vector<TrainLogRow> log_;
    int epochs_done_ = 0;
    bool stopped_ = false;

    double best_mrr_ = -1.0;
    int best_epoch_ = 0;
    std::vector<double> best_entity_table_, best_relation_table_;
};

// Full training run honoring config.max_epochs and early stopping.
EmbeddingModel train(const TripleStore& store, const ModelConfig& config,
                     std::vector<TrainLogRow>* log_out = nullptr);

}  // namespace kgex
