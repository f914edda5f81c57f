#include "kgex/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kgex/parallel.hpp"

namespace kgex {

void GradBuffer::init(std::size_t entity_count, std::size_t relation_count, std::size_t d) {
    dim = d;
    entity_grad.assign(entity_count * d, 0.0);
    relation_grad.assign(relation_count * d, 0.0);
    entity_touched.assign(entity_count, 0);
    relation_touched.assign(relation_count, 0);
    touched_entities.clear();
    touched_relations.clear();
}

void GradBuffer::clear() {
    for (EntityId e : touched_entities) {
        std::fill_n(entity_grad.begin() + std::size_t(e) * dim, dim, 0.0);
        entity_touched[e] = 0;
    }
    for (RelationId r : touched_relations) {
        std::fill_n(relation_grad.begin() + std::size_t(r) * dim, dim, 0.0);
        relation_touched[r] = 0;
    }
    touched_entities.clear();
    touched_relations.clear();
}

std::span<double> GradBuffer::entity_row(EntityId e) {
    if (!entity_touched[e]) {
        entity_touched[e] = 1;
        touched_entities.push_back(e);
    }
    return {entity_grad.data() + std::size_t(e) * dim, dim};
}

std::span<double> GradBuffer::relation_row(RelationId r) {
    if (!relation_touched[r]) {
        relation_touched[r] = 1;
        touched_relations.push_back(r);
    }
    return {relation_grad.data() + std::size_t(r) * dim, dim};
}

namespace {

// NLL of one positive against its corruptions; gradients scaled by nll_scale.
double accumulate_positive(const EmbeddingModel& model, const Triple& pos,
                           std::span<const Corruption> corruptions, double nll_scale,
                           GradBuffer& grad) {
    const ModelKind kind = model.config().kind;
    const auto s = model.entity_vec(pos.subject);
    const auto p = model.relation_vec(pos.predicate);
    const auto o = model.entity_vec(pos.object);

    double z_pos = score_vectors(kind, s, p, o);
    double z_max = z_pos;

    // Collisions (sampled entity equals the true one) drop out of the softmax.
    std::vector<std::pair<Corruption, double>> negatives;
    negatives.reserve(corruptions.size());
    for (const Corruption& c : corruptions) {
        if ((c.corrupt_subject && c.entity == pos.subject) ||
            (!c.corrupt_subject && c.entity == pos.object)) {
            continue;
        }
        const auto cs = c.corrupt_subject ? model.entity_vec(c.entity) : s;
        const auto co = c.corrupt_subject ? o : model.entity_vec(c.entity);
        const double z = score_vectors(kind, cs, p, co);
        negatives.emplace_back(c, z);
        z_max = std::max(z_max, z);
    }

    double denom = std::exp(z_pos - z_max);
    for (const auto& [c, z] : negatives) denom += std::exp(z - z_max);
    const double nll = std::log(denom) - (z_pos - z_max);

    // d(nll)/dz_pos = softmax_pos - 1, d(nll)/dz_neg = softmax_neg
    const double soft_pos = std::exp(z_pos - z_max) / denom;
    accumulate_score_gradient(kind, s, p, o, nll_scale * (soft_pos - 1.0),
                              grad.entity_row(pos.subject), grad.relation_row(pos.predicate),
                              grad.entity_row(pos.object));
    for (const auto& [c, z] : negatives) {
        const double soft = std::exp(z - z_max) / denom;
        const EntityId cs_id = c.corrupt_subject ? c.entity : pos.subject;
        const EntityId co_id = c.corrupt_subject ? pos.object : c.entity;
        accumulate_score_gradient(kind, model.entity_vec(cs_id), p, model.entity_vec(co_id),
                                  nll_scale * soft, grad.entity_row(cs_id),
                                  grad.relation_row(pos.predicate), grad.entity_row(co_id));
    }
    return nll;
}

double squared_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

void merge_into(GradBuffer& dst, GradBuffer& src) {
    for (EntityId e : src.touched_entities) {
        auto d = dst.entity_row(e);
        const double* s = src.entity_grad.data() + std::size_t(e) * src.dim;
        for (std::size_t i = 0; i < src.dim; ++i) d[i] += s[i];
    }
    for (RelationId r : src.touched_relations) {
        auto d = dst.relation_row(r);
        const double* s = src.relation_grad.data() + std::size_t(r) * src.dim;
        for (std::size_t i = 0; i < src.dim; ++i) d[i] += s[i];
    }
    src.clear();
}

// L2 on every row the batch touched: lambda * sum ||row||^2.
double apply_l2(const EmbeddingModel& model, double l2_lambda, GradBuffer& grad) {
    if (l2_lambda == 0.0) return 0.0;
    double penalty = 0.0;
    // touch lists are extended in place, so snapshot sizes first (rows are
    // already touched; entity_row only appends when untouched)
    std::sort(grad.touched_entities.begin(), grad.touched_entities.end());
    std::sort(grad.touched_relations.begin(), grad.touched_relations.end());
    for (EntityId e : grad.touched_entities) {
        const auto v = model.entity_vec(e);
        auto g = grad.entity_row(e);
        for (std::size_t i = 0; i < v.size(); ++i) g[i] += 2.0 * l2_lambda * v[i];
        penalty += squared_norm(v);
    }
    for (RelationId r : grad.touched_relations) {
        const auto v = model.relation_vec(r);
        auto g = grad.relation_row(r);
        for (std::size_t i = 0; i < v.size(); ++i) g[i] += 2.0 * l2_lambda * v[i];
        penalty += squared_norm(v);
    }
    return l2_lambda * penalty;
}

}  // namespace

double batch_loss_and_grad(const EmbeddingModel& model, std::span<const Triple> positives,
                           std::span<const std::vector<Corruption>> corruptions, double l2_lambda,
                           GradBuffer& grad) {
    const double nll_scale = 1.0 / static_cast<double>(positives.size());
    double nll_sum = 0.0;
    for (std::size_t i = 0; i < positives.size(); ++i) {
        nll_sum += accumulate_positive(model, positives[i], corruptions[i], nll_scale, grad);
    }
    return nll_sum * nll_scale + apply_l2(model, l2_lambda, grad);
}

Trainer::Trainer(const TripleStore& store, ModelConfig config)
    : store_(store),
      config_(config),
      model_(EmbeddingModel::random_init(config, store.entity_count(), store.relation_count())),
      filter_(store),
      rng_(mix_seed(config.seed, 1)) {
    if (store.train().empty()) throw Error("training requires a non-empty train split");
    if (config_.early_stopping.patience > 0 && store.valid().empty())
        throw Error("early stopping requires a validation split");

    const auto d = static_cast<std::size_t>(config_.dim());
    adam_m_entity_.assign(model_.entity_table().size(), 0.0);
    adam_v_entity_.assign(model_.entity_table().size(), 0.0);
    adam_m_relation_.assign(model_.relation_table().size(), 0.0);
    adam_v_relation_.assign(model_.relation_table().size(), 0.0);

    thread_grads_.resize(std::max(1, ThreadPolicy::threads()));
    for (auto& g : thread_grads_) g.init(store.entity_count(), store.relation_count(), d);
}

void Trainer::adam_step(GradBuffer& grad) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    ++adam_steps_;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(adam_steps_));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(adam_steps_));
    const double lr = config_.learning_rate;
    const std::size_t d = grad.dim;

    std::sort(grad.touched_entities.begin(), grad.touched_entities.end());
    std::sort(grad.touched_relations.begin(), grad.touched_relations.end());

    auto update = [&](std::size_t row, const double* g, double* x, double* m, double* v) {
        for (std::size_t i = row * d; i < (row + 1) * d; ++i, ++g) {
            m[i] = beta1 * m[i] + (1.0 - beta1) * *g;
            v[i] = beta2 * v[i] + (1.0 - beta2) * *g * *g;
            x[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
        }
    };
    for (EntityId e : grad.touched_entities) {
        update(e, grad.entity_grad.data() + std::size_t(e) * d, model_.entity_table_mut().data(),
               adam_m_entity_.data(), adam_v_entity_.data());
    }
    for (RelationId r : grad.touched_relations) {
        update(r, grad.relation_grad.data() + std::size_t(r) * d, model_.relation_table_mut().data(),
               adam_m_relation_.data(), adam_v_relation_.data());
    }
    grad.clear();
}

double Trainer::run_epoch(int epoch) {
    const auto& train = store_.train();
    const std::size_t n = train.size();
    const auto e_count = static_cast<std::size_t>(store_.entity_count());

    std::vector<std::uint32_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = n; i > 1; --i) {
        std::swap(perm[i - 1], perm[uniform_index(rng_, i)]);
    }

    const auto batch_size = static_cast<std::size_t>(config_.batch_size);
    const auto eta = static_cast<std::size_t>(config_.eta);
    double loss_sum = 0.0;
    std::size_t batch_count = 0;

    std::vector<Triple> positives;
    std::vector<std::vector<Corruption>> corruptions;

    for (std::size_t start = 0; start < n; start += batch_size) {
        const std::size_t size = std::min(batch_size, n - start);
        positives.resize(size);
        corruptions.resize(size);
        for (std::size_t i = 0; i < size; ++i) {
            positives[i] = train[perm[start + i]];
            auto& cs = corruptions[i];
            cs.resize(eta);
            for (std::size_t j = 0; j < eta; ++j) {
                cs[j].corrupt_subject = uniform_index(rng_, 2) == 0;
                cs[j].entity = static_cast<EntityId>(uniform_index(rng_, e_count));
            }
        }

        const int nt = static_cast<int>(thread_grads_.size());
        double batch_loss;
        if (nt <= 1 || ThreadPolicy::deterministic || size < 2) {
            batch_loss = batch_loss_and_grad(model_, positives, corruptions, config_.l2_lambda,
                                             thread_grads_[0]);
        } else {
            const double nll_scale = 1.0 / static_cast<double>(size);
            double nll_sum = 0.0;
#ifdef _OPENMP
#pragma omp parallel num_threads(nt) reduction(+ : nll_sum)
            {
                const int tid = omp_get_thread_num();
#pragma omp for schedule(static)
                for (std::int64_t i = 0; i < static_cast<std::int64_t>(size); ++i) {
                    nll_sum += accumulate_positive(model_, positives[i], corruptions[i], nll_scale,
                                                   thread_grads_[tid]);
                }
            }
#else
            for (std::size_t i = 0; i < size; ++i) {
                nll_sum += accumulate_positive(model_, positives[i], corruptions[i], nll_scale,
                                               thread_grads_[0]);
            }
#endif
            for (int t = 1; t < nt; ++t) merge_into(thread_grads_[0], thread_grads_[t]);
            batch_loss = nll_sum * nll_scale + apply_l2(model_, config_.l2_lambda, thread_grads_[0]);
        }

        if (!std::isfinite(batch_loss)) {
            throw Error("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                        std::to_string(batch_count));
        }
        loss_sum += batch_loss;
        ++batch_count;
        adam_step(thread_grads_[0]);
    }
    return batch_count ? loss_sum / static_cast<double>(batch_count) : 0.0;
}

double Trainer::validation_mrr() {
    return rank_filtered(model_, filter_, store_.valid(), RankSide::both).mrr;
}

int Trainer::train_to(int target_epoch, const std::function<void(int, const EmbeddingModel&)>& on_epoch) {
    const auto& es = config_.early_stopping;
    for (int epoch = epochs_done_ + 1; epoch <= target_epoch && !stopped_; ++epoch) {
        const double loss = run_epoch(epoch);
        epochs_done_ = epoch;
        model_.set_trained_epochs(epoch);

        double val_mrr = std::numeric_limits<double>::quiet_NaN();
        if (es.patience > 0 && epoch % es.check_interval == 0) {
            val_mrr = validation_mrr();
            if (val_mrr > best_mrr_) {
                best_mrr_ = val_mrr;
                best_epoch_ = epoch;
                best_entity_table_ = model_.entity_table();
                best_relation_table_ = model_.relation_table();
            } else if (epoch - best_epoch_ >= es.patience) {
                stopped_ = true;
                model_.entity_table_mut() = best_entity_table_;
                model_.relation_table_mut() = best_relation_table_;
                model_.set_trained_epochs(best_epoch_);
            }
        }
        log_.push_back({epoch, loss, val_mrr});
        if (on_epoch) on_epoch(epoch, model_);
    }
    return epochs_done_;
}

EmbeddingModel Trainer::take_model() { return std::move(model_); }

EmbeddingModel train(const TripleStore& store, const ModelConfig& config,
                     std::vector<TrainLogRow>* log_out) {
    Trainer trainer(store, config);
    trainer.train_to(config.max_epochs);
    if (log_out) *log_out = trainer.log();
    return trainer.take_model();
}

}  // namespace kgex
