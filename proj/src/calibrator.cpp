#include "kgex/calibrator.hpp"

#include <algorithm>
#include <cmath>

#include "kgex/ranking.hpp"

namespace kgex {

namespace {

double sigmoid(double t) {
    if (t >= 0) {
        return 1.0 / (1.0 + std::exp(-t));
    }
    const double e = std::exp(t);
    return e / (1.0 + e);
}

double weighted_nll(std::span<const double> scores, std::span<const double> targets,
                    std::span<const double> weights, double a, double b) {
    double nll = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double t = a * scores[i] + b;
        // cross-entropy against the (soft) target, log(1+exp) form for stability
        const double log1pexp = t > 30 ? t : std::log1p(std::exp(t));
        nll += weights[i] * (log1pexp - targets[i] * t);
    }
    return nll;
}

}  // namespace

Calibrator::Calibrator(double slope, double intercept, double negative_ratio,
                       std::uint64_t model_fingerprint)
    : a_(slope), b_(intercept), ratio_(negative_ratio), model_fingerprint_(model_fingerprint),
      fitted_(true) {}

Calibrator Calibrator::fit_scores(std::span<const double> scores, std::span<const int> labels,
                                  double negative_ratio, std::uint64_t model_fingerprint) {
    if (scores.size() != labels.size() || scores.size() < 2)
        throw Error("calibrator fit: need at least two labeled scores");

    std::size_t n_pos = 0, n_neg = 0;
    for (int y : labels) (y ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0) throw Error("calibrator fit: need both classes present");

    const double lo = *std::min_element(scores.begin(), scores.end());
    const double hi = *std::max_element(scores.begin(), scores.end());
    if (lo == hi) throw Error("calibrator fit: degenerate scores (all equal)");

    // Class weights so positives carry 1/(1+ratio) of the total mass.
    const double w_pos = 1.0;
    const double w_neg = negative_ratio * static_cast<double>(n_pos) / static_cast<double>(n_neg);
    // Platt's prior-smoothed targets keep the optimum finite when the two
    // classes are perfectly separable.
    const double t_pos = (static_cast<double>(n_pos) + 1.0) / (static_cast<double>(n_pos) + 2.0);
    const double t_neg = 1.0 / (static_cast<double>(n_neg) + 2.0);
    std::vector<double> weights(scores.size()), targets(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        weights[i] = labels[i] ? w_pos : w_neg;
        targets[i] = labels[i] ? t_pos : t_neg;
    }

    // Damped Newton on the (convex) weighted cross-entropy.
    double a = 0.0, b = 0.0;
    double nll = weighted_nll(scores, targets, weights, a, b);
    for (int iter = 0; iter < 200; ++iter) {
        double ga = 0.0, gb = 0.0, haa = 0.0, hab = 0.0, hbb = 0.0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            const double s = scores[i];
            const double p = sigmoid(a * s + b);
            const double w = weights[i];
            const double err = w * (p - targets[i]);
            ga += err * s;
            gb += err;
            const double h = w * std::max(p * (1.0 - p), 1e-12);
            haa += h * s * s;
            hab += h * s;
            hbb += h;
        }
        const double det = haa * hbb - hab * hab;
        if (!(std::abs(det) > 1e-30)) throw Error("calibrator fit: singular Hessian");
        double da = -(hbb * ga - hab * gb) / det;
        double db = -(-hab * ga + haa * gb) / det;

        double step = 1.0;
        double next_nll = weighted_nll(scores, targets, weights, a + da, b + db);
        while (next_nll > nll && step > 1e-8) {
            step *= 0.5;
            next_nll = weighted_nll(scores, targets, weights, a + step * da, b + step * db);
        }
        a += step * da;
        b += step * db;
        const bool converged = std::abs(ga) < 1e-10 && std::abs(gb) < 1e-10;
        nll = next_nll;
        if (converged) break;
    }

    if (!(a > 0.0)) {
        throw Error("calibrator fit: non-positive slope (a=" + std::to_string(a) +
                    "); score ordering would not be preserved");
    }
    return Calibrator(a, b, negative_ratio, model_fingerprint);
}

CalibrationSample calibration_sample(const EmbeddingModel& model, const TripleStore& store,
                                     int negatives_per_positive, std::uint64_t seed) {
    if (store.valid().empty()) throw Error("calibration requires a validation split");
    if (negatives_per_positive < 1) throw Error("calibration: negatives per positive must be >= 1");

    FilterIndex filter(store);
    std::mt19937_64 rng(mix_seed(seed, 0xCA11));
    const std::size_t e_count = model.entity_count();

    CalibrationSample sample;
    sample.scores.reserve(store.valid().size() * (1 + negatives_per_positive));
    for (const Triple& t : store.valid()) {
        sample.scores.push_back(model.score(t));
        sample.labels.push_back(1);
        for (int j = 0; j < negatives_per_positive; ++j) {
            Triple c = t;
            for (int attempt = 0; attempt < 64; ++attempt) {
                c = t;
                const bool corrupt_subject = uniform_index(rng, 2) == 0;
                (corrupt_subject ? c.subject : c.object) =
                    static_cast<EntityId>(uniform_index(rng, e_count));
                if (c != t && !filter.contains(c)) break;
            }
            sample.scores.push_back(model.score(c));
            sample.labels.push_back(0);
        }
    }
    return sample;
}

Calibrator Calibrator::fit(const EmbeddingModel& model, const TripleStore& store,
                           int negatives_per_positive, std::uint64_t seed) {
    CalibrationSample sample = calibration_sample(model, store, negatives_per_positive, seed);
    return fit_scores(sample.scores, sample.labels, static_cast<double>(negatives_per_positive),
                      model.fingerprint());
}

double Calibrator::calibrate(double raw_score) const {
    if (!fitted_) throw Error("calibrator not fitted");
    const double p = sigmoid(a_ * raw_score + b_);
    return std::clamp(p, kClamp, 1.0 - kClamp);
}

ReliabilityTable reliability_from_predictions(std::span<const double> probabilities,
                                              std::span<const int> labels, int bins) {
    if (bins < 2) throw Error("reliability: bins must be >= 2");
    if (probabilities.size() != labels.size()) throw Error("reliability: size mismatch");

    ReliabilityTable table;
    table.bins.resize(bins);
    std::vector<double> pred_sum(bins, 0.0), label_sum(bins, 0.0);
    std::vector<std::size_t> counts(bins, 0);

    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        const double p = probabilities[i];
        int b = static_cast<int>(p * bins);
        b = std::clamp(b, 0, bins - 1);  // p == 1.0 lands in the last bin
        pred_sum[b] += p;
        label_sum[b] += labels[i];
        counts[b]++;
    }

    const double total = static_cast<double>(probabilities.size());
    for (int b = 0; b < bins; ++b) {
        auto& row = table.bins[b];
        row.count = counts[b];
        if (counts[b] == 0) {
            row.mean_predicted = (b + 0.5) / bins;
            row.empirical_frequency = 0.0;
            continue;
        }
        row.mean_predicted = pred_sum[b] / counts[b];
        row.empirical_frequency = label_sum[b] / counts[b];
        table.ece += (counts[b] / total) * std::abs(row.mean_predicted - row.empirical_frequency);
    }
    return table;
}

ReliabilityTable reliability(const Calibrator& calibrator, const EmbeddingModel& model,
                             std::span<const LabeledTriple> data, int bins) {
    std::vector<double> probs;
    std::vector<int> labels;
    probs.reserve(data.size());
    labels.reserve(data.size());
    for (const auto& lt : data) {
        probs.push_back(calibrator.calibrate(model.score(lt.triple)));
        labels.push_back(lt.label);
    }
    return reliability_from_predictions(probs, labels, bins);
}

double brier_score(std::span<const double> probabilities, std::span<const int> labels) {
    if (probabilities.empty() || probabilities.size() != labels.size())
        throw Error("brier: bad input sizes");
    double sum = 0.0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        const double d = probabilities[i] - labels[i];
        sum += d * d;
    }
    return sum / static_cast<double>(probabilities.size());
}

}  // namespace kgex
