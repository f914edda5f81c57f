#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kgex/embedding_model.hpp"
#include "kgex/triple_store.hpp"

namespace kgex {

// Monotone map from raw plausibility score to a probability in (0,1):
// p = sigmoid(a * score + b), fitted on validation positives plus sampled
// corruptions (Platt scaling). A fitted slope a <= 0 would invert the score
// ordering and is rejected.
class Calibrator {
public:
    Calibrator() = default;
    Calibrator(double slope, double intercept, double negative_ratio, std::uint64_t model_fingerprint);

    // Fits on the validation split: each positive contributes
    // `negatives_per_positive` corruptions filtered against all splits.
    // Class weights make the implied base rate 1/(1+ratio).
    static Calibrator fit(const EmbeddingModel& model, const TripleStore& store,
                          int negatives_per_positive = 1, std::uint64_t seed = 0);

    // Core weighted logistic fit; labels are 0/1.
    static Calibrator fit_scores(std::span<const double> scores, std::span<const int> labels,
                                 double negative_ratio, std::uint64_t model_fingerprint = 0);

    double calibrate(double raw_score) const;

    bool fitted() const { return fitted_; }
    double slope() const { return a_; }
    double intercept() const { return b_; }
    double negative_ratio() const { return ratio_; }
    std::uint64_t model_fingerprint() const { return model_fingerprint_; }

    static constexpr double kClamp = 1e-12;

private:
    double a_ = 1.0, b_ = 0.0, ratio_ = 1.0;
    std::uint64_t model_fingerprint_ = 0;
    bool fitted_ = false;
};

struct ReliabilityBin {
    double mean_predicted;  // bin midpoint when empty
    double empirical_frequency;
    std::size_t count;
};

struct ReliabilityTable {
    std::vector<ReliabilityBin> bins;
    double ece = 0.0;
};

// Equal-width bins over [0,1]; ECE = sum (count/total) * |mean - freq|.
ReliabilityTable reliability_from_predictions(std::span<const double> probabilities,
                                              std::span<const int> labels, int bins);

struct LabeledTriple {
    Triple triple;
    int label;  // 1 = true, 0 = false
};

ReliabilityTable reliability(const Calibrator& calibrator, const EmbeddingModel& model,
                             std::span<const LabeledTriple> data, int bins);

double brier_score(std::span<const double> probabilities, std::span<const int> labels);

// Labeled calibration sample: validation positives plus `negatives_per_positive`
// uniform corruptions per positive, filtered against every split.
struct CalibrationSample {
    std::vector<double> scores;
    std::vector<int> labels;
};
CalibrationSample calibration_sample(const EmbeddingModel& model, const TripleStore& store,
                                     int negatives_per_positive, std::uint64_t seed);

}  // namespace kgex
