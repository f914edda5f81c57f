#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kgex/explainer.hpp"
#include "kgex/trainer.hpp"
#include "kgex/triple_store.hpp"

namespace kgex {

enum class RoarKind { roar, rev_roar };
enum class RoarSubset { top1, all };
enum class ExplainerKind { example, random_baseline };

const char* to_string(RoarKind kind);
const char* to_string(RoarSubset subset);
const char* to_string(ExplainerKind explainer);

struct Scenario {
    RoarKind kind = RoarKind::roar;
    RoarSubset subset = RoarSubset::top1;
    std::vector<int> checkpoints = default_checkpoints();
    ExplainerKind explainer = ExplainerKind::example;
    std::uint64_t seed = 0;

    static std::vector<int> default_checkpoints();  // 10,20,...,100
    void validate() const;
};

struct Mutation {
    std::vector<Triple> remove, add;
};

// roar: remove the chosen explanation subset. rev-roar: remove every train
// triple carrying the target's predicate and add the subset back, so the
// predicate class ends up equal to the subset. The target triple itself is
// never touched.
Mutation build_mutation(const TripleStore& store, const Triple& target,
                        const Explanation& explanation, const Scenario& scenario);

struct RoarRow {
    int epoch;
    double mean_diff_pct;    // mean over test of (original - retrained) * 100
    double target_diff_pct;  // same for the target triple
    double pearson_r;        // test probabilities, retrained vs original
    double slope;            // least-squares slope, retrained on original
};

struct RoarReport {
    Scenario scenario;
    std::size_t removed = 0, added = 0;
    std::vector<RoarRow> rows;
};

// Trains the original and the mutated-data model with the same config and
// seed (continuous training, snapshots at every checkpoint), recalibrates
// both per checkpoint on the un-mutated validation split, and reports the
// probability differences and correlations over the test set.
RoarReport run_roar(const TripleStore& store, const ModelConfig& config, const Triple& target,
                    const Explanation& explanation, const Scenario& scenario,
                    int calibration_negatives = 1);
RoarReport run_roar_with_mutation(const TripleStore& store, const ModelConfig& config,
                                  const Triple& target, const Mutation& mutation,
                                  const Scenario& scenario, int calibration_negatives = 1);

struct ComparisonRow {
    int epoch = 0;
    RoarKind kind = RoarKind::roar;
    RoarSubset subset = RoarSubset::top1;
    ExplainerKind explainer = ExplainerKind::example;
    bool available = true;  // false when that explainer produced no usable explanation
    double mean_diff_pct = 0, target_diff_pct = 0, pearson_r = 0, slope = 0;
};

struct ScenarioGrid {
    std::vector<RoarKind> kinds = {RoarKind::roar, RoarKind::rev_roar};
    std::vector<RoarSubset> subsets = {RoarSubset::top1, RoarSubset::all};
    std::vector<int> checkpoints = Scenario::default_checkpoints();
    std::uint64_t seed = 0;
};

// Side-by-side rows for the example explainer and the size-matched random
// baseline, keyed (epoch, scenario, subset, explainer). Combinations where
// an explainer has nothing to offer come back as unavailable markers.
std::vector<ComparisonRow> compare_explainers(const TripleStore& store, const ModelConfig& config,
                                              const EmbeddingModel& reference_model,
                                              const Calibrator& reference_calibrator,
                                              const ExplainIndexes& indexes, const Triple& target,
                                              const ExplainConfig& explain_config,
                                              const ScenarioGrid& grid,
                                              int calibration_negatives = 1);

// CSV: epoch,scenario,subset,explainer,mean_diff,target_diff,pearson_r,slope
void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows);
std::vector<ComparisonRow> to_comparison_rows(const RoarReport& report);

// Text table grouped by epoch with one sub-row per explainer.
std::string format_comparison_table(std::span<const ComparisonRow> rows);

}  // namespace kgex
