#include "kgex/roar.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "kgex/stats.hpp"

namespace kgex {

const char* to_string(RoarKind kind) { return kind == RoarKind::roar ? "roar" : "rev-roar"; }
const char* to_string(RoarSubset subset) { return subset == RoarSubset::top1 ? "1" : "all"; }
const char* to_string(ExplainerKind explainer) {
    return explainer == ExplainerKind::example ? "example" : "random";
}

std::vector<int> Scenario::default_checkpoints() {
    return {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
}

void Scenario::validate() const {
    if (checkpoints.empty()) throw Error("scenario: needs at least one checkpoint");
    int prev = 0;
    for (int c : checkpoints) {
        if (c <= prev) throw Error("scenario: checkpoints must be strictly increasing and >= 1");
        prev = c;
    }
}

Mutation build_mutation(const TripleStore& store, const Triple& target,
                        const Explanation& explanation, const Scenario& scenario) {
    if (explanation.examples.empty())
        throw Error("build_mutation: explanation is empty; pick another target");

    std::vector<Triple> subset;
    if (scenario.subset == RoarSubset::top1) {
        subset.push_back(explanation.examples.front().triple);
    } else {
        subset.reserve(explanation.examples.size());
        for (const ExampleTriple& ex : explanation.examples) subset.push_back(ex.triple);
    }

    Mutation mutation;
    if (scenario.kind == RoarKind::roar) {
        mutation.remove = std::move(subset);
        return mutation;
    }

    // rev-roar: the predicate class collapses to the kept subset
    std::unordered_set<Triple, TripleHash> removed;
    for (std::uint32_t idx : store.triples_with_predicate(target.predicate)) {
        const Triple& t = store.train()[idx];
        if (t == target) continue;  // never touch the target itself
        mutation.remove.push_back(t);
        removed.insert(t);
    }
    for (const Triple& t : subset) {
        if (removed.count(t)) mutation.add.push_back(t);
    }
    return mutation;
}

RoarReport run_roar_with_mutation(const TripleStore& store, const ModelConfig& config,
                                  const Triple& target, const Mutation& mutation,
                                  const Scenario& scenario, int calibration_negatives) {
    scenario.validate();
    const TripleStore mutated = store.mutate(mutation.remove, mutation.add);

    ModelConfig run_config = config;
    run_config.max_epochs = scenario.checkpoints.back();
    run_config.early_stopping.patience = 0;  // continuous training with snapshots

    auto train_with_snapshots = [&](const TripleStore& data) {
        std::vector<EmbeddingModel> snapshots;
        snapshots.reserve(scenario.checkpoints.size());
        Trainer trainer(data, run_config);
        trainer.train_to(run_config.max_epochs, [&](int epoch, const EmbeddingModel& m) {
            if (std::binary_search(scenario.checkpoints.begin(), scenario.checkpoints.end(), epoch)) {
                snapshots.push_back(m);
            }
        });
        return snapshots;
    };

    const std::vector<EmbeddingModel> original = train_with_snapshots(store);
    const std::vector<EmbeddingModel> retrained = train_with_snapshots(mutated);

    RoarReport report;
    report.scenario = scenario;
    report.removed = mutation.remove.size();
    report.added = mutation.add.size();

    const auto& test = store.test();
    std::vector<double> p_original(test.size()), p_retrained(test.size());
    for (std::size_t i = 0; i < scenario.checkpoints.size(); ++i) {
        // both calibrations run on the un-mutated validation split
        const Calibrator cal_original =
            Calibrator::fit(original[i], store, calibration_negatives, scenario.seed);
        const Calibrator cal_retrained =
            Calibrator::fit(retrained[i], store, calibration_negatives, scenario.seed);

        for (std::size_t j = 0; j < test.size(); ++j) {
            p_original[j] = cal_original.calibrate(original[i].score(test[j]));
            p_retrained[j] = cal_retrained.calibrate(retrained[i].score(test[j]));
        }
        const double target_original = cal_original.calibrate(original[i].score(target));
        const double target_retrained = cal_retrained.calibrate(retrained[i].score(target));

        std::vector<double> diff(test.size());
        for (std::size_t j = 0; j < test.size(); ++j) diff[j] = p_original[j] - p_retrained[j];

        report.rows.push_back({scenario.checkpoints[i], mean(diff) * 100.0,
                               (target_original - target_retrained) * 100.0,
                               pearson(p_original, p_retrained),
                               least_squares_slope(p_original, p_retrained)});
    }
    return report;
}

RoarReport run_roar(const TripleStore& store, const ModelConfig& config, const Triple& target,
                    const Explanation& explanation, const Scenario& scenario,
                    int calibration_negatives) {
    const Mutation mutation = build_mutation(store, target, explanation, scenario);
    return run_roar_with_mutation(store, config, target, mutation, scenario, calibration_negatives);
}

std::vector<ComparisonRow> to_comparison_rows(const RoarReport& report) {
    std::vector<ComparisonRow> rows;
    rows.reserve(report.rows.size());
    for (const RoarRow& r : report.rows) {
        rows.push_back({r.epoch, report.scenario.kind, report.scenario.subset,
                        report.scenario.explainer, true, r.mean_diff_pct, r.target_diff_pct,
                        r.pearson_r, r.slope});
    }
    return rows;
}

std::vector<ComparisonRow> compare_explainers(const TripleStore& store, const ModelConfig& config,
                                              const EmbeddingModel& reference_model,
                                              const Calibrator& reference_calibrator,
                                              const ExplainIndexes& indexes, const Triple& target,
                                              const ExplainConfig& explain_config,
                                              const ScenarioGrid& grid, int calibration_negatives) {
    const Explanation example_explanation =
        explain(reference_model, reference_calibrator, store, indexes, target, explain_config);
    Explanation random_explanation;
    if (example_explanation.examples.empty()) {
        random_explanation.status = ExplanationStatus::none_found;
    } else {
        random_explanation = explain_random_baseline(store, target,
                                                     example_explanation.examples.size(), grid.seed);
    }

    std::vector<ComparisonRow> rows;
    for (RoarKind kind : grid.kinds) {
        for (RoarSubset subset : grid.subsets) {
            for (ExplainerKind explainer : {ExplainerKind::example, ExplainerKind::random_baseline}) {
                Scenario scenario{kind, subset, grid.checkpoints, explainer, grid.seed};
                const Explanation& explanation = explainer == ExplainerKind::example
                                                     ? example_explanation
                                                     : random_explanation;
                if (explanation.examples.empty()) {
                    for (int epoch : grid.checkpoints) {
                        ComparisonRow row;
                        row.epoch = epoch;
                        row.kind = kind;
                        row.subset = subset;
                        row.explainer = explainer;
                        row.available = false;
                        rows.push_back(row);
                    }
                    continue;
                }
                const RoarReport report =
                    run_roar(store, config, target, explanation, scenario, calibration_negatives);
                auto report_rows = to_comparison_rows(report);
                rows.insert(rows.end(), report_rows.begin(), report_rows.end());
            }
        }
    }
    return rows;
}

void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows) {
    out << "epoch,scenario,subset,explainer,mean_diff,target_diff,pearson_r,slope\n";
    for (const ComparisonRow& r : rows) {
        out << r.epoch << ',' << to_string(r.kind) << ',' << to_string(r.subset) << ','
            << to_string(r.explainer) << ',';
        if (!r.available) {
            out << "-,-,-,-\n";
            continue;
        }
        out << r.mean_diff_pct << ',' << r.target_diff_pct << ',' << r.pearson_r << ',' << r.slope
            << '\n';
    }
}

std::string format_comparison_table(std::span<const ComparisonRow> rows) {
    // column per (scenario, subset) present in the row set
    std::vector<std::pair<RoarKind, RoarSubset>> columns;
    std::vector<int> epochs;
    for (const ComparisonRow& r : rows) {
        if (std::find(columns.begin(), columns.end(), std::make_pair(r.kind, r.subset)) ==
            columns.end()) {
            columns.emplace_back(r.kind, r.subset);
        }
        if (std::find(epochs.begin(), epochs.end(), r.epoch) == epochs.end()) {
            epochs.push_back(r.epoch);
        }
    }
    std::sort(epochs.begin(), epochs.end());

    auto find_row = [&](int epoch, RoarKind kind, RoarSubset subset,
                        ExplainerKind explainer) -> const ComparisonRow* {
        for (const ComparisonRow& r : rows) {
            if (r.epoch == epoch && r.kind == kind && r.subset == subset && r.explainer == explainer)
                return &r;
        }
        return nullptr;
    };

    std::ostringstream out;
    out << std::left << std::setw(12) << "epoch" << std::setw(10) << "average";
    for (auto [kind, subset] : columns) {
        out << std::setw(14) << (std::string(to_string(kind)) + " " + to_string(subset));
    }
    out << '\n';

    for (int epoch : epochs) {
        for (ExplainerKind explainer : {ExplainerKind::example, ExplainerKind::random_baseline}) {
            std::ostringstream head;
            if (explainer == ExplainerKind::example) {
                head << epoch << " ours";
            } else {
                head << "   rand.";
            }
            out << std::setw(12) << head.str();

            const ComparisonRow* first = nullptr;
            for (auto [kind, subset] : columns) {
                if (!first) first = find_row(epoch, kind, subset, explainer);
            }
            if (first && first->available) {
                out << std::setw(10) << std::fixed << std::setprecision(3) << first->mean_diff_pct;
            } else {
                out << std::setw(10) << "-";
            }
            for (auto [kind, subset] : columns) {
                const ComparisonRow* r = find_row(epoch, kind, subset, explainer);
                if (r && r->available) {
                    out << std::setw(14) << std::fixed << std::setprecision(3) << r->target_diff_pct;
                } else {
                    out << std::setw(14) << "-";
                }
            }
            out << '\n';
        }
    }
    return out.str();
}

}  // namespace kgex
