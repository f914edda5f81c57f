// kgex: train / calibrate / explain / explain-batch / roar over TSV triple
// datasets. Every run writes its outputs plus a manifest.json that is enough
// to reproduce the command.

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kgex/explanation_graph.hpp"
#include "kgex/parallel.hpp"
#include "kgex/roar.hpp"
#include "kgex/snapshot.hpp"
#include "kgex/stats.hpp"
#include "kgex/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace kgex;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

std::string timestamp_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y%m%d-%H%M%S");
    return os.str();
}

fs::path resolve_out_dir(std::string out, const std::string& command) {
    if (out.empty()) out = command + "-" + timestamp_now();
    fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

std::string resolve_data_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("KGEX_DATA_DIR")) return env;
    throw Error("no dataset directory: pass --data or set KGEX_DATA_DIR");
}

fs::path find_split(const fs::path& dir, const std::string& base) {
    for (const char* ext : {".txt", ".tsv"}) {
        fs::path p = dir / (base + ext);
        if (fs::exists(p)) return p;
    }
    throw Error("missing split file in " + dir.string() + ": expected " + base + ".txt or " + base +
                ".tsv (need train/valid/test)");
}

struct Dataset {
    TripleStore store;
    fs::path train_path, valid_path, test_path;
};

Dataset load_dataset(const std::string& dir_flag) {
    const fs::path dir = resolve_data_dir(dir_flag);
    const fs::path train_path = find_split(dir, "train");
    const fs::path valid_path = find_split(dir, "valid");
    const fs::path test_path = find_split(dir, "test");

    auto entities = std::make_shared<Dictionary>();
    auto relations = std::make_shared<Dictionary>();
    auto train = load_tsv(train_path.string(), *entities, *relations);
    auto valid = load_tsv(valid_path.string(), *entities, *relations);
    auto test = load_tsv(test_path.string(), *entities, *relations);
    if (train.duplicates_collapsed > 0) {
        std::cerr << "note: collapsed " << train.duplicates_collapsed
                  << " duplicate train line(s)\n";
    }
    TripleStore store(std::move(train.triples), std::move(valid.triples), std::move(test.triples),
                      std::move(entities), std::move(relations));
    return {std::move(store), train_path, valid_path, test_path};
}

std::uint32_t resolve_label(const Dictionary& dict, const std::string& label, const char* what) {
    if (auto id = dict.find(label)) return *id;
    std::ostringstream msg;
    msg << "unknown " << what << " label: \"" << label << "\"";
    auto near = dict.nearest(label, 3);
    if (!near.empty()) {
        msg << " (closest:";
        for (const auto& n : near) msg << " \"" << n << "\"";
        msg << ")";
    }
    throw Error(msg.str());
}

Triple parse_target(const TripleStore& store, const std::string& spec) {
    const char sep = spec.find('\t') != std::string::npos ? '\t' : ',';
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(spec);
    while (std::getline(in, item, sep)) parts.push_back(item);
    if (parts.size() != 3) {
        throw Error("target must be subject,predicate,object (or tab-separated): " + spec);
    }
    return {resolve_label(store.entities(), parts[0], "entity"),
            resolve_label(store.relations(), parts[1], "relation"),
            resolve_label(store.entities(), parts[2], "entity")};
}

json config_json(const ModelConfig& cfg) {
    return {{"model", to_string(cfg.kind)},
            {"k", cfg.k},
            {"eta", cfg.eta},
            {"learning_rate", cfg.learning_rate},
            {"l2_lambda", cfg.l2_lambda},
            {"max_epochs", cfg.max_epochs},
            {"batch_size", cfg.batch_size},
            {"patience", cfg.early_stopping.patience},
            {"check_interval", cfg.early_stopping.check_interval},
            {"seed", cfg.seed}};
}

void write_manifest(const fs::path& out_dir, const std::string& command, const json& config,
                    const json& inputs, const std::vector<std::string>& outputs, std::uint64_t seed,
                    double wall_seconds) {
    json manifest{{"command", command},
                  {"version", kVersion},
                  {"config", config},
                  {"inputs", inputs},
                  {"outputs", outputs},
                  {"seed", seed},
                  {"threads", ThreadPolicy::max_threads},
                  {"deterministic", ThreadPolicy::deterministic},
                  {"wall_time_seconds", wall_seconds},
                  {"timestamp_utc", timestamp_now()}};
    std::ofstream out(out_dir / "manifest.json");
    out << manifest.dump(2) << '\n';
}

json number_or_null(double x) {
    if (std::isnan(x)) return nullptr;
    return x;
}

json explanation_json(const Explanation& ex, const TripleStore& store, const ExplainConfig& cfg) {
    const Dictionary& ents = store.entities();
    const Dictionary& rels = store.relations();
    json doc;
    doc["target"] = {{"subject", ents.label(ex.target.subject)},
                     {"predicate", rels.label(ex.target.predicate)},
                     {"object", ents.label(ex.target.object)}};
    doc["probability"] = number_or_null(ex.target_probability);
    doc["status"] = ex.status == ExplanationStatus::found ? "found" : "none-found";
    doc["scored"] = ex.scored;
    doc["examples"] = json::array();
    for (const auto& e : ex.examples) {
        doc["examples"].push_back({{"subject", ents.label(e.triple.subject)},
                                   {"predicate", rels.label(e.triple.predicate)},
                                   {"object", ents.label(e.triple.object)},
                                   {"score", number_or_null(e.score)},
                                   {"subject_distance", number_or_null(e.subject_distance)},
                                   {"object_distance", number_or_null(e.object_distance)}});
    }
    doc["config"] = {{"m", cfg.m},
                     {"subject_weight", cfg.subject_weight},
                     {"object_weight", cfg.object_weight},
                     {"max_examples", cfg.max_examples == 0 ? json(nullptr) : json(cfg.max_examples)},
                     {"same_predicate_only", cfg.same_predicate_only},
                     {"hops", cfg.hops},
                     {"strategy", to_string(cfg.strategy)}};
    return doc;
}

// S / P / O / Score rows, target first
std::string explanation_table(const Explanation& ex, const TripleStore& store) {
    const Dictionary& ents = store.entities();
    const Dictionary& rels = store.relations();
    std::ostringstream out;
    out << "S\tP\tO\tScore\n";
    out << ents.label(ex.target.subject) << '\t' << rels.label(ex.target.predicate) << '\t'
        << ents.label(ex.target.object) << "\tTT\n";
    for (const auto& e : ex.examples) {
        out << ents.label(e.triple.subject) << '\t' << rels.label(e.triple.predicate) << '\t'
            << ents.label(e.triple.object) << '\t';
        if (std::isnan(e.score)) {
            out << "n/a";
        } else {
            out << std::fixed << std::setprecision(5) << e.score;
        }
        out << '\n';
    }
    return out.str();
}

struct ModelFlags {
    std::string model = "transe";
    int k = 32;
    int eta = 10;
    double lr = 1e-3;
    double lambda = 1e-4;
    int epochs = 200;
    int batch_size = 512;
    int patience = 0;
    int check_interval = 10;
    std::uint64_t seed = 0;
    std::string profile;

    ModelConfig to_config() const {
        ModelConfig cfg;
        cfg.kind = model_kind_from_string(model);
        cfg.k = k;
        cfg.eta = eta;
        cfg.learning_rate = lr;
        cfg.l2_lambda = lambda;
        cfg.max_epochs = epochs;
        cfg.batch_size = batch_size;
        cfg.early_stopping.patience = patience;
        cfg.early_stopping.check_interval = check_interval;
        cfg.seed = seed;
        cfg.validate();
        return cfg;
    }
};

void add_model_flags(CLI::App* cmd, ModelFlags& flags) {
    cmd->add_option("--model", flags.model, "transe|distmult|complex")->capture_default_str();
    cmd->add_option("--k", flags.k, "embedding dimension")->capture_default_str();
    cmd->add_option("--eta", flags.eta, "negatives per positive")->capture_default_str();
    cmd->add_option("--lr", flags.lr, "learning rate")->capture_default_str();
    cmd->add_option("--lambda", flags.lambda, "L2 lambda")->capture_default_str();
    cmd->add_option("--epochs", flags.epochs, "max training epochs")->capture_default_str();
    cmd->add_option("--batch-size", flags.batch_size, "mini-batch size")->capture_default_str();
    cmd->add_option("--patience", flags.patience, "early-stopping patience in epochs (0 = off)")
        ->capture_default_str();
    cmd->add_option("--check-interval", flags.check_interval, "validation check interval")
        ->capture_default_str();
    cmd->add_option("--seed", flags.seed, "random seed")->capture_default_str();
    cmd->add_option("--profile", flags.profile,
                    "preset: paper-fb15k237 (k=400) or paper-wn18rr (k=350)");
}

void apply_profile(ModelFlags& flags) {
    if (flags.profile.empty()) return;
    if (flags.profile == "paper-fb15k237" || flags.profile == "paper-wn18rr") {
        flags.model = "transe";
        flags.k = flags.profile == "paper-fb15k237" ? 400 : 350;
        flags.eta = 30;
        flags.lr = 1e-4;
        flags.lambda = 1e-4;
        flags.epochs = 4000;
        flags.patience = 200;
        flags.check_interval = 50;
        flags.seed = 0;
        return;
    }
    throw Error("unknown profile: " + flags.profile +
                " (expected paper-fb15k237 or paper-wn18rr)");
}

struct ExplainFlags {
    std::size_t m = 25;
    double subject_weight = 0.5;
    double object_weight = 0.5;
    std::size_t max_examples = 0;
    int hops = 1;
    std::string strategy = "permissive";
    std::string backend = "auto";
    bool predicate_neighbours = false;

    ExplainConfig to_config() const {
        ExplainConfig cfg;
        cfg.m = m;
        cfg.subject_weight = subject_weight;
        cfg.object_weight = object_weight;
        cfg.max_examples = max_examples;
        cfg.hops = hops;
        cfg.strategy = prototype_strategy_from_string(strategy);
        cfg.same_predicate_only = !predicate_neighbours;
        cfg.validate();
        return cfg;
    }
};

void add_explain_flags(CLI::App* cmd, ExplainFlags& flags) {
    cmd->add_option("--m", flags.m, "neighbours per endpoint")->capture_default_str();
    cmd->add_option("--subject-weight", flags.subject_weight, "subject distance weight")
        ->capture_default_str();
    cmd->add_option("--object-weight", flags.object_weight, "object distance weight")
        ->capture_default_str();
    cmd->add_option("--max-examples", flags.max_examples, "cap on returned examples (0 = all)")
        ->capture_default_str();
    cmd->add_option("--n", flags.hops, "hop level for the prototype")->capture_default_str();
    cmd->add_option("--strategy", flags.strategy, "prototype strategy: strict|permissive")
        ->capture_default_str();
    cmd->add_option("--backend", flags.backend, "kNN backend: brute-force|partition-tree|auto")
        ->capture_default_str();
    cmd->add_flag("--predicate-neighbours", flags.predicate_neighbours,
                  "experimental: widen candidates over predicate-space neighbours");
}

json explain_config_json(const ExplainFlags& flags) {
    return {{"m", flags.m},
            {"subject_weight", flags.subject_weight},
            {"object_weight", flags.object_weight},
            {"max_examples", flags.max_examples},
            {"hops", flags.hops},
            {"strategy", flags.strategy},
            {"backend", flags.backend},
            {"predicate_neighbours", flags.predicate_neighbours}};
}

Calibrator require_calibrator(const Snapshot& snap, const std::string& path) {
    if (!snap.calibrator) {
        throw Error("snapshot " + path + " has no calibrator; run `kgex calibrate` first");
    }
    return *snap.calibrator;
}

// ---------------------------------------------------------------------------

int cmd_train(const std::string& data_dir, const std::string& out_flag, ModelFlags& flags) {
    Timer timer;
    apply_profile(flags);
    const ModelConfig cfg = flags.to_config();
    Dataset data = load_dataset(data_dir);
    const fs::path out_dir = resolve_out_dir(out_flag, "train");

    std::vector<TrainLogRow> log;
    EmbeddingModel model = train(data.store, cfg, &log);

    const fs::path snapshot_path = out_dir / "model.snapshot";
    save_snapshot(snapshot_path.string(), model);

    const fs::path log_path = out_dir / "training_log.csv";
    {
        std::ofstream out(log_path);
        out << "epoch,loss,val_mrr\n";
        for (const auto& row : log) {
            out << row.epoch << ',' << row.loss << ',';
            if (std::isnan(row.val_mrr)) {
                out << "";
            } else {
                out << row.val_mrr;
            }
            out << '\n';
        }
    }
    {
        std::ofstream ents(out_dir / "entities.tsv");
        data.store.entities().export_tsv(ents);
        std::ofstream rels(out_dir / "relations.tsv");
        data.store.relations().export_tsv(rels);
    }

    write_manifest(out_dir, "train", config_json(cfg),
                   {{"data_dir", resolve_data_dir(data_dir)},
                    {"train", data.train_path.string()},
                    {"valid", data.valid_path.string()},
                    {"test", data.test_path.string()}},
                   {"model.snapshot", "training_log.csv", "entities.tsv", "relations.tsv"}, cfg.seed,
                   timer.seconds());
    std::cout << "trained " << to_string(cfg.kind) << " (k=" << cfg.k << ") for "
              << model.trained_epochs() << " epoch(s); snapshot: " << snapshot_path.string() << '\n';
    return 0;
}

int cmd_calibrate(const std::string& snapshot_path, const std::string& data_dir,
                  const std::string& out_flag, int negatives_ratio, int bins, std::uint64_t seed,
                  bool refit) {
    Timer timer;
    Dataset data = load_dataset(data_dir);
    Snapshot snap = load_snapshot(snapshot_path);
    if (snap.calibrator && !refit) {
        throw Error("snapshot already calibrated; pass --refit to refit");
    }
    const fs::path out_dir = resolve_out_dir(out_flag, "calibrate");

    const Calibrator calibrator = Calibrator::fit(snap.model, data.store, negatives_ratio, seed);

    // reliability before (min-max normalized raw scores) and after calibration
    CalibrationSample sample =
        calibration_sample(snap.model, data.store, negatives_ratio, mix_seed(seed, 2));
    const auto [lo_it, hi_it] = std::minmax_element(sample.scores.begin(), sample.scores.end());
    const double lo = *lo_it, hi = *hi_it;
    std::vector<double> before, after;
    for (double s : sample.scores) {
        before.push_back(hi > lo ? (s - lo) / (hi - lo) : 0.5);
        after.push_back(calibrator.calibrate(s));
    }
    const auto table_before = reliability_from_predictions(before, sample.labels, bins);
    const auto table_after = reliability_from_predictions(after, sample.labels, bins);

    auto write_reliability = [&](const fs::path& path, const ReliabilityTable& table) {
        std::ofstream out(path);
        out << "bin,mean_predicted,empirical_frequency,count\n";
        for (std::size_t b = 0; b < table.bins.size(); ++b) {
            out << b << ',' << table.bins[b].mean_predicted << ','
                << table.bins[b].empirical_frequency << ',' << table.bins[b].count << '\n';
        }
    };
    write_reliability(out_dir / "reliability_before.csv", table_before);
    write_reliability(out_dir / "reliability_after.csv", table_after);

    const fs::path out_snapshot = out_dir / "model.snapshot";
    save_snapshot(out_snapshot.string(), snap.model, &calibrator);

    write_manifest(out_dir, "calibrate",
                   {{"negatives_ratio", negatives_ratio},
                    {"bins", bins},
                    {"slope", calibrator.slope()},
                    {"intercept", calibrator.intercept()},
                    {"ece_before", table_before.ece},
                    {"ece_after", table_after.ece}},
                   {{"snapshot", snapshot_path}, {"data_dir", resolve_data_dir(data_dir)}},
                   {"model.snapshot", "reliability_before.csv", "reliability_after.csv"}, seed,
                   timer.seconds());
    std::cout << "calibrated: sigma(" << calibrator.slope() << " * score + "
              << calibrator.intercept() << "); ECE " << table_before.ece << " -> " << table_after.ece
              << '\n';
    return 0;
}

int cmd_explain(const std::string& snapshot_path, const std::string& data_dir,
                const std::string& target_spec, bool select, const std::string& out_flag,
                ExplainFlags& flags, const std::string& format) {
    Timer timer;
    Dataset data = load_dataset(data_dir);
    Snapshot snap = load_snapshot(snapshot_path);
    const Calibrator calibrator = require_calibrator(snap, snapshot_path);
    const ExplainConfig cfg = flags.to_config();
    const KnnBackend backend = knn_backend_from_string(flags.backend);
    const fs::path out_dir = resolve_out_dir(out_flag, "explain");

    const ExplainIndexes indexes =
        ExplainIndexes::build(snap.model, backend, !cfg.same_predicate_only);
    const Triple target = select ? select_target(snap.model, calibrator, data.store)
                                 : parse_target(data.store, target_spec);

    const Explanation explanation =
        explain(snap.model, calibrator, data.store, indexes, target, cfg);

    std::vector<std::string> outputs;
    const bool all = format == "all";
    if (all || format == "json") {
        std::ofstream out(out_dir / "explanation.json");
        out << explanation_json(explanation, data.store, cfg).dump(2) << '\n';
        outputs.push_back("explanation.json");
    }
    if (all || format == "table") {
        std::ofstream out(out_dir / "explanation.txt");
        out << explanation_table(explanation, data.store);
        outputs.push_back("explanation.txt");
    }
    if (all || format == "json" || format == "dot") {
        std::vector<Triple> example_triples;
        for (const auto& e : explanation.examples) example_triples.push_back(e.triple);
        const PrototypeGraph prototype =
            aggregate_prototype(data.store, target, example_triples, cfg.hops, cfg.strategy);
        const ExplanationGraph graph = assemble(target, explanation.target_probability,
                                                explanation.examples, prototype, data.store,
                                                cfg.hops);
        if (all || format == "json") {
            std::ofstream out(out_dir / "graph.json");
            out << export_graph(graph, data.store, GraphFormat::json);
            outputs.push_back("graph.json");
        }
        if (all || format == "dot") {
            std::ofstream out(out_dir / "graph.dot");
            out << export_graph(graph, data.store, GraphFormat::dot);
            outputs.push_back("graph.dot");
        }
    }

    write_manifest(out_dir, "explain", explain_config_json(flags),
                   {{"snapshot", snapshot_path},
                    {"data_dir", resolve_data_dir(data_dir)},
                    {"target",
                     {{"subject", data.store.entities().label(target.subject)},
                      {"predicate", data.store.relations().label(target.predicate)},
                      {"object", data.store.entities().label(target.object)}}},
                    {"selected", select}},
                   outputs, 0, timer.seconds());

    if (explanation.status == ExplanationStatus::none_found) {
        std::cout << "no examples found within the configured constraints (none-found)\n";
    } else {
        std::cout << explanation.examples.size() << " example(s); closest score "
                  << explanation.examples.front().score << '\n';
    }
    return 0;
}

int cmd_explain_batch(const std::string& snapshot_path, const std::string& data_dir,
                      const std::string& targets_file, bool all_test, const std::string& out_flag,
                      ExplainFlags& flags) {
    Timer timer;
    Dataset data = load_dataset(data_dir);
    Snapshot snap = load_snapshot(snapshot_path);
    const Calibrator calibrator = require_calibrator(snap, snapshot_path);
    const ExplainConfig cfg = flags.to_config();
    const KnnBackend backend = knn_backend_from_string(flags.backend);
    const fs::path out_dir = resolve_out_dir(out_flag, "explain-batch");

    std::vector<Triple> targets;
    std::vector<std::string> parse_errors;  // line -> error, kept in output order
    if (all_test) {
        targets = data.store.test();
        parse_errors.assign(targets.size(), "");
    } else {
        std::ifstream in(targets_file);
        if (!in) throw Error("cannot open targets file: " + targets_file);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            try {
                targets.push_back(parse_target(data.store, line));
                parse_errors.push_back("");
            } catch (const std::exception& e) {
                targets.push_back({0, 0, 0});  // placeholder, masked by the error slot
                parse_errors.push_back(e.what());
            }
        }
    }

    const ExplainIndexes indexes =
        ExplainIndexes::build(snap.model, backend, !cfg.same_predicate_only);
    const Timer batch_timer;
    auto results = explain_batch(snap.model, calibrator, data.store, targets, cfg, &indexes);
    const double batch_seconds = batch_timer.seconds();

    std::size_t found = 0, none_found = 0, errors = 0;
    {
        std::ofstream out(out_dir / "explanations.jsonl");
        for (std::size_t i = 0; i < results.size(); ++i) {
            if (!parse_errors[i].empty()) {
                out << json{{"error", parse_errors[i]}}.dump() << '\n';
                ++errors;
                continue;
            }
            if (!results[i].ok()) {
                out << json{{"error", results[i].error}}.dump() << '\n';
                ++errors;
                continue;
            }
            const Explanation& ex = *results[i].explanation;
            (ex.status == ExplanationStatus::found ? found : none_found)++;
            out << explanation_json(ex, data.store, cfg).dump() << '\n';
        }
    }

    const double per_triple = targets.empty() ? 0.0 : batch_seconds / targets.size();
    json summary{{"count", targets.size()},      {"found", found},
                 {"none_found", none_found},     {"errors", errors},
                 {"total_seconds", batch_seconds}, {"seconds_per_triple", per_triple}};
    {
        std::ofstream out(out_dir / "summary.json");
        out << summary.dump(2) << '\n';
    }

    write_manifest(out_dir, "explain-batch", explain_config_json(flags),
                   {{"snapshot", snapshot_path},
                    {"data_dir", resolve_data_dir(data_dir)},
                    {"targets", all_test ? std::string("--all-test") : targets_file}},
                   {"explanations.jsonl", "summary.json"}, 0, timer.seconds());
    std::cout << targets.size() << " target(s) in " << batch_seconds << " s ("
              << per_triple << " s/triple); " << found << " found, " << none_found
              << " none-found, " << errors << " error(s)\n";
    return 0;
}

int cmd_roar(const std::string& data_dir, const std::string& out_flag, ModelFlags& model_flags,
             ExplainFlags& explain_flags, const std::string& scenario_name,
             const std::string& subset_name, const std::string& explainer_name,
             const std::string& checkpoints_csv, const std::string& target_spec, bool select) {
    Timer timer;
    apply_profile(model_flags);
    const ModelConfig cfg = model_flags.to_config();
    const ExplainConfig ecfg = explain_flags.to_config();
    Dataset data = load_dataset(data_dir);
    const fs::path out_dir = resolve_out_dir(out_flag, "roar");

    const RoarKind kind = [&] {
        if (scenario_name == "roar") return RoarKind::roar;
        if (scenario_name == "rev-roar") return RoarKind::rev_roar;
        throw Error("unknown scenario: " + scenario_name + " (expected roar|rev-roar)");
    }();
    const RoarSubset subset = [&] {
        if (subset_name == "1") return RoarSubset::top1;
        if (subset_name == "all") return RoarSubset::all;
        throw Error("unknown subset: " + subset_name + " (expected 1|all)");
    }();
    if (explainer_name != "example" && explainer_name != "random" && explainer_name != "both") {
        throw Error("unknown explainer: " + explainer_name + " (expected example|random|both)");
    }

    std::vector<int> checkpoints;
    {
        std::istringstream in(checkpoints_csv);
        std::string tok;
        while (std::getline(in, tok, ',')) {
            if (!tok.empty()) checkpoints.push_back(std::stoi(tok));
        }
        if (checkpoints.empty()) checkpoints = Scenario::default_checkpoints();
    }

    std::cout << "training reference model (" << cfg.max_epochs << " epochs)...\n";
    const EmbeddingModel reference = train(data.store, cfg);
    const Calibrator calibrator = Calibrator::fit(reference, data.store, 1, cfg.seed);
    const ExplainIndexes indexes = ExplainIndexes::build(
        reference, knn_backend_from_string(explain_flags.backend), !ecfg.same_predicate_only);

    const Triple target = select || target_spec.empty()
                              ? select_target(reference, calibrator, data.store)
                              : parse_target(data.store, target_spec);
    std::cout << "target: " << data.store.entities().label(target.subject) << " -"
              << data.store.relations().label(target.predicate) << "-> "
              << data.store.entities().label(target.object) << '\n';

    const Explanation explanation =
        explain(reference, calibrator, data.store, indexes, target, ecfg);
    if (explanation.status == ExplanationStatus::none_found) {
        throw Error("explanation is none-found for this target; pick a different target "
                    "(or raise --m)");
    }

    std::vector<ComparisonRow> rows;
    if (explainer_name == "both") {
        ScenarioGrid grid;
        grid.kinds = {kind};
        grid.subsets = {subset};
        grid.checkpoints = checkpoints;
        grid.seed = cfg.seed;
        rows = compare_explainers(data.store, cfg, reference, calibrator, indexes, target, ecfg,
                                  grid);
    } else {
        Scenario scenario{kind, subset, checkpoints,
                          explainer_name == "example" ? ExplainerKind::example
                                                      : ExplainerKind::random_baseline,
                          cfg.seed};
        Explanation used = explanation;
        if (scenario.explainer == ExplainerKind::random_baseline) {
            used = explain_random_baseline(data.store, target, explanation.examples.size(),
                                           cfg.seed);
            if (used.examples.empty()) {
                throw Error("random baseline has no triples to draw for this predicate");
            }
        }
        rows = to_comparison_rows(run_roar(data.store, cfg, target, used, scenario));
    }

    std::vector<std::string> outputs{"report.csv", "table.txt"};
    {
        std::ofstream out(out_dir / "report.csv");
        write_comparison_csv(out, rows);
    }
    {
        std::ofstream out(out_dir / "table.txt");
        out << format_comparison_table(rows);
    }
    // per-metric (epoch, value) series for external plotting
    for (ExplainerKind ek : {ExplainerKind::example, ExplainerKind::random_baseline}) {
        std::vector<const ComparisonRow*> series;
        for (const auto& r : rows) {
            if (r.explainer == ek && r.available) series.push_back(&r);
        }
        if (series.empty()) continue;
        const std::string stem = std::string("plot_") + to_string(kind) + "_" + to_string(subset) +
                                 "_" + to_string(ek);
        struct MetricOut {
            const char* name;
            double ComparisonRow::*field;
        };
        for (const MetricOut& metric :
             {MetricOut{"target_diff", &ComparisonRow::target_diff_pct},
              MetricOut{"mean_diff", &ComparisonRow::mean_diff_pct},
              MetricOut{"pearson_r", &ComparisonRow::pearson_r},
              MetricOut{"slope", &ComparisonRow::slope}}) {
            const std::string name = stem + "_" + metric.name + ".tsv";
            std::ofstream out(out_dir / name);
            out << "epoch\t" << metric.name << '\n';
            for (const auto* r : series) out << r->epoch << '\t' << r->*(metric.field) << '\n';
            outputs.push_back(name);
        }
    }

    write_manifest(out_dir, "roar",
                   {{"model", config_json(cfg)},
                    {"explain", explain_config_json(explain_flags)},
                    {"scenario", scenario_name},
                    {"subset", subset_name},
                    {"explainer", explainer_name},
                    {"checkpoints", checkpoints}},
                   {{"data_dir", resolve_data_dir(data_dir)},
                    {"target",
                     {{"subject", data.store.entities().label(target.subject)},
                      {"predicate", data.store.relations().label(target.predicate)},
                      {"object", data.store.entities().label(target.object)}}}},
                   outputs, cfg.seed, timer.seconds());
    std::cout << "report written to " << (out_dir / "report.csv").string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"knowledge-graph embedding link-prediction training, calibration, "
                 "influential-example explanations, and remove-and-retrain evaluation"};
    app.set_version_flag("--version", std::string("kgex ") + kVersion);
    app.require_subcommand(1);

    int threads = 0;
    bool deterministic = false;
    app.add_option("--threads", threads, "max worker threads (0 = all)")->capture_default_str();
    app.add_flag("--deterministic", deterministic,
                 "force sequential reductions (bitwise-reproducible)");

    std::string data_dir, out_dir, snapshot_path;

    // train
    auto* train_cmd = app.add_subcommand("train", "train an embedding model");
    ModelFlags train_flags;
    train_cmd->add_option("--data", data_dir, "dataset directory (train/valid/test TSVs)");
    train_cmd->add_option("--out", out_dir, "output directory");
    add_model_flags(train_cmd, train_flags);

    // calibrate
    auto* cal_cmd = app.add_subcommand("calibrate", "fit a probability calibrator on validation");
    int negatives_ratio = 1, bins = 10;
    std::uint64_t cal_seed = 0;
    bool refit = false;
    cal_cmd->add_option("--snapshot", snapshot_path, "model snapshot")->required();
    cal_cmd->add_option("--data", data_dir, "dataset directory");
    cal_cmd->add_option("--out", out_dir, "output directory");
    cal_cmd->add_option("--negatives-ratio", negatives_ratio, "corruptions per validation positive")
        ->capture_default_str();
    cal_cmd->add_option("--bins", bins, "reliability bins")->capture_default_str();
    cal_cmd->add_option("--seed", cal_seed, "sampling seed")->capture_default_str();
    cal_cmd->add_flag("--refit", refit, "refit even if already calibrated");

    // explain
    auto* explain_cmd = app.add_subcommand("explain", "explain one link prediction");
    ExplainFlags explain_flags;
    std::string target_spec, format = "all";
    bool select_target_flag = false;
    explain_cmd->add_option("--snapshot", snapshot_path, "calibrated model snapshot")->required();
    explain_cmd->add_option("--data", data_dir, "dataset directory");
    explain_cmd->add_option("--out", out_dir, "output directory");
    explain_cmd->add_option("--target", target_spec, "target triple: subject,predicate,object");
    explain_cmd->add_flag("--select-target", select_target_flag,
                          "pick the highest-probability non-circular test triple");
    explain_cmd->add_option("--format", format, "json|dot|table|all")->capture_default_str();
    add_explain_flags(explain_cmd, explain_flags);

    // explain-batch
    auto* batch_cmd = app.add_subcommand("explain-batch", "explain many targets (JSON lines)");
    std::string targets_file;
    bool all_test = false;
    batch_cmd->add_option("--snapshot", snapshot_path, "calibrated model snapshot")->required();
    batch_cmd->add_option("--data", data_dir, "dataset directory");
    batch_cmd->add_option("--out", out_dir, "output directory");
    batch_cmd->add_option("--targets", targets_file, "one subject,predicate,object per line");
    batch_cmd->add_flag("--all-test", all_test, "explain the whole test split");
    add_explain_flags(batch_cmd, explain_flags);

    // roar
    auto* roar_cmd = app.add_subcommand("roar", "remove-and-retrain evaluation");
    ModelFlags roar_model_flags;
    ExplainFlags roar_explain_flags;
    std::string scenario = "roar", subset = "1", explainer = "example", checkpoints_csv;
    std::string roar_target;
    bool roar_select = false;
    roar_cmd->add_option("--data", data_dir, "dataset directory");
    roar_cmd->add_option("--out", out_dir, "output directory");
    roar_cmd->add_option("--scenario", scenario, "roar|rev-roar")->capture_default_str();
    roar_cmd->add_option("--subset", subset, "1|all")->capture_default_str();
    roar_cmd->add_option("--explainer", explainer, "example|random|both")->capture_default_str();
    roar_cmd->add_option("--checkpoints", checkpoints_csv, "comma-separated epochs (default 10..100)");
    roar_cmd->add_option("--target", roar_target, "target triple: subject,predicate,object");
    roar_cmd->add_flag("--select-target", roar_select, "pick the target automatically");
    add_model_flags(roar_cmd, roar_model_flags);
    add_explain_flags(roar_cmd, roar_explain_flags);

    CLI11_PARSE(app, argc, argv);

    ThreadPolicy::max_threads = threads;
    ThreadPolicy::deterministic = deterministic;

    try {
        if (train_cmd->parsed()) return cmd_train(data_dir, out_dir, train_flags);
        if (cal_cmd->parsed()) {
            return cmd_calibrate(snapshot_path, data_dir, out_dir, negatives_ratio, bins, cal_seed,
                                 refit);
        }
        if (explain_cmd->parsed()) {
            if (target_spec.empty() && !select_target_flag) {
                throw Error("explain needs --target or --select-target");
            }
            return cmd_explain(snapshot_path, data_dir, target_spec, select_target_flag, out_dir,
                               explain_flags, format);
        }
        if (batch_cmd->parsed()) {
            if (targets_file.empty() && !all_test) {
                throw Error("explain-batch needs --targets or --all-test");
            }
            return cmd_explain_batch(snapshot_path, data_dir, targets_file, all_test, out_dir,
                                     explain_flags);
        }
        if (roar_cmd->parsed()) {
            return cmd_roar(data_dir, out_dir, roar_model_flags, roar_explain_flags, scenario,
                            subset, explainer, checkpoints_csv, roar_target, roar_select);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
