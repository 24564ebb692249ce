#include "protoeval/cli.hpp"

#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "protoeval/experiment.hpp"
#include "protoeval/json_io.hpp"
#include "protoeval/vectorize.hpp"

namespace protoeval {

namespace {

using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const ordered_json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << j.dump(2) << '\n';
}

void write_text(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << text;
}

LabeledDataset impute_all(const LabeledDataset& data,
                          const std::vector<std::string>& missing_features) {
    if (missing_features.empty()) return data;
    std::vector<std::size_t> all(data.n_rows());
    std::iota(all.begin(), all.end(), 0);
    return impute_median(data, missing_features, all);
}

// Shared flag block mirroring ExperimentConfig.
struct CommonOpts {
    ExperimentConfig cfg;
    std::string data_path;
    std::string rules_path;
    std::string out_path;
    std::string optimizer = "sgd";

    void finalize() {
        cfg.dataset_path = data_path;
        cfg.ruleset_path = rules_path;
        cfg.network.optimizer = optimizer == "adam" ? Optimizer::adam : Optimizer::sgd;
    }
};

void add_data_flags(CLI::App* cmd, CommonOpts& o, bool rules_required = true) {
    cmd->add_option("--data", o.data_path, "dataset CSV (Pima schema)")->required();
    auto* rules = cmd->add_option("--rules", o.rules_path, "rule DSL file with the protocol");
    if (rules_required) rules->required();
    cmd->add_option("--out", o.out_path, "output path (default: stdout)");
}

void add_experiment_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--seed", o.cfg.seed, "master RNG seed")->envname("PF_SEED");
    cmd->add_option("--repeats", o.cfg.repeats, "cross-validation repeats");
    cmd->add_option("--k", o.cfg.k, "folds per repeat");
    cmd->add_option("--alpha", o.cfg.similarity_alpha, "KB-ML operating alpha");
    cmd->add_option("--alpha-grid", o.cfg.alpha_grid, "alpha values for the sweep");
    cmd->add_option("--budgets", o.cfg.leaf_budgets, "CART leaf budgets");
    cmd->add_option("--threshold", o.cfg.threshold, "probability threshold");
    cmd->add_option("--threads", o.cfg.threads, "worker threads (0 = all cores)");
    cmd->add_flag_callback(
        "--strict-rs", [&o] { o.cfg.rs_include_na = false; },
        "exclude N/A protocol entries from relative specificity");
    cmd->add_option("--hidden", o.cfg.network.hidden_sizes, "hidden layer sizes (two values)")
        ->expected(2);
    cmd->add_option("--lr", o.cfg.network.learning_rate, "learning rate");
    cmd->add_option("--batch-size", o.cfg.network.batch_size, "mini-batch size");
    cmd->add_option("--epochs", o.cfg.network.epochs, "training epochs");
    cmd->add_option("--optimizer", o.optimizer, "sgd or adam")
        ->check(CLI::IsMember({"sgd", "adam"}));
}

int cmd_ingest(CommonOpts& o) {
    const LabeledDataset data = load_csv(o.data_path, o.cfg.schema, o.cfg.label_column);
    ordered_json j;
    j["n_samples"] = data.n_rows();
    j["n_features"] = data.n_features();
    std::array<std::size_t, 2> counts{};
    for (int y : data.labels) ++counts[y == 1 ? 1 : 0];
    j["class_counts"] = counts;
    ordered_json features = ordered_json::array();
    for (std::size_t f = 0; f < data.n_features(); ++f) {
        ordered_json fj;
        fj["name"] = data.feature_names[f];
        fj["min"] = data.feature_bounds[f].min;
        fj["max"] = data.feature_bounds[f].max;
        const bool missing_listed =
            std::find(o.cfg.missing_features.begin(), o.cfg.missing_features.end(),
                      data.feature_names[f]) != o.cfg.missing_features.end();
        if (missing_listed) {
            std::size_t zeros = 0;
            for (const auto& row : data.rows) zeros += row[f] == 0.0;
            fj["missing_zeros"] = zeros;
            fj["missing_fraction"] =
                static_cast<double>(zeros) / static_cast<double>(data.n_rows());
        }
        features.push_back(fj);
    }
    j["features"] = features;
    emit(j, o.out_path);
    return 0;
}

int cmd_train(CommonOpts& o, double alpha) {
    const LabeledDataset raw = load_csv(o.data_path, o.cfg.schema, o.cfg.label_column);
    const LabeledDataset data = impute_all(raw, o.cfg.missing_features);

    std::vector<std::optional<int>> r(data.n_rows(), std::nullopt);
    if (!o.rules_path.empty()) {
        const RuleSet kb = complete_bounds(parse_ruleset(read_file(o.rules_path)), data);
        r = protocol_vector(kb, data);
    }

    std::vector<std::size_t> all(data.n_rows());
    std::iota(all.begin(), all.end(), 0);

    NetworkConfig netcfg = o.cfg.network;
    netcfg.alpha = alpha;
    netcfg.seed = o.cfg.seed;
    const TrainedNetwork net = train(data, all, r, netcfg);
    write_text(net.to_json_string() + "\n", o.out_path);
    return 0;
}

int cmd_metrics(CommonOpts& o, const std::string& model_path) {
    const LabeledDataset raw = load_csv(o.data_path, o.cfg.schema, o.cfg.label_column);
    const LabeledDataset data = impute_all(raw, o.cfg.missing_features);
    const TrainedNetwork net = TrainedNetwork::from_json_string(read_file(model_path));
    const RuleSet kb = complete_bounds(parse_ruleset(read_file(o.rules_path)), data);

    std::vector<std::size_t> all(data.n_rows());
    std::iota(all.begin(), all.end(), 0);
    const std::vector<double> p = predict_proba(net, data, all);
    const PredictionBundle bundle =
        make_bundle(data.labels, p, protocol_vector(kb, data), o.cfg.threshold);
    emit(metrics_to_json(full_metrics(bundle, o.cfg.positive_class, o.cfg.rs_include_na)),
         o.out_path);
    return 0;
}

int cmd_extract(CommonOpts& o, const std::string& model_path, std::size_t max_rules) {
    const LabeledDataset raw = load_csv(o.data_path, o.cfg.schema, o.cfg.label_column);
    const LabeledDataset data = impute_all(raw, o.cfg.missing_features);
    const TrainedNetwork net = TrainedNetwork::from_json_string(read_file(model_path));

    std::vector<std::pair<std::string, int>> class_map = {{"class_0", 0}, {"class_1", 1}};
    if (!o.rules_path.empty())
        class_map = parse_ruleset(read_file(o.rules_path)).class_map;

    std::vector<std::size_t> all(data.n_rows());
    std::iota(all.begin(), all.end(), 0);
    const std::vector<int> preds = binarize(predict_proba(net, data, all), o.cfg.threshold);

    const Tree tree = fit_cart(data, all, preds, max_rules);
    SurrogateRuleSet srs = tree_to_rules(tree, data, class_map);
    srs.fidelity = fidelity(srs, data, all, preds);

    write_text(serialize_ruleset(srs.rules), o.out_path);
    ordered_json j;
    j["n_rules"] = srs.n_rules;
    j["degenerate"] = srs.degenerate;
    j["fidelity_accuracy"] = srs.fidelity->accuracy;
    j["fidelity_f1"] = srs.fidelity->f1 ? ordered_json(*srs.fidelity->f1) : ordered_json(nullptr);
    std::cerr << j.dump(2) << '\n';
    return 0;
}

int cmd_similarity(CommonOpts& o, const std::string& kind_name, const std::string& subset,
                   std::size_t max_rules) {
    o.cfg.leaf_budgets = {max_rules};
    o.cfg.with_robustness = false;
    const SimilarityKind kind = similarity_kind_from_string(kind_name);

    const LabeledDataset data = load_csv(o.data_path, o.cfg.schema, o.cfg.label_column);
    const RuleSet kb = parse_ruleset(read_file(o.rules_path));
    const std::vector<FoldRecord> records = run_folds(o.cfg, data, kb);
    const ExperimentReport report = aggregate(o.cfg, records, data);

    const auto& rows =
        subset == "correct" ? report.similarity_correct : report.similarity_predicted;
    for (const SimilarityRow& row : rows) {
        if (row.kind != kind) continue;
        ordered_json j;
        j["kind"] = to_string(kind);
        j["subset"] = subset == "correct" ? "all_correct" : "all_predicted";
        j["budget"] = row.budget;
        j["n_folds"] = row.n_folds;
        j["pairs"] = ordered_json::array({
            ordered_json{{"first", "kb"}, {"second", "dd_ml_x"}, {"score", row.dd_mean}},
            ordered_json{{"first", "kb"}, {"second", "kb_ml_x"}, {"score", row.kb_mean}},
        });
        j["overall"] = 0.5 * (row.dd_mean + row.kb_mean);
        j["p_value"] = row.p_value;
        emit(j, o.out_path);
        return 0;
    }
    throw std::runtime_error("no similarity rows produced");
}

int cmd_robustness(CommonOpts& o, const std::string& kind_name, std::size_t max_rules,
                   const std::string& matrix_out) {
    o.cfg.leaf_budgets = {max_rules};
    o.cfg.with_similarity = false;
    o.cfg.with_surrogates = true;
    o.cfg.robustness_kind = similarity_kind_from_string(kind_name);

    const LabeledDataset data = load_csv(o.data_path, o.cfg.schema, o.cfg.label_column);
    const RuleSet kb = parse_ruleset(read_file(o.rules_path));
    const std::vector<FoldRecord> records = run_folds(o.cfg, data, kb);

    const LabeledDataset canonical = impute_all(data, o.cfg.missing_features);

    ordered_json j;
    j["kind"] = kind_name;
    j["budget"] = max_rules;
    for (std::size_t m = 0; m < 2; ++m) {
        std::vector<const RuleSet*> family;
        for (const FoldRecord& rec : records) family.push_back(&rec.surrogates[m][0].rules);
        const DiscretizationMap dmap = collect_thresholds(family, canonical.feature_names);
        std::vector<LocalExplanations> assignments;
        for (const FoldRecord& rec : records)
            assignments.push_back(
                assign_local_explanations(rec.surrogates[m][0].rules, canonical, dmap));
        std::vector<const LocalExplanations*> ptrs;
        for (const auto& a : assignments) ptrs.push_back(&a);
        const std::vector<std::size_t> common = restrict_to_common(ptrs);
        const RobustnessMatrix matrix = robustness_matrix(o.cfg.robustness_kind, ptrs, common);

        const std::string name = m == 0 ? "dd_ml_x" : "kb_ml_x";
        j[name] = {{"offdiag_mean", matrix.offdiag_mean()},
                   {"full_mean", matrix.full_mean()},
                   {"n_instances", matrix.size},
                   {"n_samples", common.size()}};
        if (!matrix_out.empty()) {
            std::string csv;
            for (std::size_t i = 0; i < matrix.size; ++i) {
                for (std::size_t c = 0; c < matrix.size; ++c) {
                    if (c) csv += ',';
                    char buf[32];
                    std::snprintf(buf, sizeof(buf), "%.6f", matrix.at(i, c));
                    csv += buf;
                }
                csv += '\n';
            }
            const std::string path = matrix_out + "." + name + ".csv";
            std::ofstream out(path);
            if (!out) throw std::runtime_error("cannot write " + path);
            out << csv;
        }
    }
    emit(j, o.out_path);
    return 0;
}

int cmd_sweep_alpha(CommonOpts& o) {
    o.cfg.with_surrogates = false;
    o.cfg.with_similarity = false;
    o.cfg.with_robustness = false;

    const LabeledDataset data = load_csv(o.data_path, o.cfg.schema, o.cfg.label_column);
    const RuleSet kb = parse_ruleset(read_file(o.rules_path));
    const std::vector<FoldRecord> records = run_folds(o.cfg, data, kb);
    const ExperimentReport report = aggregate(o.cfg, records, data);

    ordered_json rows = ordered_json::array();
    for (const AlphaRow& row : report.alpha_sweep) {
        rows.push_back({{"alpha", row.alpha},
                        {"a", {{"mean", row.a.mean}, {"ci", row.a.ci_half_width}}},
                        {"roc_auc", {{"mean", row.roc_auc.mean}, {"ci", row.roc_auc.ci_half_width}}},
                        {"mcc", {{"mean", row.mcc.mean}, {"ci", row.mcc.ci_half_width}}},
                        {"ra", {{"mean", row.ra.mean}, {"ci", row.ra.ci_half_width}}}});
    }
    emit(ordered_json{{"alpha_sweep", rows}}, o.out_path);
    return 0;
}

int cmd_run_all(CommonOpts& o, const std::string& out_dir) {
    const ExperimentReport report = run_experiment(o.cfg);
    report.write_bundle(o.cfg, out_dir);
    std::cerr << "report bundle written to " << out_dir << '\n';
    return 0;
}

}  // namespace

int dispatch(std::vector<std::string> args) {
    CLI::App app{"evaluates ML classifiers against rule-based clinical protocols"};
    app.require_subcommand(1);

    CommonOpts o;
    double train_alpha = 0.0;
    std::string model_path;
    std::size_t max_rules = 6;
    std::string kind_name = "xnor";
    std::string subset = "predicted";
    std::string matrix_out;
    std::string out_dir = "results";

    auto* ingest = app.add_subcommand("ingest", "load and summarize a dataset");
    add_data_flags(ingest, o, /*rules_required=*/false);

    auto* train_cmd = app.add_subcommand("train", "train one network on the full dataset");
    add_data_flags(train_cmd, o, /*rules_required=*/false);
    add_experiment_flags(train_cmd, o);
    train_cmd->add_option("--train-alpha", train_alpha, "alpha for this model (0 = data-driven)");

    auto* metrics_cmd = app.add_subcommand("metrics", "score a trained model against the protocol");
    add_data_flags(metrics_cmd, o);
    add_experiment_flags(metrics_cmd, o);
    metrics_cmd->add_option("--model", model_path, "model checkpoint JSON")->required();

    auto* extract = app.add_subcommand("extract", "extract a CART surrogate rule set");
    add_data_flags(extract, o, /*rules_required=*/false);
    add_experiment_flags(extract, o);
    extract->add_option("--model", model_path, "model checkpoint JSON")->required();
    extract->add_option("--max-rules", max_rules, "maximum number of rules (leaves)");

    auto* similarity = app.add_subcommand("similarity", "explanation similarity study");
    add_data_flags(similarity, o);
    add_experiment_flags(similarity, o);
    similarity->add_option("--metric", kind_name, "xnor|jaccard|cosine|dice")
        ->check(CLI::IsMember({"xnor", "jaccard", "cosine", "dice"}));
    similarity->add_option("--subset", subset, "predicted or correct")
        ->check(CLI::IsMember({"predicted", "correct"}));
    similarity->add_option("--max-rules", max_rules, "leaf budget for the surrogates");

    auto* robustness = app.add_subcommand("robustness", "cross-instance explanation robustness");
    add_data_flags(robustness, o);
    add_experiment_flags(robustness, o);
    robustness->add_option("--metric", kind_name, "xnor|jaccard|cosine|dice")
        ->check(CLI::IsMember({"xnor", "jaccard", "cosine", "dice"}));
    robustness->add_option("--max-rules", max_rules, "leaf budget for the surrogates");
    robustness->add_option("--matrix-out", matrix_out, "prefix for the full matrix CSVs");

    auto* sweep = app.add_subcommand("sweep-alpha", "per-alpha metric means with CIs");
    add_data_flags(sweep, o);
    add_experiment_flags(sweep, o);

    auto* run_all = app.add_subcommand("run-all", "full experiment, report bundle to --out");
    run_all->add_option("--data", o.data_path, "dataset CSV (Pima schema)")->required();
    run_all->add_option("--rules", o.rules_path, "rule DSL file with the protocol")->required();
    add_experiment_flags(run_all, o);
    run_all->add_option("--out", out_dir, "output directory for the report bundle");

    std::vector<const char*> argv;
    argv.push_back("protoeval");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << '\n';
        return 1;
    }

    try {
        o.finalize();
        if (ingest->parsed()) return cmd_ingest(o);
        if (train_cmd->parsed()) return cmd_train(o, train_alpha);
        if (metrics_cmd->parsed()) return cmd_metrics(o, model_path);
        if (extract->parsed()) return cmd_extract(o, model_path, max_rules);
        if (similarity->parsed()) return cmd_similarity(o, kind_name, subset, max_rules);
        if (robustness->parsed()) return cmd_robustness(o, kind_name, max_rules, matrix_out);
        if (sweep->parsed()) return cmd_sweep_alpha(o);
        if (run_all->parsed()) return cmd_run_all(o, out_dir);
        std::cerr << "no subcommand selected\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace protoeval
