#include "protoeval/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>

#include "protoeval/diag.hpp"
#include "protoeval/json_io.hpp"
#include "protoeval/rng.hpp"
#include "protoeval/vectorize.hpp"

namespace protoeval {

const std::vector<std::string> kPimaSchema = {
    "Pregnancies", "Glucose",  "BloodPressure",            "SkinThickness", "Insulin",
    "BMI",         "DiabetesPedigreeFunction", "Age",      "Outcome"};
const std::string kPimaLabelColumn = "Outcome";
const std::vector<std::string> kPimaMissingFeatures = {"Insulin", "SkinThickness", "BloodPressure",
                                                       "BMI", "Glucose"};

const std::vector<std::string> kMetricKeys = {"mcc", "f1", "f1_macro", "a",  "ba", "roc_auc",
                                              "p",   "r",  "ra",       "rr", "rs"};

namespace {

std::optional<double> metric_value(const MetricsReport& m, const std::string& key) {
    if (key == "mcc") return m.mcc;
    if (key == "f1") return m.f1;
    if (key == "f1_macro") return m.f1_macro;
    if (key == "a") return m.a;
    if (key == "ba") return m.ba;
    if (key == "roc_auc") return m.roc_auc;
    if (key == "p") return m.precision;
    if (key == "r") return m.recall;
    if (key == "ra") return m.ra;
    if (key == "rr") return m.rr;
    if (key == "rs") return m.rs;
    throw ExperimentError("unknown metric key: " + key);
}

AggregatedMetric aggregate_values(const std::vector<double>& values) {
    AggregatedMetric out;
    out.n = values.size();
    if (values.empty()) return out;
    const MeanCI ci = mean_ci(values);
    out.mean = ci.mean;
    out.ci_half_width = ci.ci_half_width;
    if (values.size() >= 2) {
        double var = 0.0;
        for (double v : values) var += (v - ci.mean) * (v - ci.mean);
        out.stddev = std::sqrt(var / static_cast<double>(values.size() - 1));
    }
    return out;
}

// Runs fn(0..n-1) on up to `threads` workers; rethrows the first failure.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            while (!failed.load(std::memory_order_relaxed)) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    failed.store(true);
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

LabeledDataset subset_rows(const LabeledDataset& data, std::span<const std::size_t> indices) {
    LabeledDataset out;
    out.feature_names = data.feature_names;
    out.rows.reserve(indices.size());
    out.labels.reserve(indices.size());
    for (std::size_t i : indices) {
        out.rows.push_back(data.rows[i]);
        out.labels.push_back(data.labels[i]);
    }
    out.recompute_bounds();
    return out;
}

std::size_t kind_index(SimilarityKind kind) { return static_cast<std::size_t>(kind); }

struct FoldContext {
    const ExperimentConfig& cfg;
    const LabeledDataset& data;
    const RuleSet& kb;
    const FoldPlan& plan;
};

FoldRecord process_fold(const FoldContext& ctx, std::size_t repeat, std::size_t fold) {
    const ExperimentConfig& cfg = ctx.cfg;
    const FoldPlan::Fold& split = ctx.plan.assignments[repeat][fold];

    FoldRecord record;
    record.repeat = repeat;
    record.fold = fold;

    const LabeledDataset imputed =
        cfg.missing_features.empty()
            ? ctx.data
            : impute_median(ctx.data, cfg.missing_features, split.train);
    const RuleSet kb_completed = complete_bounds(ctx.kb, imputed);
    const std::vector<std::optional<int>> r_full = protocol_vector(kb_completed, imputed);

    std::vector<int> y_test;
    std::vector<std::optional<int>> r_test;
    y_test.reserve(split.test.size());
    r_test.reserve(split.test.size());
    for (std::size_t i : split.test) {
        y_test.push_back(ctx.data.labels[i]);
        r_test.push_back(r_full[i]);
    }

    const auto train_model = [&](double alpha) {
        NetworkConfig netcfg = cfg.network;
        netcfg.alpha = alpha;
        netcfg.seed = fold_seed(cfg.seed, repeat, fold, alpha);
        return train(imputed, split.train, r_full, netcfg);
    };

    std::optional<TrainedNetwork> net_dd, net_kb;
    record.per_alpha.reserve(cfg.alpha_grid.size());
    for (double alpha : cfg.alpha_grid) {
        const TrainedNetwork net = train_model(alpha);
        const std::vector<double> p_test = predict_proba(net, imputed, split.test);
        const PredictionBundle bundle = make_bundle(y_test, p_test, r_test, cfg.threshold);
        record.per_alpha.push_back(full_metrics(bundle, cfg.positive_class, cfg.rs_include_na));
        if (alpha == 0.0) net_dd = net;
        if (alpha == cfg.similarity_alpha) net_kb = net;
    }

    if (!cfg.with_surrogates) return record;
    if (!net_dd) net_dd = train_model(0.0);
    if (!net_kb) net_kb = train_model(cfg.similarity_alpha);

    std::array<const TrainedNetwork*, 2> nets = {&*net_dd, &*net_kb};
    std::array<std::vector<int>, 2> test_preds;
    for (std::size_t m = 0; m < 2; ++m) {
        const std::vector<double> p_train = predict_proba(*nets[m], imputed, split.train);
        const std::vector<int> t_train = binarize(p_train, cfg.threshold);
        const std::vector<double> p_test = predict_proba(*nets[m], imputed, split.test);
        test_preds[m] = binarize(p_test, cfg.threshold);

        record.surrogates[m].reserve(cfg.leaf_budgets.size());
        for (std::size_t budget : cfg.leaf_budgets) {
            const Tree tree = fit_cart(imputed, split.train, t_train, budget);
            SurrogateRuleSet srs = tree_to_rules(tree, imputed, ctx.kb.class_map);
            srs.fidelity = fidelity(srs, imputed, split.test, test_preds[m]);
            record.surrogates[m].push_back(std::move(srs));
        }
    }

    if (!cfg.with_similarity) return record;

    const LabeledDataset test_data = subset_rows(imputed, split.test);
    for (std::size_t subset = 0; subset < 2; ++subset)
        record.similarity[subset].resize(cfg.leaf_budgets.size());

    for (std::size_t bi = 0; bi < cfg.leaf_budgets.size(); ++bi) {
        const RuleSet& ddx = record.surrogates[0][bi].rules;
        const RuleSet& kbx = record.surrogates[1][bi].rules;
        const RuleSet* family[] = {&kb_completed, &ddx, &kbx};
        const DiscretizationMap dmap = collect_thresholds(family, imputed.feature_names);

        const LocalExplanations a_kb = assign_local_explanations(kb_completed, test_data, dmap);
        const LocalExplanations a_ddx = assign_local_explanations(ddx, test_data, dmap);
        const LocalExplanations a_kbx = assign_local_explanations(kbx, test_data, dmap);
        const LocalExplanations* assignments[] = {&a_kb, &a_ddx, &a_kbx};

        const std::vector<std::size_t> predicted = restrict_to_common(assignments);
        std::vector<std::size_t> correct;
        for (std::size_t pos : predicted) {
            const int y = y_test[pos];
            const bool kb_right = r_test[pos] && *r_test[pos] == y;
            if (kb_right && test_preds[0][pos] == y && test_preds[1][pos] == y)
                correct.push_back(pos);
        }

        const std::vector<std::size_t>* subsets[] = {&predicted, &correct};
        for (std::size_t subset = 0; subset < 2; ++subset) {
            const std::vector<std::size_t>& idx = *subsets[subset];
            if (idx.empty()) {
                warn("repeat " + std::to_string(repeat) + " fold " + std::to_string(fold) +
                     ": empty similarity subset (" +
                     (subset == 0 ? "all_predicted" : "all_correct") + ", budget " +
                     std::to_string(cfg.leaf_budgets[bi]) + "); fold skipped");
                continue;
            }
            for (SimilarityKind kind : kAllSimilarityKinds) {
                FoldRecord::SimilarityPair pair;
                pair.dd = ruleset_similarity(kind, a_kb, a_ddx, idx);
                pair.kb = ruleset_similarity(kind, a_kb, a_kbx, idx);
                pair.n_samples = idx.size();
                record.similarity[subset][bi][kind_index(kind)] = pair;
            }
        }
    }
    return record;
}

void write_csv(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw ExperimentError("cannot write " + path.string());
    out << content;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

nlohmann::ordered_json aggregated_to_json(const AggregatedMetric& m) {
    return {{"mean", m.mean}, {"std", m.stddev}, {"ci", m.ci_half_width}, {"n", m.n}};
}

}  // namespace

std::uint64_t fold_seed(std::uint64_t base, std::size_t repeat, std::size_t fold, double alpha) {
    return derive_seed(base, repeat, fold, std::bit_cast<std::uint64_t>(alpha));
}

TTestResult corrected_ttest_ratio(std::span<const double> a, std::span<const double> b,
                                  double test_train_ratio) {
    if (a.size() != b.size()) throw StatsError("paired samples must have equal lengths");
    const std::size_t k = a.size();
    if (k < 2) throw StatsError("need at least two paired scores");

    TTestResult result;
    result.n = k;
    double mean = 0.0;
    for (std::size_t i = 0; i < k; ++i) mean += a[i] - b[i];
    mean /= static_cast<double>(k);
    double var = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double d = (a[i] - b[i]) - mean;
        var += d * d;
    }
    var /= static_cast<double>(k - 1);
    result.mean_diff = mean;
    if (var == 0.0) {
        result.zero_variance = true;
        result.t = 0.0;
        result.p = mean == 0.0 ? 1.0 : 0.0;
        return result;
    }
    const double inflation = 1.0 / static_cast<double>(k) + test_train_ratio;
    result.t = mean / std::sqrt(inflation * var);
    result.p = student_t_two_tailed(result.t, static_cast<double>(k - 1));
    return result;
}

std::vector<FoldRecord> run_folds(const ExperimentConfig& cfg, const LabeledDataset& data,
                                  const RuleSet& kb) {
    ExperimentConfig normalized = cfg;
    if (normalized.with_similarity) normalized.with_surrogates = true;

    const FoldPlan plan =
        make_folds(data.n_rows(), data.labels, normalized.repeats, normalized.k, normalized.seed);
    const FoldContext ctx{normalized, data, kb, plan};

    const std::size_t total = normalized.repeats * normalized.k;
    std::vector<FoldRecord> records(total);
    parallel_for(total, normalized.threads, [&](std::size_t i) {
        const std::size_t repeat = i / normalized.k;
        const std::size_t fold = i % normalized.k;
        try {
            records[i] = process_fold(ctx, repeat, fold);
        } catch (const std::exception& e) {
            throw ExperimentError("repeat " + std::to_string(repeat) + ", fold " +
                                  std::to_string(fold) + ": " + e.what());
        }
    });
    return records;
}

ExperimentReport aggregate(const ExperimentConfig& cfg, const std::vector<FoldRecord>& records,
                           const LabeledDataset& data) {
    ExperimentReport report;
    report.n_samples = data.n_rows();
    report.n_features = data.n_features();
    for (int y : data.labels) ++report.class_counts[y == 1 ? 1 : 0];

    const double ratio = 1.0 / static_cast<double>(cfg.k - 1);

    const auto find_alpha = [&](double alpha) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < cfg.alpha_grid.size(); ++i) {
            if (cfg.alpha_grid[i] == alpha) return i;
        }
        return std::nullopt;
    };
    const std::optional<std::size_t> dd_idx = find_alpha(0.0);
    const std::optional<std::size_t> kb_idx = find_alpha(cfg.similarity_alpha);

    const auto collect_metric = [&](std::size_t alpha_index, const std::string& key) {
        std::vector<double> values;
        values.reserve(records.size());
        for (const FoldRecord& rec : records) {
            const std::optional<double> v = metric_value(rec.per_alpha[alpha_index], key);
            if (v) values.push_back(*v);
        }
        return values;
    };

    for (const std::string& key : kMetricKeys) {
        if (dd_idx) report.table3.dd[key] = aggregate_values(collect_metric(*dd_idx, key));
        if (kb_idx) report.table3.kb[key] = aggregate_values(collect_metric(*kb_idx, key));
        if (dd_idx && kb_idx) {
            std::vector<double> dd_vals, kb_vals;
            for (const FoldRecord& rec : records) {
                const auto dv = metric_value(rec.per_alpha[*dd_idx], key);
                const auto kv = metric_value(rec.per_alpha[*kb_idx], key);
                if (dv && kv) {
                    dd_vals.push_back(*dv);
                    kb_vals.push_back(*kv);
                }
            }
            if (dd_vals.size() >= 2)
                report.table3.p_values[key] = corrected_ttest_ratio(kb_vals, dd_vals, ratio).p;
        }
    }

    for (std::size_t ai = 0; ai < cfg.alpha_grid.size(); ++ai) {
        AlphaRow row;
        row.alpha = cfg.alpha_grid[ai];
        row.a = aggregate_values(collect_metric(ai, "a"));
        row.roc_auc = aggregate_values(collect_metric(ai, "roc_auc"));
        row.mcc = aggregate_values(collect_metric(ai, "mcc"));
        row.ra = aggregate_values(collect_metric(ai, "ra"));
        report.alpha_sweep.push_back(row);
    }

    if (cfg.with_surrogates && !records.empty() && !records.front().surrogates[0].empty()) {
        for (std::size_t m = 0; m < 2; ++m) {
            for (std::size_t bi = 0; bi < cfg.leaf_budgets.size(); ++bi) {
                FidelityRow row;
                row.budget = cfg.leaf_budgets[bi];
                row.model = m == 0 ? "dd_ml_x" : "kb_ml_x";
                std::vector<double> acc, f1;
                for (const FoldRecord& rec : records) {
                    const auto& fid = rec.surrogates[m][bi].fidelity;
                    if (fid) {
                        acc.push_back(fid->accuracy);
                        if (fid->f1) f1.push_back(*fid->f1);
                    }
                }
                row.accuracy = aggregate_values(acc);
                row.f1 = aggregate_values(f1);
                report.fidelity.push_back(row);
            }
        }
    }

    if (cfg.with_similarity && !records.empty() && !records.front().similarity[0].empty()) {
        for (std::size_t subset = 0; subset < 2; ++subset) {
            auto& rows = subset == 0 ? report.similarity_predicted : report.similarity_correct;
            for (std::size_t bi = 0; bi < cfg.leaf_budgets.size(); ++bi) {
                for (SimilarityKind kind : kAllSimilarityKinds) {
                    SimilarityRow row;
                    row.budget = cfg.leaf_budgets[bi];
                    row.kind = kind;
                    std::vector<double> dd_vals, kb_vals;
                    for (const FoldRecord& rec : records) {
                        const auto& cell = rec.similarity[subset][bi][kind_index(kind)];
                        if (cell) {
                            dd_vals.push_back(cell->dd);
                            kb_vals.push_back(cell->kb);
                        }
                    }
                    row.n_folds = dd_vals.size();
                    if (!dd_vals.empty()) {
                        row.dd_mean = aggregate_values(dd_vals).mean;
                        row.kb_mean = aggregate_values(kb_vals).mean;
                        if (dd_vals.size() >= 2)
                            row.p_value = corrected_ttest_ratio(kb_vals, dd_vals, ratio).p;
                    }
                    rows.push_back(row);
                }
            }
        }
    }

    if (cfg.with_robustness && cfg.with_surrogates && !records.empty() &&
        !records.front().surrogates[0].empty()) {
        // Robustness compares the per-fold surrogates on one canonical copy of
        // the dataset, imputed with global medians.
        std::vector<std::size_t> all(data.n_rows());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        const LabeledDataset canonical =
            cfg.missing_features.empty() ? data : impute_median(data, cfg.missing_features, all);

        const std::size_t jobs = 2 * cfg.leaf_budgets.size();
        std::vector<RobustnessRow> rows(jobs);
        parallel_for(jobs, cfg.threads, [&](std::size_t job) {
            const std::size_t m = job / cfg.leaf_budgets.size();
            const std::size_t bi = job % cfg.leaf_budgets.size();

            std::vector<const RuleSet*> family;
            family.reserve(records.size());
            for (const FoldRecord& rec : records) family.push_back(&rec.surrogates[m][bi].rules);
            const DiscretizationMap dmap = collect_thresholds(family, canonical.feature_names);

            std::vector<LocalExplanations> assignments;
            assignments.reserve(records.size());
            for (const FoldRecord& rec : records) {
                assignments.push_back(
                    assign_local_explanations(rec.surrogates[m][bi].rules, canonical, dmap));
            }
            std::vector<const LocalExplanations*> ptrs;
            ptrs.reserve(assignments.size());
            for (const auto& a : assignments) ptrs.push_back(&a);

            const std::vector<std::size_t> common = restrict_to_common(ptrs);
            const RobustnessMatrix matrix = robustness_matrix(cfg.robustness_kind, ptrs, common);

            RobustnessRow row;
            row.budget = cfg.leaf_budgets[bi];
            row.model = m == 0 ? "dd_ml_x" : "kb_ml_x";
            row.offdiag_mean = matrix.offdiag_mean();
            row.full_mean = matrix.full_mean();
            rows[job] = row;
        });
        report.robustness = std::move(rows);
    }

    return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    const LabeledDataset data = load_csv(cfg.dataset_path, cfg.schema, cfg.label_column);

    std::ifstream in(cfg.ruleset_path);
    if (!in) throw ExperimentError("cannot open rule set: " + cfg.ruleset_path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const RuleSet kb = parse_ruleset(text);

    const std::vector<FoldRecord> records = run_folds(cfg, data, kb);
    return aggregate(cfg, records, data);
}

nlohmann::ordered_json ExperimentReport::to_json(const ExperimentConfig& cfg) const {
    nlohmann::ordered_json j;
    j["config"] = {{"dataset", cfg.dataset_path.string()},
                   {"ruleset", cfg.ruleset_path.string()},
                   {"alpha_grid", cfg.alpha_grid},
                   {"similarity_alpha", cfg.similarity_alpha},
                   {"repeats", cfg.repeats},
                   {"k", cfg.k},
                   {"leaf_budgets", cfg.leaf_budgets},
                   {"seed", cfg.seed},
                   {"threshold", cfg.threshold},
                   {"positive_class", cfg.positive_class},
                   {"rs_include_na", cfg.rs_include_na},
                   {"robustness_kind", to_string(cfg.robustness_kind)},
                   {"network",
                    {{"hidden_sizes", cfg.network.hidden_sizes},
                     {"learning_rate", cfg.network.learning_rate},
                     {"batch_size", cfg.network.batch_size},
                     {"epochs", cfg.network.epochs},
                     {"optimizer", cfg.network.optimizer == Optimizer::adam ? "adam" : "sgd"}}}};
    j["dataset"] = {{"n_samples", n_samples},
                    {"n_features", n_features},
                    {"class_counts", class_counts}};

    nlohmann::ordered_json table;
    nlohmann::ordered_json models;
    const auto model_json = [](const std::map<std::string, AggregatedMetric>& metrics) {
        nlohmann::ordered_json out;
        for (const std::string& key : kMetricKeys) {
            auto it = metrics.find(key);
            if (it != metrics.end()) out[key] = aggregated_to_json(it->second);
        }
        return out;
    };
    if (!table3.dd.empty()) models["dd_ml"] = model_json(table3.dd);
    if (!table3.kb.empty()) models["kb_ml"] = model_json(table3.kb);
    table["models"] = models;
    nlohmann::ordered_json pvals;
    for (const std::string& key : kMetricKeys) {
        auto it = table3.p_values.find(key);
        if (it != table3.p_values.end()) pvals[key] = it->second;
    }
    table["p_values"] = pvals;
    j["table3"] = table;

    nlohmann::ordered_json sweep = nlohmann::ordered_json::array();
    for (const AlphaRow& row : alpha_sweep) {
        sweep.push_back({{"alpha", row.alpha},
                         {"a", aggregated_to_json(row.a)},
                         {"roc_auc", aggregated_to_json(row.roc_auc)},
                         {"mcc", aggregated_to_json(row.mcc)},
                         {"ra", aggregated_to_json(row.ra)}});
    }
    j["alpha_sweep"] = sweep;

    nlohmann::ordered_json fid = nlohmann::ordered_json::array();
    for (const FidelityRow& row : fidelity) {
        fid.push_back({{"budget", row.budget},
                       {"model", row.model},
                       {"accuracy", aggregated_to_json(row.accuracy)},
                       {"f1", aggregated_to_json(row.f1)}});
    }
    j["fidelity"] = fid;

    const auto sim_json = [](const std::vector<SimilarityRow>& rows) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const SimilarityRow& row : rows) {
            arr.push_back({{"budget", row.budget},
                           {"kind", to_string(row.kind)},
                           {"dd_ml_x", row.dd_mean},
                           {"kb_ml_x", row.kb_mean},
                           {"p_value", row.p_value},
                           {"n_folds", row.n_folds}});
        }
        return arr;
    };
    j["similarity"] = {{"all_predicted", sim_json(similarity_predicted)},
                       {"all_correct", sim_json(similarity_correct)}};

    nlohmann::ordered_json rob = nlohmann::ordered_json::array();
    for (const RobustnessRow& row : robustness) {
        rob.push_back({{"budget", row.budget},
                       {"model", row.model},
                       {"offdiag_mean", row.offdiag_mean},
                       {"full_mean", row.full_mean}});
    }
    j["robustness"] = rob;
    return j;
}

void ExperimentReport::write_bundle(const ExperimentConfig& cfg,
                                    const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);

    {
        std::ofstream out(dir / "report.json");
        if (!out) throw ExperimentError("cannot write report.json");
        out << to_json(cfg).dump(2) << '\n';
    }

    {
        std::string csv = "metric,dd_ml,kb_ml,p_value\n";
        for (const std::string& key : kMetricKeys) {
            csv += key;
            csv += ',';
            const auto dd = table3.dd.find(key);
            csv += dd != table3.dd.end() && dd->second.n ? fmt(dd->second.mean) : "";
            csv += ',';
            const auto kb = table3.kb.find(key);
            csv += kb != table3.kb.end() && kb->second.n ? fmt(kb->second.mean) : "";
            csv += ',';
            const auto p = table3.p_values.find(key);
            csv += p != table3.p_values.end() ? fmt(p->second) : "";
            csv += '\n';
        }
        write_csv(dir / "table3.csv", csv);
    }

    {
        std::string csv = "alpha,metric,mean,ci\n";
        for (const AlphaRow& row : alpha_sweep) {
            const std::pair<const char*, const AggregatedMetric*> metrics[] = {
                {"a", &row.a}, {"roc_auc", &row.roc_auc}, {"mcc", &row.mcc}, {"ra", &row.ra}};
            for (const auto& [name, m] : metrics) {
                csv += fmt(row.alpha);
                csv += ',';
                csv += name;
                csv += ',';
                csv += fmt(m->mean);
                csv += ',';
                csv += fmt(m->ci_half_width);
                csv += '\n';
            }
        }
        write_csv(dir / "fig2a.csv", csv);
    }

    {
        std::string csv = "budget,kind,model,mean,significance\n";
        for (const SimilarityRow& row : similarity_predicted) {
            const char* stars = row.p_value < 0.01 ? "**" : (row.p_value < 0.05 ? "*" : "");
            for (int m = 0; m < 2; ++m) {
                csv += std::to_string(row.budget);
                csv += ',';
                csv += to_string(row.kind);
                csv += ',';
                csv += m == 0 ? "dd_ml_x" : "kb_ml_x";
                csv += ',';
                csv += fmt(m == 0 ? row.dd_mean : row.kb_mean);
                csv += ',';
                csv += stars;
                csv += '\n';
            }
        }
        write_csv(dir / "fig3b.csv", csv);
    }

    {
        std::string csv = "budget,model,robustness\n";
        for (const RobustnessRow& row : robustness) {
            csv += std::to_string(row.budget);
            csv += ',';
            csv += row.model;
            csv += ',';
            csv += fmt(row.offdiag_mean);
            csv += '\n';
        }
        write_csv(dir / "fig3c.csv", csv);
    }
}

}  // namespace protoeval
