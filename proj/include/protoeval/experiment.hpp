#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "protoeval/cart.hpp"
#include "protoeval/dataset.hpp"
#include "protoeval/metrics.hpp"
#include "protoeval/network.hpp"
#include "protoeval/rules.hpp"
#include "protoeval/similarity.hpp"
#include "protoeval/stats.hpp"

namespace protoeval {

struct ExperimentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Pima CSV layout; other datasets supply their own schema.
extern const std::vector<std::string> kPimaSchema;
extern const std::string kPimaLabelColumn;
extern const std::vector<std::string> kPimaMissingFeatures;

enum class SubsetMode { all_predicted, all_correct };

struct ExperimentConfig {
    std::filesystem::path dataset_path;
    std::filesystem::path ruleset_path;
    std::vector<std::string> schema = kPimaSchema;
    std::string label_column = kPimaLabelColumn;
    std::vector<std::string> missing_features = kPimaMissingFeatures;

    std::vector<double> alpha_grid = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
    double similarity_alpha = 1.5;  // KB-ML operating point for extraction
    std::size_t repeats = 10;
    std::size_t k = 10;
    std::vector<std::size_t> leaf_budgets = {2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    std::uint64_t seed = 42;
    double threshold = 0.5;
    int positive_class = 1;
    bool rs_include_na = true;
    SimilarityKind robustness_kind = SimilarityKind::xnor;

    NetworkConfig network;  // alpha and seed are overridden per fold

    std::size_t threads = 0;  // 0 = hardware concurrency
    bool with_surrogates = true;
    bool with_similarity = true;
    bool with_robustness = true;
};

// Everything computed on one (repeat, fold) cell.
struct FoldRecord {
    std::size_t repeat = 0;
    std::size_t fold = 0;
    std::vector<MetricsReport> per_alpha;  // aligned with alpha_grid

    // [0] = DD-ML (alpha 0), [1] = KB-ML (similarity_alpha); per leaf budget.
    std::array<std::vector<SurrogateRuleSet>, 2> surrogates;

    struct SimilarityPair {
        double dd = 0.0;  // S(KB, DD-ML_X)
        double kb = 0.0;  // S(KB, KB-ML_X)
        std::size_t n_samples = 0;
    };
    // [subset: 0=all_predicted, 1=all_correct][budget][kind]
    std::array<std::vector<std::array<std::optional<SimilarityPair>, 4>>, 2> similarity;
};

struct AggregatedMetric {
    double mean = 0.0;
    double stddev = 0.0;
    double ci_half_width = 0.0;
    std::size_t n = 0;
};

// Names used for metric maps: mcc, f1, f1_macro, a, ba, roc_auc, p, r, ra, rr, rs.
extern const std::vector<std::string> kMetricKeys;

struct ModelComparison {
    std::map<std::string, AggregatedMetric> dd;
    std::map<std::string, AggregatedMetric> kb;
    std::map<std::string, double> p_values;  // corrected paired t-test DD vs KB
};

struct AlphaRow {
    double alpha = 0.0;
    AggregatedMetric a, roc_auc, mcc, ra;
};

struct FidelityRow {
    std::size_t budget = 0;
    std::string model;  // "dd_ml_x" or "kb_ml_x"
    AggregatedMetric accuracy, f1;
};

struct SimilarityRow {
    std::size_t budget = 0;
    SimilarityKind kind = SimilarityKind::xnor;
    double dd_mean = 0.0;
    double kb_mean = 0.0;
    double p_value = 1.0;
    std::size_t n_folds = 0;
};

struct RobustnessRow {
    std::size_t budget = 0;
    std::string model;
    double offdiag_mean = 0.0;
    double full_mean = 0.0;
};

struct ExperimentReport {
    std::size_t n_samples = 0;
    std::size_t n_features = 0;
    std::array<std::size_t, 2> class_counts{};
    ModelComparison table3;
    std::vector<AlphaRow> alpha_sweep;
    std::vector<FidelityRow> fidelity;
    std::vector<SimilarityRow> similarity_predicted;
    std::vector<SimilarityRow> similarity_correct;
    std::vector<RobustnessRow> robustness;

    nlohmann::ordered_json to_json(const ExperimentConfig& cfg) const;
    // Writes report.json, table3.csv, fig2a.csv, fig3b.csv, fig3c.csv.
    void write_bundle(const ExperimentConfig& cfg, const std::filesystem::path& dir) const;
};

// Per-fold pipeline over the whole cross-validation grid. Folds run in
// parallel; results are deterministic for a given config and seed.
std::vector<FoldRecord> run_folds(const ExperimentConfig& cfg, const LabeledDataset& data,
                                  const RuleSet& kb);

// Means, confidence intervals, corrected t-tests and robustness matrices.
ExperimentReport aggregate(const ExperimentConfig& cfg, const std::vector<FoldRecord>& records,
                           const LabeledDataset& data);

// Loads inputs, runs all folds and aggregates.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Convenience wrappers over stats for the harness conventions.
TTestResult corrected_ttest_ratio(std::span<const double> a, std::span<const double> b,
                                  double test_train_ratio);

// Seed for the network trained on (repeat, fold) at the given alpha. Derived
// from the alpha value itself so partial runs train identical models.
std::uint64_t fold_seed(std::uint64_t base, std::size_t repeat, std::size_t fold, double alpha);

}  // namespace protoeval
