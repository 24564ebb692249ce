#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace protoeval {

struct MetricsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingleClassError : MetricsError {
    using MetricsError::MetricsError;
};

struct ProtocolNeverCorrectError : MetricsError {
    using MetricsError::MetricsError;
};

struct EmptyDenominatorError : MetricsError {
    using MetricsError::MetricsError;
};

// Aligned truth, model and protocol predictions for one evaluation split.
struct PredictionBundle {
    std::vector<int> y;                     // ground truth, {0,1}
    std::vector<int> y_hat;                 // model predictions, y_hat = 1 iff p >= threshold
    std::vector<double> p;                  // model probabilities in [0,1]
    std::vector<std::optional<int>> r;      // protocol predictions, nullopt = N/A
    double threshold = 0.5;

    std::size_t size() const { return y.size(); }
};

// Binarizes p at the threshold. r may be empty, meaning all N/A.
PredictionBundle make_bundle(std::vector<int> y, std::vector<double> p,
                             std::vector<std::optional<int>> r, double threshold = 0.5);

// For tests and rule-set fidelity: hard predictions stand in for p.
PredictionBundle make_bundle_from_predictions(std::vector<int> y, std::vector<int> y_hat,
                                              std::vector<std::optional<int>> r = {});

struct ConfusionCounts {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

// Standard binary-classification metrics plus the protocol-relative ones.
// Metrics that are undefined for the given data (single-class truth, empty
// denominators) are reported absent rather than as 0.
struct MetricsReport {
    double a = 0.0;                      // accuracy
    std::optional<double> f1;            // positive-class F1
    std::optional<double> f1_macro;      // unweighted mean of both class F1s
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> ba;            // balanced accuracy
    std::optional<double> roc_auc;       // rank-based, midranks for ties
    std::optional<double> mcc;
    std::optional<double> ra;
    std::optional<double> rr;
    std::optional<double> rs;
    ConfusionCounts counts;
};

// Fills the standard fields of the report (not RA/RR/RS).
MetricsReport standard_metrics(const PredictionBundle& b);

// Rank-statistic ROC AUC with midranks for tied scores. Throws
// SingleClassError when y contains a single class.
double roc_auc(std::span<const int> y, std::span<const double> p);

// Fraction of the protocol-correct samples the model also predicts correctly.
double relative_accuracy(const PredictionBundle& b);

// Class-conditional counterpart of RA for class c.
double relative_recall(const PredictionBundle& b, int c);

// Relative specificity for class c. With include_na (the default, a literal
// reading of the defining set), N/A protocol entries count as "not c";
// otherwise samples without a protocol prediction are excluded.
double relative_specificity(const PredictionBundle& b, int c, bool include_na = true);

// standard_metrics plus RA/RR/RS with positive class c; relative metrics are
// absent when their denominators are empty.
MetricsReport full_metrics(const PredictionBundle& b, int c = 1, bool rs_include_na = true);

}  // namespace protoeval
