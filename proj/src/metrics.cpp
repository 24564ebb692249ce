#include "protoeval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace protoeval {

namespace {

void check_lengths(const PredictionBundle& b) {
    if (b.y.size() != b.y_hat.size() || b.y.size() != b.p.size() || b.y.size() != b.r.size())
        throw MetricsError("prediction bundle vectors must have equal lengths");
    if (b.y.empty()) throw MetricsError("prediction bundle is empty");
}

std::optional<double> f1_for_class(const ConfusionCounts& c, int cls) {
    // For the negative class the roles of the quadrants swap.
    const double tp = static_cast<double>(cls == 1 ? c.tp : c.tn);
    const double fp = static_cast<double>(cls == 1 ? c.fp : c.fn);
    const double fn = static_cast<double>(cls == 1 ? c.fn : c.fp);
    const double denom = 2.0 * tp + fp + fn;
    if (denom == 0.0) return std::nullopt;
    return 2.0 * tp / denom;
}

}  // namespace

PredictionBundle make_bundle(std::vector<int> y, std::vector<double> p,
                             std::vector<std::optional<int>> r, double threshold) {
    PredictionBundle b;
    b.y = std::move(y);
    b.p = std::move(p);
    b.r = std::move(r);
    b.threshold = threshold;
    if (b.r.empty()) b.r.assign(b.y.size(), std::nullopt);
    b.y_hat.resize(b.p.size());
    for (std::size_t i = 0; i < b.p.size(); ++i) b.y_hat[i] = b.p[i] >= threshold ? 1 : 0;
    check_lengths(b);
    return b;
}

PredictionBundle make_bundle_from_predictions(std::vector<int> y, std::vector<int> y_hat,
                                              std::vector<std::optional<int>> r) {
    PredictionBundle b;
    b.y = std::move(y);
    b.y_hat = std::move(y_hat);
    b.r = std::move(r);
    b.p.resize(b.y_hat.size());
    for (std::size_t i = 0; i < b.y_hat.size(); ++i) b.p[i] = static_cast<double>(b.y_hat[i]);
    if (b.r.empty()) b.r.assign(b.y.size(), std::nullopt);
    check_lengths(b);
    return b;
}

double roc_auc(std::span<const int> y, std::span<const double> p) {
    const std::size_t n = y.size();
    std::size_t n_pos = 0;
    for (int v : y) n_pos += v == 1;
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw SingleClassError("ROC AUC needs both classes");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });

    // Midrank sum over positives (Mann-Whitney U).
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && p[order[j + 1]] == p[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;  // ranks are 1-based
        for (std::size_t t = i; t <= j; ++t) {
            if (y[order[t]] == 1) rank_sum_pos += midrank;
        }
        i = j + 1;
    }
    const double u = rank_sum_pos - static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

MetricsReport standard_metrics(const PredictionBundle& b) {
    check_lengths(b);
    MetricsReport report;

    ConfusionCounts c;
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (b.y[i] == 1) {
            if (b.y_hat[i] == 1)
                ++c.tp;
            else
                ++c.fn;
        } else {
            if (b.y_hat[i] == 1)
                ++c.fp;
            else
                ++c.tn;
        }
    }
    report.counts = c;

    const double n = static_cast<double>(b.size());
    report.a = static_cast<double>(c.tp + c.tn) / n;

    if (c.tp + c.fp > 0)
        report.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    if (c.tp + c.fn > 0)
        report.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    report.f1 = f1_for_class(c, 1);
    const std::optional<double> f1_neg = f1_for_class(c, 0);
    if (report.f1 && f1_neg) report.f1_macro = 0.5 * (*report.f1 + *f1_neg);

    const bool both_classes = (c.tp + c.fn > 0) && (c.tn + c.fp > 0);
    if (both_classes) {
        const double tpr = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
        const double tnr = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
        report.ba = 0.5 * (tpr + tnr);
        report.roc_auc = roc_auc(b.y, b.p);
        const double denom = std::sqrt(static_cast<double>(c.tp + c.fp)) *
                             std::sqrt(static_cast<double>(c.tp + c.fn)) *
                             std::sqrt(static_cast<double>(c.tn + c.fp)) *
                             std::sqrt(static_cast<double>(c.tn + c.fn));
        if (denom > 0.0) {
            report.mcc = (static_cast<double>(c.tp) * static_cast<double>(c.tn) -
                          static_cast<double>(c.fp) * static_cast<double>(c.fn)) /
                         denom;
        }
    }
    return report;
}

double relative_accuracy(const PredictionBundle& b) {
    check_lengths(b);
    std::size_t correct_protocol = 0;
    std::size_t both = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (b.r[i] && *b.r[i] == b.y[i]) {
            ++correct_protocol;
            if (b.y_hat[i] == b.y[i]) ++both;
        }
    }
    if (correct_protocol == 0)
        throw ProtocolNeverCorrectError("protocol never agrees with the ground truth");
    return static_cast<double>(both) / static_cast<double>(correct_protocol);
}

double relative_recall(const PredictionBundle& b, int c) {
    check_lengths(b);
    std::size_t denom = 0;
    std::size_t numer = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (b.r[i] && *b.r[i] == c && b.y[i] == c) {
            ++denom;
            if (b.y_hat[i] == c) ++numer;
        }
    }
    if (denom == 0) throw EmptyDenominatorError("no samples with r = y = c");
    return static_cast<double>(numer) / static_cast<double>(denom);
}

double relative_specificity(const PredictionBundle& b, int c, bool include_na) {
    check_lengths(b);
    std::size_t denom = 0;
    std::size_t numer = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        const bool r_not_c = b.r[i] ? (*b.r[i] != c) : include_na;
        if (b.y[i] != c && r_not_c) {
            ++denom;
            if (b.y_hat[i] != c) ++numer;
        }
    }
    if (denom == 0) throw EmptyDenominatorError("no samples with y != c and r != c");
    return static_cast<double>(numer) / static_cast<double>(denom);
}

MetricsReport full_metrics(const PredictionBundle& b, int c, bool rs_include_na) {
    MetricsReport report = standard_metrics(b);
    try {
        report.ra = relative_accuracy(b);
    } catch (const ProtocolNeverCorrectError&) {
    }
    try {
        report.rr = relative_recall(b, c);
    } catch (const EmptyDenominatorError&) {
    }
    try {
        report.rs = relative_specificity(b, c, rs_include_na);
    } catch (const EmptyDenominatorError&) {
    }
    return report;
}

}  // namespace protoeval
