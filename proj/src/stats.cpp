#include "protoeval/stats.hpp"

#include <cmath>
#include <limits>

namespace protoeval {

namespace {

// Lentz's continued fraction for the incomplete beta function.
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 1e-12;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw StatsError("incomplete beta continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw StatsError("incomplete beta requires a, b > 0");
    if (x < 0.0 || x > 1.0) throw StatsError("incomplete beta requires x in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;

    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log(1.0 - x);
    const double front = std::exp(ln_front);
    // Use the symmetry relation where the continued fraction converges fast.
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          b * std::log(1.0 - x) + a * std::log(x)) *
                     beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_tailed(double t, double df) {
    if (df <= 0.0) throw StatsError("degrees of freedom must be positive");
    if (!std::isfinite(t)) return 0.0;
    const double x = df / (df + t * t);
    return incomplete_beta(0.5 * df, 0.5, x);
}

TTestResult corrected_ttest(std::span<const double> a, std::span<const double> b,
                            std::size_t n_train, std::size_t n_test) {
    if (a.size() != b.size()) throw StatsError("paired samples must have equal lengths");
    const std::size_t k = a.size();
    if (k < 2) throw StatsError("need at least two paired scores");
    if (n_train == 0) throw StatsError("n_train must be positive");

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
        if (mean == 0.0) {
            result.t = 0.0;
            result.p = 1.0;
        } else {
            result.t = mean > 0.0 ? std::numeric_limits<double>::infinity()
                                  : -std::numeric_limits<double>::infinity();
            result.p = 0.0;
        }
        return result;
    }

    const double ratio = static_cast<double>(n_test) / static_cast<double>(n_train);
    const double inflation = 1.0 / static_cast<double>(k) + ratio;
    result.t = mean / std::sqrt(inflation * var);
    result.p = student_t_two_tailed(result.t, static_cast<double>(k - 1));
    return result;
}

MeanCI mean_ci(std::span<const double> values) {
    MeanCI out;
    out.n = values.size();
    if (values.empty()) return out;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    out.mean = mean;
    if (values.size() < 2) return out;
    double var = 0.0;
    for (double v : values) {
        const double d = v - mean;
        var += d * d;
    }
    var /= static_cast<double>(values.size() - 1);
    out.ci_half_width = 1.96 * std::sqrt(var / static_cast<double>(values.size()));
    return out;
}

}  // namespace protoeval
