#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>

namespace protoeval {

struct StatsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation to ~1e-10.
double incomplete_beta(double a, double b, double x);

// Two-tailed p-value of a Student-t statistic with df degrees of freedom.
double student_t_two_tailed(double t, double df);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    double mean_diff = 0.0;
    std::size_t n = 0;
    bool zero_variance = false;
};

// Paired t-test over per-fold scores with the variance inflation
// (1/k + n_test/n_train) that accounts for overlapping training sets in
// repeated cross-validation. With n_test = 0 this reduces to the classical
// paired t-test.
TTestResult corrected_ttest(std::span<const double> a, std::span<const double> b,
                            std::size_t n_train, std::size_t n_test);

struct MeanCI {
    double mean = 0.0;
    double ci_half_width = 0.0;  // 1.96 * standard error
    std::size_t n = 0;
};

MeanCI mean_ci(std::span<const double> values);

}  // namespace protoeval
