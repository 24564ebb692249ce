#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "protoeval/metrics.hpp"
#include "protoeval/rng.hpp"
#include "support/oracles.hpp"

using namespace protoeval;

namespace {

std::optional<int> na() { return std::nullopt; }

}  // namespace

TEST_CASE("perfect prediction scores 1 across the board") {
    const auto b = make_bundle_from_predictions({1, 0, 1, 0}, {1, 0, 1, 0});
    const MetricsReport m = standard_metrics(b);
    CHECK(m.a == 1.0);
    CHECK(*m.f1 == 1.0);
    CHECK(*m.mcc == doctest::Approx(1.0));
    CHECK(*m.ba == 1.0);
    CHECK(m.counts.tp == 2);
    CHECK(m.counts.tn == 2);
}

TEST_CASE("hand confusion matrix: TP=FN=FP=TN=1") {
    const auto b = make_bundle_from_predictions({1, 1, 0, 0}, {1, 0, 1, 0});
    const MetricsReport m = standard_metrics(b);
    CHECK(m.a == 0.5);
    CHECK(*m.precision == 0.5);
    CHECK(*m.recall == 0.5);
    CHECK(*m.mcc == doctest::Approx(0.0));
    CHECK(*m.f1 == doctest::Approx(0.5));
    CHECK(*m.f1_macro == doctest::Approx(0.5));
}

TEST_CASE("ROC AUC basics") {
    CHECK(roc_auc(std::vector<int>{1, 0}, std::vector<double>{0.9, 0.1}) == 1.0);
    CHECK(roc_auc(std::vector<int>{1, 0}, std::vector<double>{0.1, 0.9}) == 0.0);
    // all tied scores -> 0.5 via midranks
    CHECK(roc_auc(std::vector<int>{1, 0, 1, 0}, std::vector<double>{0.5, 0.5, 0.5, 0.5}) == 0.5);
    CHECK_THROWS_AS(roc_auc(std::vector<int>{1, 1}, std::vector<double>{0.2, 0.8}),
                    SingleClassError);
}

TEST_CASE("ROC AUC equals the pairwise-comparison oracle on random data") {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 10 + uniform_index(rng, 60);
        std::vector<int> y;
        std::vector<double> p;
        for (std::size_t i = 0; i < n; ++i) {
            y.push_back(static_cast<int>(uniform_index(rng, 2)));
            // coarse grid so score ties actually occur
            p.push_back(static_cast<double>(uniform_index(rng, 8)) / 7.0);
        }
        bool has_pos = false, has_neg = false;
        for (int v : y) (v ? has_pos : has_neg) = true;
        if (!has_pos || !has_neg) continue;
        CHECK(roc_auc(y, p) == doctest::Approx(oracles::auc_bruteforce(y, p)).epsilon(1e-12));
    }
}

TEST_CASE("ROC AUC is invariant under strictly monotone transforms of p") {
    std::mt19937_64 rng(555);
    std::vector<int> y;
    std::vector<double> p, p2;
    for (int i = 0; i < 60; ++i) {
        y.push_back(static_cast<int>(uniform_index(rng, 2)));
        const double v = uniform01(rng);
        p.push_back(v);
        p2.push_back(1.0 / (1.0 + std::exp(-(5.0 * v - 1.0))));  // strictly increasing
    }
    CHECK(roc_auc(y, p) == doctest::Approx(roc_auc(y, p2)).epsilon(1e-12));
}

TEST_CASE("MCC sign flips when predictions are complemented on balanced data") {
    std::mt19937_64 rng(8);
    std::vector<int> y, y_hat;
    for (int i = 0; i < 40; ++i) {
        y.push_back(i % 2);
        y_hat.push_back(uniform01(rng) < 0.7 ? y.back() : 1 - y.back());
    }
    const auto m1 = standard_metrics(make_bundle_from_predictions(y, y_hat));
    std::vector<int> flipped;
    for (int v : y_hat) flipped.push_back(1 - v);
    const auto m2 = standard_metrics(make_bundle_from_predictions(y, flipped));
    CHECK(*m1.mcc == doctest::Approx(-*m2.mcc));
}

TEST_CASE("single-class truth reports BA/ROC/MCC as absent, not zero") {
    const auto b = make_bundle_from_predictions({1, 1, 1}, {1, 0, 1});
    const MetricsReport m = standard_metrics(b);
    CHECK(!m.ba.has_value());
    CHECK(!m.roc_auc.has_value());
    CHECK(!m.mcc.has_value());
    CHECK(m.a == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("relative accuracy counts protocol-correct samples only") {
    // protocol correct on 4 samples; the model agrees on 3 of them
    const std::vector<int> y = {1, 1, 0, 0, 1, 0};
    const std::vector<int> y_hat = {1, 0, 0, 0, 0, 1};
    const std::vector<std::optional<int>> r = {1, 1, 0, 0, 0, na()};
    const auto b = make_bundle_from_predictions(y, y_hat, r);
    CHECK(relative_accuracy(b) == doctest::Approx(0.75));
}

TEST_CASE("RA equals restricted accuracy (oracle)") {
    std::mt19937_64 rng(777);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 20 + uniform_index(rng, 50);
        std::vector<int> y, y_hat;
        std::vector<std::optional<int>> r;
        for (std::size_t i = 0; i < n; ++i) {
            y.push_back(static_cast<int>(uniform_index(rng, 2)));
            y_hat.push_back(static_cast<int>(uniform_index(rng, 2)));
            const auto roll = uniform_index(rng, 3);
            r.push_back(roll == 2 ? na() : std::optional<int>(static_cast<int>(roll)));
        }
        std::vector<std::size_t> protocol_correct;
        for (std::size_t i = 0; i < n; ++i)
            if (r[i] && *r[i] == y[i]) protocol_correct.push_back(i);
        if (protocol_correct.empty()) continue;

        const auto b = make_bundle_from_predictions(y, y_hat, r);
        CHECK(relative_accuracy(b) ==
              doctest::Approx(oracles::restricted_accuracy(y, y_hat, protocol_correct)));
    }
}

TEST_CASE("RA requires a protocol-correct sample") {
    const auto b = make_bundle_from_predictions({1, 0}, {1, 0}, {std::optional<int>(0), na()});
    CHECK_THROWS_AS(relative_accuracy(b), ProtocolNeverCorrectError);
}

TEST_CASE("if the model matches the protocol wherever it is right, RA=RR=RS=1") {
    const std::vector<int> y = {1, 0, 1, 0, 1};
    const std::vector<std::optional<int>> r = {1, 0, 0, na(), 1};
    std::vector<int> y_hat = {1, 0, 0, 1, 1};  // equals r where r == y
    const auto b = make_bundle_from_predictions(y, y_hat, r);
    CHECK(relative_accuracy(b) == 1.0);
    CHECK(relative_recall(b, 1) == 1.0);
    CHECK(relative_specificity(b, 1) == doctest::Approx(1.0));
}

TEST_CASE("relative recall on class c") {
    // 3 protocol-correct positives, model right on 2
    const std::vector<int> y = {1, 1, 1, 0};
    const std::vector<std::optional<int>> r = {1, 1, 1, 0};
    const std::vector<int> y_hat = {1, 1, 0, 0};
    const auto b = make_bundle_from_predictions(y, y_hat, r);
    CHECK(relative_recall(b, 1) == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(relative_recall(b, 1 + 1), EmptyDenominatorError);
}

TEST_CASE("relative specificity: literal vs strict N/A handling") {
    // y != 1 and r != 1 (N/A counts as "not 1" in the literal reading)
    const std::vector<int> y = {0, 0, 0, 0, 1};
    const std::vector<std::optional<int>> r = {0, na(), 0, na(), 1};
    const std::vector<int> y_hat = {0, 1, 0, 0, 1};
    const auto b = make_bundle_from_predictions(y, y_hat, r);
    // literal: denominator {0,1,2,3}, numerator {0,2,3} -> 0.75
    CHECK(relative_specificity(b, 1, true) == doctest::Approx(0.75));
    // strict: denominator {0,2}, numerator {0,2} -> 1
    CHECK(relative_specificity(b, 1, false) == doctest::Approx(1.0));
}

TEST_CASE("full_metrics leaves relative metrics absent when undefined") {
    const auto b = make_bundle_from_predictions({1, 0}, {1, 0});  // r all N/A
    const MetricsReport m = full_metrics(b);
    CHECK(!m.ra.has_value());
    CHECK(!m.rr.has_value());
    // literal RS: N/A != c, denominator = {negatives} -> defined
    CHECK(m.rs.has_value());
    const MetricsReport strict = full_metrics(b, 1, false);
    CHECK(!strict.rs.has_value());
}

TEST_CASE("make_bundle binarizes probabilities at the threshold") {
    const auto b = make_bundle({1, 0, 1}, {0.5, 0.49, 0.51}, {});
    CHECK(b.y_hat == std::vector<int>{1, 0, 1});
    const auto b2 = make_bundle({1, 0, 1}, {0.5, 0.49, 0.51}, {}, 0.6);
    CHECK(b2.y_hat == std::vector<int>{0, 0, 0});
}
