#pragma once

// Independent oracles for property tests. Everything here recomputes expected
// values from first principles, without touching the library's internal
// implementation paths.

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "protoeval/cart.hpp"
#include "protoeval/dataset.hpp"
#include "protoeval/network.hpp"
#include "protoeval/rng.hpp"
#include "protoeval/rules.hpp"

namespace oracles {

// Pairwise-comparison AUC: P(score_pos > score_neg) + 0.5 P(tie).
inline double auc_bruteforce(std::span<const int> y, std::span<const double> p) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] != 1) continue;
        for (std::size_t j = 0; j < y.size(); ++j) {
            if (y[j] != 0) continue;
            ++pairs;
            if (p[i] > p[j])
                wins += 1.0;
            else if (p[i] == p[j])
                wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

// Accuracy of y_hat restricted to an index subset (the RA oracle).
inline double restricted_accuracy(std::span<const int> y, std::span<const int> y_hat,
                                  std::span<const std::size_t> subset) {
    std::size_t hit = 0;
    for (std::size_t i : subset) hit += y_hat[i] == y[i];
    return static_cast<double>(hit) / static_cast<double>(subset.size());
}

struct SplitChoice {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double decrease = 0.0;
};

// Exhaustive search over every (feature, midpoint-threshold) pair, scoring by
// Gini sum-impurity decrease with the same tie rule as the library
// (lowest feature, then lowest threshold).
inline SplitChoice exhaustive_root_split(const std::vector<std::vector<double>>& rows,
                                         const std::vector<int>& targets) {
    SplitChoice best;
    const std::size_t n = rows.size();
    const std::size_t m = rows.front().size();
    const auto gini_sum = [](std::size_t cnt, std::size_t pos) {
        if (cnt == 0) return 0.0;
        const double dp = static_cast<double>(pos);
        const double dq = static_cast<double>(cnt - pos);
        return static_cast<double>(cnt) - (dp * dp + dq * dq) / static_cast<double>(cnt);
    };
    std::size_t total_pos = 0;
    for (int t : targets) total_pos += t == 1;
    const double parent = gini_sum(n, total_pos);

    for (std::size_t f = 0; f < m; ++f) {
        std::vector<double> values;
        for (const auto& row : rows) values.push_back(row[f]);
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t v = 0; v + 1 < values.size(); ++v) {
            const double threshold = 0.5 * (values[v] + values[v + 1]);
            std::size_t ln = 0, lpos = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (rows[i][f] <= threshold) {
                    ++ln;
                    lpos += targets[i] == 1;
                }
            }
            const double decrease =
                parent - gini_sum(ln, lpos) - gini_sum(n - ln, total_pos - lpos);
            if (decrease > best.decrease) {
                best = {true, f, threshold, decrease};
            }
        }
    }
    return best;
}

// Central finite difference of the mean CSL with respect to every parameter.
inline protoeval::NetworkGradients fd_gradient(protoeval::TrainedNetwork net,
                                               std::span<const std::vector<double>> rows,
                                               std::span<const int> y,
                                               std::span<const std::optional<int>> r, double alpha,
                                               double step = 1e-5) {
    using protoeval::csl_loss;
    const auto loss_at = [&](const protoeval::TrainedNetwork& w) {
        double total = 0.0;
        for (std::size_t s = 0; s < rows.size(); ++s)
            total += csl_loss(y[s], protoeval::forward_scaled(w, rows[s]), r[s], alpha);
        return total / static_cast<double>(rows.size());
    };

    protoeval::NetworkGradients g;
    g.weights.resize(net.weights.size());
    g.biases.resize(net.biases.size());
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        g.weights[l].assign(net.weights[l].size(), 0.0);
        for (std::size_t i = 0; i < net.weights[l].size(); ++i) {
            const double saved = net.weights[l][i];
            net.weights[l][i] = saved + step;
            const double up = loss_at(net);
            net.weights[l][i] = saved - step;
            const double down = loss_at(net);
            net.weights[l][i] = saved;
            g.weights[l][i] = (up - down) / (2.0 * step);
        }
        g.biases[l].assign(net.biases[l].size(), 0.0);
        for (std::size_t i = 0; i < net.biases[l].size(); ++i) {
            const double saved = net.biases[l][i];
            net.biases[l][i] = saved + step;
            const double up = loss_at(net);
            net.biases[l][i] = saved - step;
            const double down = loss_at(net);
            net.biases[l][i] = saved;
            g.biases[l][i] = (up - down) / (2.0 * step);
        }
    }
    return g;
}

// Random bound-completed rule set over the box [0, 10]^m with small m.
inline protoeval::RuleSet random_ruleset(std::mt19937_64& rng, std::size_t n_features,
                                         std::size_t n_rules,
                                         const std::vector<std::string>& names) {
    protoeval::RuleSet rs;
    rs.class_map = {{"neg", 0}, {"pos", 1}};
    for (std::size_t j = 0; j < n_rules; ++j) {
        protoeval::Rule rule;
        rule.name = "r" + std::to_string(j);
        rule.outcome = static_cast<int>(protoeval::uniform_index(rng, 2));
        for (std::size_t f = 0; f < n_features; ++f) {
            if (protoeval::uniform01(rng) < 0.3) continue;  // unconstrained feature
            double a = protoeval::uniform_real(rng, 0.0, 10.0);
            double b = protoeval::uniform_real(rng, 0.0, 10.0);
            if (a > b) std::swap(a, b);
            protoeval::Condition cond;
            cond.variable = names[f];
            cond.lower = a;
            cond.upper = b;
            rule.conditions.push_back(cond);
        }
        if (rule.conditions.empty()) {
            protoeval::Condition cond;
            cond.variable = names[0];
            cond.lower = 0.0;
            cond.upper = 10.0;
            rule.conditions.push_back(cond);
        }
        rs.rules.push_back(rule);
    }
    return rs;
}

}  // namespace oracles
