#include "protoeval/cart.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>

#include "protoeval/metrics.hpp"

namespace protoeval {

namespace {

// Sum-impurity of a class split: n * gini = n - (pos^2 + neg^2) / n.
double gini_sum(std::size_t n, std::size_t pos) {
    if (n == 0) return 0.0;
    const double dp = static_cast<double>(pos);
    const double dq = static_cast<double>(n - pos);
    return static_cast<double>(n) - (dp * dp + dq * dq) / static_cast<double>(n);
}

struct BestSplit {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double decrease = 0.0;
};

BestSplit find_best_split(const LabeledDataset& data, const std::vector<std::size_t>& samples,
                          std::span<const int> target_of_row) {
    BestSplit best;
    const std::size_t n = samples.size();
    if (n < 2) return best;

    std::size_t total_pos = 0;
    for (std::size_t i : samples) total_pos += target_of_row[i] == 1;
    if (total_pos == 0 || total_pos == n) return best;  // pure node

    const double parent = gini_sum(n, total_pos);

    std::vector<std::pair<double, int>> column(n);
    for (std::size_t f = 0; f < data.n_features(); ++f) {
        for (std::size_t i = 0; i < n; ++i)
            column[i] = {data.rows[samples[i]][f], target_of_row[samples[i]]};
        std::sort(column.begin(), column.end());

        std::size_t left_n = 0, left_pos = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            ++left_n;
            left_pos += column[i].second == 1;
            if (column[i].first == column[i + 1].first) continue;
            const double decrease = parent - gini_sum(left_n, left_pos) -
                                    gini_sum(n - left_n, total_pos - left_pos);
            if (decrease > best.decrease) {
                best.found = true;
                best.feature = f;
                best.threshold = 0.5 * (column[i].first + column[i + 1].first);
                best.decrease = decrease;
            }
        }
    }
    return best;
}

int majority_label(const std::vector<std::size_t>& samples,
                   std::span<const int> target_of_row) {
    std::size_t pos = 0;
    for (std::size_t i : samples) pos += target_of_row[i] == 1;
    return 2 * pos > samples.size() ? 1 : 0;
}

struct Candidate {
    std::size_t node_id;
    std::vector<std::size_t> samples;
    BestSplit split;
    std::size_t seq;  // insertion order, breaks priority ties deterministically
};

struct CandidateOrder {
    bool operator()(const Candidate& a, const Candidate& b) const {
        if (a.split.decrease != b.split.decrease) return a.split.decrease < b.split.decrease;
        return a.seq > b.seq;
    }
};

}  // namespace

int Tree::predict(std::span<const double> row) const {
    std::size_t node = 0;
    while (!nodes[node].is_leaf) {
        node = row[nodes[node].feature] <= nodes[node].threshold
                   ? static_cast<std::size_t>(nodes[node].left)
                   : static_cast<std::size_t>(nodes[node].right);
    }
    return nodes[node].label;
}

Tree fit_cart(const LabeledDataset& data, std::span<const std::size_t> indices,
              std::span<const int> targets, std::size_t max_leaves) {
    if (max_leaves < 2) throw CartError("max_leaves must be at least 2");
    if (indices.empty()) throw CartError("fit_cart requires training samples");
    if (targets.size() != indices.size())
        throw CartError("targets must align with the training indices");
    for (int t : targets) {
        if (t != 0 && t != 1) throw CartError("targets must be 0 or 1");
    }

    // Targets addressed by dataset row index.
    std::vector<int> target_of_row(data.n_rows(), 0);
    for (std::size_t i = 0; i < indices.size(); ++i) target_of_row[indices[i]] = targets[i];

    Tree tree;
    std::vector<std::size_t> root_samples(indices.begin(), indices.end());

    TreeNode root;
    root.count = root_samples.size();
    root.label = majority_label(root_samples, target_of_row);
    tree.nodes.push_back(root);
    tree.n_leaves = 1;

    std::priority_queue<Candidate, std::vector<Candidate>, CandidateOrder> queue;
    std::size_t seq = 0;
    const BestSplit root_split = find_best_split(data, root_samples, target_of_row);
    if (root_split.found) queue.push({0, std::move(root_samples), root_split, seq++});

    while (tree.n_leaves < max_leaves && !queue.empty()) {
        Candidate cand = queue.top();
        queue.pop();

        std::vector<std::size_t> left_samples, right_samples;
        for (std::size_t i : cand.samples) {
            if (data.rows[i][cand.split.feature] <= cand.split.threshold)
                left_samples.push_back(i);
            else
                right_samples.push_back(i);
        }

        TreeNode& node = tree.nodes[cand.node_id];
        node.is_leaf = false;
        node.feature = cand.split.feature;
        node.threshold = cand.split.threshold;
        node.left = static_cast<int>(tree.nodes.size());
        node.right = node.left + 1;

        TreeNode left, right;
        left.count = left_samples.size();
        left.label = majority_label(left_samples, target_of_row);
        right.count = right_samples.size();
        right.label = majority_label(right_samples, target_of_row);
        tree.nodes.push_back(left);
        tree.nodes.push_back(right);
        tree.n_leaves += 1;

        const std::size_t left_id = static_cast<std::size_t>(tree.nodes[cand.node_id].left);
        const std::size_t right_id = static_cast<std::size_t>(tree.nodes[cand.node_id].right);
        const BestSplit ls = find_best_split(data, left_samples, target_of_row);
        if (ls.found) queue.push({left_id, std::move(left_samples), ls, seq++});
        const BestSplit rs = find_best_split(data, right_samples, target_of_row);
        if (rs.found) queue.push({right_id, std::move(right_samples), rs, seq++});
    }
    return tree;
}

SurrogateRuleSet tree_to_rules(const Tree& tree, const LabeledDataset& data,
                               const std::vector<std::pair<std::string, int>>& class_map) {
    if (class_map.size() != 2 || class_map[0].second == class_map[1].second)
        throw CartError("class map must assign one label to 0 and one to 1");

    SurrogateRuleSet out;
    out.rules.class_map = class_map;

    struct PathBound {
        std::optional<double> lower, upper;
        bool lower_inclusive = true, upper_inclusive = true;
    };

    const std::size_t m = data.n_features();
    std::vector<PathBound> bounds(m);
    std::size_t leaf_no = 0;

    // Depth-first, left child first, so rules appear in leaf order.
    const auto emit_leaf = [&](const TreeNode& node) {
        Rule rule;
        rule.name = "leaf_" + std::to_string(leaf_no++);
        rule.outcome = node.label;
        for (std::size_t f = 0; f < m; ++f) {
            const PathBound& pb = bounds[f];
            if (!pb.lower && !pb.upper) continue;
            Condition cond;
            cond.variable = data.feature_names[f];
            cond.lower = pb.lower ? *pb.lower : data.feature_bounds[f].min;
            cond.lower_inclusive = pb.lower ? pb.lower_inclusive : true;
            cond.upper = pb.upper ? *pb.upper : data.feature_bounds[f].max;
            cond.upper_inclusive = pb.upper ? pb.upper_inclusive : true;
            rule.conditions.push_back(std::move(cond));
        }
        if (rule.conditions.empty()) {
            // Single-leaf tree: span the whole box on the first feature so the
            // rule stays expressible in the DSL.
            Condition cond;
            cond.variable = data.feature_names[0];
            cond.lower = data.feature_bounds[0].min;
            cond.upper = data.feature_bounds[0].max;
            rule.conditions.push_back(std::move(cond));
        }
        out.rules.rules.push_back(std::move(rule));
    };

    const std::function<void(std::size_t)> walk = [&](std::size_t id) {
        const TreeNode& node = tree.nodes[id];
        if (node.is_leaf) {
            emit_leaf(node);
            return;
        }
        const std::size_t f = node.feature;
        const PathBound saved = bounds[f];

        // Left: value <= t (t inclusive above).
        if (!saved.upper || node.threshold < *saved.upper) {
            bounds[f].upper = node.threshold;
            bounds[f].upper_inclusive = true;
        }
        walk(static_cast<std::size_t>(node.left));
        bounds[f] = saved;

        // Right: value > t (t exclusive below).
        if (!saved.lower || node.threshold > *saved.lower) {
            bounds[f].lower = node.threshold;
            bounds[f].lower_inclusive = false;
        }
        walk(static_cast<std::size_t>(node.right));
        bounds[f] = saved;
    };
    walk(0);

    out.n_rules = out.rules.rules.size();
    out.degenerate = out.n_rules == 1;
    return out;
}

FidelityScore fidelity(const SurrogateRuleSet& rs, const LabeledDataset& data,
                       std::span<const std::size_t> indices, std::span<const int> blackbox_preds) {
    if (indices.size() != blackbox_preds.size())
        throw CartError("blackbox predictions must align with the evaluation indices");

    const auto resolved = detail::resolve_rules(rs.rules, data.feature_names);
    std::vector<int> rule_preds;
    rule_preds.reserve(indices.size());
    for (std::size_t i : indices) {
        std::optional<int> fired;
        for (const auto& rule : resolved) {
            if (detail::rule_fires(rule, data.rows[i])) {
                fired = rule.outcome;
                break;
            }
        }
        if (!fired)
            throw CartError("no surrogate rule fires on row " + std::to_string(i) +
                            "; sample lies outside the completed feature box");
        rule_preds.push_back(*fired);
    }

    const PredictionBundle bundle = make_bundle_from_predictions(
        std::vector<int>(blackbox_preds.begin(), blackbox_preds.end()), std::move(rule_preds));
    const MetricsReport report = standard_metrics(bundle);
    FidelityScore score;
    score.accuracy = report.a;
    score.f1 = report.f1;
    return score;
}

}  // namespace protoeval
