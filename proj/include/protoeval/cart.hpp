#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "protoeval/dataset.hpp"
#include "protoeval/rules.hpp"

namespace protoeval {

struct CartError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat binary classification tree. Internal nodes route "<= threshold" left
// and "> threshold" right; thresholds are midpoints between consecutive
// distinct observed values.
struct TreeNode {
    bool is_leaf = true;
    std::size_t feature = 0;
    double threshold = 0.0;
    int left = -1;   // child indices into Tree::nodes
    int right = -1;
    int label = 0;          // leaf majority class
    std::size_t count = 0;  // training samples reaching the node
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    std::size_t n_leaves = 0;

    int predict(std::span<const double> row) const;
};

// Grows the tree best-first by Gini impurity decrease until max_leaves is
// reached or every leaf is pure. Ties break toward the lowest feature index,
// then the lowest threshold, then insertion order.
Tree fit_cart(const LabeledDataset& data, std::span<const std::size_t> indices,
              std::span<const int> targets, std::size_t max_leaves);

struct FidelityScore {
    double accuracy = 0.0;
    std::optional<double> f1;  // absent when degenerate (no positives anywhere)
};

// Rule set translated from a fitted tree, one rule per leaf. Rules partition
// the bound-completed feature box.
struct SurrogateRuleSet {
    RuleSet rules;
    std::size_t n_rules = 0;
    bool degenerate = false;  // single-leaf tree: targets were one class
    std::optional<FidelityScore> fidelity;
};

// Converts root-to-leaf paths into interval rules in raw feature units,
// intersecting repeated conditions on a feature and completing one-sided
// intervals with the dataset bounds. The shared split value t becomes
// upper-inclusive on the left rule and lower-exclusive on the right one, so
// rule evaluation reproduces tree traversal exactly.
SurrogateRuleSet tree_to_rules(const Tree& tree, const LabeledDataset& data,
                               const std::vector<std::pair<std::string, int>>& class_map = {
                                   {"class_0", 0}, {"class_1", 1}});

// Agreement of the rule set with the black-box predictions it approximates.
FidelityScore fidelity(const SurrogateRuleSet& rs, const LabeledDataset& data,
                       std::span<const std::size_t> indices, std::span<const int> blackbox_preds);

}  // namespace protoeval
