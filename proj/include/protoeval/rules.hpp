#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "protoeval/dataset.hpp"

namespace protoeval {

struct RuleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SyntaxError : RuleError {
    SyntaxError(std::size_t line_no, const std::string& msg)
        : RuleError("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
    std::size_t line;
};

struct DuplicateRuleNameError : RuleError {
    explicit DuplicateRuleNameError(const std::string& name)
        : RuleError("duplicate rule name: " + name) {}
};

struct UnknownClassLabelError : RuleError {
    explicit UnknownClassLabelError(const std::string& label)
        : RuleError("unknown class label: " + label) {}
};

struct UnknownVariableError : RuleError {
    explicit UnknownVariableError(const std::string& name)
        : RuleError("unknown variable: " + name), variable(name) {}
    std::string variable;
};

struct MissingFeatureError : RuleError {
    explicit MissingFeatureError(const std::string& name)
        : RuleError("sample does not provide feature: " + name), feature(name) {}
    std::string feature;
};

// Interval condition on one variable. Unset bounds are unbounded until
// complete_bounds() fills them from the dataset range. Inclusivity flags keep
// the strict `<`/`>` operators distinguishable from `<=`/`>=`.
struct Condition {
    std::string variable;
    std::optional<double> lower;
    std::optional<double> upper;
    bool lower_inclusive = true;
    bool upper_inclusive = true;

    bool contains(double x) const {
        if (lower && (lower_inclusive ? x < *lower : x <= *lower)) return false;
        if (upper && (upper_inclusive ? x > *upper : x >= *upper)) return false;
        return true;
    }

    bool operator==(const Condition&) const = default;
};

struct Rule {
    std::string name;
    std::vector<Condition> conditions;  // at most one per variable
    int outcome = 0;

    bool operator==(const Rule&) const = default;
};

struct RuleSet {
    std::vector<Rule> rules;
    // label -> {0,1}; exactly two entries, values 0 and 1.
    std::vector<std::pair<std::string, int>> class_map;

    const std::string& label_for(int cls) const;

    bool operator==(const RuleSet&) const = default;
};

// Parses the rule DSL. One statement per line, '#' starts a comment:
//   classes: <label>=0, <label>=1
//   rule <name>: <cond> (, <cond>)* -> <label>
//   <cond> ::= <ident> (<=|>=|<|>) <number> | <ident> IN [<number>, <number>]
// Multiple conditions on one variable within a rule are intersected.
RuleSet parse_ruleset(const std::string& text);

// Canonical text form; parse_ruleset(serialize_ruleset(rs)) == rs.
std::string serialize_ruleset(const RuleSet& rs);

// Fills every missing lower/upper bound with the dataset's observed min/max
// for that variable. Completed bounds are inclusive.
RuleSet complete_bounds(const RuleSet& rs, const LabeledDataset& data);

// First rule whose conditions all hold wins; nullopt when no rule fires.
std::optional<int> evaluate(const RuleSet& rs, std::span<const double> sample,
                            const std::vector<std::string>& feature_names);

// evaluate() applied to every row, using raw (unscaled) values.
std::vector<std::optional<int>> protocol_vector(const RuleSet& rs, const LabeledDataset& data);

namespace detail {
// Per-rule conditions with variable names resolved to column indices.
struct ResolvedRule {
    std::vector<std::pair<std::size_t, const Condition*>> conditions;
    int outcome = 0;
};
std::vector<ResolvedRule> resolve_rules(const RuleSet& rs,
                                        const std::vector<std::string>& feature_names);
bool rule_fires(const ResolvedRule& rule, std::span<const double> sample);
}  // namespace detail

}  // namespace protoeval
