#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "protoeval/dataset.hpp"
#include "protoeval/rules.hpp"

namespace protoeval {

struct VectorizeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ThresholdMismatchError : VectorizeError {
    using VectorizeError::VectorizeError;
};

// Per-feature sorted threshold lists collected from a family of rule sets.
// Features never mentioned in any rule contribute no intervals.
struct DiscretizationMap {
    std::vector<std::string> feature_order;         // dataset feature order
    std::vector<std::vector<double>> thresholds;    // sorted, unique, per feature

    // Number of intervals contributed by feature k: max(|T(v_k)| - 1, 0).
    std::size_t segment_length(std::size_t k) const {
        const std::size_t z = thresholds[k].size();
        return z >= 2 ? z - 1 : 0;
    }
    std::size_t width() const {
        std::size_t w = 0;
        for (std::size_t k = 0; k < thresholds.size(); ++k) w += segment_length(k);
        return w;
    }
    std::size_t segment_offset(std::size_t k) const {
        std::size_t off = 0;
        for (std::size_t j = 0; j < k; ++j) off += segment_length(j);
        return off;
    }
};

// Flat binary vector over all feature intervals, laid out feature by feature
// in dmap order.
struct ExplanationVector {
    std::vector<std::uint8_t> bits;

    std::size_t size() const { return bits.size(); }
    bool operator==(const ExplanationVector&) const = default;

    std::string to_string() const;  // e.g. "001001"
};

// Union of all condition bounds per feature across the given rule sets. All
// rule sets must be bound-completed against the same dataset.
DiscretizationMap collect_thresholds(std::span<const RuleSet* const> rulesets,
                                     const std::vector<std::string>& feature_order);

// Interval bit is 1 when the interval is contained in the rule's condition on
// that feature, or when the rule has no condition on it. Containment uses
// closed intervals; strictness flags do not matter here.
ExplanationVector vectorize_rule(const Rule& rule, const DiscretizationMap& dmap);

// Word-packed view of an explanation vector for popcount-based similarity.
struct PackedBits {
    std::vector<std::uint64_t> words;
    std::size_t ones = 0;
};

PackedBits pack_bits(const ExplanationVector& vec);

// Per-sample local explanations for one rule set: each sample gets the vector
// of the rule it satisfies (first match, with a warning when several fire).
// Samples matched by the rule index so large cohorts stay cheap; vector_for()
// exposes the spec-level per-sample optional vector.
struct LocalExplanations {
    std::vector<ExplanationVector> rule_vectors;           // per rule in rule-set order
    std::vector<PackedBits> packed;                        // parallel to rule_vectors
    std::vector<std::optional<std::uint32_t>> rule_index;  // per sample
    std::size_t multi_match_samples = 0;

    std::size_t n_samples() const { return rule_index.size(); }
    const ExplanationVector* vector_for(std::size_t sample) const {
        if (!rule_index[sample]) return nullptr;
        return &rule_vectors[*rule_index[sample]];
    }
    void rebuild_packed();
};

LocalExplanations assign_local_explanations(const RuleSet& rs, const LabeledDataset& data,
                                            const DiscretizationMap& dmap);

// Indices of the samples every rule set can explain.
std::vector<std::size_t> restrict_to_common(
    std::span<const LocalExplanations* const> assignments);

}  // namespace protoeval
