#include "protoeval/vectorize.hpp"

#include <algorithm>

#include "protoeval/diag.hpp"

namespace protoeval {

std::string ExplanationVector::to_string() const {
    std::string s(bits.size(), '0');
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) s[i] = '1';
    }
    return s;
}

PackedBits pack_bits(const ExplanationVector& vec) {
    PackedBits packed;
    packed.words.assign((vec.size() + 63) / 64, 0);
    for (std::size_t i = 0; i < vec.size(); ++i) {
        if (vec.bits[i]) {
            packed.words[i / 64] |= std::uint64_t{1} << (i % 64);
            ++packed.ones;
        }
    }
    return packed;
}

void LocalExplanations::rebuild_packed() {
    packed.clear();
    packed.reserve(rule_vectors.size());
    for (const ExplanationVector& vec : rule_vectors) packed.push_back(pack_bits(vec));
}

DiscretizationMap collect_thresholds(std::span<const RuleSet* const> rulesets,
                                     const std::vector<std::string>& feature_order) {
    DiscretizationMap dmap;
    dmap.feature_order = feature_order;
    dmap.thresholds.assign(feature_order.size(), {});

    for (const RuleSet* rs : rulesets) {
        for (const Rule& rule : rs->rules) {
            for (const Condition& c : rule.conditions) {
                auto it = std::find(feature_order.begin(), feature_order.end(), c.variable);
                if (it == feature_order.end()) throw UnknownVariableError(c.variable);
                auto& list = dmap.thresholds[static_cast<std::size_t>(it - feature_order.begin())];
                if (c.lower) list.push_back(*c.lower);
                if (c.upper) list.push_back(*c.upper);
            }
        }
    }
    for (auto& list : dmap.thresholds) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return dmap;
}

ExplanationVector vectorize_rule(const Rule& rule, const DiscretizationMap& dmap) {
    ExplanationVector vec;
    vec.bits.assign(dmap.width(), 0);

    std::size_t offset = 0;
    for (std::size_t k = 0; k < dmap.feature_order.size(); ++k) {
        const auto& thresholds = dmap.thresholds[k];
        const std::size_t len = dmap.segment_length(k);
        if (len == 0) continue;

        const Condition* cond = nullptr;
        for (const Condition& c : rule.conditions) {
            if (c.variable == dmap.feature_order[k]) {
                cond = &c;
                break;
            }
        }
        if (cond == nullptr) {
            // No condition on this feature: the rule admits every interval.
            for (std::size_t r = 0; r < len; ++r) vec.bits[offset + r] = 1;
        } else {
            if (!cond->lower || !cond->upper)
                throw ThresholdMismatchError("rule '" + rule.name +
                                             "' has an incomplete bound on " + cond->variable);
            const auto known = [&](double v) {
                return std::binary_search(thresholds.begin(), thresholds.end(), v);
            };
            if (!known(*cond->lower) || !known(*cond->upper))
                throw ThresholdMismatchError("bounds of rule '" + rule.name + "' on " +
                                             cond->variable +
                                             " are not part of the discretization");
            for (std::size_t r = 0; r < len; ++r) {
                const bool inside =
                    *cond->lower <= thresholds[r] && thresholds[r + 1] <= *cond->upper;
                vec.bits[offset + r] = inside ? 1 : 0;
            }
        }
        offset += len;
    }
    return vec;
}

LocalExplanations assign_local_explanations(const RuleSet& rs, const LabeledDataset& data,
                                            const DiscretizationMap& dmap) {
    LocalExplanations out;
    out.rule_vectors.reserve(rs.rules.size());
    for (const Rule& rule : rs.rules) out.rule_vectors.push_back(vectorize_rule(rule, dmap));
    out.rebuild_packed();

    const auto resolved = detail::resolve_rules(rs, data.feature_names);
    out.rule_index.assign(data.n_rows(), std::nullopt);
    for (std::size_t s = 0; s < data.n_rows(); ++s) {
        std::uint32_t matches = 0;
        for (std::size_t j = 0; j < resolved.size(); ++j) {
            if (detail::rule_fires(resolved[j], data.rows[s])) {
                if (matches == 0) out.rule_index[s] = static_cast<std::uint32_t>(j);
                ++matches;
            }
        }
        if (matches > 1) ++out.multi_match_samples;
    }
    if (out.multi_match_samples > 0) {
        warn(std::to_string(out.multi_match_samples) +
             " sample(s) satisfied more than one rule; first match assigned");
    }
    return out;
}

std::vector<std::size_t> restrict_to_common(
    std::span<const LocalExplanations* const> assignments) {
    std::vector<std::size_t> indices;
    if (assignments.empty()) return indices;
    const std::size_t n = assignments.front()->n_samples();
    for (const LocalExplanations* a : assignments) {
        if (a->n_samples() != n)
            throw VectorizeError("assignments cover different numbers of samples");
    }
    for (std::size_t s = 0; s < n; ++s) {
        bool all = true;
        for (const LocalExplanations* a : assignments) {
            if (!a->rule_index[s]) {
                all = false;
                break;
            }
        }
        if (all) indices.push_back(s);
    }
    return indices;
}

}  // namespace protoeval
