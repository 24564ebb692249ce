#include "protoeval/similarity.hpp"

#include <bit>
#include <cmath>

namespace protoeval {

namespace {

double similarity_from_counts(SimilarityKind kind, std::size_t w, std::size_t both,
                              std::size_t ones_a, std::size_t ones_b, std::size_t match) {
    switch (kind) {
        case SimilarityKind::xnor:
            return static_cast<double>(match) / static_cast<double>(w);
        case SimilarityKind::jaccard: {
            const std::size_t uni = ones_a + ones_b - both;
            if (uni == 0) return 1.0;  // both all-zero
            return static_cast<double>(both) / static_cast<double>(uni);
        }
        case SimilarityKind::cosine: {
            if (ones_a == 0 && ones_b == 0) return 1.0;
            if (ones_a == 0 || ones_b == 0) return 0.0;
            return static_cast<double>(both) /
                   (std::sqrt(static_cast<double>(ones_a)) * std::sqrt(static_cast<double>(ones_b)));
        }
        case SimilarityKind::dice: {
            if (ones_a + ones_b == 0) return 1.0;
            return 2.0 * static_cast<double>(both) / static_cast<double>(ones_a + ones_b);
        }
    }
    throw SimilarityError("unreachable");
}

double packed_similarity(SimilarityKind kind, std::size_t w, const PackedBits& a,
                         const PackedBits& b) {
    std::size_t both = 0, mismatch = 0;
    for (std::size_t i = 0; i < a.words.size(); ++i) {
        both += static_cast<std::size_t>(std::popcount(a.words[i] & b.words[i]));
        mismatch += static_cast<std::size_t>(std::popcount(a.words[i] ^ b.words[i]));
    }
    return similarity_from_counts(kind, w, both, a.ones, b.ones, w - mismatch);
}

}  // namespace

SimilarityKind similarity_kind_from_string(const std::string& name) {
    for (SimilarityKind kind : kAllSimilarityKinds) {
        if (name == to_string(kind)) return kind;
    }
    throw SimilarityError("unknown similarity kind: " + name);
}

double vector_similarity(SimilarityKind kind, const ExplanationVector& a,
                         const ExplanationVector& b) {
    const std::size_t w = a.size();
    if (w != b.size())
        throw LengthMismatchError("vector lengths differ: " + std::to_string(w) + " vs " +
                                  std::to_string(b.size()));
    if (w == 0) throw LengthMismatchError("vectors must have length >= 1");

    std::size_t both = 0, ones_a = 0, ones_b = 0, match = 0;
    for (std::size_t i = 0; i < w; ++i) {
        const bool va = a.bits[i] != 0;
        const bool vb = b.bits[i] != 0;
        both += va && vb;
        ones_a += va;
        ones_b += vb;
        match += va == vb;
    }
    return similarity_from_counts(kind, w, both, ones_a, ones_b, match);
}

double ruleset_similarity(SimilarityKind kind, const LocalExplanations& a,
                          const LocalExplanations& b, std::span<const std::size_t> indices) {
    if (indices.empty()) throw EmptyDomainError("no common samples to compare");

    // Samples sharing a (rule_a, rule_b) pair share a score; count pairs
    // first, then evaluate each distinct pair once.
    const std::size_t qa = a.rule_vectors.size();
    const std::size_t qb = b.rule_vectors.size();
    std::vector<std::size_t> joint(qa * qb, 0);
    for (std::size_t s : indices) {
        if (!a.rule_index[s] || !b.rule_index[s])
            throw EmptyDomainError("sample " + std::to_string(s) +
                                   " lacks an explanation in one rule set");
        joint[*a.rule_index[s] * qb + *b.rule_index[s]] += 1;
    }
    const bool packed = a.packed.size() == qa && b.packed.size() == qb;
    const std::size_t w = qa ? a.rule_vectors[0].size() : 0;
    if (w == 0) throw LengthMismatchError("explanation vectors must have length >= 1");
    if (qb && b.rule_vectors[0].size() != w)
        throw LengthMismatchError("rule sets were vectorized under different discretizations");
    double total = 0.0;
    for (std::size_t i = 0; i < qa; ++i) {
        for (std::size_t j = 0; j < qb; ++j) {
            const std::size_t count = joint[i * qb + j];
            if (count == 0) continue;
            const double s = packed
                                 ? packed_similarity(kind, w, a.packed[i], b.packed[j])
                                 : vector_similarity(kind, a.rule_vectors[i], b.rule_vectors[j]);
            total += static_cast<double>(count) * s;
        }
    }
    return total / static_cast<double>(indices.size());
}

double multiset_similarity(SimilarityKind kind,
                           std::span<const LocalExplanations* const> assignments,
                           std::span<const std::size_t> indices) {
    const std::size_t p = assignments.size();
    if (p < 2) throw TooFewRuleSetsError("need at least two rule sets");
    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t f = 0; f < p; ++f) {
        for (std::size_t g = 0; g < f; ++g) {
            total += ruleset_similarity(kind, *assignments[f], *assignments[g], indices);
            ++pairs;
        }
    }
    return total / static_cast<double>(pairs);
}

double RobustnessMatrix::offdiag_mean() const {
    if (size < 2) return 1.0;
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t j = i + 1; j < size; ++j) {
            total += at(i, j);
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

double RobustnessMatrix::full_mean() const {
    if (size == 0) return 1.0;
    double total = 0.0;
    for (double v : values) total += v;
    return total / static_cast<double>(values.size());
}

RobustnessMatrix robustness_matrix(SimilarityKind kind,
                                   std::span<const LocalExplanations* const> assignments,
                                   std::span<const std::size_t> indices) {
    RobustnessMatrix matrix;
    matrix.size = assignments.size();
    matrix.values.assign(matrix.size * matrix.size, 1.0);
    for (std::size_t i = 0; i < matrix.size; ++i) {
        for (std::size_t j = i + 1; j < matrix.size; ++j) {
            const double s = ruleset_similarity(kind, *assignments[i], *assignments[j], indices);
            matrix.values[i * matrix.size + j] = s;
            matrix.values[j * matrix.size + i] = s;
        }
    }
    return matrix;
}

SimilarityReport make_similarity_report(SimilarityKind kind,
                                        std::span<const std::string> names,
                                        std::span<const LocalExplanations* const> assignments,
                                        std::span<const std::size_t> indices) {
    if (names.size() != assignments.size())
        throw SimilarityError("names and assignments must align");
    SimilarityReport report;
    report.kind = kind;
    report.n_samples = indices.size();
    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t f = 0; f < assignments.size(); ++f) {
        for (std::size_t g = 0; g < f; ++g) {
            const double s = ruleset_similarity(kind, *assignments[f], *assignments[g], indices);
            report.pair_scores[{names[g], names[f]}] = s;
            total += s;
            ++pairs;
        }
    }
    report.overall = pairs ? total / static_cast<double>(pairs) : 1.0;
    return report;
}

}  // namespace protoeval
