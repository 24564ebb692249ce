#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "protoeval/vectorize.hpp"

namespace protoeval {

struct SimilarityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LengthMismatchError : SimilarityError {
    using SimilarityError::SimilarityError;
};

struct EmptyDomainError : SimilarityError {
    using SimilarityError::SimilarityError;
};

struct TooFewRuleSetsError : SimilarityError {
    using SimilarityError::SimilarityError;
};

enum class SimilarityKind { xnor, jaccard, cosine, dice };

constexpr const char* to_string(SimilarityKind kind) {
    switch (kind) {
        case SimilarityKind::xnor: return "xnor";
        case SimilarityKind::jaccard: return "jaccard";
        case SimilarityKind::cosine: return "cosine";
        case SimilarityKind::dice: return "dice";
    }
    return "?";
}

SimilarityKind similarity_kind_from_string(const std::string& name);

inline constexpr SimilarityKind kAllSimilarityKinds[] = {
    SimilarityKind::xnor, SimilarityKind::jaccard, SimilarityKind::cosine, SimilarityKind::dice};

// Similarity of two equal-length binary vectors, in [0, 1].
// When both vectors are all-zero, Jaccard/Cosine/Dice are 1 (identical);
// when exactly one is, they are 0.
double vector_similarity(SimilarityKind kind, const ExplanationVector& a,
                         const ExplanationVector& b);

// Mean per-sample similarity of two rule sets' local explanations over the
// given sample indices.
double ruleset_similarity(SimilarityKind kind, const LocalExplanations& a,
                          const LocalExplanations& b, std::span<const std::size_t> indices);

// Mean of ruleset_similarity over all unordered pairs of p >= 2 rule sets.
double multiset_similarity(SimilarityKind kind,
                           std::span<const LocalExplanations* const> assignments,
                           std::span<const std::size_t> indices);

// Pairwise rule-set similarity matrix over model instances; diagonal is 1.
struct RobustnessMatrix {
    std::size_t size = 0;
    std::vector<double> values;  // row-major size x size

    double at(std::size_t i, std::size_t j) const { return values[i * size + j]; }
    double offdiag_mean() const;
    double full_mean() const;
};

RobustnessMatrix robustness_matrix(SimilarityKind kind,
                                   std::span<const LocalExplanations* const> assignments,
                                   std::span<const std::size_t> indices);

// Aggregated similarity scores between named rule sets over a common domain.
struct SimilarityReport {
    SimilarityKind kind = SimilarityKind::xnor;
    std::map<std::pair<std::string, std::string>, double> pair_scores;
    double overall = 0.0;
    std::size_t n_samples = 0;
};

SimilarityReport make_similarity_report(SimilarityKind kind,
                                        std::span<const std::string> names,
                                        std::span<const LocalExplanations* const> assignments,
                                        std::span<const std::size_t> indices);

}  // namespace protoeval
