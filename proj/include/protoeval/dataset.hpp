#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace protoeval {

struct DatasetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyFileError : DatasetError {
    using DatasetError::DatasetError;
};

struct MissingColumnError : DatasetError {
    explicit MissingColumnError(const std::string& col)
        : DatasetError("missing column: " + col), column(col) {}
    std::string column;
};

struct NonNumericCellError : DatasetError {
    NonNumericCellError(std::size_t r, const std::string& col, const std::string& cell)
        : DatasetError("non-numeric cell \"" + cell + "\" at row " + std::to_string(r) +
                       ", column " + col),
          row(r),
          column(col) {}
    std::size_t row;  // 0-based data row (header excluded)
    std::string column;
};

struct AllMissingError : DatasetError {
    explicit AllMissingError(const std::string& feat)
        : DatasetError("feature has no non-missing training value: " + feat), feature(feat) {}
    std::string feature;
};

struct TooFewSamplesError : DatasetError {
    using DatasetError::DatasetError;
};

struct FeatureBounds {
    double min = 0.0;
    double max = 0.0;
};

// Tabular dataset with binary labels. Rows are dense; feature_bounds track the
// observed per-feature min/max and are refreshed whenever values change.
struct LabeledDataset {
    std::vector<std::string> feature_names;
    std::vector<std::vector<double>> rows;  // n x m
    std::vector<int> labels;                // values in {0, 1}
    std::vector<FeatureBounds> feature_bounds;

    std::size_t n_rows() const { return rows.size(); }
    std::size_t n_features() const { return feature_names.size(); }

    // Index of a named feature; throws MissingColumnError if absent.
    std::size_t feature_index(const std::string& name) const;

    void recompute_bounds();
};

// Builds a dataset from columns already in memory; validates labels and
// computes bounds. Used by tests and synthetic pipelines.
LabeledDataset make_dataset(std::vector<std::string> feature_names,
                            std::vector<std::vector<double>> rows, std::vector<int> labels);

// Reads a CSV whose header must equal `schema` exactly; `label_column` names
// the 0/1 outcome column, all other columns become features in schema order.
LabeledDataset load_csv(const std::filesystem::path& path, const std::vector<std::string>& schema,
                        const std::string& label_column);

// Replaces zeros (the missing-value sentinel) in the listed features with the
// median of the non-zero values observed on the training rows. Other features
// and non-zero cells are untouched.
LabeledDataset impute_median(const LabeledDataset& data,
                             const std::vector<std::string>& missing_features,
                             std::span<const std::size_t> train_indices);

struct ScalerParams {
    std::vector<double> mean;
    std::vector<double> stddev;  // population std; 0 marks a constant feature

    std::vector<double> apply(std::span<const double> raw) const;
    std::vector<double> invert(std::span<const double> scaled) const;
};

// Standardizes every feature to (x - mean) / std with statistics from the
// training rows only. Constant features map to zero.
std::pair<LabeledDataset, ScalerParams> standardize(const LabeledDataset& data,
                                                    std::span<const std::size_t> train_indices);

struct FoldPlan {
    struct Fold {
        std::vector<std::size_t> train;
        std::vector<std::size_t> test;
    };
    std::size_t repeats = 0;
    std::size_t folds_per_repeat = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<Fold>> assignments;  // [repeat][fold]
};

// Repeated stratified k-fold split. Deterministic for a given seed; each
// repeat uses an independent shuffle. Within a repeat the test folds
// partition [0, n) and per-fold class counts are within one sample of the
// proportional share.
FoldPlan make_folds(std::size_t n, const std::vector<int>& labels, std::size_t repeats,
                    std::size_t k, std::uint64_t seed);

}  // namespace protoeval
