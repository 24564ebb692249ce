#include "protoeval/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "protoeval/rng.hpp"

namespace protoeval {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool parse_double(const std::string& s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

std::size_t LabeledDataset::feature_index(const std::string& name) const {
    for (std::size_t j = 0; j < feature_names.size(); ++j) {
        if (feature_names[j] == name) return j;
    }
    throw MissingColumnError(name);
}

void LabeledDataset::recompute_bounds() {
    const std::size_t m = n_features();
    feature_bounds.assign(m, FeatureBounds{});
    for (std::size_t j = 0; j < m; ++j) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (const auto& row : rows) {
            lo = std::min(lo, row[j]);
            hi = std::max(hi, row[j]);
        }
        feature_bounds[j] = rows.empty() ? FeatureBounds{} : FeatureBounds{lo, hi};
    }
}

LabeledDataset make_dataset(std::vector<std::string> feature_names,
                            std::vector<std::vector<double>> rows, std::vector<int> labels) {
    LabeledDataset data;
    data.feature_names = std::move(feature_names);
    data.rows = std::move(rows);
    data.labels = std::move(labels);
    if (data.rows.size() != data.labels.size())
        throw DatasetError("rows and labels must have the same length");
    for (const auto& row : data.rows) {
        if (row.size() != data.feature_names.size())
            throw DatasetError("row width does not match feature count");
    }
    for (int y : data.labels) {
        if (y != 0 && y != 1) throw DatasetError("labels must be 0 or 1");
    }
    data.recompute_bounds();
    return data;
}

LabeledDataset load_csv(const std::filesystem::path& path, const std::vector<std::string>& schema,
                        const std::string& label_column) {
    std::ifstream in(path);
    if (!in) throw DatasetError("cannot open file: " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw EmptyFileError("empty file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const std::vector<std::string> header = split_csv_line(line);
    for (const auto& col : schema) {
        if (std::find(header.begin(), header.end(), col) == header.end())
            throw MissingColumnError(col);
    }
    if (header.size() != schema.size()) throw DatasetError("header does not match schema");
    for (std::size_t j = 0; j < schema.size(); ++j) {
        if (header[j] != schema[j]) throw DatasetError("header does not match schema order");
    }

    std::size_t label_idx = schema.size();
    for (std::size_t j = 0; j < schema.size(); ++j) {
        if (schema[j] == label_column) label_idx = j;
    }
    if (label_idx == schema.size()) throw MissingColumnError(label_column);

    LabeledDataset data;
    for (std::size_t j = 0; j < schema.size(); ++j) {
        if (j != label_idx) data.feature_names.push_back(schema[j]);
    }

    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != schema.size())
            throw DatasetError("row " + std::to_string(row_no) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(schema.size()));
        std::vector<double> row;
        row.reserve(schema.size() - 1);
        int label = 0;
        for (std::size_t j = 0; j < cells.size(); ++j) {
            double v = 0.0;
            if (!parse_double(cells[j], v)) throw NonNumericCellError(row_no, schema[j], cells[j]);
            if (j == label_idx) {
                if (v != 0.0 && v != 1.0)
                    throw DatasetError("label at row " + std::to_string(row_no) +
                                       " is not binary: " + cells[j]);
                label = static_cast<int>(v);
            } else {
                row.push_back(v);
            }
        }
        data.rows.push_back(std::move(row));
        data.labels.push_back(label);
        ++row_no;
    }
    if (data.rows.empty()) throw EmptyFileError("no data rows in " + path.string());
    data.recompute_bounds();
    return data;
}

LabeledDataset impute_median(const LabeledDataset& data,
                             const std::vector<std::string>& missing_features,
                             std::span<const std::size_t> train_indices) {
    LabeledDataset out = data;
    for (const auto& name : missing_features) {
        const std::size_t j = data.feature_index(name);
        std::vector<double> nonzero;
        for (std::size_t i : train_indices) {
            const double v = data.rows[i][j];
            if (v != 0.0) nonzero.push_back(v);
        }
        if (nonzero.empty()) throw AllMissingError(name);
        const double med = median_of(std::move(nonzero));
        for (auto& row : out.rows) {
            if (row[j] == 0.0) row[j] = med;
        }
    }
    out.recompute_bounds();
    return out;
}

std::vector<double> ScalerParams::apply(std::span<const double> raw) const {
    std::vector<double> out(raw.size());
    for (std::size_t j = 0; j < raw.size(); ++j) {
        out[j] = stddev[j] == 0.0 ? 0.0 : (raw[j] - mean[j]) / stddev[j];
    }
    return out;
}

std::vector<double> ScalerParams::invert(std::span<const double> scaled) const {
    std::vector<double> out(scaled.size());
    for (std::size_t j = 0; j < scaled.size(); ++j) {
        out[j] = scaled[j] * stddev[j] + mean[j];
    }
    return out;
}

std::pair<LabeledDataset, ScalerParams> standardize(const LabeledDataset& data,
                                                    std::span<const std::size_t> train_indices) {
    if (train_indices.empty()) throw DatasetError("standardize requires training rows");
    const std::size_t m = data.n_features();
    ScalerParams params;
    params.mean.assign(m, 0.0);
    params.stddev.assign(m, 0.0);

    const double n = static_cast<double>(train_indices.size());
    for (std::size_t j = 0; j < m; ++j) {
        double sum = 0.0;
        for (std::size_t i : train_indices) sum += data.rows[i][j];
        const double mu = sum / n;
        double ss = 0.0;
        for (std::size_t i : train_indices) {
            const double d = data.rows[i][j] - mu;
            ss += d * d;
        }
        params.mean[j] = mu;
        params.stddev[j] = std::sqrt(ss / n);
    }

    LabeledDataset scaled = data;
    for (auto& row : scaled.rows) row = params.apply(row);
    scaled.recompute_bounds();
    return {std::move(scaled), std::move(params)};
}

FoldPlan make_folds(std::size_t n, const std::vector<int>& labels, std::size_t repeats,
                    std::size_t k, std::uint64_t seed) {
    if (labels.size() != n) throw DatasetError("labels length does not match n");
    if (k < 2) throw TooFewSamplesError("k must be at least 2");

    std::vector<std::size_t> class_members[2];
    for (std::size_t i = 0; i < n; ++i) class_members[labels[i] == 1 ? 1 : 0].push_back(i);
    for (int c = 0; c < 2; ++c) {
        if (class_members[c].size() < k)
            throw TooFewSamplesError("class " + std::to_string(c) + " has fewer than k members");
    }

    FoldPlan plan;
    plan.repeats = repeats;
    plan.folds_per_repeat = k;
    plan.seed = seed;
    plan.assignments.resize(repeats);

    for (std::size_t rep = 0; rep < repeats; ++rep) {
        std::mt19937_64 rng(derive_seed(seed, rep));
        std::vector<std::size_t> shuffled[2] = {class_members[0], class_members[1]};
        shuffle(shuffled[0], rng);
        shuffle(shuffled[1], rng);

        std::vector<FoldPlan::Fold> folds(k);
        for (int c = 0; c < 2; ++c) {
            const std::size_t nc = shuffled[c].size();
            const std::size_t base = nc / k;
            const std::size_t extra = nc % k;
            std::size_t pos = 0;
            for (std::size_t f = 0; f < k; ++f) {
                const std::size_t len = base + (f < extra ? 1 : 0);
                for (std::size_t t = 0; t < len; ++t) folds[f].test.push_back(shuffled[c][pos++]);
            }
        }
        for (std::size_t f = 0; f < k; ++f) {
            std::sort(folds[f].test.begin(), folds[f].test.end());
            std::vector<bool> in_test(n, false);
            for (std::size_t i : folds[f].test) in_test[i] = true;
            for (std::size_t i = 0; i < n; ++i) {
                if (!in_test[i]) folds[f].train.push_back(i);
            }
        }
        plan.assignments[rep] = std::move(folds);
    }
    return plan;
}

}  // namespace protoeval
