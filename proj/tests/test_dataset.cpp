#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "protoeval/dataset.hpp"

using namespace protoeval;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

const std::vector<std::string> kSchema = {"A", "B", "Outcome"};

std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
}

}  // namespace

TEST_CASE("load_csv reads a well-formed file") {
    const auto path = write_temp("ds_ok.csv", "A,B,Outcome\n1,2,0\n3.5,4,1\n");
    const LabeledDataset data = load_csv(path, kSchema, "Outcome");
    CHECK(data.n_rows() == 2);
    CHECK(data.n_features() == 2);
    CHECK(data.feature_names == std::vector<std::string>{"A", "B"});
    CHECK(data.rows[1][0] == doctest::Approx(3.5));
    CHECK(data.labels == std::vector<int>{0, 1});
    CHECK(data.feature_bounds[0].min == 1.0);
    CHECK(data.feature_bounds[0].max == 3.5);
}

TEST_CASE("load_csv rejects bad input") {
    SUBCASE("header only") {
        const auto path = write_temp("ds_header.csv", "A,B,Outcome\n");
        CHECK_THROWS_AS(load_csv(path, kSchema, "Outcome"), EmptyFileError);
    }
    SUBCASE("empty file") {
        const auto path = write_temp("ds_empty.csv", "");
        CHECK_THROWS_AS(load_csv(path, kSchema, "Outcome"), EmptyFileError);
    }
    SUBCASE("missing column") {
        const auto path = write_temp("ds_col.csv", "A,Outcome\n1,0\n");
        CHECK_THROWS_AS(load_csv(path, kSchema, "Outcome"), MissingColumnError);
    }
    SUBCASE("non-numeric cell reports row and column") {
        const auto path = write_temp("ds_cell.csv", "A,B,Outcome\n1,2,0\n1,2,1\n1,2,0\nabc,2,0\n");
        try {
            load_csv(path, kSchema, "Outcome");
            FAIL("expected NonNumericCellError");
        } catch (const NonNumericCellError& e) {
            CHECK(e.row == 3);
            CHECK(e.column == "A");
        }
    }
    SUBCASE("non-binary label") {
        const auto path = write_temp("ds_label.csv", "A,B,Outcome\n1,2,3\n");
        CHECK_THROWS_AS(load_csv(path, kSchema, "Outcome"), DatasetError);
    }
}

TEST_CASE("impute_median replaces zeros with the train median of nonzero values") {
    LabeledDataset data = make_dataset({"X", "Y"},
                                       {{0, 1}, {2, 1}, {4, 1}, {0, 1}, {6, 1}},
                                       {0, 1, 0, 1, 0});
    const auto idx = all_indices(5);
    const LabeledDataset imputed = impute_median(data, {"X"}, idx);
    // median of {2, 4, 6} is 4
    CHECK(imputed.rows[0][0] == 4.0);
    CHECK(imputed.rows[3][0] == 4.0);
    CHECK(imputed.rows[1][0] == 2.0);
    CHECK(imputed.rows[2][0] == 4.0);
    CHECK(imputed.rows[4][0] == 6.0);
    // untouched feature
    for (std::size_t i = 0; i < 5; ++i) CHECK(imputed.rows[i][1] == 1.0);
    CHECK(imputed.feature_bounds[0].min == 2.0);
}

TEST_CASE("impute_median uses training rows only") {
    LabeledDataset data = make_dataset({"X"}, {{0}, {2}, {4}, {100}}, {0, 1, 0, 1});
    const std::vector<std::size_t> train = {0, 1, 2};
    const LabeledDataset imputed = impute_median(data, {"X"}, train);
    CHECK(imputed.rows[0][0] == 3.0);  // median of {2, 4}, row 3 excluded
    CHECK(imputed.rows[3][0] == 100.0);
}

TEST_CASE("impute_median leaves features without zeros unchanged") {
    LabeledDataset data = make_dataset({"X"}, {{1}, {2}}, {0, 1});
    const LabeledDataset imputed = impute_median(data, {"X"}, all_indices(2));
    CHECK(imputed.rows == data.rows);
}

TEST_CASE("impute_median rejects all-missing features") {
    LabeledDataset data = make_dataset({"X"}, {{0}, {0}}, {0, 1});
    CHECK_THROWS_AS(impute_median(data, {"X"}, all_indices(2)), AllMissingError);
}

TEST_CASE("standardize maps training columns to zero mean, unit population std") {
    LabeledDataset data = make_dataset({"X", "C"}, {{1, 7}, {3, 7}}, {0, 1});
    const auto [scaled, params] = standardize(data, all_indices(2));
    CHECK(scaled.rows[0][0] == doctest::Approx(-1.0));
    CHECK(scaled.rows[1][0] == doctest::Approx(1.0));
    // constant column maps to zero
    CHECK(scaled.rows[0][1] == 0.0);
    CHECK(scaled.rows[1][1] == 0.0);
    CHECK(params.mean[0] == 2.0);
    CHECK(params.stddev[0] == 1.0);
    CHECK(params.stddev[1] == 0.0);
}

TEST_CASE("scaler round-trip recovers raw values within 1e-12") {
    LabeledDataset data = make_dataset({"X", "Y", "C"},
                                       {{1.5, -3, 5}, {2.5, 9, 5}, {8, 0.25, 5}}, {0, 1, 0});
    const auto [scaled, params] = standardize(data, all_indices(3));
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        const auto back = params.invert(scaled.rows[i]);
        for (std::size_t j = 0; j < data.n_features(); ++j)
            CHECK(back[j] == doctest::Approx(data.rows[i][j]).epsilon(1e-12));
    }
}

TEST_CASE("make_folds partitions and stratifies") {
    const std::size_t n = 768;
    std::vector<int> labels(n, 0);
    for (std::size_t i = 0; i < 268; ++i) labels[i] = 1;

    const FoldPlan plan = make_folds(n, labels, 10, 10, 42);
    CHECK(plan.assignments.size() == 10);
    for (const auto& folds : plan.assignments) {
        CHECK(folds.size() == 10);
        std::vector<int> seen(n, 0);
        for (const auto& fold : folds) {
            CHECK((fold.test.size() == 76 || fold.test.size() == 77));
            CHECK(fold.train.size() + fold.test.size() == n);
            std::size_t pos = 0;
            for (std::size_t i : fold.test) {
                ++seen[i];
                pos += labels[i] == 1;
            }
            // global positive share is 26.8 per fold of 76.8
            CHECK(pos >= 26);
            CHECK(pos <= 27);
        }
        for (std::size_t i = 0; i < n; ++i) CHECK(seen[i] == 1);  // exact partition
    }
}

TEST_CASE("make_folds is deterministic and varies across repeats") {
    std::vector<int> labels = {0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
    const FoldPlan a = make_folds(10, labels, 3, 5, 7);
    const FoldPlan b = make_folds(10, labels, 3, 5, 7);
    for (std::size_t rep = 0; rep < 3; ++rep) {
        for (std::size_t f = 0; f < 5; ++f) {
            CHECK(a.assignments[rep][f].test == b.assignments[rep][f].test);
            CHECK(a.assignments[rep][f].train == b.assignments[rep][f].train);
        }
    }
    bool any_difference = false;
    for (std::size_t f = 0; f < 5; ++f)
        any_difference |= a.assignments[0][f].test != a.assignments[1][f].test;
    CHECK(any_difference);
}

TEST_CASE("make_folds: n=10 balanced with k=5 puts one of each class per test fold") {
    std::vector<int> labels = {0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
    const FoldPlan plan = make_folds(10, labels, 1, 5, 3);
    for (const auto& fold : plan.assignments[0]) {
        REQUIRE(fold.test.size() == 2);
        CHECK(labels[fold.test[0]] + labels[fold.test[1]] == 1);
    }
}

TEST_CASE("make_folds rejects impossible configurations") {
    std::vector<int> labels = {0, 0, 0, 1};
    CHECK_THROWS_AS(make_folds(4, labels, 1, 2, 0), TooFewSamplesError);  // one positive
    std::vector<int> ok = {0, 1, 0, 1};
    CHECK_THROWS_AS(make_folds(4, ok, 1, 1, 0), TooFewSamplesError);  // k < 2
}
