#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "protoeval/diag.hpp"
#include "protoeval/rules.hpp"

using namespace protoeval;

namespace {

const std::string kKbText =
    "# type-2 diabetes screening protocol\n"
    "classes: healthy=0, diabetes=1\n"
    "rule high_risk: BMI >= 30, G120 >= 126 -> diabetes\n"
    "rule low_risk: BMI <= 25, G120 <= 100 -> healthy\n";

LabeledDataset pima_like_bounds() {
    // Two synthetic rows spanning BMI [18, 67] and G120 [44, 199].
    return make_dataset({"BMI", "G120"}, {{18, 44}, {67, 199}}, {0, 1});
}

}  // namespace

TEST_CASE("parse_ruleset reads the protocol") {
    const RuleSet rs = parse_ruleset(kKbText);
    REQUIRE(rs.rules.size() == 2);
    CHECK(rs.class_map ==
          std::vector<std::pair<std::string, int>>{{"healthy", 0}, {"diabetes", 1}});

    const Rule& r1 = rs.rules[0];
    CHECK(r1.name == "high_risk");
    CHECK(r1.outcome == 1);
    REQUIRE(r1.conditions.size() == 2);
    CHECK(r1.conditions[0].variable == "BMI");
    CHECK(r1.conditions[0].lower == 30.0);
    CHECK(!r1.conditions[0].upper.has_value());
    CHECK(r1.conditions[0].lower_inclusive);
    CHECK(r1.conditions[1].variable == "G120");
    CHECK(r1.conditions[1].lower == 126.0);
}

TEST_CASE("parse_ruleset grammar forms") {
    SUBCASE("IN interval") {
        const RuleSet rs = parse_ruleset(
            "classes: healthy=0, diabetes=1\nrule r1: BMI IN [25, 30] -> healthy\n");
        const Condition& c = rs.rules[0].conditions[0];
        CHECK(c.lower == 25.0);
        CHECK(c.upper == 30.0);
        CHECK(c.lower_inclusive);
        CHECK(c.upper_inclusive);
    }
    SUBCASE("strict operators set inclusivity flags") {
        const RuleSet rs = parse_ruleset(
            "classes: a=0, b=1\nrule r1: X > 1, Y < 2 -> b\n");
        CHECK_FALSE(rs.rules[0].conditions[0].lower_inclusive);
        CHECK_FALSE(rs.rules[0].conditions[1].upper_inclusive);
    }
    SUBCASE("conditions on one variable are intersected") {
        const RuleSet rs = parse_ruleset(
            "classes: a=0, b=1\nrule r1: X > 1, X <= 5 -> b\n");
        REQUIRE(rs.rules[0].conditions.size() == 1);
        const Condition& c = rs.rules[0].conditions[0];
        CHECK(c.lower == 1.0);
        CHECK_FALSE(c.lower_inclusive);
        CHECK(c.upper == 5.0);
        CHECK(c.upper_inclusive);
    }
    SUBCASE("comments and blank lines are skipped") {
        const RuleSet rs = parse_ruleset(
            "\n# intro\nclasses: a=0, b=1\n\nrule r1: X >= 1 -> a  # trailing\n");
        CHECK(rs.rules.size() == 1);
    }
}

TEST_CASE("parse_ruleset rejects malformed input") {
    SUBCASE("empty rule body") {
        CHECK_THROWS_AS(parse_ruleset("classes: a=0, b=1\nrule r1: -> a\n"), SyntaxError);
    }
    SUBCASE("duplicate rule names") {
        CHECK_THROWS_AS(parse_ruleset("classes: a=0, b=1\n"
                                      "rule r1: X >= 1 -> a\nrule r1: X >= 2 -> b\n"),
                        DuplicateRuleNameError);
    }
    SUBCASE("unknown class label") {
        CHECK_THROWS_AS(parse_ruleset("classes: a=0, b=1\nrule r1: X >= 1 -> c\n"),
                        UnknownClassLabelError);
    }
    SUBCASE("rules before classes statement") {
        CHECK_THROWS_AS(parse_ruleset("rule r1: X >= 1 -> a\n"), UnknownClassLabelError);
    }
    SUBCASE("contradictory conditions") {
        CHECK_THROWS_AS(parse_ruleset("classes: a=0, b=1\nrule r1: X >= 30, X <= 25 -> a\n"),
                        SyntaxError);
    }
    SUBCASE("syntax error carries the line number") {
        try {
            parse_ruleset("classes: a=0, b=1\nrule r1: X >>= 1 -> a\n");
            FAIL("expected SyntaxError");
        } catch (const SyntaxError& e) {
            CHECK(e.line == 2);
        }
    }
}

TEST_CASE("overlapping rules trigger a warning diagnostic") {
    std::vector<std::string> warnings;
    auto old = set_warn_handler([&](const std::string& msg) { warnings.push_back(msg); });
    parse_ruleset("classes: a=0, b=1\nrule r1: X >= 1 -> a\nrule r2: X >= 2 -> b\n");
    set_warn_handler(old);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("overlap") != std::string::npos);

    // The Table 2 protocol has disjoint rules: no warning.
    warnings.clear();
    old = set_warn_handler([&](const std::string& msg) { warnings.push_back(msg); });
    parse_ruleset(kKbText);
    set_warn_handler(old);
    CHECK(warnings.empty());
}

TEST_CASE("complete_bounds fills missing sides from the dataset range") {
    const LabeledDataset data = pima_like_bounds();
    const RuleSet rs = complete_bounds(parse_ruleset(kKbText), data);

    // BMI >= 30 with range [18, 67] becomes (BMI, 30, 67)
    CHECK(rs.rules[0].conditions[0].lower == 30.0);
    CHECK(rs.rules[0].conditions[0].upper == 67.0);
    // G120 <= 100 with min 44 becomes (G120, 44, 100)
    CHECK(rs.rules[1].conditions[1].lower == 44.0);
    CHECK(rs.rules[1].conditions[1].upper == 100.0);

    // already two-sided conditions stay untouched
    const RuleSet two = complete_bounds(
        parse_ruleset("classes: a=0, b=1\nrule r1: BMI IN [20, 30] -> a\n"), data);
    CHECK(two.rules[0].conditions[0].lower == 20.0);
    CHECK(two.rules[0].conditions[0].upper == 30.0);

    CHECK_THROWS_AS(
        complete_bounds(parse_ruleset("classes: a=0, b=1\nrule r1: Nope >= 1 -> a\n"), data),
        UnknownVariableError);
}

TEST_CASE("evaluate applies first-match semantics with inclusive bounds") {
    const RuleSet rs = parse_ruleset(kKbText);
    const std::vector<std::string> names = {"BMI", "G120"};

    CHECK(evaluate(rs, std::vector<double>{32, 140}, names) == 1);   // rule 1 fires
    CHECK(evaluate(rs, std::vector<double>{25, 100}, names) == 0);   // boundary inclusive
    CHECK(evaluate(rs, std::vector<double>{27, 150}, names) == std::nullopt);
    CHECK(evaluate(rs, std::vector<double>{30, 126}, names) == 1);   // >= is inclusive

    CHECK_THROWS_AS(evaluate(rs, std::vector<double>{1.0}, {"BMI"}), MissingFeatureError);
}

TEST_CASE("strict bounds exclude their endpoint") {
    const RuleSet rs = parse_ruleset("classes: a=0, b=1\nrule r1: X > 1, X < 2 -> b\n");
    CHECK(evaluate(rs, std::vector<double>{1.0}, {"X"}) == std::nullopt);
    CHECK(evaluate(rs, std::vector<double>{2.0}, {"X"}) == std::nullopt);
    CHECK(evaluate(rs, std::vector<double>{1.5}, {"X"}) == 1);
}

TEST_CASE("protocol_vector maps evaluate over all rows") {
    LabeledDataset data = make_dataset(
        {"BMI", "G120"},
        {{32, 140}, {22, 90}, {27, 150}, {40, 130}, {18, 44}},
        {1, 0, 1, 1, 0});
    const auto r = protocol_vector(parse_ruleset(kKbText), data);
    REQUIRE(r.size() == 5);
    CHECK(r[0] == 1);
    CHECK(r[1] == 0);
    CHECK(r[2] == std::nullopt);
    CHECK(r[3] == 1);
    CHECK(r[4] == 0);

    SUBCASE("empty rule set yields all N/A") {
        RuleSet empty;
        empty.class_map = {{"a", 0}, {"b", 1}};
        for (const auto& v : protocol_vector(empty, data)) CHECK(v == std::nullopt);
    }
    SUBCASE("an always-true rule yields a constant vector") {
        const RuleSet always = parse_ruleset(
            "classes: a=0, b=1\nrule r1: BMI IN [0, 100] -> b\n");
        for (const auto& v : protocol_vector(always, data)) CHECK(v == 1);
    }
}

TEST_CASE("serialize/parse round-trips canonically") {
    const RuleSet rs = parse_ruleset(kKbText);
    const std::string canonical = serialize_ruleset(rs);
    const RuleSet reparsed = parse_ruleset(canonical);
    CHECK(reparsed == rs);
    CHECK(serialize_ruleset(reparsed) == canonical);

    // Strict interior bounds round-trip through the two-condition form.
    const RuleSet strict = parse_ruleset(
        "classes: a=0, b=1\nrule r1: X > 1, X <= 5, Y IN [2, 3] -> b\n");
    const RuleSet again = parse_ruleset(serialize_ruleset(strict));
    CHECK(again == strict);
}
