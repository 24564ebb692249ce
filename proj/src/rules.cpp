#include "protoeval/rules.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "protoeval/diag.hpp"

namespace protoeval {

namespace {

struct Token {
    enum class Kind { ident, number, symbol };
    Kind kind;
    std::string text;
    double value = 0.0;
};

std::vector<Token> lex_line(const std::string& line, std::size_t line_no) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    const std::size_t n = line.size();
    while (i < n) {
        const char c = line[i];
        if (c == '#') break;
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < n && (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_'))
                ++j;
            tokens.push_back({Token::Kind::ident, line.substr(i, j - i)});
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '-' && i + 1 < n &&
             (std::isdigit(static_cast<unsigned char>(line[i + 1])) || line[i + 1] == '.')) ||
            (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(line[i + 1])))) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(line.data() + i, line.data() + n, v);
            if (ec != std::errc()) throw SyntaxError(line_no, "malformed number");
            tokens.push_back({Token::Kind::number, line.substr(i, ptr - (line.data() + i)), v});
            i = static_cast<std::size_t>(ptr - line.data());
            continue;
        }
        if (c == '-' && i + 1 < n && line[i + 1] == '>') {
            tokens.push_back({Token::Kind::symbol, "->"});
            i += 2;
            continue;
        }
        if ((c == '<' || c == '>') && i + 1 < n && line[i + 1] == '=') {
            tokens.push_back({Token::Kind::symbol, std::string(1, c) + "="});
            i += 2;
            continue;
        }
        if (c == ':' || c == ',' || c == '=' || c == '<' || c == '>' || c == '[' || c == ']') {
            tokens.push_back({Token::Kind::symbol, std::string(1, c)});
            ++i;
            continue;
        }
        throw SyntaxError(line_no, std::string("unexpected character '") + c + "'");
    }
    return tokens;
}

class LineParser {
public:
    LineParser(std::vector<Token> tokens, std::size_t line_no)
        : tokens_(std::move(tokens)), line_(line_no) {}

    bool done() const { return pos_ >= tokens_.size(); }

    const Token& peek() const {
        if (done()) throw SyntaxError(line_, "unexpected end of line");
        return tokens_[pos_];
    }

    Token take() {
        Token t = peek();
        ++pos_;
        return t;
    }

    std::string expect_ident() {
        const Token t = take();
        if (t.kind != Token::Kind::ident)
            throw SyntaxError(line_, "expected identifier, got '" + t.text + "'");
        return t.text;
    }

    double expect_number() {
        const Token t = take();
        if (t.kind != Token::Kind::number)
            throw SyntaxError(line_, "expected number, got '" + t.text + "'");
        return t.value;
    }

    void expect_symbol(const std::string& sym) {
        const Token t = take();
        if (t.kind != Token::Kind::symbol || t.text != sym)
            throw SyntaxError(line_, "expected '" + sym + "', got '" + t.text + "'");
    }

    bool at_symbol(const std::string& sym) const {
        return !done() && tokens_[pos_].kind == Token::Kind::symbol && tokens_[pos_].text == sym;
    }

    std::size_t line() const { return line_; }

private:
    std::vector<Token> tokens_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

// Intersection of two interval conditions on the same variable; nullopt when
// the intersection is empty.
std::optional<Condition> intersect(const Condition& a, const Condition& b) {
    Condition out;
    out.variable = a.variable;
    if (a.lower && b.lower) {
        if (*a.lower > *b.lower) {
            out.lower = a.lower;
            out.lower_inclusive = a.lower_inclusive;
        } else if (*b.lower > *a.lower) {
            out.lower = b.lower;
            out.lower_inclusive = b.lower_inclusive;
        } else {
            out.lower = a.lower;
            out.lower_inclusive = a.lower_inclusive && b.lower_inclusive;
        }
    } else {
        out.lower = a.lower ? a.lower : b.lower;
        out.lower_inclusive = a.lower ? a.lower_inclusive : b.lower_inclusive;
    }
    if (a.upper && b.upper) {
        if (*a.upper < *b.upper) {
            out.upper = a.upper;
            out.upper_inclusive = a.upper_inclusive;
        } else if (*b.upper < *a.upper) {
            out.upper = b.upper;
            out.upper_inclusive = b.upper_inclusive;
        } else {
            out.upper = a.upper;
            out.upper_inclusive = a.upper_inclusive && b.upper_inclusive;
        }
    } else {
        out.upper = a.upper ? a.upper : b.upper;
        out.upper_inclusive = a.upper ? a.upper_inclusive : b.upper_inclusive;
    }
    if (out.lower && out.upper) {
        if (*out.lower > *out.upper) return std::nullopt;
        if (*out.lower == *out.upper && !(out.lower_inclusive && out.upper_inclusive))
            return std::nullopt;
    }
    return out;
}

bool rules_overlap(const Rule& a, const Rule& b) {
    for (const Condition& ca : a.conditions) {
        for (const Condition& cb : b.conditions) {
            if (ca.variable != cb.variable) continue;
            if (!intersect(ca, cb)) return false;
        }
    }
    return true;
}

Condition parse_condition(LineParser& p) {
    Condition cond;
    cond.variable = p.expect_ident();
    const Token op = p.take();
    if (op.kind == Token::Kind::ident && op.text == "IN") {
        p.expect_symbol("[");
        const double lo = p.expect_number();
        p.expect_symbol(",");
        const double hi = p.expect_number();
        p.expect_symbol("]");
        if (lo > hi) throw SyntaxError(p.line(), "interval lower bound exceeds upper bound");
        cond.lower = lo;
        cond.upper = hi;
        return cond;
    }
    if (op.kind != Token::Kind::symbol)
        throw SyntaxError(p.line(), "expected comparison operator or IN");
    const double v = p.expect_number();
    if (op.text == ">=") {
        cond.lower = v;
    } else if (op.text == ">") {
        cond.lower = v;
        cond.lower_inclusive = false;
    } else if (op.text == "<=") {
        cond.upper = v;
    } else if (op.text == "<") {
        cond.upper = v;
        cond.upper_inclusive = false;
    } else {
        throw SyntaxError(p.line(), "unknown operator '" + op.text + "'");
    }
    return cond;
}

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void append_condition(std::ostringstream& out, const Condition& c, bool& first) {
    const auto sep = [&] {
        if (!first) out << ", ";
        first = false;
    };
    if (c.lower && c.upper && c.lower_inclusive && c.upper_inclusive) {
        sep();
        out << c.variable << " IN [" << format_number(*c.lower) << ", " << format_number(*c.upper)
            << "]";
        return;
    }
    if (c.lower) {
        sep();
        out << c.variable << (c.lower_inclusive ? " >= " : " > ") << format_number(*c.lower);
    }
    if (c.upper) {
        sep();
        out << c.variable << (c.upper_inclusive ? " <= " : " < ") << format_number(*c.upper);
    }
}

}  // namespace

const std::string& RuleSet::label_for(int cls) const {
    for (const auto& [label, value] : class_map) {
        if (value == cls) return label;
    }
    throw RuleError("class map has no label for class " + std::to_string(cls));
}

RuleSet parse_ruleset(const std::string& text) {
    RuleSet rs;
    bool have_classes = false;

    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::vector<Token> tokens = lex_line(line, line_no);
        if (tokens.empty()) continue;
        LineParser p(std::move(tokens), line_no);

        const std::string head = p.expect_ident();
        if (head == "classes") {
            if (have_classes) throw SyntaxError(line_no, "duplicate classes statement");
            p.expect_symbol(":");
            while (true) {
                const std::string label = p.expect_ident();
                p.expect_symbol("=");
                const double v = p.expect_number();
                if (v != 0.0 && v != 1.0)
                    throw SyntaxError(line_no, "class value must be 0 or 1");
                for (const auto& [existing, _] : rs.class_map) {
                    if (existing == label)
                        throw SyntaxError(line_no, "duplicate class label: " + label);
                }
                rs.class_map.emplace_back(label, static_cast<int>(v));
                if (p.done()) break;
                p.expect_symbol(",");
            }
            if (rs.class_map.size() != 2 || rs.class_map[0].second == rs.class_map[1].second)
                throw SyntaxError(line_no, "classes statement must map one label to 0 and one to 1");
            have_classes = true;
            continue;
        }
        if (head == "rule") {
            Rule rule;
            rule.name = p.expect_ident();
            for (const Rule& existing : rs.rules) {
                if (existing.name == rule.name) throw DuplicateRuleNameError(rule.name);
            }
            p.expect_symbol(":");
            if (p.at_symbol("->")) throw SyntaxError(line_no, "rule body is empty");

            std::vector<Condition> raw;
            while (true) {
                raw.push_back(parse_condition(p));
                if (p.at_symbol(",")) {
                    p.take();
                    continue;
                }
                break;
            }
            p.expect_symbol("->");
            const std::string label = p.expect_ident();
            if (!p.done()) throw SyntaxError(line_no, "trailing tokens after rule");

            bool label_known = false;
            for (const auto& [name, value] : rs.class_map) {
                if (name == label) {
                    rule.outcome = value;
                    label_known = true;
                }
            }
            if (!label_known) throw UnknownClassLabelError(label);

            // Normalize: one condition per variable, in first-appearance order.
            for (const Condition& c : raw) {
                auto it = std::find_if(rule.conditions.begin(), rule.conditions.end(),
                                       [&](const Condition& e) { return e.variable == c.variable; });
                if (it == rule.conditions.end()) {
                    rule.conditions.push_back(c);
                } else {
                    std::optional<Condition> merged = intersect(*it, c);
                    if (!merged)
                        throw SyntaxError(line_no,
                                          "contradictory conditions on " + c.variable);
                    *it = *merged;
                }
            }
            rs.rules.push_back(std::move(rule));
            continue;
        }
        throw SyntaxError(line_no, "expected 'classes' or 'rule', got '" + head + "'");
    }

    if (!have_classes) {
        if (!rs.rules.empty()) throw SyntaxError(0, "missing classes statement");
        rs.class_map = {{"negative", 0}, {"positive", 1}};
    }

    for (std::size_t a = 0; a < rs.rules.size(); ++a) {
        for (std::size_t b = a + 1; b < rs.rules.size(); ++b) {
            if (rules_overlap(rs.rules[a], rs.rules[b])) {
                warn("rules '" + rs.rules[a].name + "' and '" + rs.rules[b].name +
                     "' overlap; first match wins");
            }
        }
    }
    return rs;
}

std::string serialize_ruleset(const RuleSet& rs) {
    std::ostringstream out;
    // Canonical order: label mapped to 0 first.
    std::vector<std::pair<std::string, int>> classes = rs.class_map;
    std::sort(classes.begin(), classes.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    out << "classes: ";
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (i) out << ", ";
        out << classes[i].first << "=" << classes[i].second;
    }
    out << '\n';
    for (const Rule& rule : rs.rules) {
        if (rule.conditions.empty())
            throw RuleError("cannot serialize rule '" + rule.name + "' with no conditions");
        out << "rule " << rule.name << ": ";
        bool first = true;
        for (const Condition& c : rule.conditions) append_condition(out, c, first);
        out << " -> " << rs.label_for(rule.outcome) << '\n';
    }
    return out.str();
}

RuleSet complete_bounds(const RuleSet& rs, const LabeledDataset& data) {
    RuleSet out = rs;
    for (Rule& rule : out.rules) {
        for (Condition& c : rule.conditions) {
            std::size_t j = 0;
            try {
                j = data.feature_index(c.variable);
            } catch (const MissingColumnError&) {
                throw UnknownVariableError(c.variable);
            }
            if (!c.lower) {
                c.lower = data.feature_bounds[j].min;
                c.lower_inclusive = true;
            }
            if (!c.upper) {
                c.upper = data.feature_bounds[j].max;
                c.upper_inclusive = true;
            }
        }
    }
    return out;
}

namespace detail {

std::vector<ResolvedRule> resolve_rules(const RuleSet& rs,
                                        const std::vector<std::string>& feature_names) {
    std::vector<ResolvedRule> resolved;
    resolved.reserve(rs.rules.size());
    for (const Rule& rule : rs.rules) {
        ResolvedRule r;
        r.outcome = rule.outcome;
        for (const Condition& c : rule.conditions) {
            auto it = std::find(feature_names.begin(), feature_names.end(), c.variable);
            if (it == feature_names.end()) throw MissingFeatureError(c.variable);
            r.conditions.emplace_back(static_cast<std::size_t>(it - feature_names.begin()), &c);
        }
        resolved.push_back(std::move(r));
    }
    return resolved;
}

bool rule_fires(const ResolvedRule& rule, std::span<const double> sample) {
    for (const auto& [idx, cond] : rule.conditions) {
        if (!cond->contains(sample[idx])) return false;
    }
    return true;
}

}  // namespace detail

std::optional<int> evaluate(const RuleSet& rs, std::span<const double> sample,
                            const std::vector<std::string>& feature_names) {
    const auto resolved = detail::resolve_rules(rs, feature_names);
    for (const auto& rule : resolved) {
        if (detail::rule_fires(rule, sample)) return rule.outcome;
    }
    return std::nullopt;
}

std::vector<std::optional<int>> protocol_vector(const RuleSet& rs, const LabeledDataset& data) {
    const auto resolved = detail::resolve_rules(rs, data.feature_names);
    std::vector<std::optional<int>> out(data.n_rows());
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        out[i] = std::nullopt;
        for (const auto& rule : resolved) {
            if (detail::rule_fires(rule, data.rows[i])) {
                out[i] = rule.outcome;
                break;
            }
        }
    }
    return out;
}

}  // namespace protoeval
