#include "protoeval/json_io.hpp"

namespace protoeval {

namespace {

nlohmann::ordered_json opt_to_json(const std::optional<double>& v) {
    if (!v) return nullptr;
    return *v;
}

}  // namespace

nlohmann::ordered_json metrics_to_json(const MetricsReport& report) {
    nlohmann::ordered_json j;
    j["mcc"] = opt_to_json(report.mcc);
    j["f1"] = opt_to_json(report.f1);
    j["f1_macro"] = opt_to_json(report.f1_macro);
    j["a"] = report.a;
    j["ba"] = opt_to_json(report.ba);
    j["roc_auc"] = opt_to_json(report.roc_auc);
    j["p"] = opt_to_json(report.precision);
    j["r"] = opt_to_json(report.recall);
    j["ra"] = opt_to_json(report.ra);
    j["rr"] = opt_to_json(report.rr);
    j["rs"] = opt_to_json(report.rs);
    j["counts"] = {{"tp", report.counts.tp},
                   {"fp", report.counts.fp},
                   {"tn", report.counts.tn},
                   {"fn", report.counts.fn}};
    return j;
}

nlohmann::ordered_json similarity_report_to_json(const SimilarityReport& report) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(report.kind);
    j["n_samples"] = report.n_samples;
    j["overall"] = report.overall;
    nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
    for (const auto& [key, score] : report.pair_scores) {
        pairs.push_back({{"first", key.first}, {"second", key.second}, {"score", score}});
    }
    j["pairs"] = pairs;
    return j;
}

}  // namespace protoeval
