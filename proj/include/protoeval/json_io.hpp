#pragma once

#include <nlohmann/json.hpp>

#include "protoeval/metrics.hpp"
#include "protoeval/similarity.hpp"

namespace protoeval {

// Fixed key names: mcc, f1, f1_macro, a, ba, roc_auc, p, r, ra, rr, rs,
// counts.{tp,fp,tn,fn}. Absent metrics serialize as null.
nlohmann::ordered_json metrics_to_json(const MetricsReport& report);

nlohmann::ordered_json similarity_report_to_json(const SimilarityReport& report);

}  // namespace protoeval
