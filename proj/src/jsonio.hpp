#pragma once

// JSON (de)serialization for measures, custom models, and solve results.

#include <string>

#include "discrepancy.hpp"
#include "measures.hpp"
#include "transport.hpp"

namespace ubw1 {

// {"points": [[..],..], "metric": "euclidean" | {"matrix": [[..],..]},
//  "weights": [..]}
DiscreteMeasure measure_from_json(const std::string& text);
std::string measure_to_json(const DiscreteMeasure& rho);

// {"h_s": {"breakpoints": [...], "values": [...]}}
LocalDiscrepancy model_from_json(const std::string& text);

std::string solution_to_json(const TransportSolution& sol);
TransportSolution solution_from_json(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace ubw1
