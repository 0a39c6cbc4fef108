// Copyright 2026 The Vinemark Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef VINEMARK_REPORT_HPP
#define VINEMARK_REPORT_HPP

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vinemark/agrovars.hpp"
#include "vinemark/harness.hpp"
#include "vinemark/metrics.hpp"

namespace vinemark {

// Insertion-ordered so that reports are byte-stable.
using Json = nlohmann::ordered_json;

Json to_json(const Stat& stat);
Json to_json(const DetectionCounts& counts);
Json to_json(const ComponentVerdict& verdict);
Json to_json(const ImageEvaluation& eval);
Json to_json(const DetectorSpec& spec);
Json to_json(const SweepSummary& summary);
Json to_json(const Selection& selection, std::span<const SweepSummary> summaries);
Json to_json(const BudCountError& error);
Json to_json(const AreaErrorBreakdown& breakdown);

/// Missing integer counts default to zero, so hand-keyed fixtures may give
/// only the ratios.
SweepSummary summary_from_json(const Json& json);

/// Accepts either a bare array of summaries or an object with a
/// "summaries" array (the sweep report layout).
std::vector<SweepSummary> summaries_from_json(const Json& json);

/// Detector table with columns P_D, R_D, F1, S, P_S^TP, R_S^TP, IoU^TP,
/// P_S^S, R_S^S, IoU^S, NA, ND. Percentages carry one decimal, NA and ND two,
/// undefined values "--". Family winners are bold and overall winners are
/// additionally underlined.
std::string render_markdown(std::span<const SweepSummary> summaries,
                            const Selection& selection);

/// Same columns as the Markdown table, full precision, stds in their own
/// columns.
std::string render_table_csv(std::span<const SweepSummary> summaries);

}  // namespace vinemark

#endif  // VINEMARK_REPORT_HPP
