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
#include "vinemark/report.hpp"

#include <algorithm>

#include "vinemark/format.hpp"

namespace vinemark {

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> read_optional(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

Stat stat_from_json(const Json& j) {
  Stat s;
  if (j.is_null()) return s;
  s.mean = read_optional(j, "mean");
  s.std = read_optional(j, "std");
  s.n = j.value("n", std::size_t{s.mean ? 1u : 0u});
  return s;
}

const Json& child(const Json& j, const char* key) {
  static const Json kNull = nullptr;
  return j.contains(key) ? j.at(key) : kNull;
}

}  // namespace

Json to_json(const Stat& stat) {
  Json j;
  j["n"] = stat.n;
  j["mean"] = optional_number(stat.mean);
  j["std"] = optional_number(stat.std);
  return j;
}

Json to_json(const DetectionCounts& c) {
  Json j;
  j["tp"] = c.tp;
  j["fp"] = c.fp;
  j["fn"] = c.fn;
  j["splits"] = c.splits;
  j["false_alarms"] = c.false_alarms;
  j["p_d"] = c.p_d;
  j["r_d"] = c.r_d;
  j["f1"] = c.f1;
  return j;
}

Json to_json(const ComponentVerdict& v) {
  Json j;
  j["component_id"] = v.component_id;
  j["kind"] = std::string(to_string(v.kind));
  j["area"] = v.area;
  j["intersection"] = v.intersection;
  j["iou"] = v.iou;
  j["seg_precision"] = v.seg_precision;
  j["seg_recall"] = v.seg_recall;
  j["normalized_area"] = v.normalized_area;
  j["normalized_distance"] = v.normalized_distance;
  return j;
}

Json to_json(const ImageEvaluation& eval) {
  Json j;
  j["image_id"] = eval.image_id;
  j["alpha"] = eval.alpha;
  j["false_negative"] = eval.false_negative;
  j["truth_degenerate"] = eval.truth_degenerate;
  j["true_positives"] = eval.count(VerdictKind::kTruePositive);
  j["splits"] = eval.count(VerdictKind::kSplit);
  j["false_alarms"] = eval.count(VerdictKind::kFalseAlarm);
  Json verdicts = Json::array();
  for (const ComponentVerdict& v : eval.verdicts) verdicts.push_back(to_json(v));
  j["verdicts"] = std::move(verdicts);
  return j;
}

Json to_json(const DetectorSpec& spec) {
  Json j;
  j["family"] = std::string(to_string(spec.family));
  j["variant"] = spec.variant;
  j["threshold"] = spec.threshold;
  j["alpha"] = spec.alpha;
  return j;
}

Json to_json(const SweepSummary& s) {
  Json j;
  j["detector"] = s.spec.label();
  j["spec"] = to_json(s.spec);
  j["counts"] = to_json(s.counts);
  j["images_evaluated"] = s.images_evaluated;
  j["images_with_splits"] = s.images_with_splits;
  j["split_count"] = s.split_count;
  j["fa_count"] = s.fa_count;
  j["true_positive"] = {{"seg_precision", to_json(s.tp_precision)},
                        {"seg_recall", to_json(s.tp_recall)},
                        {"iou", to_json(s.tp_iou)},
                        {"normalized_distance", to_json(s.tp_distance)}};
  j["split"] = {{"seg_precision", to_json(s.split_precision)},
                {"seg_recall", to_json(s.split_recall)},
                {"iou", to_json(s.split_iou)},
                {"normalized_distance", to_json(s.split_distance)}};
  j["false_alarm"] = {{"normalized_area", to_json(s.fa_area)},
                      {"normalized_distance", to_json(s.fa_distance)}};
  Json errors = Json::array();
  for (const ImageError& e : s.errors) {
    errors.push_back({{"image_id", e.image_id}, {"code", e.code}, {"message", e.message}});
  }
  j["errors"] = std::move(errors);
  return j;
}

Json to_json(const Selection& selection, std::span<const SweepSummary> summaries) {
  auto group = [&](Metric metric, const std::vector<std::size_t>& winners) {
    Json g;
    if (winners.empty()) {
      g["value"] = nullptr;
      g["winners"] = Json::array();
      return g;
    }
    g["value"] = display_value(metric, *metric_value(summaries[winners.front()], metric));
    std::vector<std::string> labels;
    for (std::size_t i : winners) labels.push_back(summaries[i].spec.label());
    std::sort(labels.begin(), labels.end());
    g["winners"] = labels;
    return g;
  };
  Json out = Json::array();
  for (const MetricWinners& w : selection.metrics) {
    const MetricInfo& info = metric_info(w.metric);
    Json j;
    j["metric"] = std::string(info.key);
    j["header"] = std::string(info.header);
    j["higher_is_better"] = info.higher_is_better;
    j["FCN"] = group(w.metric, w.fcn_best);
    j["SW"] = group(w.metric, w.sw_best);
    j["overall"] = group(w.metric, w.overall_best);
    out.push_back(std::move(j));
  }
  return out;
}

Json to_json(const BudCountError& e) {
  Json j;
  j["excess"] = e.excess;
  j["omitted"] = e.omitted;
  j["net"] = e.net;
  return j;
}

Json to_json(const AreaErrorBreakdown& b) {
  Json j;
  j["fnx"] = b.fnx;
  j["fpx"] = b.fpx;
  j["terms"] = {{"fa_na_mean", b.fa_na_mean},
                {"tp_precision_complement", b.tp_precision_complement},
                {"split_precision_complement", b.split_precision_complement}};
  j["caveat"] =
      "fpx adds a bud-area-normalized term (false-alarm NA) to detected-area-normalized "
      "precision complements; fnx is assumed 0";
  return j;
}

SweepSummary summary_from_json(const Json& j) {
  try {
    SweepSummary s;
    const Json& spec = j.at("spec");
    s.spec.family = family_from_string(spec.at("family").get<std::string>());
    s.spec.variant = spec.at("variant").get<std::string>();
    s.spec.threshold = spec.at("threshold").get<double>();
    s.spec.alpha = spec.value("alpha", 0.5);

    const Json& c = j.at("counts");
    s.counts.tp = c.value("tp", std::size_t{0});
    s.counts.fp = c.value("fp", std::size_t{0});
    s.counts.fn = c.value("fn", std::size_t{0});
    s.counts.splits = c.value("splits", std::size_t{0});
    s.counts.false_alarms = c.value("false_alarms", std::size_t{0});
    s.counts.p_d = c.at("p_d").get<double>();
    s.counts.r_d = c.at("r_d").get<double>();
    s.counts.f1 = c.at("f1").get<double>();

    s.images_evaluated = j.value("images_evaluated", std::size_t{0});
    s.images_with_splits = j.value("images_with_splits", std::size_t{0});
    s.split_count = j.value("split_count", s.counts.splits);
    s.fa_count = j.value("fa_count", s.counts.false_alarms);

    const Json& tp = child(j, "true_positive");
    const Json& sp = child(j, "split");
    const Json& fa = child(j, "false_alarm");
    auto field = [](const Json& parent, const char* key) {
      return parent.is_null() ? Stat{} : stat_from_json(child(parent, key));
    };
    s.tp_precision = field(tp, "seg_precision");
    s.tp_recall = field(tp, "seg_recall");
    s.tp_iou = field(tp, "iou");
    s.tp_distance = field(tp, "normalized_distance");
    s.split_precision = field(sp, "seg_precision");
    s.split_recall = field(sp, "seg_recall");
    s.split_iou = field(sp, "iou");
    s.split_distance = field(sp, "normalized_distance");
    s.fa_area = field(fa, "normalized_area");
    s.fa_distance = field(fa, "normalized_distance");

    for (const Json& e : child(j, "errors").is_array() ? j.at("errors") : Json::array()) {
      s.errors.push_back({e.value("image_id", ""), e.value("code", ""), e.value("message", "")});
    }
    s.spec.validate();
    return s;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("bad summary JSON: ") + e.what());
  }
}

std::vector<SweepSummary> summaries_from_json(const Json& json) {
  const Json& list = json.is_object() && json.contains("summaries") ? json.at("summaries") : json;
  if (!list.is_array()) throw Error(ErrorCode::kFormat, "expected an array of summaries");
  std::vector<SweepSummary> out;
  for (const Json& item : list) out.push_back(summary_from_json(item));
  return out;
}

namespace {

const Stat* metric_stat(const SweepSummary& s, Metric metric) {
  switch (metric) {
    case Metric::kTpPrecision: return &s.tp_precision;
    case Metric::kTpRecall: return &s.tp_recall;
    case Metric::kTpIou: return &s.tp_iou;
    case Metric::kSplitPrecision: return &s.split_precision;
    case Metric::kSplitRecall: return &s.split_recall;
    case Metric::kSplitIou: return &s.split_iou;
    case Metric::kNa: return &s.fa_area;
    case Metric::kNd: return &s.fa_distance;
    default: return nullptr;
  }
}

bool has_stat(Metric metric) {
  return metric != Metric::kPd && metric != Metric::kRd && metric != Metric::kF1 &&
         metric != Metric::kSplits;
}

std::string cell_text(const SweepSummary& s, Metric metric) {
  const auto value = metric_value(s, metric);
  if (metric == Metric::kSplits) return std::to_string(s.images_with_splits);
  if (!value) return "--";
  const bool plain = metric == Metric::kNa || metric == Metric::kNd;
  const int decimals = plain ? 2 : 1;
  const double scale = plain ? 1.0 : 100.0;
  std::string text = fixed(display_value(metric, *value), decimals);
  if (const Stat* stat = metric_stat(s, metric)) {
    text += "(" + (stat->std ? fixed(*stat->std * scale, decimals) : std::string("--")) + ")";
  }
  return text;
}

}  // namespace

std::string render_markdown(std::span<const SweepSummary> summaries,
                            const Selection& selection) {
  std::string out = "| Detector |";
  std::string rule = "|---|";
  for (const MetricInfo& info : table_metrics()) {
    out += " " + std::string(info.header) + " |";
    rule += "---:|";
  }
  out += "\n" + rule + "\n";
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    out += "| " + summaries[i].spec.label() + " |";
    for (const MetricInfo& info : table_metrics()) {
      std::string text = cell_text(summaries[i], info.metric);
      if (selection.family_best(i, info.metric)) {
        text = "**" + text + "**";
        if (selection.overall_best(i, info.metric)) text = "<u>" + text + "</u>";
      }
      out += " " + text + " |";
    }
    out += "\n";
  }
  return out;
}

std::string render_table_csv(std::span<const SweepSummary> summaries) {
  std::string out = "detector,family";
  for (const MetricInfo& info : table_metrics()) {
    out += "," + std::string(info.key);
    if (has_stat(info.metric)) {
      out += "," + std::string(info.key) + "_std";
    }
  }
  out += "\n";
  auto cell = [](const std::optional<double>& v) { return v ? shortest(*v) : std::string(); };
  for (const SweepSummary& s : summaries) {
    out += s.spec.label() + "," + std::string(to_string(s.spec.family));
    for (const MetricInfo& info : table_metrics()) {
      out += "," + cell(metric_value(s, info.metric));
      if (const Stat* stat = metric_stat(s, info.metric)) out += "," + cell(stat->std);
    }
    out += "\n";
  }
  return out;
}

}  // namespace vinemark
