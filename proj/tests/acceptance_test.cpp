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
// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "vinemark/agrovars.hpp"
#include "vinemark/harness.hpp"
#include "vinemark/metrics.hpp"
#include "vinemark/raster.hpp"
#include "vinemark/report.hpp"
#include "vinemark/swdetect.hpp"
#include "vinemark/synth.hpp"

using namespace vinemark;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

struct Scene {
  SyntheticCase c;
  std::vector<Component> comps;
};

std::vector<Scene> corpus(int n) {
  std::vector<Scene> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int seed = 0; seed < n; ++seed) {
    Scene s;
    s.c = random_case(static_cast<std::uint64_t>(seed), 64);
    s.comps = connected_components(s.c.detection.mask);
    out.push_back(std::move(s));
  }
  return out;
}

void oracle_equivalence(const std::vector<Scene>& scenes) {
  const auto start = std::chrono::steady_clock::now();
  std::size_t mismatches = 0, verdicts = 0;
  for (const Scene& s : scenes) {
    for (double alpha : {0.1, 0.5}) {
      const ImageEvaluation fast = classify_components(s.comps, s.c.truth, {alpha});
      const ImageEvaluation slow = oracle_metrics(s.comps, s.c.truth, alpha);
      if (fast.verdicts.size() != slow.verdicts.size() ||
          fast.false_negative != slow.false_negative) {
        ++mismatches;
        continue;
      }
      for (std::size_t i = 0; i < fast.verdicts.size(); ++i) {
        const ComponentVerdict& f = fast.verdicts[i];
        const ComponentVerdict& o = slow.verdicts[i];
        ++verdicts;
        const bool ok = f.kind == o.kind && f.area == o.area && f.intersection == o.intersection &&
                        close_rel(f.iou, o.iou, 1e-9) &&
                        close_rel(f.seg_precision, o.seg_precision, 1e-9) &&
                        close_rel(f.seg_recall, o.seg_recall, 1e-9) &&
                        close_rel(f.normalized_area, o.normalized_area, 1e-9) &&
                        close_rel(f.normalized_distance, o.normalized_distance, 1e-9);
        mismatches += !ok;
      }
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  char buf[160];
  std::snprintf(buf, sizeof buf, "oracle equivalence: %zu scenes, %zu verdicts, %zu mismatches, %.2f s",
                scenes.size(), verdicts, mismatches, seconds);
  report(1, scenes.size() >= 1000 && mismatches == 0 && seconds < 60.0, buf);
}

void taxonomy(const std::vector<Scene>& scenes) {
  std::size_t violations = 0;
  for (const Scene& s : scenes) {
    std::size_t tp_split0 = 0, fa0 = 0, prev_tp = 0;
    bool first = true;
    for (double alpha : {0.1, 0.3, 0.5, 0.7}) {
      const ImageEvaluation e = classify_components(s.comps, s.c.truth, {alpha});
      const std::size_t tp = e.count(VerdictKind::kTruePositive);
      const std::size_t ts = tp + e.count(VerdictKind::kSplit);
      const std::size_t fa = e.count(VerdictKind::kFalseAlarm);
      if (first) {
        tp_split0 = ts;
        fa0 = fa;
        first = false;
      } else {
        violations += ts != tp_split0;
        violations += fa != fa0;
        violations += tp > prev_tp;
      }
      prev_tp = tp;
    }
  }
  report(2, violations == 0,
         "taxonomy invariants over alpha {0.1,0.3,0.5,0.7}: " + std::to_string(violations) +
             " violations");
}

void nesting() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> dim(1, 48), votes(0, 6);
  const std::vector<double> taus = {0.0, 0.1, 0.25, 0.5, 0.5, 0.75, 0.9, 1.0};
  std::size_t violations = 0;
  for (int i = 0; i < 200; ++i) {
    ProbabilityMap map(dim(rng), dim(rng));
    for (Eigen::Index k = 0; k < map.size(); ++k) map.data()[k] = unit(rng);
    for (std::size_t a = 0; a + 1 < taus.size(); ++a) {
      const BinaryMask lo = binarize(map, taus[a]);
      const BinaryMask hi = binarize(map, taus[a + 1]);
      violations += static_cast<std::size_t>((hi && !lo).count());
    }
    VoteMap v(map.rows(), map.cols());
    for (Eigen::Index k = 0; k < v.size(); ++k) v.data()[k] = votes(rng);
    for (int nu = 1; nu < 4; ++nu) {
      violations += static_cast<std::size_t>((threshold_votes(v, nu + 1) && !threshold_votes(v, nu)).count());
    }
  }
  report(3, violations == 0,
         "tau and nu nesting on 200 rasters: " + std::to_string(violations) + " violations");
}

void grid_law() {
  std::size_t violations = 0, checked = 0;
  for (int s = 100; s <= 1000; s += 100) {
    const PatchGrid grid = build_grid(1024, 1024, s);
    const VoteMap cov = coverage(grid);
    for (int r = s; r <= 1023 - s; ++r) {
      for (int c = s; c <= 1023 - s; ++c) {
        ++checked;
        violations += cov(r, c) != 4;
      }
    }
  }
  report(4, violations == 0,
         "4-patch coverage on 1024x1024: " + std::to_string(checked) + " interior pixels, " +
             std::to_string(violations) + " violations");
}

void arithmetic() {
  const BudCountError count = bud_count_error({}, 0.886, 0.886);
  const AreaErrorBreakdown area = area_error(0.08, 0.928, 0.893);
  const double internode = internode_error({240.0, 5.0, 150.0}, 1.1);
  const bool ok = std::abs(count.excess - 27.0) <= 0.5 && std::abs(count.omitted - 27.0) <= 0.5 &&
                  std::abs(area.fpx * 100.0 - 25.9) <= 0.05 &&
                  std::abs(internode * 100.0 - 7.3) <= 0.05;
  char buf[160];
  std::snprintf(buf, sizeof buf, "variable errors: excess %.2f, omitted %.2f, fpx %.2f%%, internode %.2f%%",
                count.excess, count.omitted, area.fpx * 100.0, internode * 100.0);
  report(5, ok, buf);
}

std::string label_list(const std::vector<SweepSummary>& rows, const std::vector<std::size_t>& idx) {
  std::string out;
  for (std::size_t i : idx) out += (out.empty() ? "" : "+") + rows[i].spec.label();
  return out;
}

void table_fixture() {
  std::ifstream in(std::string(VINEMARK_TEST_DATA_DIR) + "/reference_table_summaries.json");
  const std::vector<SweepSummary> rows = summaries_from_json(Json::parse(in));
  const Selection sel = best_per_metric(rows);
  const std::string pd = label_list(rows, sel.winners(Metric::kPd).fcn_best);
  const std::string f1 = label_list(rows, sel.winners(Metric::kF1).fcn_best);
  const std::string sw = label_list(rows, sel.winners(Metric::kPd).sw_best);
  const std::string md = render_markdown(rows, sel);
  const bool columns =
      md.rfind("| Detector | P_D | R_D | F1 | S | P_S^TP | R_S^TP | IoU^TP | P_S^S | R_S^S | IoU^S | NA | ND |\n", 0) == 0;
  const bool cells = md.find("| FCN_16s^0.6 | <u>**88.6**</u> | 88.6 | <u>**88.6**</u> | 10 | 92.8(6.7) |") !=
                         std::string::npos &&
                     md.find("| SW_700^3 | **2.5** | 5.0 | **3.4** |") != std::string::npos;
  report(6, pd == "FCN_16s^0.6" && f1 == "FCN_16s^0.6" && sw == "SW_700^3" && columns && cells,
         "reference table: P_D " + pd + ", F1 " + f1 + ", SW P_D " + sw +
             (columns && cells ? ", markdown ok" : ", markdown mismatch"));
}

void set_identity(const std::vector<Scene>& scenes) {
  std::size_t checked = 0, violations = 0;
  for (const Scene& s : scenes) {
    for (const Component& c : s.comps) {
      if (overlap(c, s.c.truth).intersection == 0) continue;
      const SegmentationScores sc = seg_precision_recall(c, s.c.truth);
      const double p = sc.precision, r = sc.recall;
      ++checked;
      violations += std::abs(sc.iou - p * r / (p + r - p * r)) > 1e-12;
    }
  }
  report(7, violations == 0 && checked > 0,
         "IoU set identity: " + std::to_string(checked) + " overlapping components, " +
             std::to_string(violations) + " violations");
}

void shift_closed_form() {
  std::mt19937_64 rng(77);
  std::size_t violations = 0;
  for (int i = 0; i < 50; ++i) {
    const int w = std::uniform_int_distribution<int>(1, 30)(rng);
    const int h = std::uniform_int_distribution<int>(1, 30)(rng);
    const int k = std::uniform_int_distribution<int>(0, w - 1)(rng);
    const GroundTruth truth = make_truth({80, 40, BudSpec::rectangle(5, 10, h, w), 0});
    const auto comps = connected_components(perturb(truth, {0, k}).mask);
    if (comps.size() != 1) {
      ++violations;
      continue;
    }
    const Overlap o = overlap(comps[0], truth);
    // Integer cross-multiplication: IoU == (w-k)/(w+k) exactly.
    violations += static_cast<long long>(o.intersection) * (w + k) !=
                  static_cast<long long>(o.union_area()) * (w - k);
  }
  report(8, violations == 0, "shifted rectangles: 50 cases, " + std::to_string(violations) + " violations");
}

void emitters() {
  std::vector<SweepSummary> rows;
  for (double na : {0.5, 1.2, 1.4, 3.3}) {
    SweepSummary s;
    s.fa_area.n = 2;
    s.fa_area.mean = na;
    rows.push_back(s);
  }
  const HistogramSpec h = histogram(rows, Metric::kNa);
  const bool hist_ok = h.proportions == std::vector<double>{0.25, 0.5, 0.0, 0.25};
  const std::string csv = scatter_data(rows, ScatterKind::kDetectionPr);
  const auto lines = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
  report(9, hist_ok && lines == rows.size() + 1,
         std::string("histogram ") + (hist_ok ? "ok" : "mismatch") + ", scatter rows " +
             std::to_string(lines - 1) + " for " + std::to_string(rows.size()) + " detectors");
}

}  // namespace

int main() {
  try {
    const std::vector<Scene> scenes = corpus(1000);
    oracle_equivalence(scenes);
    taxonomy(scenes);
    nesting();
    grid_law();
    arithmetic();
    table_fixture();
    set_identity(scenes);
    shift_closed_form();
    emitters();
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 1;
  }
  return failures == 0 ? 0 : 1;
}
