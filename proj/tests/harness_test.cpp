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
#include "vinemark/harness.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "vinemark/image_io.hpp"
#include "vinemark/report.hpp"

namespace vinemark {
namespace {

namespace fs = std::filesystem;
using testing::block_mask;
using testing::mask_from_rows;

std::vector<SweepSummary> reference_table() {
  std::ifstream in(fs::path(VINEMARK_TEST_DATA_DIR) / "reference_table_summaries.json");
  return summaries_from_json(Json::parse(in));
}

LoadedImage fcn_image(const std::string& id, const BinaryMask& truth, const BinaryMask& detection) {
  LoadedImage image;
  image.image_id = id;
  image.truth = make_ground_truth(truth);
  image.prediction = detection.cast<double>();
  return image;
}

DetectorSpec fcn_spec(double tau = 0.5, double alpha = 0.5) {
  return {DetectorFamily::kFcn, "8s", tau, alpha};
}

TEST(PoolTest, MeanAndSampleStd) {
  Pool p;
  EXPECT_FALSE(p.mean());
  p.add(2.0);
  EXPECT_EQ(*p.mean(), 2.0);
  EXPECT_FALSE(p.stddev());
  p.add(4.0);
  p.add(9.0);
  EXPECT_DOUBLE_EQ(*p.mean(), 5.0);
  EXPECT_DOUBLE_EQ(*p.stddev(), std::sqrt(13.0));
}

TEST(PoolTest, MergeMatchesCountWeightedMean) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> value(-5.0, 50.0);
  std::uniform_int_distribution<int> size(0, 40);
  for (int trial = 0; trial < 200; ++trial) {
    Pool a, b, all;
    const int na = size(rng), nb = size(rng);
    for (int i = 0; i < na; ++i) {
      const double x = value(rng);
      a.add(x);
      all.add(x);
    }
    for (int i = 0; i < nb; ++i) {
      const double x = value(rng);
      b.add(x);
      all.add(x);
    }
    Pool merged = a;
    merged.merge(b);
    ASSERT_EQ(merged.size(), all.size());
    if (na + nb == 0) {
      EXPECT_FALSE(merged.mean());
      continue;
    }
    const double weighted = ((na ? *a.mean() * na : 0.0) + (nb ? *b.mean() * nb : 0.0)) / (na + nb);
    EXPECT_NEAR(*merged.mean(), weighted, 1e-9);
    if (na + nb >= 2) EXPECT_NEAR(*merged.stddev(), *all.stddev(), 1e-9);
  }
}

TEST(EvaluateDetectorTest, PerfectSingleImage) {
  const BinaryMask truth = block_mask(16, 16, 4, 4, 5, 5);
  const std::vector<LoadedImage> data = {fcn_image("a", truth, truth)};
  const SweepSummary s = evaluate_detector(fcn_spec(), data, {}).summary;
  EXPECT_EQ(s.counts.tp, 1u);
  EXPECT_EQ(s.counts.fp, 0u);
  EXPECT_EQ(s.counts.fn, 0u);
  EXPECT_EQ(*s.tp_precision.mean, 1.0);
  EXPECT_EQ(*s.tp_recall.mean, 1.0);
  EXPECT_EQ(*s.tp_iou.mean, 1.0);
  EXPECT_FALSE(s.tp_iou.std);
  EXPECT_EQ(s.split_count, 0u);
  EXPECT_EQ(s.fa_count, 0u);
  EXPECT_FALSE(s.split_iou.mean);
  EXPECT_FALSE(s.fa_area.mean);
}

TEST(EvaluateDetectorTest, SingleSplitHasUndefinedStd) {
  const BinaryMask truth = block_mask(16, 16, 4, 4, 5, 5);
  const BinaryMask det = block_mask(16, 16, 4, 4, 1, 2);
  const std::vector<LoadedImage> data = {fcn_image("a", truth, det)};
  const SweepSummary s = evaluate_detector(fcn_spec(), data, {}).summary;
  EXPECT_EQ(s.split_count, 1u);
  EXPECT_EQ(s.images_with_splits, 1u);
  EXPECT_EQ(s.split_precision.n, 1u);
  EXPECT_FALSE(s.split_precision.std);
  const std::vector<SweepSummary> rows = {s};
  EXPECT_NE(render_markdown(rows, best_per_metric(rows)).find("100.0(--)"), std::string::npos);
  EXPECT_TRUE(to_json(s)["split"]["seg_precision"]["std"].is_null());
}

// Independent pooling: flood-fill components, pixel-set overlap, two-pass
// statistics.
struct OracleStats {
  std::map<std::string, std::vector<double>> pools;
  std::size_t tp = 0, split = 0, fa = 0, fn = 0, split_images = 0;
};

OracleStats oracle_pool(const std::vector<std::pair<BinaryMask, BinaryMask>>& images, double alpha) {
  OracleStats o;
  for (const auto& [truth, det] : images) {
    Raster<int> labels;
    const int n = testing::flood_fill_labels(det, true, labels);
    std::set<std::pair<int, int>> t;
    double tr = 0, tc = 0;
    for (int r = 0; r < truth.rows(); ++r) {
      for (int c = 0; c < truth.cols(); ++c) {
        if (truth(r, c)) {
          t.insert({r, c});
          tr += r;
          tc += c;
        }
      }
    }
    tr /= static_cast<double>(t.size());
    tc /= static_cast<double>(t.size());
    const double diam = std::max(1.0, testing::brute_force_diameter(truth));
    bool hit = false, split = false;
    for (int k = 0; k < n; ++k) {
      std::set<std::pair<int, int>> c;
      double cr = 0, cc = 0;
      for (int r = 0; r < det.rows(); ++r) {
        for (int col = 0; col < det.cols(); ++col) {
          if (labels(r, col) == k) {
            c.insert({r, col});
            cr += r;
            cc += col;
          }
        }
      }
      cr /= static_cast<double>(c.size());
      cc /= static_cast<double>(c.size());
      std::size_t inter = 0;
      for (const auto& p : c) inter += t.count(p);
      const double u = static_cast<double>(c.size() + t.size() - inter);
      const double iou = static_cast<double>(inter) / u;
      const double nd = std::hypot(cr - tr, cc - tc) / diam;
      const double ps = static_cast<double>(inter) / static_cast<double>(c.size());
      const double rs = static_cast<double>(inter) / static_cast<double>(t.size());
      if (iou >= alpha) {
        ++o.tp;
        hit = true;
        o.pools["tp_p"].push_back(ps);
        o.pools["tp_r"].push_back(rs);
        o.pools["tp_iou"].push_back(iou);
      } else if (inter > 0) {
        ++o.split;
        split = true;
        o.pools["s_p"].push_back(ps);
        o.pools["s_r"].push_back(rs);
        o.pools["s_iou"].push_back(iou);
      } else {
        ++o.fa;
        o.pools["na"].push_back(static_cast<double>(c.size()) / static_cast<double>(t.size()));
        o.pools["nd"].push_back(nd);
      }
    }
    o.fn += !hit;
    o.split_images += split;
  }
  return o;
}

void expect_stat(const Stat& got, const std::vector<double>& xs) {
  ASSERT_EQ(got.n, xs.size());
  if (xs.empty()) {
    EXPECT_FALSE(got.mean);
    return;
  }
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  EXPECT_NEAR(*got.mean, mean, 1e-12);
  if (xs.size() < 2) {
    EXPECT_FALSE(got.std);
    return;
  }
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  EXPECT_NEAR(*got.std, std::sqrt(ss / static_cast<double>(xs.size() - 1)), 1e-12);
}

void expect_matches_oracle(const SweepSummary& s, const OracleStats& o) {
  EXPECT_EQ(s.counts.tp, o.tp);
  EXPECT_EQ(s.split_count, o.split);
  EXPECT_EQ(s.fa_count, o.fa);
  EXPECT_EQ(s.counts.fn, o.fn);
  EXPECT_EQ(s.images_with_splits, o.split_images);
  auto pool = [&](const char* k) {
    auto it = o.pools.find(k);
    return it == o.pools.end() ? std::vector<double>{} : it->second;
  };
  expect_stat(s.tp_precision, pool("tp_p"));
  expect_stat(s.tp_recall, pool("tp_r"));
  expect_stat(s.tp_iou, pool("tp_iou"));
  expect_stat(s.split_precision, pool("s_p"));
  expect_stat(s.split_recall, pool("s_r"));
  expect_stat(s.split_iou, pool("s_iou"));
  expect_stat(s.fa_area, pool("na"));
  expect_stat(s.fa_distance, pool("nd"));
}

TEST(EvaluateDetectorTest, ThreeImageFixtureMatchesOracle) {
  const std::vector<std::pair<BinaryMask, BinaryMask>> images = {
      {mask_from_rows({"..........",
                       ".####.....",
                       ".####.....",
                       ".####.....",
                       ".####.....",
                       "..........",
                       "..........",
                       ".........."}),
       mask_from_rows({"..........",
                       "..####....",
                       "..####....",
                       "..####....",
                       "..####....",
                       "..........",
                       "#.......##",
                       "........##"})},
      {mask_from_rows({"........",
                       "..###...",
                       "..###...",
                       "..###...",
                       "........",
                       "........"}),
       mask_from_rows({"#.......",
                       "..#.....",
                       "........",
                       "....#.#.",
                       "......#.",
                       "###....."})},
      {mask_from_rows({"......",
                       "..##..",
                       "..##..",
                       "......"}),
       mask_from_rows({"......",
                       "......",
                       "......",
                       "......"})}};
  std::vector<LoadedImage> data;
  for (std::size_t i = 0; i < images.size(); ++i) {
    data.push_back(fcn_image("img" + std::to_string(i), images[i].first, images[i].second));
  }
  for (double alpha : {0.1, 0.5}) {
    const SweepSummary s = evaluate_detector(fcn_spec(0.5, alpha), data, {}).summary;
    const OracleStats o = oracle_pool(images, alpha);
    expect_matches_oracle(s, o);
    EXPECT_EQ(s.images_evaluated, 3u);
  }
  // Hand count at alpha 0.5: one TP in image 1, two splits in image 2.
  const SweepSummary s = evaluate_detector(fcn_spec(), data, {}).summary;
  EXPECT_EQ(s.counts.tp, 1u);
  EXPECT_EQ(s.split_count, 2u);
  EXPECT_EQ(s.fa_count, 5u);
  EXPECT_EQ(s.counts.fn, 2u);
}

TEST(EvaluateDetectorTest, RandomScenesMatchOracleAndAreDeterministic) {
  std::mt19937_64 rng(32);
  std::vector<std::pair<BinaryMask, BinaryMask>> images;
  std::vector<LoadedImage> data;
  for (int i = 0; i < 12; ++i) {
    const BinaryMask truth = block_mask(20, 24, 3 + i % 5, 2 + i % 7, 4 + i % 3, 5);
    BinaryMask det = testing::random_mask(rng, 20, 24, 0.08);
    det = det || block_mask(20, 24, 3 + i % 5, 3 + i % 7, 4, 4);
    images.push_back({truth, det});
    data.push_back(fcn_image("r" + std::to_string(i), truth, det));
  }
  const DetectorRun one = evaluate_detector(fcn_spec(), data, {Connectivity::kEight, 1});
  const DetectorRun four = evaluate_detector(fcn_spec(), data, {Connectivity::kEight, 4});
  expect_matches_oracle(one.summary, oracle_pool(images, 0.5));
  EXPECT_EQ(to_json(one.summary).dump(), to_json(four.summary).dump());
  ASSERT_EQ(one.images.size(), four.images.size());
  for (std::size_t i = 0; i < one.images.size(); ++i) {
    EXPECT_EQ(to_json(one.images[i]).dump(), to_json(four.images[i]).dump());
  }
}

TEST(DatasetTest, ManifestAndPerImageErrors) {
  const fs::path dir = fs::temp_directory_path() / "vinemark_manifest_test";
  fs::create_directories(dir);
  write_mask(dir / "t.pgm", block_mask(8, 8, 2, 2, 3, 3));
  write_probability_map(dir / "p.pgm", block_mask(8, 8, 2, 2, 3, 3).cast<double>());
  {
    std::ofstream m(dir / "manifest.csv");
    m << "image_id,prediction_path,truth_path\n"
      << "good,p.pgm,t.pgm\n"
      << "missing,nope.pgm,t.pgm\n";
  }
  const std::vector<ManifestEntry> entries = read_manifest(dir / "manifest.csv");
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].truth, dir / "t.pgm");
  const std::vector<LoadedImage> data = load_dataset(entries, DetectorFamily::kFcn, {});
  EXPECT_FALSE(data[0].error);
  ASSERT_TRUE(data[1].error);
  EXPECT_EQ(data[1].error->code, "io");
  const SweepSummary s = evaluate_detector(fcn_spec(), data, {}).summary;
  EXPECT_EQ(s.images_evaluated, 1u);
  ASSERT_EQ(s.errors.size(), 1u);
  EXPECT_EQ(s.errors[0].image_id, "missing");
  EXPECT_EQ(s.counts.tp, 1u);
  fs::remove_all(dir);
}

TEST(SelectionTest, SingleDetectorWinsEverything) {
  const std::vector<SweepSummary> rows = {reference_table()[6]};
  const Selection sel = best_per_metric(rows);
  for (const MetricInfo& m : table_metrics()) {
    EXPECT_TRUE(sel.family_best(0, m.metric)) << m.key;
    EXPECT_TRUE(sel.overall_best(0, m.metric)) << m.key;
  }
}

TEST(SelectionTest, DifferenceInOneColumn) {
  SweepSummary a = reference_table()[6];
  SweepSummary b = a;
  b.counts.p_d = 0.5;
  const std::vector<SweepSummary> rows = {a, b};
  const Selection sel = best_per_metric(rows);
  EXPECT_TRUE(sel.family_best(0, Metric::kPd));
  EXPECT_FALSE(sel.family_best(1, Metric::kPd));
  EXPECT_TRUE(sel.family_best(1, Metric::kRd));
  EXPECT_TRUE(sel.family_best(0, Metric::kRd));
}

TEST(SelectionTest, EmptyInputRejected) {
  try {
    (void)best_per_metric({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidParameter);
  }
}

std::vector<std::string> labels_of(const std::vector<SweepSummary>& rows,
                                   const std::vector<std::size_t>& idx) {
  std::vector<std::string> out;
  for (std::size_t i : idx) out.push_back(rows[i].spec.label());
  std::sort(out.begin(), out.end());
  return out;
}

// Bold and underline marks of the reference table, column by column.
struct Marks {
  Metric metric;
  std::vector<std::string> fcn;
  std::vector<std::string> sw;
  std::vector<std::string> overall;
};

TEST(SelectionTest, ReproducesReferenceTableMarks) {
  const std::vector<SweepSummary> rows = reference_table();
  ASSERT_EQ(rows.size(), 15u);
  const std::vector<Marks> expected = {
      {Metric::kPd, {"FCN_16s^0.6"}, {"SW_700^3"}, {"FCN_16s^0.6"}},
      {Metric::kRd, {"FCN_8s^0.2", "FCN_8s^0.3"}, {"SW_200^4"}, {"FCN_8s^0.2", "FCN_8s^0.3"}},
      {Metric::kF1, {"FCN_16s^0.6"}, {"SW_700^3"}, {"FCN_16s^0.6"}},
      {Metric::kSplits, {"FCN_8s^0.4"}, {"SW_1000^4"}, {"FCN_8s^0.4"}},
      {Metric::kTpPrecision, {"FCN_8s^0.9"}, {"SW_500^4"}, {"FCN_8s^0.9"}},
      {Metric::kTpRecall, {"FCN_32s^0.1"}, {"SW_600^2"}, {"FCN_32s^0.1"}},
      {Metric::kTpIou, {"FCN_8s^0.4"}, {"SW_500^4"}, {"FCN_8s^0.4"}},
      {Metric::kSplitPrecision, {"FCN_8s^0.9"}, {"SW_100^4"}, {"FCN_8s^0.9"}},
      {Metric::kSplitRecall, {"FCN_8s^0.1"}, {"SW_500^1"}, {"SW_500^1"}},
      {Metric::kSplitIou, {"FCN_8s^0.4"}, {"SW_500^4"}, {"FCN_8s^0.4"}},
      {Metric::kNa, {"FCN_16s^0.4"}, {"SW_100^4"}, {"FCN_16s^0.4"}},
      {Metric::kNd, {"FCN_16s^0.6"}, {"SW_100^4"}, {"FCN_16s^0.6"}},
  };
  const Selection sel = best_per_metric(rows);
  for (const Marks& m : expected) {
    const MetricWinners& w = sel.winners(m.metric);
    const std::string key(metric_info(m.metric).key);
    EXPECT_EQ(labels_of(rows, w.fcn_best), m.fcn) << key;
    EXPECT_EQ(labels_of(rows, w.sw_best), m.sw) << key;
    EXPECT_EQ(labels_of(rows, w.overall_best), m.overall) << key;
  }
  // Every reference row is there because it wins something.
  EXPECT_EQ(sel.selected().size(), rows.size());
}

TEST(SelectionTest, PermutationInvariant) {
  const std::vector<SweepSummary> rows = reference_table();
  const Selection base = best_per_metric(rows);
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::size_t> perm(rows.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<SweepSummary> shuffled;
    for (std::size_t i : perm) shuffled.push_back(rows[i]);
    const Selection sel = best_per_metric(shuffled);
    for (const MetricInfo& m : table_metrics()) {
      EXPECT_EQ(labels_of(shuffled, sel.winners(m.metric).overall_best),
                labels_of(rows, base.winners(m.metric).overall_best));
      EXPECT_EQ(labels_of(shuffled, sel.winners(m.metric).fcn_best),
                labels_of(rows, base.winners(m.metric).fcn_best));
      EXPECT_EQ(labels_of(shuffled, sel.winners(m.metric).sw_best),
                labels_of(rows, base.winners(m.metric).sw_best));
    }
  }
}

TEST(ScatterTest, HeaderOnlyForEmptyInput) {
  EXPECT_EQ(scatter_data({}, ScatterKind::kDetectionPr), "family,label,x,y,x_std,y_std\n");
}

TEST(ScatterTest, ReferenceRows) {
  const std::vector<SweepSummary> rows = reference_table();
  const std::string csv = scatter_data(rows, ScatterKind::kDetectionPr);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 16);
  EXPECT_NE(csv.find("FCN,FCN_16s^0.6,0.886,0.886,,\n"), std::string::npos);
  const std::string seg = scatter_data(rows, ScatterKind::kSegPrTp);
  EXPECT_NE(seg.find("FCN,FCN_16s^0.6,0.893,0.928,0.102,0.067\n"), std::string::npos);
  EXPECT_NE(seg.find("SW,SW_600^2,0.971,0.543,,\n"), std::string::npos);
  EXPECT_EQ(scatter_kind_from_string("seg-PR-split"), ScatterKind::kSegPrSplit);
}

SweepSummary with_na(double na) {
  SweepSummary s;
  s.fa_area.n = 3;
  s.fa_area.mean = na;
  return s;
}

TEST(HistogramTest, UnitBins) {
  const std::vector<SweepSummary> rows = {with_na(0.5), with_na(1.2), with_na(1.4), with_na(3.3)};
  const HistogramSpec h = histogram(rows, Metric::kNa);
  EXPECT_EQ(h.proportions, (std::vector<double>{0.25, 0.5, 0.0, 0.25}));
  EXPECT_EQ(h.detectors, 4u);
  EXPECT_EQ(histogram_csv(h),
            "bin_start,bin_end,proportion\n0,1,0.25\n1,2,0.5\n2,3,0\n3,4,0.25\n");
}

TEST(HistogramTest, SingleDetector) {
  const std::vector<SweepSummary> rows = {with_na(7.5)};
  const HistogramSpec h = histogram(rows, Metric::kNa);
  ASSERT_EQ(h.proportions.size(), 8u);
  EXPECT_EQ(h.proportions[7], 1.0);
  EXPECT_EQ(std::accumulate(h.proportions.begin(), h.proportions.end(), 0.0), 1.0);
}

TEST(HistogramTest, ReferenceFcnAreasShareTheFirstBar) {
  std::vector<SweepSummary> fcn;
  for (const SweepSummary& s : reference_table()) {
    if (s.spec.family == DetectorFamily::kFcn) fcn.push_back(s);
  }
  const HistogramSpec h = histogram(fcn, Metric::kNa);
  EXPECT_EQ(h.proportions, (std::vector<double>{1.0}));
  try {
    (void)histogram(fcn, Metric::kPd);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidParameter);
  }
}

TEST(ReportTest, MarkdownRowFormatting) {
  const std::vector<SweepSummary> rows = reference_table();
  const std::string md = render_markdown(rows, best_per_metric(rows));
  EXPECT_EQ(md, render_markdown(rows, best_per_metric(rows)));
  EXPECT_NE(md.find("| FCN_16s^0.6 | <u>**88.6**</u> | 88.6 | <u>**88.6**</u> | 10 | 92.8(6.7) |"),
            std::string::npos)
      << md;
  EXPECT_NE(md.find("| SW_700^3 | **2.5** |"), std::string::npos);
  EXPECT_NE(md.find("<u>**1.10(0.65)**</u>"), std::string::npos);
  EXPECT_NE(md.find("54.3(--)"), std::string::npos);
}

TEST(ReportTest, JsonRoundTrip) {
  const std::vector<SweepSummary> rows = reference_table();
  for (const SweepSummary& s : rows) {
    const SweepSummary back = summary_from_json(to_json(s));
    EXPECT_EQ(to_json(back).dump(), to_json(s).dump());
  }
}

}  // namespace
}  // namespace vinemark
