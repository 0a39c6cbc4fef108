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

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "vinemark/format.hpp"
#include "vinemark/image_io.hpp"

namespace vinemark {

std::string_view to_string(DetectorFamily family) {
  return family == DetectorFamily::kFcn ? "FCN" : "SW";
}

DetectorFamily family_from_string(std::string_view name) {
  if (name == "FCN" || name == "fcn") return DetectorFamily::kFcn;
  if (name == "SW" || name == "sw") return DetectorFamily::kSw;
  throw Error(ErrorCode::kInvalidParameter, "unknown detector family: " + std::string(name));
}

void DetectorSpec::validate() const {
  MatchConfig{alpha}.validate();
  if (family == DetectorFamily::kFcn) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
      throw Error(ErrorCode::kInvalidParameter, "FCN threshold tau must lie in [0, 1]");
    }
  } else {
    if (threshold != std::round(threshold) || threshold < 1.0 || threshold > 4.0) {
      throw Error(ErrorCode::kInvalidParameter, "SW threshold nu must be one of 1..4");
    }
    (void)window_size();
  }
}

int DetectorSpec::window_size() const {
  int size = 0;
  const auto [ptr, ec] =
      std::from_chars(variant.data(), variant.data() + variant.size(), size);
  if (ec != std::errc() || ptr != variant.data() + variant.size() || size < 1) {
    throw Error(ErrorCode::kInvalidParameter,
                "SW variant must be a window size in pixels, got '" + variant + "'");
  }
  return size;
}

std::string DetectorSpec::label() const {
  if (family == DetectorFamily::kFcn) return "FCN_" + variant + "^" + shortest(threshold);
  return "SW_" + variant + "^" + std::to_string(static_cast<int>(threshold));
}

void Pool::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void Pool::merge(const Pool& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double delta = other.mean_ - mean_;
  const double total = na + nb;
  mean_ += delta * nb / total;
  m2_ += other.m2_ + delta * delta * na * nb / total;
  n_ += other.n_;
}

std::optional<double> Pool::mean() const {
  if (n_ == 0) return std::nullopt;
  return mean_;
}

std::optional<double> Pool::stddev() const {
  if (n_ < 2) return std::nullopt;
  return std::sqrt(std::max(0.0, m2_ / static_cast<double>(n_ - 1)));
}

Stat Stat::from(const Pool& pool) { return {pool.size(), pool.mean(), pool.stddev()}; }

SweepSummary summarize(const DetectorSpec& spec, std::span<const ImageEvaluation> evals) {
  SweepSummary s;
  s.spec = spec;
  s.counts = detection_counts(evals);
  Pool tp_p, tp_r, tp_iou, tp_nd, sp_p, sp_r, sp_iou, sp_nd, fa_na, fa_nd;
  for (const ImageEvaluation& eval : evals) {
    if (eval.alpha != spec.alpha) {
      throw Error(ErrorCode::kInconsistentConfig,
                  "evaluation alpha differs from the detector's alpha");
    }
    bool has_split = false;
    for (const ComponentVerdict& v : eval.verdicts) {
      switch (v.kind) {
        case VerdictKind::kTruePositive:
          tp_p.add(v.seg_precision);
          tp_r.add(v.seg_recall);
          tp_iou.add(v.iou);
          tp_nd.add(v.normalized_distance);
          break;
        case VerdictKind::kSplit:
          has_split = true;
          sp_p.add(v.seg_precision);
          sp_r.add(v.seg_recall);
          sp_iou.add(v.iou);
          sp_nd.add(v.normalized_distance);
          break;
        case VerdictKind::kFalseAlarm:
          fa_na.add(v.normalized_area);
          fa_nd.add(v.normalized_distance);
          break;
      }
    }
    if (has_split) ++s.images_with_splits;
  }
  s.tp_precision = Stat::from(tp_p);
  s.tp_recall = Stat::from(tp_r);
  s.tp_iou = Stat::from(tp_iou);
  s.tp_distance = Stat::from(tp_nd);
  s.split_precision = Stat::from(sp_p);
  s.split_recall = Stat::from(sp_r);
  s.split_iou = Stat::from(sp_iou);
  s.split_distance = Stat::from(sp_nd);
  s.fa_area = Stat::from(fa_na);
  s.fa_distance = Stat::from(fa_nd);
  s.split_count = sp_p.size();
  s.fa_count = fa_na.size();
  s.images_evaluated = evals.size();
  return s;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open manifest " + path.string());
  const std::filesystem::path base = path.parent_path();
  auto resolve = [&base](const std::string& p) -> std::filesystem::path {
    if (p == kOraclePrediction) return p;
    const std::filesystem::path candidate(p);
    return candidate.is_absolute() ? candidate : base / candidate;
  };

  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kFormat, path.string() + ": empty manifest");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "image_id,prediction_path,truth_path") {
    throw Error(ErrorCode::kFormat,
                path.string() + ": expected header image_id,prediction_path,truth_path");
  }
  std::vector<ManifestEntry> entries;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string field; std::getline(ss, field, ',');) fields.push_back(field);
    if (fields.size() != 3 || fields[0].empty()) {
      throw Error(ErrorCode::kFormat,
                  path.string() + ":" + std::to_string(line_no) + ": expected 3 fields");
    }
    entries.push_back({fields[0], resolve(fields[1]), resolve(fields[2])});
  }
  return entries;
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

ImageError image_error(const std::string& id, const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    return {id, std::string(to_string(err->code())), err->what()};
  }
  return {id, "internal", e.what()};
}

}  // namespace

std::vector<LoadedImage> load_dataset(std::span<const ManifestEntry> entries,
                                      DetectorFamily family,
                                      const EvaluationOptions& options) {
  std::vector<LoadedImage> images(entries.size());
  parallel_for(entries.size(), options.jobs, [&](std::size_t i) {
    const ManifestEntry& entry = entries[i];
    LoadedImage& image = images[i];
    image.image_id = entry.image_id;
    try {
      image.truth = make_ground_truth(read_mask(entry.truth));
      const auto rows = image.truth->mask.rows();
      const auto cols = image.truth->mask.cols();
      if (family == DetectorFamily::kFcn) {
        ProbabilityMap map = read_probability_map(entry.prediction);
        validate_probability_map(map);
        if (map.rows() != rows || map.cols() != cols) {
          throw Error(ErrorCode::kInconsistentInput,
                      "prediction and truth dimensions differ");
        }
        image.prediction = std::move(map);
      } else if (entry.prediction == kOraclePrediction) {
        image.classifier = std::make_shared<TruthOracleClassifier>(image.truth->mask,
                                                                   options.oracle_fraction);
      } else {
        image.labels = std::make_shared<CsvPatchClassifier>(
            CsvPatchClassifier::from_file(entry.prediction));
        image.classifier = image.labels;
      }
    } catch (const std::exception& e) {
      image.error = image_error(entry.image_id, e);
    }
  });
  return images;
}

ImageEvaluation evaluate_mask(const BinaryMask& detection, const GroundTruth& truth,
                              const MatchConfig& config, Connectivity connectivity,
                              std::string image_id) {
  if (detection.rows() != truth.mask.rows() || detection.cols() != truth.mask.cols()) {
    throw Error(ErrorCode::kInconsistentInput, "detection and truth dimensions differ");
  }
  const std::vector<Component> components = connected_components(detection, connectivity);
  return classify_components(components, truth, config, std::move(image_id));
}

BinaryMask detector_mask(const DetectorSpec& spec, const LoadedImage& image) {
  if (image.error || !image.truth) {
    throw Error(ErrorCode::kInconsistentInput, "image " + image.image_id + " failed to load");
  }
  if (spec.family == DetectorFamily::kFcn) {
    if (!image.prediction) {
      throw Error(ErrorCode::kInconsistentInput, "FCN detector needs a probability map");
    }
    return binarize(*image.prediction, spec.threshold);
  }
  if (!image.classifier) {
    throw Error(ErrorCode::kInconsistentInput, "SW detector needs patch labels");
  }
  const auto rows = static_cast<int>(image.truth->mask.rows());
  const auto cols = static_cast<int>(image.truth->mask.cols());
  const PatchGrid grid = build_grid(cols, rows, spec.window_size());
  // The shipped classifiers label patches from coordinates alone.
  const ProbabilityMap blank = ProbabilityMap::Zero(rows, cols);
  return threshold_votes(vote(grid, *image.classifier, blank),
                         static_cast<int>(spec.threshold));
}

DetectorRun evaluate_detector(const DetectorSpec& spec, std::span<const LoadedImage> dataset,
                              const EvaluationOptions& options) {
  spec.validate();
  const MatchConfig config{spec.alpha};
  std::vector<std::optional<ImageEvaluation>> evals(dataset.size());
  std::vector<std::optional<ImageError>> errors(dataset.size());
  parallel_for(dataset.size(), options.jobs, [&](std::size_t i) {
    const LoadedImage& image = dataset[i];
    if (image.error) {
      errors[i] = image.error;
      return;
    }
    try {
      evals[i] = evaluate_mask(detector_mask(spec, image), *image.truth, config,
                               options.connectivity, image.image_id);
    } catch (const std::exception& e) {
      errors[i] = image_error(image.image_id, e);
    }
  });

  DetectorRun run;
  for (auto& e : evals) {
    if (e) run.images.push_back(std::move(*e));
  }
  run.summary = summarize(spec, run.images);
  for (auto& e : errors) {
    if (e) run.summary.errors.push_back(std::move(*e));
  }
  return run;
}

// --- selection ---------------------------------------------------------------

namespace {

// S and the false-alarm NA/ND are better when smaller.
constexpr MetricInfo kMetrics[] = {
    {Metric::kPd, "p_d", "P_D", true},
    {Metric::kRd, "r_d", "R_D", true},
    {Metric::kF1, "f1", "F1", true},
    {Metric::kSplits, "s", "S", false},
    {Metric::kTpPrecision, "p_s_tp", "P_S^TP", true},
    {Metric::kTpRecall, "r_s_tp", "R_S^TP", true},
    {Metric::kTpIou, "iou_tp", "IoU^TP", true},
    {Metric::kSplitPrecision, "p_s_s", "P_S^S", true},
    {Metric::kSplitRecall, "r_s_s", "R_S^S", true},
    {Metric::kSplitIou, "iou_s", "IoU^S", true},
    {Metric::kNa, "na", "NA", false},
    {Metric::kNd, "nd", "ND", false},
};

}  // namespace

std::span<const MetricInfo> table_metrics() { return kMetrics; }

const MetricInfo& metric_info(Metric metric) {
  for (const MetricInfo& info : kMetrics) {
    if (info.metric == metric) return info;
  }
  throw Error(ErrorCode::kInvalidParameter, "unknown metric");
}

std::optional<double> metric_value(const SweepSummary& s, Metric metric) {
  switch (metric) {
    case Metric::kPd: return s.counts.p_d;
    case Metric::kRd: return s.counts.r_d;
    case Metric::kF1: return s.counts.f1;
    case Metric::kSplits: return static_cast<double>(s.images_with_splits);
    case Metric::kTpPrecision: return s.tp_precision.mean;
    case Metric::kTpRecall: return s.tp_recall.mean;
    case Metric::kTpIou: return s.tp_iou.mean;
    case Metric::kSplitPrecision: return s.split_precision.mean;
    case Metric::kSplitRecall: return s.split_recall.mean;
    case Metric::kSplitIou: return s.split_iou.mean;
    case Metric::kNa: return s.fa_area.mean;
    case Metric::kNd: return s.fa_distance.mean;
  }
  return std::nullopt;
}

double display_value(Metric metric, double value) {
  switch (metric) {
    case Metric::kSplits: return std::round(value);
    case Metric::kNa:
    case Metric::kNd: return std::round(value * 100.0) / 100.0;
    default: return std::round(value * 1000.0) / 10.0;
  }
}

const MetricWinners& Selection::winners(Metric metric) const {
  for (const MetricWinners& w : metrics) {
    if (w.metric == metric) return w;
  }
  throw Error(ErrorCode::kInvalidParameter, "metric missing from selection");
}

namespace {

bool contains(const std::vector<std::size_t>& v, std::size_t i) {
  return std::find(v.begin(), v.end(), i) != v.end();
}

}  // namespace

bool Selection::family_best(std::size_t index, Metric metric) const {
  const MetricWinners& w = winners(metric);
  return contains(w.fcn_best, index) || contains(w.sw_best, index);
}

bool Selection::overall_best(std::size_t index, Metric metric) const {
  return contains(winners(metric).overall_best, index);
}

std::vector<std::size_t> Selection::selected() const {
  std::vector<std::size_t> out;
  for (const MetricWinners& w : metrics) {
    out.insert(out.end(), w.fcn_best.begin(), w.fcn_best.end());
    out.insert(out.end(), w.sw_best.begin(), w.sw_best.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Selection best_per_metric(std::span<const SweepSummary> summaries) {
  if (summaries.empty()) {
    throw Error(ErrorCode::kInvalidParameter, "no detector summaries to select from");
  }
  Selection selection;
  for (const MetricInfo& info : kMetrics) {
    MetricWinners w{info.metric, {}, {}, {}};
    auto best_among = [&](auto&& include) {
      std::optional<double> best;
      for (std::size_t i = 0; i < summaries.size(); ++i) {
        if (!include(summaries[i])) continue;
        const auto v = metric_value(summaries[i], info.metric);
        if (!v) continue;
        const double d = display_value(info.metric, *v);
        if (!best || (info.higher_is_better ? d > *best : d < *best)) best = d;
      }
      std::vector<std::size_t> winners;
      if (!best) return winners;
      for (std::size_t i = 0; i < summaries.size(); ++i) {
        if (!include(summaries[i])) continue;
        const auto v = metric_value(summaries[i], info.metric);
        if (v && display_value(info.metric, *v) == *best) winners.push_back(i);
      }
      return winners;
    };
    w.fcn_best = best_among(
        [](const SweepSummary& s) { return s.spec.family == DetectorFamily::kFcn; });
    w.sw_best =
        best_among([](const SweepSummary& s) { return s.spec.family == DetectorFamily::kSw; });
    w.overall_best = best_among([](const SweepSummary&) { return true; });
    selection.metrics.push_back(std::move(w));
  }
  return selection;
}

ScatterKind scatter_kind_from_string(std::string_view name) {
  if (name == "detection-PR") return ScatterKind::kDetectionPr;
  if (name == "seg-PR-TP") return ScatterKind::kSegPrTp;
  if (name == "seg-PR-split") return ScatterKind::kSegPrSplit;
  throw Error(ErrorCode::kInvalidParameter, "unknown scatter kind: " + std::string(name));
}

std::string scatter_data(std::span<const SweepSummary> summaries, ScatterKind which) {
  auto cell = [](const std::optional<double>& v) { return v ? shortest(*v) : std::string(); };
  std::string out = "family,label,x,y,x_std,y_std\n";
  for (const SweepSummary& s : summaries) {
    std::optional<double> x, y, x_std, y_std;
    switch (which) {
      case ScatterKind::kDetectionPr:
        x = s.counts.r_d;
        y = s.counts.p_d;
        break;
      case ScatterKind::kSegPrTp:
        x = s.tp_recall.mean;
        y = s.tp_precision.mean;
        x_std = s.tp_recall.std;
        y_std = s.tp_precision.std;
        break;
      case ScatterKind::kSegPrSplit:
        x = s.split_recall.mean;
        y = s.split_precision.mean;
        x_std = s.split_recall.std;
        y_std = s.split_precision.std;
        break;
    }
    out += std::string(to_string(s.spec.family)) + "," + s.spec.label() + "," + cell(x) +
           "," + cell(y) + "," + cell(x_std) + "," + cell(y_std) + "\n";
  }
  return out;
}

HistogramSpec histogram(std::span<const SweepSummary> summaries, Metric metric) {
  if (metric != Metric::kNa && metric != Metric::kNd) {
    throw Error(ErrorCode::kInvalidParameter, "histograms are defined for NA and ND only");
  }
  std::vector<std::size_t> counts;
  HistogramSpec h;
  for (const SweepSummary& s : summaries) {
    const auto mean = metric_value(s, metric);
    if (!mean) continue;
    const auto bin = static_cast<std::size_t>(std::floor(*mean / h.bin_width));
    if (bin >= counts.size()) counts.resize(bin + 1, 0);
    ++counts[bin];
    ++h.detectors;
  }
  for (std::size_t c : counts) {
    h.proportions.push_back(static_cast<double>(c) / static_cast<double>(h.detectors));
  }
  return h;
}

std::string histogram_csv(const HistogramSpec& histogram) {
  std::string out = "bin_start,bin_end,proportion\n";
  for (std::size_t k = 0; k < histogram.proportions.size(); ++k) {
    const double lo = static_cast<double>(k) * histogram.bin_width;
    out += shortest(lo) + "," + shortest(lo + histogram.bin_width) + "," +
           shortest(histogram.proportions[k]) + "\n";
  }
  return out;
}

}  // namespace vinemark
