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
#ifndef VINEMARK_HARNESS_HPP
#define VINEMARK_HARNESS_HPP

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vinemark/metrics.hpp"
#include "vinemark/raster.hpp"
#include "vinemark/swdetect.hpp"

namespace vinemark {

enum class DetectorFamily { kFcn, kSw };

std::string_view to_string(DetectorFamily family);
DetectorFamily family_from_string(std::string_view name);

/// One point of a hyper-parameter sweep. For FCN the threshold is the
/// binarization level tau in [0, 1] and the variant an architecture label;
/// for SW it is the vote threshold nu in 1..4 and the variant the window
/// size in pixels.
struct DetectorSpec {
  DetectorFamily family = DetectorFamily::kFcn;
  std::string variant;
  double threshold = 0.5;
  double alpha = 0.5;

  void validate() const;
  int window_size() const;  // SW only
  /// "FCN_16s^0.6", "SW_700^3".
  std::string label() const;
};

/// Accumulates a sample pool with Welford's update; merge() is Chan's
/// parallel combination, so a pool built from concatenated sub-pools agrees
/// with the count-weighted mean of their means.
class Pool {
 public:
  void add(double x);
  void merge(const Pool& other);

  std::size_t size() const { return n_; }
  std::optional<double> mean() const;
  /// Sample standard deviation (n - 1); undefined below two samples.
  std::optional<double> stddev() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// A pooled statistic as reported: sample count, mean, sample std.
struct Stat {
  std::size_t n = 0;
  std::optional<double> mean;
  std::optional<double> std;

  static Stat from(const Pool& pool);
};

struct ImageError {
  std::string image_id;
  std::string code;
  std::string message;
};

/// Pooled statistics of one detector over a dataset. All component
/// statistics pool components across images rather than averaging
/// per-image values.
struct SweepSummary {
  DetectorSpec spec;
  DetectionCounts counts;
  Stat tp_precision;
  Stat tp_recall;
  Stat tp_iou;
  Stat tp_distance;
  Stat split_precision;
  Stat split_recall;
  Stat split_iou;
  Stat split_distance;
  Stat fa_area;
  Stat fa_distance;
  std::size_t split_count = 0;
  std::size_t fa_count = 0;
  std::size_t images_with_splits = 0;
  std::size_t images_evaluated = 0;
  std::vector<ImageError> errors;
};

SweepSummary summarize(const DetectorSpec& spec, std::span<const ImageEvaluation> evals);

// --- dataset -------------------------------------------------------------

/// A manifest row. Paths are resolved against the manifest's directory.
/// For SW datasets `prediction` names a patch-label CSV, or the literal
/// "@oracle" to label patches from the truth mask.
struct ManifestEntry {
  std::string image_id;
  std::filesystem::path prediction;
  std::filesystem::path truth;
};

inline constexpr std::string_view kOraclePrediction = "@oracle";

/// CSV with header `image_id,prediction_path,truth_path`.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

/// A manifest row after decoding. `error` is set (and the image excluded from
/// evaluation) when any file failed to load or validate.
struct LoadedImage {
  std::string image_id;
  std::optional<GroundTruth> truth;
  std::optional<ProbabilityMap> prediction;             // FCN
  std::shared_ptr<const PatchClassifier> classifier;    // SW
  std::shared_ptr<const CsvPatchClassifier> labels;     // SW, file-backed
  std::optional<ImageError> error;
};

struct EvaluationOptions {
  Connectivity connectivity = Connectivity::kEight;
  int jobs = 1;
  double oracle_fraction = TruthOracleClassifier::kDefaultMinFraction;
};

std::vector<LoadedImage> load_dataset(std::span<const ManifestEntry> entries,
                                      DetectorFamily family,
                                      const EvaluationOptions& options);

/// Connected components of `detection` classified against the truth.
ImageEvaluation evaluate_mask(const BinaryMask& detection, const GroundTruth& truth,
                              const MatchConfig& config, Connectivity connectivity,
                              std::string image_id = {});

/// The detector's binary output for one loaded image.
BinaryMask detector_mask(const DetectorSpec& spec, const LoadedImage& image);

struct DetectorRun {
  SweepSummary summary;
  std::vector<ImageEvaluation> images;
};

/// Evaluates every loadable image; failed images land in summary.errors.
DetectorRun evaluate_detector(const DetectorSpec& spec,
                              std::span<const LoadedImage> dataset,
                              const EvaluationOptions& options);

/// Runs fn(0..count-1) on up to `jobs` threads.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

// --- selection and figure data ---------------------------------------------

/// Table columns, in table order.
enum class Metric {
  kPd,
  kRd,
  kF1,
  kSplits,
  kTpPrecision,
  kTpRecall,
  kTpIou,
  kSplitPrecision,
  kSplitRecall,
  kSplitIou,
  kNa,
  kNd,
};

struct MetricInfo {
  Metric metric;
  std::string_view key;     // JSON key
  std::string_view header;  // table header
  bool higher_is_better;
};

std::span<const MetricInfo> table_metrics();
const MetricInfo& metric_info(Metric metric);

/// The value a table cell shows; nullopt when undefined. S is the number of
/// images with splits.
std::optional<double> metric_value(const SweepSummary& summary, Metric metric);

/// The value rounded as printed: percentages to one decimal, NA and ND to
/// two decimals, S as an integer. Winners are chosen on these values.
double display_value(Metric metric, double value);

struct MetricWinners {
  Metric metric;
  // Indices into the input list; every tied detector is listed.
  std::vector<std::size_t> fcn_best;
  std::vector<std::size_t> sw_best;
  std::vector<std::size_t> overall_best;
};

struct Selection {
  std::vector<MetricWinners> metrics;  // table order

  const MetricWinners& winners(Metric metric) const;
  bool family_best(std::size_t index, Metric metric) const;
  bool overall_best(std::size_t index, Metric metric) const;
  /// Detectors that win at least one metric within their family.
  std::vector<std::size_t> selected() const;
};

Selection best_per_metric(std::span<const SweepSummary> summaries);

enum class ScatterKind { kDetectionPr, kSegPrTp, kSegPrSplit };

ScatterKind scatter_kind_from_string(std::string_view name);

/// CSV `family,label,x,y,x_std,y_std`: x is recall and y precision.
/// Standard deviations are filled for segmentation plots only; undefined
/// values are left empty.
std::string scatter_data(std::span<const SweepSummary> summaries, ScatterKind which);

struct HistogramSpec {
  double bin_width = 1.0;
  // proportions[k] covers [k, k + 1); trailing empty bins are dropped.
  std::vector<double> proportions;
  std::size_t detectors = 0;  // detectors with a defined mean
};

/// Unit-bin histogram of per-detector mean NA or ND (false alarms).
HistogramSpec histogram(std::span<const SweepSummary> summaries, Metric metric);

std::string histogram_csv(const HistogramSpec& histogram);

}  // namespace vinemark

#endif  // VINEMARK_HARNESS_HPP
