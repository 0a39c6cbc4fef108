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
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vinemark/agrovars.hpp"
#include "vinemark/error.hpp"
#include "vinemark/format.hpp"
#include "vinemark/harness.hpp"
#include "vinemark/image_io.hpp"
#include "vinemark/metrics.hpp"
#include "vinemark/report.hpp"
#include "vinemark/swdetect.hpp"
#include "vinemark/synth.hpp"

namespace fs = std::filesystem;
using namespace vinemark;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitPartial = 2;

struct Common {
  int connectivity = 8;
  int jobs = 1;
  std::string format = "json";
  std::string out;
};

void add_jobs(CLI::App* cmd, Common& common) {
  cmd->add_option("--jobs", common.jobs, "Worker threads")
      ->envname("VINEMARK_JOBS")
      ->check(CLI::PositiveNumber);
}

void add_connectivity(CLI::App* cmd, Common& common) {
  cmd->add_option("--connectivity", common.connectivity, "Component connectivity")
      ->check(CLI::IsMember({4, 8}));
}

void add_format(CLI::App* cmd, Common& common, std::vector<std::string> allowed,
                std::string fallback) {
  common.format = std::move(fallback);
  cmd->add_option("--format", common.format, "Output format")
      ->check(CLI::IsMember(std::move(allowed)));
  cmd->add_option("--out", common.out, "Output file (default: stdout)");
}

void emit(const Common& common, const std::string& text) {
  if (common.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(common.out, std::ios::binary);
  if (!file) throw Error(ErrorCode::kIo, "cannot write " + common.out);
  file << text;
}

std::string dump(const Json& json) { return json.dump(2) + "\n"; }

EvaluationOptions options_from(const Common& common) {
  EvaluationOptions options;
  options.connectivity = connectivity_from_int(common.connectivity);
  options.jobs = common.jobs;
  return options;
}

void warn_missing_labels(std::span<const LoadedImage> images) {
  for (const LoadedImage& image : images) {
    if (image.labels && image.labels->missing_count() > 0) {
      std::cerr << "warning: " << image.image_id << ": " << image.labels->missing_count()
                << " patch lookups missing from the label file, treated as negative\n";
    }
  }
}

void warn_errors(const SweepSummary& summary) {
  for (const ImageError& e : summary.errors) {
    std::cerr << "warning: " << summary.spec.label() << ": " << e.image_id << ": " << e.code
              << ": " << e.message << "\n";
  }
}

// ---- eval

struct EvalArgs {
  Common common;
  std::string manifest;
  std::string family = "FCN";
  std::string variant;
  double tau = 0.5;
  int nu = 3;
  int size = 0;
  double alpha = 0.5;
  double oracle_fraction = TruthOracleClassifier::kDefaultMinFraction;
};

int run_eval(const EvalArgs& args) {
  DetectorSpec spec;
  spec.family = family_from_string(args.family);
  spec.alpha = args.alpha;
  Json config;
  config["command"] = "eval";
  config["manifest"] = args.manifest;
  config["family"] = to_string(spec.family);
  if (spec.family == DetectorFamily::kFcn) {
    spec.variant = args.variant.empty() ? "model" : args.variant;
    spec.threshold = args.tau;
    config["variant"] = spec.variant;
    config["tau"] = args.tau;
  } else {
    if (args.size < 1) throw Error(ErrorCode::kInvalidParameter, "SW evaluation needs --size");
    spec.variant = std::to_string(args.size);
    spec.threshold = args.nu;
    config["size"] = args.size;
    config["nu"] = args.nu;
    config["oracle_fraction"] = args.oracle_fraction;
  }
  config["alpha"] = args.alpha;
  config["connectivity"] = args.common.connectivity;
  spec.validate();

  EvaluationOptions options = options_from(args.common);
  options.oracle_fraction = args.oracle_fraction;
  const std::vector<ManifestEntry> entries = read_manifest(args.manifest);
  const std::vector<LoadedImage> images = load_dataset(entries, spec.family, options);
  const DetectorRun run = evaluate_detector(spec, images, options);
  warn_missing_labels(images);
  warn_errors(run.summary);

  const std::vector<SweepSummary> rows = {run.summary};
  if (args.common.format == "json") {
    Json report;
    report["config"] = config;
    report["summary"] = to_json(run.summary);
    Json per_image = Json::array();
    for (const ImageEvaluation& e : run.images) per_image.push_back(to_json(e));
    report["images"] = per_image;
    emit(args.common, dump(report));
  } else if (args.common.format == "markdown") {
    emit(args.common, render_markdown(rows, best_per_metric(rows)));
  } else {
    emit(args.common, render_table_csv(rows));
  }
  return run.summary.errors.empty() ? kExitOk : kExitPartial;
}

// ---- sweep

struct SweepArgs {
  Common common;
  std::vector<std::string> fcn;
  std::vector<std::string> sw;
  std::vector<double> taus = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<int> nus = {1, 2, 3, 4};
  std::vector<int> sizes = {100, 200, 300, 400, 500, 600, 700, 800, 900, 1000};
  std::vector<double> alphas = {0.5};
  double oracle_fraction = TruthOracleClassifier::kDefaultMinFraction;
};

int run_sweep(const SweepArgs& args) {
  if (args.fcn.empty() && args.sw.empty()) {
    throw Error(ErrorCode::kInvalidParameter, "sweep needs at least one --fcn or --sw dataset");
  }
  EvaluationOptions options = options_from(args.common);
  options.oracle_fraction = args.oracle_fraction;

  struct Job {
    DetectorSpec spec;
    std::size_t dataset;
  };
  std::vector<std::vector<LoadedImage>> datasets;
  std::vector<Job> jobs;
  Json config;
  config["command"] = "sweep";
  Json sources = Json::array();

  for (const std::string& item : args.fcn) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
      throw Error(ErrorCode::kInvalidParameter, "--fcn expects VARIANT=MANIFEST, got '" + item + "'");
    }
    const std::string variant = item.substr(0, eq);
    const std::string manifest = item.substr(eq + 1);
    datasets.push_back(load_dataset(read_manifest(manifest), DetectorFamily::kFcn, options));
    sources.push_back({{"family", "FCN"}, {"variant", variant}, {"manifest", manifest}});
    for (double alpha : args.alphas) {
      for (double tau : args.taus) {
        jobs.push_back({{DetectorFamily::kFcn, variant, tau, alpha}, datasets.size() - 1});
      }
    }
  }
  for (const std::string& manifest : args.sw) {
    datasets.push_back(load_dataset(read_manifest(manifest), DetectorFamily::kSw, options));
    sources.push_back({{"family", "SW"}, {"manifest", manifest}});
    for (double alpha : args.alphas) {
      for (int size : args.sizes) {
        for (int nu : args.nus) {
          jobs.push_back({{DetectorFamily::kSw, std::to_string(size), static_cast<double>(nu), alpha},
                          datasets.size() - 1});
        }
      }
    }
  }
  if (jobs.empty()) throw Error(ErrorCode::kInvalidParameter, "empty hyper-parameter grid");
  for (const Job& job : jobs) job.spec.validate();

  config["datasets"] = sources;
  config["tau"] = args.taus;
  config["nu"] = args.nus;
  config["size"] = args.sizes;
  config["alpha"] = args.alphas;
  config["connectivity"] = args.common.connectivity;

  // Detectors run in parallel; images inside one detector run serially.
  std::vector<SweepSummary> summaries(jobs.size());
  EvaluationOptions inner = options;
  inner.jobs = 1;
  parallel_for(jobs.size(), args.common.jobs, [&](std::size_t i) {
    summaries[i] = evaluate_detector(jobs[i].spec, datasets[jobs[i].dataset], inner).summary;
  });
  for (const auto& images : datasets) warn_missing_labels(images);
  bool partial = false;
  for (const SweepSummary& s : summaries) {
    warn_errors(s);
    partial = partial || !s.errors.empty();
  }

  // Winners are only comparable at a common alpha.
  std::vector<std::pair<double, std::vector<SweepSummary>>> groups;
  for (double alpha : args.alphas) {
    std::vector<SweepSummary> group;
    for (const SweepSummary& s : summaries) {
      if (s.spec.alpha == alpha) group.push_back(s);
    }
    groups.push_back({alpha, std::move(group)});
  }

  std::string text;
  if (args.common.format == "json") {
    Json report;
    report["config"] = config;
    Json rows = Json::array();
    for (const SweepSummary& s : summaries) rows.push_back(to_json(s));
    report["summaries"] = rows;
    Json selections = Json::array();
    for (const auto& [alpha, group] : groups) {
      selections.push_back({{"alpha", alpha}, {"best", to_json(best_per_metric(group), group)}});
    }
    report["selection"] = selections;
    text = dump(report);
  } else if (args.common.format == "markdown") {
    for (const auto& [alpha, group] : groups) {
      if (groups.size() > 1) text += "### alpha = " + shortest(alpha) + "\n\n";
      text += render_markdown(group, best_per_metric(group));
      if (groups.size() > 1) text += "\n";
    }
  } else {
    text = render_table_csv(summaries);
  }
  emit(args.common, text);
  return partial ? kExitPartial : kExitOk;
}

// ---- sw

struct SwArgs {
  Common common;
  std::string image;
  std::string labels;
  std::string oracle;
  double oracle_fraction = TruthOracleClassifier::kDefaultMinFraction;
  int size = 0;
  int nu = 3;
  std::string votes_out;
};

int run_sw(const SwArgs& args) {
  if (args.labels.empty() == args.oracle.empty()) {
    throw Error(ErrorCode::kInvalidParameter, "give exactly one of --labels or --oracle");
  }
  if (args.common.out.empty()) throw Error(ErrorCode::kInvalidParameter, "sw needs --out");
  std::unique_ptr<PatchClassifier> classifier;
  const CsvPatchClassifier* csv = nullptr;
  ProbabilityMap image;
  if (!args.oracle.empty()) {
    const BinaryMask truth = read_mask(args.oracle);
    image = args.image.empty() ? ProbabilityMap::Zero(truth.rows(), truth.cols())
                               : read_probability_map(args.image);
    if (image.rows() != truth.rows() || image.cols() != truth.cols()) {
      throw Error(ErrorCode::kInconsistentInput, "image and truth dimensions differ");
    }
    classifier = std::make_unique<TruthOracleClassifier>(truth, args.oracle_fraction);
  } else {
    if (args.image.empty()) throw Error(ErrorCode::kInvalidParameter, "--labels needs --image");
    image = read_probability_map(args.image);
    auto owned = std::make_unique<CsvPatchClassifier>(CsvPatchClassifier::from_file(args.labels));
    csv = owned.get();
    classifier = std::move(owned);
  }
  const PatchGrid grid =
      build_grid(static_cast<int>(image.cols()), static_cast<int>(image.rows()), args.size);
  const VoteMap votes = vote(grid, *classifier, image);
  const BinaryMask mask = threshold_votes(votes, args.nu);
  write_mask(args.common.out, mask);
  if (!args.votes_out.empty()) write_votes(args.votes_out, votes);
  const std::size_t missing = csv ? csv->missing_count() : 0;
  if (missing > 0) {
    std::cerr << "warning: " << missing
              << " patches missing from the label file, treated as negative\n";
  }

  std::size_t positive = 0;
  for (const Patch& p : grid.patches) positive += classifier->classify(p, image);
  Json info;
  info["width"] = grid.width;
  info["height"] = grid.height;
  info["size"] = grid.window_size;
  info["stride"] = grid.stride;
  info["nu"] = args.nu;
  info["patches"] = grid.patches.size();
  info["positive_patches"] = positive;
  info["mask_pixels"] = mask.count();
  info["missing_labels"] = missing;
  std::cout << dump(info);
  return kExitOk;
}

// ---- synth

struct SynthArgs {
  Common common;
  std::string dir;
  int count = 20;
  std::uint64_t seed = 0;
  int max_dim = 64;
  int min_dim = 24;
  double alpha = 0.5;
};

std::string image_name(int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "synth_%04d", i);
  return buf;
}

int run_synth(const SynthArgs& args) {
  MatchConfig{args.alpha}.validate();
  if (args.count < 1) throw Error(ErrorCode::kInvalidParameter, "--count must be positive");
  const fs::path dir(args.dir);
  fs::create_directories(dir);
  std::vector<SyntheticCase> cases(static_cast<std::size_t>(args.count));
  parallel_for(cases.size(), args.common.jobs, [&](std::size_t i) {
    cases[i] = random_case(args.seed + i, args.max_dim, args.min_dim);
  });

  std::ostringstream fcn, sw;
  fcn << "image_id,prediction_path,truth_path\n";
  sw << "image_id,prediction_path,truth_path\n";
  std::vector<ImageEvaluation> evals;
  Json images = Json::array();
  const bool oracle_ok = args.max_dim <= kOracleMaxDim;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const SyntheticCase& c = cases[i];
    const std::string id = image_name(static_cast<int>(i));
    write_mask(dir / (id + "_truth.pgm"), c.truth.mask);
    write_probability_map(dir / (id + "_pred.pgm"), soft_prediction(c.detection.mask, c.seed));
    fcn << id << "," << id << "_pred.pgm," << id << "_truth.pgm\n";
    sw << id << "," << kOraclePrediction << "," << id << "_truth.pgm\n";
    Json entry;
    entry["image_id"] = id;
    entry["seed"] = c.seed;
    entry["width"] = c.scene.width;
    entry["height"] = c.scene.height;
    if (oracle_ok) {
      // Components as the evaluator will see them after thresholding at 0.5.
      const auto comps = connected_components(c.detection.mask, connectivity_from_int(args.common.connectivity));
      ImageEvaluation e = oracle_metrics(comps, c.truth, args.alpha);
      e.image_id = id;
      entry["evaluation"] = to_json(e);
      evals.push_back(std::move(e));
    }
    images.push_back(entry);
  }
  std::ofstream(dir / "manifest.csv", std::ios::binary) << fcn.str();
  std::ofstream(dir / "manifest_sw.csv", std::ios::binary) << sw.str();

  Json sidecar;
  sidecar["generator"] = {{"seed", args.seed},
                          {"count", args.count},
                          {"min_dim", args.min_dim},
                          {"max_dim", args.max_dim}};
  sidecar["tau"] = 0.5;
  sidecar["alpha"] = args.alpha;
  sidecar["connectivity"] = args.common.connectivity;
  if (oracle_ok) {
    sidecar["counts"] = to_json(detection_counts(evals));
    DetectorSpec spec{DetectorFamily::kFcn, "synth", 0.5, args.alpha};
    sidecar["summary"] = to_json(summarize(spec, evals));
  }
  sidecar["images"] = images;
  std::ofstream(dir / "expected.json", std::ios::binary) << dump(sidecar);
  std::cout << dump({{"directory", dir.string()}, {"images", args.count}, {"oracle", oracle_ok}});
  return kExitOk;
}

// ---- report

struct ReportArgs {
  Common common;
  std::string input;
  std::string kind = "table";
  std::string scatter = "detection-PR";
  std::string metric = "na";
};

std::vector<SweepSummary> load_summaries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  Json json;
  try {
    json = Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormat, path + ": " + e.what());
  }
  // An eval report holds a single summary.
  if (json.is_object() && json.contains("summary") && !json.contains("summaries")) {
    return {summary_from_json(json["summary"])};
  }
  return summaries_from_json(json);
}

int run_report(const ReportArgs& args) {
  const std::vector<SweepSummary> rows = load_summaries(args.input);
  std::string text;
  if (args.kind == "table") {
    if (args.common.format == "markdown") {
      text = render_markdown(rows, best_per_metric(rows));
    } else if (args.common.format == "csv") {
      text = render_table_csv(rows);
    } else {
      text = dump(to_json(best_per_metric(rows), rows));
    }
  } else if (args.kind == "scatter") {
    text = scatter_data(rows, scatter_kind_from_string(args.scatter));
  } else {
    const Metric metric = args.metric == "na" ? Metric::kNa : Metric::kNd;
    text = histogram_csv(histogram(rows, metric));
  }
  emit(args.common, text);
  return kExitOk;
}

// ---- vars

struct VarsArgs {
  Common common;
  std::string summary;
  std::string detector;
  std::optional<double> p_d, r_d, na, p_s_tp, p_s_split, nd;
  PlantAssumptions plant;
};

SweepSummary pick_summary(const VarsArgs& args) {
  const std::vector<SweepSummary> rows = load_summaries(args.summary);
  if (args.detector.empty()) {
    if (rows.size() != 1) {
      throw Error(ErrorCode::kInvalidParameter, "several summaries; choose one with --detector");
    }
    return rows.front();
  }
  for (const SweepSummary& s : rows) {
    if (s.spec.label() == args.detector) return s;
  }
  throw Error(ErrorCode::kInvalidParameter, "no summary labelled " + args.detector);
}

Json error_json(const Error& e) {
  return {{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
}

int run_vars(const VarsArgs& args) {
  args.plant.validate();
  std::optional<double> p_d = args.p_d, r_d = args.r_d, na = args.na, p_s_tp = args.p_s_tp,
                        p_s_split = args.p_s_split, nd = args.nd;
  Json inputs;
  if (!args.summary.empty()) {
    const SweepSummary s = pick_summary(args);
    inputs["detector"] = s.spec.label();
    if (!p_d) p_d = s.counts.p_d;
    if (!r_d) r_d = s.counts.r_d;
    if (!na) na = s.fa_area.mean;
    if (!p_s_tp) p_s_tp = s.tp_precision.mean;
    if (!p_s_split) p_s_split = s.split_precision.mean;
    if (!nd) nd = s.fa_distance.mean;
  }
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  inputs["p_d"] = opt(p_d);
  inputs["r_d"] = opt(r_d);
  inputs["na"] = opt(na);
  inputs["p_s_tp"] = opt(p_s_tp);
  inputs["p_s_split"] = opt(p_s_split);
  inputs["nd"] = opt(nd);

  Json report;
  report["inputs"] = inputs;
  report["assumptions"] = {{"buds_per_plant", args.plant.buds_per_plant},
                           {"bud_diameter_mm", args.plant.bud_diameter_mm},
                           {"internode_mm", args.plant.internode_mm}};
  bool complete = true;
  auto section = [&](const char* key, bool have, const auto& compute) {
    if (!have) {
      report[key] = nullptr;
      complete = false;
      return;
    }
    try {
      report[key] = compute();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kInvalidParameter) throw;
      report[key] = error_json(e);
      complete = false;
    }
  };
  section("bud_count", p_d && r_d, [&] { return to_json(bud_count_error(args.plant, *p_d, *r_d)); });
  section("bud_area", na && p_s_tp && p_s_split,
          [&] { return to_json(area_error(*na, *p_s_tp, *p_s_split)); });
  section("internode", nd.has_value(), [&] {
    return Json{{"relative_error", internode_error(args.plant, *nd)}};
  });
  emit(args.common, dump(report));
  return complete ? kExitOk : kExitPartial;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bud detection evaluation toolkit"};
  app.require_subcommand(1);

  EvalArgs eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate one detector over a manifest");
  eval_cmd->add_option("manifest", eval.manifest, "Manifest CSV")->required();
  eval_cmd->add_option("--family", eval.family, "Detector family")
      ->check(CLI::IsMember({"FCN", "SW", "fcn", "sw"}));
  eval_cmd->add_option("--variant", eval.variant, "Variant label for FCN reports");
  eval_cmd->add_option("--tau", eval.tau, "FCN binarization threshold");
  eval_cmd->add_option("--nu", eval.nu, "SW vote threshold");
  eval_cmd->add_option("--size", eval.size, "SW window size");
  eval_cmd->add_option("--alpha", eval.alpha, "IoU threshold for true positives");
  eval_cmd->add_option("--oracle-fraction", eval.oracle_fraction,
                       "Bud fraction for '@oracle' patch labels");
  add_connectivity(eval_cmd, eval.common);
  add_format(eval_cmd, eval.common, {"json", "csv", "markdown"}, "json");
  add_jobs(eval_cmd, eval.common);

  SweepArgs sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Evaluate a hyper-parameter grid");
  sweep_cmd->add_option("--fcn", sweep.fcn, "VARIANT=MANIFEST for probability maps");
  sweep_cmd->add_option("--sw", sweep.sw, "Manifest with patch labels or '@oracle'");
  sweep_cmd->add_option("--tau", sweep.taus, "FCN thresholds")->delimiter(',');
  sweep_cmd->add_option("--nu", sweep.nus, "SW vote thresholds")->delimiter(',');
  sweep_cmd->add_option("--size", sweep.sizes, "SW window sizes")->delimiter(',');
  sweep_cmd->add_option("--alpha", sweep.alphas, "IoU thresholds")->delimiter(',');
  sweep_cmd->add_option("--oracle-fraction", sweep.oracle_fraction,
                        "Bud fraction for '@oracle' patch labels");
  add_connectivity(sweep_cmd, sweep.common);
  add_format(sweep_cmd, sweep.common, {"json", "csv", "markdown"}, "json");
  add_jobs(sweep_cmd, sweep.common);

  SwArgs sw;
  CLI::App* sw_cmd = app.add_subcommand("sw", "Sliding-window voting on one image");
  sw_cmd->add_option("--image", sw.image, "Input raster (PGM or PNG)");
  sw_cmd->add_option("--labels", sw.labels, "Patch label CSV");
  sw_cmd->add_option("--oracle", sw.oracle, "Truth mask used as patch oracle");
  sw_cmd->add_option("--oracle-fraction", sw.oracle_fraction, "Minimum bud fraction per patch");
  sw_cmd->add_option("--size", sw.size, "Window size")->required();
  sw_cmd->add_option("--nu", sw.nu, "Vote threshold");
  sw_cmd->add_option("--out", sw.common.out, "Output mask PGM")->required();
  sw_cmd->add_option("--votes-out", sw.votes_out, "Optional vote map PGM");

  SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Write a synthetic dataset");
  synth_cmd->add_option("--out", synth.dir, "Output directory")->required();
  synth_cmd->add_option("--count", synth.count, "Number of images");
  synth_cmd->add_option("--seed", synth.seed, "Base seed");
  synth_cmd->add_option("--max-dim", synth.max_dim, "Largest image side");
  synth_cmd->add_option("--min-dim", synth.min_dim, "Smallest image side");
  synth_cmd->add_option("--alpha", synth.alpha, "IoU threshold for the expected verdicts");
  add_connectivity(synth_cmd, synth.common);
  add_jobs(synth_cmd, synth.common);

  ReportArgs report;
  CLI::App* report_cmd = app.add_subcommand("report", "Tables and figure data from summaries");
  report_cmd->add_option("input", report.input, "Summaries JSON")->required();
  report_cmd->add_option("--kind", report.kind)->check(CLI::IsMember({"table", "scatter", "histogram"}));
  report_cmd->add_option("--scatter", report.scatter)
      ->check(CLI::IsMember({"detection-PR", "seg-PR-TP", "seg-PR-split"}));
  report_cmd->add_option("--metric", report.metric)->check(CLI::IsMember({"na", "nd"}));
  add_format(report_cmd, report.common, {"json", "csv", "markdown"}, "markdown");

  VarsArgs vars;
  CLI::App* vars_cmd = app.add_subcommand("vars", "Errors on derived plant variables");
  vars_cmd->add_option("--summary", vars.summary, "Summary or sweep JSON");
  vars_cmd->add_option("--detector", vars.detector, "Detector label inside --summary");
  vars_cmd->add_option("--p-d", vars.p_d, "Detection precision");
  vars_cmd->add_option("--r-d", vars.r_d, "Detection recall");
  vars_cmd->add_option("--na", vars.na, "Mean false-alarm normalized area");
  vars_cmd->add_option("--p-s-tp", vars.p_s_tp, "Mean segmentation precision, true positives");
  vars_cmd->add_option("--p-s-split", vars.p_s_split, "Mean segmentation precision, splits");
  vars_cmd->add_option("--nd", vars.nd, "Mean false-alarm normalized distance");
  vars_cmd->add_option("--buds", vars.plant.buds_per_plant, "Buds per plant");
  vars_cmd->add_option("--bud-diameter", vars.plant.bud_diameter_mm, "Bud diameter (mm)");
  vars_cmd->add_option("--internode", vars.plant.internode_mm, "Internode length (mm)");
  vars_cmd->add_option("--out", vars.common.out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitFailure;
  }

  try {
    if (*eval_cmd) return run_eval(eval);
    if (*sweep_cmd) return run_sweep(sweep);
    if (*sw_cmd) return run_sw(sw);
    if (*synth_cmd) return run_synth(synth);
    if (*report_cmd) return run_report(report);
    if (*vars_cmd) return run_vars(vars);
  } catch (const Error& e) {
    std::cerr << "vinemark: " << to_string(e.code()) << ": " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "vinemark: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
