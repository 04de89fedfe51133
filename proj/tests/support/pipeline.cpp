/* Copyright 2026 The sisaug Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "sisaug/commands.hpp"
#include "sisaug/dataset.hpp"
#include "test_support.hpp"

namespace sisaug::testing {
namespace {

namespace fs = std::filesystem;

void require_ok(const cli::CommandResult& res, const std::string& step) {
  if (res.exit_code == 0) return;
  std::string msg = step + " failed";
  for (const auto& e : res.errors) msg += "\n  " + e;
  throw Error(msg);
}

std::string hash_listing(const fs::path& root) {
  std::ostringstream out;
  for (const auto& [rel, _] : snapshot_tree(root)) {
    if (fs::path(rel).extension() != ".png") continue;
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(png_pixel_hash(root / rel)));
    out << hex << "  " << rel << "\n";
  }
  return out.str();
}

std::string evaluate_to_file(const ToolConfig& cfg, const cli::EvaluateArgs& args,
                             const fs::path& file) {
  const auto res = cli::cmd_evaluate(cfg, args);
  require_ok(res, "evaluate " + file.filename().string());
  write_json_file(res.output, file);
  return dump_json(res.output);
}

}  // namespace

std::map<std::string, std::string> snapshot_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    files[fs::relative(entry.path(), root).generic_string()] = read_file(entry.path());
  }
  return files;
}

std::map<std::string, std::string> run_pipeline(const fs::path& dataset, const fs::path& out,
                                                int workers) {
  const ToolConfig cfg = load_config(dataset / "config.json");
  const fs::path images = dataset / "images";
  const fs::path labels = dataset / "labels";
  std::map<std::string, std::string> golden;

  const auto warp = cli::cmd_warp(cfg, {labels, std::nullopt, std::nullopt, out / "warp", workers});
  require_ok(warp, "warp");
  golden["warp_manifest.json"] = read_file(out / "warp" / "manifest.json");
  golden["warp_labels.txt"] = hash_listing(out / "warp");

  cli::PerturbArgs pargs{images, labels, std::nullopt, {}, out / "perturb", workers};
  require_ok(cli::cmd_perturb(cfg, pargs), "perturb");
  golden["perturb_summary.json"] = read_file(out / "perturb" / "summary.json");
  golden["perturb_images.txt"] = hash_listing(out / "perturb");

  // External segmenters, simulated: on real images and on every perturbed set.
  const fs::path pred = out / "pred";
  predict_directory(Predictor::kGroundTruth, images, labels, pred / "ground_truth");
  predict_directory(Predictor::kCorrupt, images, labels, pred / "corrupt");
  predict_directory(Predictor::kColor, images, labels, pred / "color");
  for (SchemeKind scheme : cli::configured_schemes(cfg)) {
    const std::string name(scheme_name(scheme));
    for (const auto& entry : fs::directory_iterator(out / "perturb" / name)) {
      if (!entry.is_directory()) continue;
      predict_directory(Predictor::kColor, entry.path(), labels,
                        pred / "color_perturbed" / name / entry.path().filename());
    }
  }

  const fs::path metrics = out / "metrics";
  fs::create_directories(metrics);
  golden["metrics_color.json"] = evaluate_to_file(
      cfg, {labels, pred / "color", std::nullopt, false, std::nullopt, workers},
      metrics / "color.json");

  cli::BiasSplitArgs bargs;
  bargs.real_metrics = metrics / "color.json";
  for (SchemeKind scheme : cli::configured_schemes(cfg)) {
    const std::string name(scheme_name(scheme));
    const fs::path file = metrics / ("perturbed_" + name + ".json");
    golden["metrics_perturbed_" + name + ".json"] = evaluate_to_file(
        cfg, {labels, pred / "color_perturbed" / name, std::nullopt, true, scheme, workers}, file);
    bargs.perturbed_metrics.emplace_back(scheme, file);
  }
  const auto bias = cli::cmd_bias_split(cfg, bargs);
  require_ok(bias, "bias-split");
  write_json_file(bias.output, metrics / "bias_split.json");
  golden["bias_split.json"] = dump_json(bias.output);

  for (const char* run : {"ground_truth", "corrupt"}) {
    golden[std::string("metrics_") + run + ".json"] = evaluate_to_file(
        cfg, {labels, pred / run, metrics / "bias_split.json", false, std::nullopt, workers},
        metrics / (std::string(run) + ".json"));
  }

  cli::ReportArgs rargs;
  rargs.runs = {{"ground-truth", metrics / "ground_truth.json"},
                {"corrupted", metrics / "corrupt.json"}};
  rargs.split_file = metrics / "bias_split.json";
  rargs.fid = {{"corrupted", 41.5}};
  const std::pair<cli::ReportFormat, const char*> formats[] = {
      {cli::ReportFormat::kText, "report.txt"}, {cli::ReportFormat::kCsv, "report.csv"}};
  for (const auto& [format, name] : formats) {
    rargs.format = format;
    const auto report = cli::cmd_report(rargs);
    require_ok(report, "report");
    golden[name] = report.text;
    std::ofstream(out / name, std::ios::binary) << report.text;
  }
  return golden;
}

}  // namespace sisaug::testing
