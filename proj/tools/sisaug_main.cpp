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

// sisaug: label-map warping augmentation and bias-aware segmentation
// evaluation.
//
//   sisaug warp       --labels DIR [--edges DIR] [--instances DIR] --out DIR
//   sisaug perturb    --images DIR --labels DIR (--class ID | --all-classes) --out DIR
//   sisaug evaluate   --gt DIR --pred DIR [--split FILE] [--per-class-dirs] [--out FILE]
//   sisaug bias-split --real FILE --perturbed SCHEME=FILE... [--out FILE]
//   sisaug report     --run LABEL=FILE... [--split FILE] [--fid LABEL=VALUE] [--format csv]

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sisaug/commands.hpp"
#include "sisaug/dataset.hpp"

namespace {

using sisaug::Error;
using sisaug::ToolConfig;
namespace cli = sisaug::cli;

std::pair<std::string, std::string> split_assignment(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) {
    throw Error("expected NAME=VALUE, got '" + s + "'");
  }
  return {s.substr(0, eq), s.substr(eq + 1)};
}

// Options shared by every command that reads the tool configuration.
struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<int> n_classes;
  std::optional<int> ignore_id;
  bool no_ignore = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON configuration file");
    app->add_option("--seed", seed, "Global seed");
    app->add_option("--workers", workers,
                    "Worker threads (default: $SISAUG_WORKERS or 1)")
        ->check(CLI::PositiveNumber);
    app->add_option("--n-classes", n_classes, "Number of classes")->check(CLI::Range(1, 256));
    app->add_option("--ignore-id", ignore_id, "Ignore (void) class id")->check(CLI::Range(0, 255));
    app->add_flag("--no-ignore", no_ignore, "Label maps have no ignore id");
  }

  ToolConfig load() const {
    ToolConfig cfg = config_path.empty() ? ToolConfig{} : sisaug::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (n_classes) cfg.eval.n_classes = *n_classes;
    if (ignore_id) cfg.eval.ignore_id = static_cast<sisaug::ClassId>(*ignore_id);
    if (no_ignore) cfg.eval.ignore_id.reset();
    return cfg;
  }

  int resolve_workers() const { return workers ? *workers : sisaug::workers_from_env(1); }
};

void emit_json(const sisaug::Json& doc, const std::string& out_path) {
  const std::string text = sisaug::dump_json(doc);
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error("cannot write " + out_path);
  out << text;
}

int finish(const cli::CommandResult& res) {
  for (const auto& m : res.messages) std::cerr << "sisaug: " << m << "\n";
  for (const auto& e : res.errors) std::cerr << "sisaug: error: " << e << "\n";
  return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Label-map warping augmentation and bias-aware segmentation evaluation"};
  app.require_subcommand(1);

  // warp
  CommonOptions warp_common;
  cli::WarpArgs warp_args;
  std::string warp_edges, warp_instances, warp_border;
  std::optional<int> n_keypoints;
  std::optional<double> tau, max_shift, lambda_reg;
  auto* warp = app.add_subcommand("warp", "Warp label maps with boundary-seeded TPS");
  warp_common.attach(warp);
  warp->add_option("--labels", warp_args.label_dir, "Label map directory")->required();
  warp->add_option("--edges", warp_edges, "Edge map directory (default: label boundaries)");
  warp->add_option("--instances", warp_instances, "Instance map directory");
  warp->add_option("--out", warp_args.out_dir, "Output directory")->required();
  warp->add_option("--n-keypoints", n_keypoints, "Keypoints per map")->check(CLI::PositiveNumber);
  warp->add_option("--tau", tau, "Edge threshold in [0, 1]");
  warp->add_option("--max-shift", max_shift, "Maximum keypoint shift in pixels");
  warp->add_option("--lambda-reg", lambda_reg, "TPS regularization");
  warp->add_option("--border", warp_border, "clamp | ignore_fill")
      ->check(CLI::IsMember({"clamp", "ignore_fill"}));

  // perturb
  CommonOptions perturb_common;
  cli::PerturbArgs perturb_args;
  std::optional<int> perturb_class;
  bool all_classes = false;
  std::string scheme_arg = "all";
  std::optional<double> c0, sigma0;
  std::string profile;
  auto* perturb = app.add_subcommand("perturb", "Perturb class segments of images");
  perturb_common.attach(perturb);
  perturb->add_option("--images", perturb_args.image_dir, "Image directory")->required();
  perturb->add_option("--labels", perturb_args.label_dir, "Label map directory")->required();
  auto* class_opt = perturb->add_option("--class", perturb_class, "Class id to perturb");
  auto* all_opt = perturb->add_flag("--all-classes", all_classes, "Every class in the labels");
  class_opt->excludes(all_opt);
  perturb->add_option("--scheme", scheme_arg, "constant | average | blur | lognormal | all")
      ->check(CLI::IsMember({"constant", "average", "blur", "lognormal", "all"}));
  perturb->add_option("--out", perturb_args.out_dir, "Output directory")->required();
  perturb->add_option("--c0", c0, "Constant fill value");
  perturb->add_option("--sigma0", sigma0, "Blur standard deviation");
  perturb->add_option("--profile", profile, "Dataset profile for sigma0")
      ->check(CLI::IsMember({"coco-stuff", "ade20k", "cityscapes", "custom"}));

  // evaluate
  CommonOptions eval_common;
  cli::EvaluateArgs eval_args;
  std::string eval_split, eval_out, eval_scheme, void_policy;
  auto* evaluate = app.add_subcommand("evaluate", "Segmentation metrics of predictions");
  eval_common.attach(evaluate);
  evaluate->add_option("--gt", eval_args.gt_dir, "Ground-truth label directory")->required();
  evaluate->add_option("--pred", eval_args.pred_dir, "Prediction directory")->required();
  evaluate->add_option("--split", eval_split, "Bias split JSON");
  evaluate->add_flag("--per-class-dirs", eval_args.per_class_dirs,
                     "Predictions are in class_<id>/ subdirectories");
  evaluate->add_option("--scheme", eval_scheme, "Scheme recorded with per-class metrics")
      ->check(CLI::IsMember({"constant", "average", "blur", "lognormal"}));
  evaluate->add_option("--void-policy", void_policy, "reject | count_as_miss")
      ->check(CLI::IsMember({"reject", "count_as_miss"}));
  evaluate->add_option("--out", eval_out, "Output file (default: stdout)");

  // bias-split
  CommonOptions bias_common;
  cli::BiasSplitArgs bias_args;
  std::string bias_real, bias_out, reference, criterion;
  std::vector<std::string> bias_perturbed;
  std::optional<double> delta;
  auto* bias = app.add_subcommand("bias-split", "Split classes into biased and unbiased");
  bias_common.attach(bias);
  bias->add_option("--real", bias_real, "Metrics on real images");
  bias->add_option("--perturbed", bias_perturbed, "SCHEME=FILE per-class perturbed metrics");
  bias->add_option("--delta", delta, "Threshold factor in (0, 1]");
  bias->add_option("--criterion", criterion, "joint | pa | iou")
      ->check(CLI::IsMember({"joint", "pa", "iou"}));
  bias->add_option("--reference", reference, "Emit a bundled reference split")
      ->check(CLI::IsMember({"coco-stuff", "ade20k", "cityscapes"}));
  bias->add_option("--out", bias_out, "Output file (default: stdout)");

  // report
  cli::ReportArgs report_args;
  std::vector<std::string> runs, fids;
  std::string report_split, report_out, format = "text";
  auto* report = app.add_subcommand("report", "Render metrics as a table");
  report->add_option("--run", runs, "LABEL=FILE metrics document; the first is the baseline")
      ->required();
  report->add_option("--split", report_split, "Bias split JSON");
  report->add_option("--fid", fids, "LABEL=VALUE externally computed FID");
  report->add_option("--format", format, "text | csv")->check(CLI::IsMember({"text", "csv"}));
  report->add_option("--out", report_out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (warp->parsed()) {
      ToolConfig cfg = warp_common.load();
      if (n_keypoints) cfg.warp.n_keypoints = *n_keypoints;
      if (tau) cfg.warp.tau = *tau;
      if (max_shift) cfg.warp.max_shift = *max_shift;
      if (lambda_reg) cfg.warp.lambda_reg = *lambda_reg;
      if (!warp_border.empty()) {
        cfg.warp.border = warp_border == "clamp" ? sisaug::BorderMode::kClamp
                                                 : sisaug::BorderMode::kIgnoreFill;
      }
      if (!warp_edges.empty()) warp_args.edge_dir = warp_edges;
      if (!warp_instances.empty()) warp_args.instance_dir = warp_instances;
      warp_args.workers = warp_common.resolve_workers();
      return finish(cli::cmd_warp(cfg, warp_args));
    }
    if (perturb->parsed()) {
      ToolConfig cfg = perturb_common.load();
      if (c0) cfg.perturb.c0 = *c0;
      if (!profile.empty()) cfg.perturb.dataset_profile = profile;
      if (sigma0) cfg.perturb.sigma0 = *sigma0;
      if (!perturb_class && !all_classes) throw Error("give --class ID or --all-classes");
      perturb_args.class_id = perturb_class;
      if (scheme_arg != "all") perturb_args.schemes = {sisaug::parse_scheme(scheme_arg)};
      perturb_args.workers = perturb_common.resolve_workers();
      return finish(cli::cmd_perturb(cfg, perturb_args));
    }
    if (evaluate->parsed()) {
      ToolConfig cfg = eval_common.load();
      if (void_policy == "reject") cfg.eval.void_policy = sisaug::VoidPolicy::kReject;
      if (void_policy == "count_as_miss") cfg.eval.void_policy = sisaug::VoidPolicy::kCountAsMiss;
      if (!eval_split.empty()) eval_args.split_file = eval_split;
      if (!eval_scheme.empty()) eval_args.scheme = sisaug::parse_scheme(eval_scheme);
      eval_args.workers = eval_common.resolve_workers();
      const auto res = cli::cmd_evaluate(cfg, eval_args);
      emit_json(res.output, eval_out);
      return finish(res);
    }
    if (bias->parsed()) {
      if (!reference.empty()) {
        emit_json(sisaug::bias_split_to_json(sisaug::load_reference_split(reference)), bias_out);
        return 0;
      }
      if (bias_real.empty()) throw Error("--real is required unless --reference is given");
      ToolConfig cfg = bias_common.load();
      if (delta) cfg.eval.delta = *delta;
      if (criterion == "joint") cfg.eval.criterion = sisaug::BiasCriterion::kJoint;
      if (criterion == "pa") cfg.eval.criterion = sisaug::BiasCriterion::kPixelAccuracyOnly;
      if (criterion == "iou") cfg.eval.criterion = sisaug::BiasCriterion::kIoUOnly;
      bias_args.real_metrics = bias_real;
      for (const auto& p : bias_perturbed) {
        auto [scheme, file] = split_assignment(p);
        bias_args.perturbed_metrics.emplace_back(sisaug::parse_scheme(scheme), file);
      }
      const auto res = cli::cmd_bias_split(cfg, bias_args);
      emit_json(res.output, bias_out);
      return finish(res);
    }
    if (report->parsed()) {
      for (const auto& r : runs) {
        auto [label, file] = split_assignment(r);
        report_args.runs.emplace_back(label, file);
      }
      for (const auto& f : fids) {
        auto [label, value] = split_assignment(f);
        report_args.fid[label] = std::stod(value);
      }
      if (!report_split.empty()) report_args.split_file = report_split;
      report_args.format = format == "csv" ? cli::ReportFormat::kCsv : cli::ReportFormat::kText;
      const auto res = cli::cmd_report(report_args);
      if (report_out.empty()) {
        std::cout << res.text;
      } else {
        std::ofstream out(report_out, std::ios::binary);
        if (!out) throw Error("cannot write " + report_out);
        out << res.text;
      }
      return finish(res);
    }
  } catch (const std::exception& e) {
    std::cerr << "sisaug: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
