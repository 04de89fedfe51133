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

#ifndef SISAUG_COMMANDS_HPP_
#define SISAUG_COMMANDS_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sisaug/config.hpp"
#include "sisaug/serialize.hpp"

// The five pipeline commands behind the `sisaug` executable. Each returns
// its document plus diagnostics instead of printing, so they can be driven
// in-process.
namespace sisaug::cli {

struct CommandResult {
  int exit_code = 0;
  Json output;                        // manifest / metrics / split
  std::string text;                   // report body
  std::vector<std::string> errors;    // per-file errors
  std::vector<std::string> messages;  // informational log lines
};

struct WarpArgs {
  std::filesystem::path label_dir;
  std::optional<std::filesystem::path> edge_dir;
  std::optional<std::filesystem::path> instance_dir;
  std::filesystem::path out_dir;
  int workers = 1;
};

// Writes <out>/<stem>.png per label map (plus <out>/instances/<stem>.png when
// instance maps are given), manifest.json and effective_config.json. An
// unchanged map is byte-copied from its input file.
CommandResult cmd_warp(const ToolConfig& cfg, const WarpArgs& args);

struct PerturbArgs {
  std::filesystem::path image_dir;
  std::filesystem::path label_dir;
  std::optional<int> class_id;  // nullopt: every class present in the labels
  std::vector<SchemeKind> schemes;
  std::filesystem::path out_dir;
  int workers = 1;
};

// Output layout: <out>[/<scheme>][/class_<id>]/<stem>.png with one
// manifest.json per leaf directory. The scheme level appears when several
// schemes run; the class level with every-class mode.
CommandResult cmd_perturb(const ToolConfig& cfg, const PerturbArgs& args);

// All schemes enabled by the configuration, in canonical order.
std::vector<SchemeKind> configured_schemes(const ToolConfig& cfg);

struct EvaluateArgs {
  std::filesystem::path gt_dir;
  std::filesystem::path pred_dir;
  std::optional<std::filesystem::path> split_file;
  // pred_dir holds class_<id>/ subdirectories; class i is scored on its own
  // subdirectory only.
  bool per_class_dirs = false;
  std::optional<SchemeKind> scheme;  // recorded in per-class output
  int workers = 1;
};

CommandResult cmd_evaluate(const ToolConfig& cfg, const EvaluateArgs& args);

struct BiasSplitArgs {
  std::filesystem::path real_metrics;
  std::vector<std::pair<SchemeKind, std::filesystem::path>> perturbed_metrics;
};

CommandResult cmd_bias_split(const ToolConfig& cfg, const BiasSplitArgs& args);

enum class ReportFormat { kText, kCsv };

struct ReportArgs {
  // (label, metrics file); rows after the first also get a delta row
  // against the first.
  std::vector<std::pair<std::string, std::filesystem::path>> runs;
  std::optional<std::filesystem::path> split_file;
  std::map<std::string, double> fid;
  ReportFormat format = ReportFormat::kText;
};

CommandResult cmd_report(const ReportArgs& args);

// Name of the per-class output directory.
std::string class_dir_name(int class_id);

}  // namespace sisaug::cli

#endif  // SISAUG_COMMANDS_HPP_
