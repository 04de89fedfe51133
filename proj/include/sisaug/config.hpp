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

#ifndef SISAUG_CONFIG_HPP_
#define SISAUG_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "sisaug/bias.hpp"
#include "sisaug/metrics.hpp"
#include "sisaug/tps.hpp"

namespace sisaug {

struct PerturbSettings {
  double c0 = 128.0;
  // "coco-stuff", "ade20k", "cityscapes" or "custom".
  std::string dataset_profile = "custom";
  // Explicit value; when unset the profile's sigma0 applies.
  std::optional<double> sigma0;
  // Include the lognormal scheme when running every scheme.
  bool lognormal = true;

  double effective_sigma0() const;
};

struct EvalSettings {
  int n_classes = 0;  // 0: not configured
  std::optional<ClassId> ignore_id = kDefaultIgnoreId;
  double delta = kDefaultDelta;
  VoidPolicy void_policy = VoidPolicy::kReject;
  BiasCriterion criterion = BiasCriterion::kJoint;
};

// Everything that determines command outputs. Worker count and paths live
// outside: they never change emitted bytes.
struct ToolConfig {
  std::uint64_t seed = 0;
  WarpConfig warp;
  PerturbSettings perturb;
  EvalSettings eval;

  // Throws on any field outside its operation's preconditions.
  void validate() const;
};

ToolConfig config_from_json(const nlohmann::ordered_json& doc);
// Fully resolved: profile defaults are written out explicitly.
nlohmann::ordered_json config_to_json(const ToolConfig& cfg);

ToolConfig load_config(const std::filesystem::path& path);

}  // namespace sisaug

#endif  // SISAUG_CONFIG_HPP_
