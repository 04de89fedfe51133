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

#include "sisaug/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace sisaug {
namespace {

using Json = nlohmann::ordered_json;

void reject_unknown_keys(const Json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  if (!obj.is_object()) throw Error("config: " + where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) {
      throw Error("config: unknown key " + where + "." + it.key());
    }
  }
}

template <class T>
void read(const Json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

BorderMode parse_border(const std::string& s) {
  if (s == "clamp") return BorderMode::kClamp;
  if (s == "ignore_fill") return BorderMode::kIgnoreFill;
  throw Error("config: unknown border mode " + s);
}

VoidPolicy parse_void_policy(const std::string& s) {
  if (s == "reject") return VoidPolicy::kReject;
  if (s == "count_as_miss") return VoidPolicy::kCountAsMiss;
  throw Error("config: unknown void policy " + s);
}

BiasCriterion parse_criterion(const std::string& s) {
  if (s == "joint") return BiasCriterion::kJoint;
  if (s == "pa") return BiasCriterion::kPixelAccuracyOnly;
  if (s == "iou") return BiasCriterion::kIoUOnly;
  throw Error("config: unknown bias criterion " + s);
}

const char* criterion_name(BiasCriterion c) {
  switch (c) {
    case BiasCriterion::kJoint: return "joint";
    case BiasCriterion::kPixelAccuracyOnly: return "pa";
    case BiasCriterion::kIoUOnly: return "iou";
  }
  return "joint";
}

}  // namespace

double PerturbSettings::effective_sigma0() const {
  if (sigma0) return *sigma0;
  if (dataset_profile == "custom") return 25.0;
  return reference_dataset(dataset_profile).sigma0;
}

void ToolConfig::validate() const {
  if (warp.n_keypoints < 1) throw Error("config: warp.n_keypoints must be >= 1");
  if (!(warp.tau >= 0.0 && warp.tau <= 1.0)) throw Error("config: warp.tau must be in [0, 1]");
  if (!(warp.max_shift >= 0.0)) throw Error("config: warp.max_shift must be >= 0");
  if (!(warp.lambda_reg >= 0.0)) throw Error("config: warp.lambda_reg must be >= 0");
  if (!(perturb.c0 >= 0.0 && perturb.c0 <= 255.0)) {
    throw Error("config: perturb.c0 must be in [0, 255]");
  }
  const std::string& p = perturb.dataset_profile;
  if (p != "custom" && p != "coco-stuff" && p != "ade20k" && p != "cityscapes") {
    throw Error("config: unknown dataset_profile " + p);
  }
  if (!(perturb.effective_sigma0() > 0.0)) throw Error("config: perturb.sigma0 must be > 0");
  if (eval.n_classes < 0 || eval.n_classes > 256) {
    throw Error("config: eval.n_classes must be in [1, 256]");
  }
  if (eval.ignore_id && eval.n_classes > *eval.ignore_id) {
    throw Error("config: eval.ignore_id must not be a valid class id");
  }
  if (!(eval.delta > 0.0 && eval.delta <= 1.0)) throw Error("config: eval.delta must be in (0, 1]");
  if (eval.void_policy == VoidPolicy::kCountAsMiss && !eval.ignore_id) {
    throw Error("config: eval.void_policy count_as_miss needs an ignore_id");
  }
}

ToolConfig config_from_json(const Json& doc) {
  ToolConfig cfg;
  reject_unknown_keys(doc, {"schema_version", "seed", "warp", "perturb", "eval"}, "config");
  if (doc.contains("schema_version") && doc.at("schema_version").get<int>() != 1) {
    throw Error("config: unsupported schema_version");
  }
  read(doc, "seed", cfg.seed);
  if (doc.contains("warp")) {
    const Json& w = doc.at("warp");
    reject_unknown_keys(w, {"n_keypoints", "tau", "max_shift", "lambda_reg", "border"}, "warp");
    read(w, "n_keypoints", cfg.warp.n_keypoints);
    read(w, "tau", cfg.warp.tau);
    read(w, "max_shift", cfg.warp.max_shift);
    read(w, "lambda_reg", cfg.warp.lambda_reg);
    if (w.contains("border")) cfg.warp.border = parse_border(w.at("border").get<std::string>());
  }
  if (doc.contains("perturb")) {
    const Json& p = doc.at("perturb");
    reject_unknown_keys(p, {"c0", "sigma0", "dataset_profile", "lognormal"}, "perturb");
    read(p, "c0", cfg.perturb.c0);
    read(p, "dataset_profile", cfg.perturb.dataset_profile);
    if (p.contains("sigma0")) cfg.perturb.sigma0 = p.at("sigma0").get<double>();
    read(p, "lognormal", cfg.perturb.lognormal);
  }
  if (doc.contains("eval")) {
    const Json& e = doc.at("eval");
    reject_unknown_keys(e, {"n_classes", "ignore_id", "delta", "void_policy", "criterion"},
                        "eval");
    read(e, "n_classes", cfg.eval.n_classes);
    if (e.contains("ignore_id")) {
      const Json& v = e.at("ignore_id");
      if (v.is_null()) {
        cfg.eval.ignore_id.reset();
      } else {
        const int id = v.get<int>();
        if (id < 0 || id > 255) throw Error("config: eval.ignore_id must be in [0, 255]");
        cfg.eval.ignore_id = static_cast<ClassId>(id);
      }
    }
    read(e, "delta", cfg.eval.delta);
    if (e.contains("void_policy")) {
      cfg.eval.void_policy = parse_void_policy(e.at("void_policy").get<std::string>());
    }
    if (e.contains("criterion")) {
      cfg.eval.criterion = parse_criterion(e.at("criterion").get<std::string>());
    }
  }
  cfg.validate();
  return cfg;
}

Json config_to_json(const ToolConfig& cfg) {
  Json doc;
  doc["schema_version"] = 1;
  doc["seed"] = cfg.seed;
  doc["warp"] = {
      {"n_keypoints", cfg.warp.n_keypoints},
      {"tau", cfg.warp.tau},
      {"max_shift", cfg.warp.max_shift},
      {"lambda_reg", cfg.warp.lambda_reg},
      {"border", cfg.warp.border == BorderMode::kClamp ? "clamp" : "ignore_fill"},
  };
  doc["perturb"] = {
      {"c0", cfg.perturb.c0},
      {"dataset_profile", cfg.perturb.dataset_profile},
      {"sigma0", cfg.perturb.effective_sigma0()},
      {"lognormal", cfg.perturb.lognormal},
  };
  doc["eval"] = {
      {"n_classes", cfg.eval.n_classes},
      {"ignore_id", cfg.eval.ignore_id ? Json(*cfg.eval.ignore_id) : Json(nullptr)},
      {"delta", cfg.eval.delta},
      {"void_policy",
       cfg.eval.void_policy == VoidPolicy::kReject ? "reject" : "count_as_miss"},
      {"criterion", criterion_name(cfg.eval.criterion)},
  };
  return doc;
}

ToolConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config: " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("config " + path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

}  // namespace sisaug
