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

#include "sisaug/serialize.hpp"

#include <algorithm>
#include <fstream>

namespace sisaug {
namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> read_optional(const Json& obj, const char* key) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return obj.at(key).get<double>();
}

void require_kind(const Json& doc, std::initializer_list<const char*> kinds,
                  const char* what) {
  if (!doc.is_object()) throw Error(std::string(what) + ": expected a JSON object");
  if (!doc.contains("schema_version") || doc.at("schema_version") != kSchemaVersion) {
    throw Error(std::string(what) + ": missing or unsupported schema_version");
  }
  const std::string kind = doc.value("kind", "");
  for (const char* k : kinds) {
    if (kind == k) return;
  }
  throw Error(std::string(what) + ": unexpected document kind '" + kind + "'");
}

}  // namespace

Json class_row_to_json(const ClassMetrics& row) {
  Json j;
  j["class_id"] = row.class_id;
  j["pa"] = optional_number(row.pa);
  j["iou"] = optional_number(row.iou);
  j["present"] = row.present;
  j["gt_pixels"] = row.gt_pixels;
  j["pred_pixels"] = row.pred_pixels;
  return j;
}

ClassMetrics class_row_from_json(const Json& row) {
  ClassMetrics m;
  m.class_id = row.at("class_id").get<int>();
  m.pa = read_optional(row, "pa");
  m.iou = read_optional(row, "iou");
  m.present = row.at("present").get<bool>();
  m.gt_pixels = row.value("gt_pixels", std::uint64_t{0});
  m.pred_pixels = row.value("pred_pixels", std::uint64_t{0});
  for (const auto& v : {m.pa, m.iou}) {
    if (v && !(*v >= 0.0 && *v <= 1.0)) throw Error("metric value outside [0, 1]");
  }
  return m;
}

ClassMetricTable table_from_metrics_json(const Json& doc) {
  require_kind(doc, {"metrics", "perturbed_metrics"}, "metrics file");
  ClassMetricTable table;
  for (const Json& row : doc.at("per_class")) table.push_back(class_row_from_json(row));
  return table;
}

Json bias_split_to_json(const BiasSplit& split) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "bias_split";
  if (!split.dataset.empty()) j["dataset"] = split.dataset;
  j["delta"] = split.delta;
  j["biased"] = split.biased;
  j["unbiased"] = split.unbiased;
  Json prov = Json::object();
  for (const auto& [id, trigger] : split.provenance) {
    if (!trigger) {
      prov[std::to_string(id)] = nullptr;
      continue;
    }
    prov[std::to_string(id)] = {
        {"scheme", scheme_name(trigger->scheme)},
        {"metric", metric_name(trigger->metric)},
        {"zero_real_metric", trigger->zero_real_metric},
    };
  }
  j["provenance"] = prov;
  Json coverage = Json::array();
  for (SchemeKind k : split.scheme_coverage) coverage.push_back(scheme_name(k));
  j["scheme_coverage"] = coverage;
  j["warnings"] = split.warnings;
  return j;
}

BiasSplit bias_split_from_json(const Json& doc) {
  require_kind(doc, {"bias_split"}, "bias split file");
  BiasSplit split;
  split.delta = doc.at("delta").get<double>();
  split.biased = doc.at("biased").get<std::vector<int>>();
  split.unbiased = doc.at("unbiased").get<std::vector<int>>();
  split.dataset = doc.value("dataset", "");
  if (doc.contains("provenance")) {
    const Json& prov = doc.at("provenance");
    for (auto it = prov.begin(); it != prov.end(); ++it) {
      const int id = std::stoi(it.key());
      if (it.value().is_null()) {
        split.provenance[id] = std::nullopt;
        continue;
      }
      BiasTrigger t{parse_scheme(it.value().at("scheme").get<std::string>()),
                    it.value().at("metric").get<std::string>() == "pa" ? MetricKind::kPixelAccuracy
                                                                       : MetricKind::kIoU,
                    it.value().value("zero_real_metric", false)};
      split.provenance[id] = t;
    }
  }
  if (doc.contains("scheme_coverage")) {
    for (const Json& s : doc.at("scheme_coverage")) {
      split.scheme_coverage.push_back(parse_scheme(s.get<std::string>()));
    }
  }
  if (doc.contains("warnings")) split.warnings = doc.at("warnings").get<std::vector<std::string>>();
  for (int id : split.biased) {
    if (std::find(split.unbiased.begin(), split.unbiased.end(), id) != split.unbiased.end()) {
      throw Error("bias split file: class " + std::to_string(id) + " is in both groups");
    }
  }
  return split;
}

Json perturb_manifest_to_json(const std::vector<PerturbManifestEntry>& entries) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "perturb_manifest";
  Json list = Json::array();
  for (const auto& e : entries) {
    list.push_back({{"image", e.image},
                    {"class_id", e.class_id},
                    {"scheme", e.scheme},
                    {"masked_pixels", e.masked_pixels},
                    {"status", e.status}});
  }
  j["entries"] = list;
  return j;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid JSON in " + path.string() + ": " + e.what());
  }
}

std::string dump_json(const Json& doc) { return doc.dump(2) + "\n"; }

void write_json_file(const Json& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << dump_json(doc);
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace sisaug
