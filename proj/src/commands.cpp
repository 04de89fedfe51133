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

#include "sisaug/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "sisaug/dataset.hpp"
#include "sisaug/png_io.hpp"
#include "sisaug/rng.hpp"

namespace sisaug::cli {
namespace {

namespace fs = std::filesystem;

// Stream id of the lognormal draws under the global seed.
constexpr std::uint64_t kLognormalStream = 0x6c6f676eULL;

LabelFormat label_format(const ToolConfig& cfg) {
  LabelFormat f;
  if (cfg.eval.n_classes > 0) f.n_classes = cfg.eval.n_classes;
  f.ignore_id = cfg.eval.ignore_id;
  return f;
}

int require_n_classes(const ToolConfig& cfg) {
  if (cfg.eval.n_classes < 1) throw Error("eval.n_classes must be set for this command");
  return cfg.eval.n_classes;
}

Json ignore_json(const ToolConfig& cfg) {
  return cfg.eval.ignore_id ? Json(*cfg.eval.ignore_id) : Json(nullptr);
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

void copy_bytes(const fs::path& from, const fs::path& to) {
  fs::copy_file(from, to, fs::copy_options::overwrite_existing);
}

PerturbScheme make_scheme(SchemeKind kind, const ToolConfig& cfg) {
  switch (kind) {
    case SchemeKind::kConstant: return ConstantScheme{cfg.perturb.c0};
    case SchemeKind::kAverage: return AverageScheme{};
    case SchemeKind::kBlur: return BlurScheme{cfg.perturb.effective_sigma0()};
    case SchemeKind::kLognormal:
      return LognormalScheme{derive_seed(cfg.seed, {kLognormalStream})};
  }
  throw Error("unknown scheme");
}

// One confusion matrix over every pair, merged in stem order.
ConfusionMatrix evaluate_pairs(const ToolConfig& cfg, const fs::path& gt_dir,
                               const fs::path& pred_dir, int workers) {
  const int n = require_n_classes(cfg);
  const auto pairs = pair_by_stem(gt_dir, pred_dir);
  if (pairs.empty()) throw Error("no label maps in " + gt_dir.string());
  const LabelFormat format = label_format(cfg);
  std::vector<ConfusionMatrix> partial(pairs.size());
  parallel_for(pairs.size(), workers, [&](std::size_t i) {
    const LabelMap gt = load_label_map(pairs[i].first, format);
    const LabelMap pred = load_label_map(pairs[i].second, format);
    try {
      partial[i] = accumulate_confusion(gt, pred, ConfusionMatrix(n), cfg.eval.void_policy);
    } catch (const Error& e) {
      throw Error(pairs[i].stem + ": " + e.what());
    }
  });
  ConfusionMatrix cm(n);
  for (const auto& p : partial) cm = merge_confusion(cm, p);
  return cm;
}

Json rows_json(const ClassMetricTable& table) {
  Json rows = Json::array();
  for (const auto& row : table) rows.push_back(class_row_to_json(row));
  return rows;
}

struct SplitMeans {
  std::optional<double> ma;
  std::optional<double> miou;
  int n_classes = 0;
};

// Means over the given class ids, skipping classes whose ratio is absent.
SplitMeans split_means(const ClassMetricTable& table, const std::vector<int>& ids) {
  std::set<int> wanted(ids.begin(), ids.end());
  double pa = 0.0, iou = 0.0;
  int n_pa = 0, n_iou = 0;
  for (const auto& row : table) {
    if (!wanted.count(row.class_id)) continue;
    if (row.pa) {
      pa += *row.pa;
      ++n_pa;
    }
    if (row.iou) {
      iou += *row.iou;
      ++n_iou;
    }
  }
  SplitMeans m;
  if (n_pa) m.ma = pa / n_pa;
  if (n_iou) m.miou = iou / n_iou;
  m.n_classes = n_iou;
  return m;
}

std::vector<std::pair<int, fs::path>> class_subdirs(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("not a directory: " + dir.string());
  std::vector<std::pair<int, fs::path>> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_directory()) continue;
    const std::string name = entry.path().filename().string();
    if (name.rfind("class_", 0) != 0) continue;
    const std::string digits = name.substr(6);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) continue;
    out.emplace_back(std::stoi(digits), entry.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw Error("no class_<id> subdirectories in " + dir.string());
  return out;
}

std::string format_value(const std::optional<double>& v, bool percent, bool sign) {
  if (!v) return "-";
  char buf[64];
  const double x = percent ? *v * 100.0 : *v;
  std::snprintf(buf, sizeof(buf), sign ? "%+.2f" : "%.2f", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string class_dir_name(int class_id) { return "class_" + std::to_string(class_id); }

std::vector<SchemeKind> configured_schemes(const ToolConfig& cfg) {
  std::vector<SchemeKind> out;
  for (SchemeKind k : kAllSchemes) {
    if (k == SchemeKind::kLognormal && !cfg.perturb.lognormal) continue;
    out.push_back(k);
  }
  return out;
}

CommandResult cmd_warp(const ToolConfig& cfg, const WarpArgs& args) {
  cfg.validate();
  CommandResult res;
  const auto labels = list_png_files(args.label_dir);
  std::vector<PairedFiles> edge_pairs, instance_pairs;
  if (args.edge_dir) {
    edge_pairs = pair_by_stem(args.label_dir, *args.edge_dir);
  } else {
    res.messages.push_back("no edge directory given; sampling keypoints on label boundaries");
  }
  if (args.instance_dir) instance_pairs = pair_by_stem(args.label_dir, *args.instance_dir);

  fs::create_directories(args.out_dir);
  if (args.instance_dir) fs::create_directories(args.out_dir / "instances");
  const LabelFormat format = label_format(cfg);

  std::vector<Json> entries(labels.size());
  std::vector<std::string> errors(labels.size());
  parallel_for(labels.size(), args.workers, [&](std::size_t i) {
    const fs::path& path = labels[i];
    const std::string file = path.filename().string();
    const std::uint64_t seed = derive_seed(cfg.seed, {i});
    Json entry;
    entry["label"] = file;
    entry["seed"] = seed;
    entry["n_keypoints"] = cfg.warp.n_keypoints;
    entry["edge_source"] = args.edge_dir ? "file" : "label_boundaries";
    try {
      const LabelMap label = load_label_map(path, format);
      const EdgeMap edge =
          args.edge_dir ? load_edge_map(edge_pairs[i].second) : label_boundary_edges(label);
      std::optional<LabelMap> instance;
      if (args.instance_dir) {
        instance = load_label_map(instance_pairs[i].second, LabelFormat{{}, cfg.eval.ignore_id});
        if (instance->width() != label.width() || instance->height() != label.height()) {
          throw Error("instance map dimensions differ from label map");
        }
      }
      WarpConfig wc = cfg.warp;
      wc.seed = seed;
      std::optional<WarpResult> warped;
      try {
        warped = warp_augment(label, edge, wc);
        entry["status"] = "warped";
      } catch (const NoBoundaryError&) {
        entry["status"] = "no_boundary";
      } catch (const DegenerateControlPointsError&) {
        entry["status"] = "degenerate_keypoints";
      }
      entry["max_displacement"] = warped ? warped->max_displacement : 0.0;

      const fs::path out_path = args.out_dir / file;
      if (!warped || warped->warped == label) {
        copy_bytes(path, out_path);
        if (warped) entry["status"] = "unchanged";
      } else {
        save_label_map(warped->warped, out_path);
      }
      if (instance) {
        const fs::path inst_out = args.out_dir / "instances" / file;
        LabelMap warped_instance =
            warped ? warp_label_map(*instance, warped->transform, cfg.warp.border) : *instance;
        if (warped_instance == *instance) {
          copy_bytes(instance_pairs[i].second, inst_out);
        } else {
          save_label_map(warped_instance, inst_out);
        }
      }
    } catch (const std::exception& e) {
      entry["status"] = std::string("error: ") + e.what();
      errors[i] = file + ": " + e.what();
    }
    entries[i] = std::move(entry);
  });

  Json manifest;
  manifest["schema_version"] = kSchemaVersion;
  manifest["kind"] = "warp_manifest";
  manifest["entries"] = entries;
  write_json_file(manifest, args.out_dir / "manifest.json");
  write_json_file(config_to_json(cfg), args.out_dir / "effective_config.json");
  for (auto& e : errors) {
    if (!e.empty()) res.errors.push_back(e);
  }
  res.exit_code = res.errors.empty() ? 0 : 1;
  res.output = std::move(manifest);
  return res;
}

CommandResult cmd_perturb(const ToolConfig& cfg, const PerturbArgs& args) {
  cfg.validate();
  const int n_classes = require_n_classes(cfg);
  CommandResult res;
  const auto pairs = pair_by_stem(args.image_dir, args.label_dir);
  const std::vector<SchemeKind> schemes =
      args.schemes.empty() ? configured_schemes(cfg) : args.schemes;

  std::vector<int> classes;
  if (args.class_id) {
    if (*args.class_id < 0 || *args.class_id >= n_classes) {
      throw Error("class id " + std::to_string(*args.class_id) + " out of range");
    }
    classes.push_back(*args.class_id);
  } else {
    std::set<int> present;
    const LabelFormat format = label_format(cfg);
    for (const auto& pair : pairs) {
      const LabelMap label = load_label_map(pair.second, format);
      for (ClassId id : label.data()) {
        if (!label.is_ignored(id)) present.insert(id);
      }
    }
    classes.assign(present.begin(), present.end());
  }

  fs::create_directories(args.out_dir);
  const PerturbOptions options{n_classes, cfg.eval.ignore_id, args.workers};
  Json runs = Json::array();
  for (SchemeKind kind : schemes) {
    for (int class_id : classes) {
      fs::path rel;
      if (schemes.size() > 1) rel /= std::string(scheme_name(kind));
      if (!args.class_id) rel /= class_dir_name(class_id);
      const fs::path dir = args.out_dir / rel;
      const auto entries = perturb_dataset(pairs, static_cast<ClassId>(class_id),
                                           make_scheme(kind, cfg), dir, options);
      write_json_file(perturb_manifest_to_json(entries), dir / "manifest.json");
      int perturbed = 0, absent = 0, failed = 0;
      for (const auto& e : entries) {
        if (e.status == "perturbed") {
          ++perturbed;
        } else if (e.status == "absent") {
          ++absent;
        } else {
          ++failed;
          res.errors.push_back((rel / e.image).generic_string() + ": " + e.status);
        }
      }
      runs.push_back({{"scheme", scheme_name(kind)},
                      {"class_id", class_id},
                      {"dir", rel.empty() ? "." : rel.generic_string()},
                      {"perturbed", perturbed},
                      {"absent", absent},
                      {"errors", failed}});
    }
  }
  Json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["kind"] = "perturb_summary";
  summary["runs"] = runs;
  write_json_file(summary, args.out_dir / "summary.json");
  write_json_file(config_to_json(cfg), args.out_dir / "effective_config.json");
  res.exit_code = res.errors.empty() ? 0 : 1;
  res.output = std::move(summary);
  return res;
}

CommandResult cmd_evaluate(const ToolConfig& cfg, const EvaluateArgs& args) {
  cfg.validate();
  const int n_classes = require_n_classes(cfg);
  CommandResult res;
  Json doc;
  doc["schema_version"] = kSchemaVersion;

  if (args.per_class_dirs) {
    doc["kind"] = "perturbed_metrics";
    doc["scheme"] = args.scheme ? Json(scheme_name(*args.scheme)) : Json(nullptr);
    doc["n_classes"] = n_classes;
    doc["ignore_id"] = ignore_json(cfg);
    Json rows = Json::array();
    for (const auto& [class_id, dir] : class_subdirs(args.pred_dir)) {
      if (class_id >= n_classes) {
        throw Error("class directory " + dir.string() + " exceeds n_classes");
      }
      const ConfusionMatrix cm = evaluate_pairs(cfg, args.gt_dir, dir, args.workers);
      rows.push_back(class_row_to_json(per_class_metrics(cm)[class_id]));
    }
    doc["per_class"] = rows;
    doc["effective_config"] = config_to_json(cfg);
    res.output = std::move(doc);
    return res;
  }

  const ConfusionMatrix cm = evaluate_pairs(cfg, args.gt_dir, args.pred_dir, args.workers);
  const ClassMetricTable table = per_class_metrics(cm);
  const AggregateMetrics agg = aggregate(table, cm);
  doc["kind"] = "metrics";
  doc["n_classes"] = n_classes;
  doc["ignore_id"] = ignore_json(cfg);
  doc["absent_class_convention"] = "classes with neither ground truth nor predictions are excluded from means";
  doc["pa"] = agg.pa_overall;
  doc["ma"] = optional_json(agg.ma);
  doc["miou"] = agg.miou;
  doc["n_classes_used"] = agg.n_classes_used;

  if (args.split_file) {
    const BiasSplit split = bias_split_from_json(read_json_file(*args.split_file));
    Json block;
    Json flags = Json::array();
    auto group = [&](const std::vector<int>& ids, const char* tag) {
      for (int id : ids) {
        if (id < 0 || id >= n_classes) {
          throw Error("split class id " + std::to_string(id) + " out of range");
        }
      }
      try {
        const AggregateMetrics m = aggregate(table, cm, std::span<const int>(ids));
        block[std::string("ma_") + tag] = optional_json(m.ma);
        block[std::string("miou_") + tag] = m.miou;
        block[std::string("n_") + tag] = m.n_classes_used;
      } catch (const Error&) {
        block[std::string("ma_") + tag] = nullptr;
        block[std::string("miou_") + tag] = nullptr;
        block[std::string("n_") + tag] = 0;
        flags.push_back(std::string("empty_split_") + tag);
      }
    };
    group(split.biased, "bc");
    group(split.unbiased, "uc");
    Json ordered;
    for (const char* key : {"ma_bc", "ma_uc", "miou_bc", "miou_uc", "n_bc", "n_uc"}) {
      ordered[key] = block[key];
    }
    ordered["flags"] = flags;
    doc["split"] = ordered;
  }
  doc["per_class"] = rows_json(table);
  doc["effective_config"] = config_to_json(cfg);
  res.output = std::move(doc);
  return res;
}

CommandResult cmd_bias_split(const ToolConfig& cfg, const BiasSplitArgs& args) {
  cfg.validate();
  CommandResult res;
  const Json real_doc = read_json_file(args.real_metrics);
  const ClassMetricTable real = table_from_metrics_json(real_doc);
  if (real_doc.value("kind", "") != "metrics") {
    throw Error("real metrics file must be a full metrics document");
  }
  const int n_classes = real_doc.at("n_classes").get<int>();
  std::set<int> real_ids;
  for (const auto& row : real) real_ids.insert(row.class_id);

  PerturbedMetricSet perturbed;
  std::set<SchemeKind> seen;
  for (const auto& [scheme, path] : args.perturbed_metrics) {
    if (!seen.insert(scheme).second) {
      throw Error("scheme " + std::string(scheme_name(scheme)) + " given twice");
    }
    const Json doc = read_json_file(path);
    const ClassMetricTable table = table_from_metrics_json(doc);
    if (doc.contains("n_classes") && doc.at("n_classes").get<int>() != n_classes) {
      throw Error("inconsistent class sets: " + path.string() + " has a different n_classes");
    }
    if (doc.contains("scheme") && !doc.at("scheme").is_null() &&
        doc.at("scheme").get<std::string>() != scheme_name(scheme)) {
      throw Error("scheme mismatch in " + path.string());
    }
    for (const auto& row : table) {
      if (!real_ids.count(row.class_id)) {
        throw Error("inconsistent class sets: class " + std::to_string(row.class_id) +
                    " missing from the real metrics");
      }
      if (row.pa || row.iou) perturbed.set(row.class_id, scheme, {row.pa, row.iou});
    }
  }
  const BiasSplit split = classify_bias(real, perturbed, cfg.eval.delta, cfg.eval.criterion);
  res.messages = split.warnings;
  Json doc = bias_split_to_json(split);
  doc["criterion"] = config_to_json(cfg)["eval"]["criterion"];
  doc["effective_config"] = config_to_json(cfg);
  res.output = std::move(doc);
  return res;
}

CommandResult cmd_report(const ReportArgs& args) {
  if (args.runs.empty()) throw Error("report needs at least one metrics file");
  std::optional<BiasSplit> split;
  if (args.split_file) split = bias_split_from_json(read_json_file(*args.split_file));
  for (const auto& [label, _] : args.fid) {
    if (std::none_of(args.runs.begin(), args.runs.end(),
                     [&](const auto& r) { return r.first == label; })) {
      throw Error("FID given for unknown run " + label);
    }
  }
  const bool with_fid = !args.fid.empty();

  std::vector<std::string> header = {"Model", "PA", "MA", "mIoU"};
  if (split) {
    for (const char* h : {"MA_BC", "MA_UC", "mIoU_BC", "mIoU_UC"}) header.push_back(h);
  }
  if (with_fid) header.push_back("FID");

  std::vector<std::vector<std::optional<double>>> values;
  for (const auto& [label, path] : args.runs) {
    const Json doc = read_json_file(path);
    const ClassMetricTable table = table_from_metrics_json(doc);
    if (doc.value("kind", "") != "metrics") {
      throw Error(path.string() + " is not a metrics document");
    }
    auto num = [&](const char* key) -> std::optional<double> {
      if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
      return doc.at(key).get<double>();
    };
    std::vector<std::optional<double>> row = {num("pa"), num("ma"), num("miou")};
    if (split) {
      const SplitMeans bc = split_means(table, split->biased);
      const SplitMeans uc = split_means(table, split->unbiased);
      row.insert(row.end(), {bc.ma, uc.ma, bc.miou, uc.miou});
    }
    if (with_fid) {
      auto it = args.fid.find(label);
      row.push_back(it == args.fid.end() ? std::nullopt : std::optional<double>(it->second));
    }
    values.push_back(std::move(row));
  }

  const std::size_t fid_col = with_fid ? header.size() - 2 : header.size();
  std::vector<std::vector<std::string>> cells;
  auto render = [&](const std::string& label, const std::vector<std::optional<double>>& row,
                    bool sign) {
    std::vector<std::string> out = {label};
    for (std::size_t c = 0; c < row.size(); ++c) {
      out.push_back(format_value(row[c], c != fid_col, sign));
    }
    cells.push_back(std::move(out));
  };
  for (std::size_t r = 0; r < values.size(); ++r) render(args.runs[r].first, values[r], false);
  for (std::size_t r = 1; r < values.size(); ++r) {
    std::vector<std::optional<double>> delta(values[r].size());
    for (std::size_t c = 0; c < delta.size(); ++c) {
      if (values[r][c] && values[0][c]) delta[c] = *values[r][c] - *values[0][c];
    }
    render("delta(" + args.runs[r].first + " - " + args.runs[0].first + ")", delta, true);
  }

  std::ostringstream out;
  if (args.format == ReportFormat::kCsv) {
    auto line = [&](const std::vector<std::string>& row) {
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_field(row[c]);
      out << "\n";
    };
    line(header);
    for (const auto& row : cells) line(row);
  } else {
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (const auto& row : cells) {
      for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    }
    auto line = [&](const std::vector<std::string>& row) {
      std::string s;
      for (std::size_t c = 0; c < row.size(); ++c) {
        const std::string pad(width[c] - row[c].size(), ' ');
        if (c == 0) {
          s += row[c] + pad;
        } else {
          s += "  " + pad + row[c];
        }
      }
      out << s << "\n";
    };
    line(header);
    std::size_t total = 0;
    for (std::size_t c = 0; c < width.size(); ++c) total += width[c] + (c ? 2 : 0);
    out << std::string(total, '-') << "\n";
    for (const auto& row : cells) line(row);
    if (split) {
      out << "\nBC: " << split->biased.size() << " biased classes, UC: "
          << split->unbiased.size() << " unbiased classes (delta = "
          << format_value(split->delta, false, false) << ")\n";
    }
  }
  CommandResult res;
  res.text = out.str();
  return res;
}

}  // namespace sisaug::cli
