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

#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "sisaug/dataset.hpp"
#include "sisaug/png_io.hpp"

namespace sisaug::testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  std::random_device entropy;
  Rng rng((static_cast<std::uint64_t>(entropy()) << 32) ^ entropy());
  for (;;) {
    std::ostringstream name;
    name << tag << "-" << std::hex << rng.index(~std::uint64_t{0});
    path_ = fs::temp_directory_path() / name.str();
    if (fs::create_directories(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

LabelMap random_label_map(Rng& rng, int width, int height, int n_classes,
                          std::optional<ClassId> ignore_id) {
  std::vector<ClassId> data(static_cast<std::size_t>(width) * height);
  for (auto& v : data) v = static_cast<ClassId>(rng.index(n_classes));
  return LabelMap(width, height, n_classes, ignore_id, std::move(data));
}

LabelMap random_blob_map(Rng& rng, int width, int height, int n_classes) {
  LabelMap map(width, height, n_classes, kDefaultIgnoreId,
               static_cast<ClassId>(rng.index(n_classes)));
  const int blobs = 1 + static_cast<int>(rng.index(4));
  for (int b = 0; b < blobs; ++b) {
    const auto id = static_cast<ClassId>(rng.index(n_classes));
    const int x0 = static_cast<int>(rng.index(width));
    const int y0 = static_cast<int>(rng.index(height));
    const int x1 = std::min(width, x0 + 2 + static_cast<int>(rng.index(width / 2)));
    const int y1 = std::min(height, y0 + 2 + static_cast<int>(rng.index(height / 2)));
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) map(x, y) = id;
    }
  }
  return map;
}

RasterImage random_image(Rng& rng, int width, int height, int channels) {
  RasterImage img(width, height, channels);
  for (double& v : img.data()) v = static_cast<double>(rng.index(256));
  return img;
}

ClassMask random_mask(Rng& rng, int width, int height, double density) {
  std::vector<std::uint8_t> data(static_cast<std::size_t>(width) * height);
  for (auto& v : data) v = rng.uniform01() < density ? 1 : 0;
  return ClassMask(width, height, std::move(data));
}

std::optional<std::vector<double>> solve_dense(std::vector<std::vector<double>> a,
                                               std::vector<double> b, double tolerance) {
  const std::size_t n = b.size();
  double scale = 0.0;
  for (const auto& row : a) {
    for (double v : row) scale = std::max(scale, std::abs(v));
  }
  if (scale == 0.0) return std::nullopt;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < tolerance * scale) return std::nullopt;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

namespace {

double radial(Point a, Point b) {
  const double du = a.u - b.u;
  const double dv = a.v - b.v;
  const double r2 = du * du + dv * dv;
  return r2 == 0.0 ? 0.0 : r2 * std::log(r2);
}

}  // namespace

Point OracleTps::operator()(Point p) const {
  double out[2];
  for (int d = 0; d < 2; ++d) {
    double s = affine[d][0] * p.u + affine[d][1] * p.v + affine[d][2];
    for (std::size_t k = 0; k < control.size(); ++k) s += weights[k][d] * radial(p, control[k]);
    out[d] = s;
  }
  return {out[0], out[1]};
}

std::optional<OracleTps> oracle_fit_tps(const KeyPointSet& fixed, const KeyPointSet& moving,
                                        double lambda_reg) {
  const std::size_t n = fixed.size();
  const std::size_t m = n + 3;
  std::vector<std::vector<double>> a(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = radial(fixed[i], fixed[j]);
    a[i][i] += lambda_reg;
    const double p[3] = {fixed[i].u, fixed[i].v, 1.0};
    for (int c = 0; c < 3; ++c) {
      a[i][n + c] = p[c];
      a[n + c][i] = p[c];
    }
  }
  OracleTps t;
  t.control = fixed;
  t.weights.resize(n);
  for (int d = 0; d < 2; ++d) {
    std::vector<double> rhs(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = d == 0 ? moving[i].u : moving[i].v;
    auto x = solve_dense(a, rhs);
    if (!x) return std::nullopt;
    for (std::size_t i = 0; i < n; ++i) t.weights[i][d] = (*x)[i];
    for (int c = 0; c < 3; ++c) t.affine[d][c] = (*x)[n + c];
  }
  return t;
}

LabelMap oracle_backward_warp(const LabelMap& label, const TpsTransform& t) {
  LabelMap out = label;
  for (int y = 0; y < label.height(); ++y) {
    for (int x = 0; x < label.width(); ++x) {
      const Point src = t(Point{static_cast<double>(x), static_cast<double>(y)});
      const int sx = std::clamp(static_cast<int>(std::floor(src.u + 0.5)), 0, label.width() - 1);
      const int sy = std::clamp(static_cast<int>(std::floor(src.v + 0.5)), 0, label.height() - 1);
      out(x, y) = label(sx, sy);
    }
  }
  return out;
}

RasterImage oracle_blur(const RasterImage& image, double sigma) {
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * r + 1);
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    k[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + r];
  }
  for (double& v : k) v /= sum;
  auto reflect = [](int i, int n) {
    const int period = 2 * n;
    int m = ((i % period) + period) % period;
    return m < n ? m : period - 1 - m;
  };
  RasterImage out(image.width(), image.height(), image.channels());
  for (int c = 0; c < image.channels(); ++c) {
    for (int y = 0; y < image.height(); ++y) {
      for (int x = 0; x < image.width(); ++x) {
        double s = 0.0;
        for (int j = -r; j <= r; ++j) {
          for (int i = -r; i <= r; ++i) {
            s += k[i + r] * k[j + r] *
                 image(reflect(x + i, image.width()), reflect(y + j, image.height()), c);
          }
        }
        out(x, y, c) = s;
      }
    }
  }
  return out;
}

OracleMetrics oracle_metrics(const std::vector<LabelMap>& gts, const std::vector<LabelMap>& preds,
                             int n_classes, const std::vector<int>& split) {
  OracleMetrics m;
  m.counts.assign(n_classes, std::vector<std::uint64_t>(n_classes, 0));
  for (int j = 0; j < n_classes; ++j) {
    for (int i = 0; i < n_classes; ++i) {
      for (std::size_t k = 0; k < gts.size(); ++k) {
        for (int y = 0; y < gts[k].height(); ++y) {
          for (int x = 0; x < gts[k].width(); ++x) {
            if (gts[k](x, y) == j && preds[k](x, y) == i) ++m.counts[j][i];
          }
        }
      }
    }
  }
  std::uint64_t diag = 0, total = 0;
  for (int i = 0; i < n_classes; ++i) {
    std::uint64_t t = 0, col = 0;
    for (int j = 0; j < n_classes; ++j) {
      t += m.counts[i][j];
      col += m.counts[j][i];
    }
    const std::uint64_t nii = m.counts[i][i];
    diag += nii;
    total += t;
    m.pa.push_back(t > 0 ? std::optional<double>(static_cast<double>(nii) / t) : std::nullopt);
    const std::uint64_t uni = t + col - nii;
    m.iou.push_back(uni > 0 ? std::optional<double>(static_cast<double>(nii) / uni)
                            : std::nullopt);
  }
  m.pa_overall = total > 0 ? static_cast<double>(diag) / total : 0.0;
  std::vector<int> classes = split;
  if (classes.empty()) {
    for (int i = 0; i < n_classes; ++i) classes.push_back(i);
  }
  double pa_sum = 0.0, iou_sum = 0.0;
  int pa_n = 0, iou_n = 0;
  for (int i : classes) {
    if (m.pa[i]) {
      pa_sum += *m.pa[i];
      ++pa_n;
    }
    if (m.iou[i]) {
      iou_sum += *m.iou[i];
      ++iou_n;
    }
  }
  if (pa_n > 0) m.ma = pa_sum / pa_n;
  if (iou_n > 0) m.miou = iou_sum / iou_n;
  return m;
}

bool oracle_is_biased(const ClassMetrics& real,
                      const std::map<SchemeKind, PerturbedScore>& scores, double delta,
                      BiasCriterion criterion) {
  const bool use_pa = criterion != BiasCriterion::kIoUOnly;
  const bool use_iou = criterion != BiasCriterion::kPixelAccuracyOnly;
  for (const auto& [scheme, s] : scores) {
    if (use_pa && s.pa && real.pa && *s.pa > delta * *real.pa) return true;
    if (use_iou && s.iou && real.iou && *s.iou > delta * *real.iou) return true;
  }
  return false;
}

namespace {

struct Colour {
  double r, g, b;
};

// Class colours; class 3 is a two-colour checker texture.
constexpr Colour kClassColour[] = {{30, 30, 30}, {200, 40, 40}, {128, 128, 128}, {40, 60, 200}};
constexpr Colour kTextureColour = {200, 200, 60};
constexpr Colour kIgnoreColour = {255, 255, 255};

}  // namespace

void write_synthetic_dataset(const fs::path& root) {
  fs::create_directories(root / "images");
  fs::create_directories(root / "labels");
  Rng rng(20261015);
  const int s = kSyntheticSize;
  for (int n = 0; n < kSyntheticCount; ++n) {
    LabelMap label(s, s, kSyntheticClasses);
    // Rectangle of class 1.
    const int rx = 2 + static_cast<int>(rng.index(12));
    const int ry = 2 + static_cast<int>(rng.index(12));
    const int rw = 8 + static_cast<int>(rng.index(8));
    const int rh = 8 + static_cast<int>(rng.index(8));
    for (int y = ry; y < std::min(s, ry + rh); ++y) {
      for (int x = rx; x < std::min(s, rx + rw); ++x) label(x, y) = 1;
    }
    // Disc of class 2.
    const double cx = 8 + static_cast<double>(rng.index(16));
    const double cy = 8 + static_cast<double>(rng.index(16));
    const double radius = 4 + static_cast<double>(rng.index(4));
    for (int y = 0; y < s; ++y) {
      for (int x = 0; x < s; ++x) {
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= radius * radius) label(x, y) = 2;
      }
    }
    // Textured band of class 3 in most images.
    if (n % 3 != 2) {
      const int by = static_cast<int>(rng.index(s - 6));
      for (int y = by; y < by + 5; ++y) {
        for (int x = 0; x < s; ++x) label(x, y) = 3;
      }
    }
    // A void patch in a few images.
    if (n % 4 == 1) {
      for (int y = 0; y < 3; ++y) {
        for (int x = s - 3; x < s; ++x) label(x, y) = kDefaultIgnoreId;
      }
    }

    RasterImage image(s, s, 3);
    for (int y = 0; y < s; ++y) {
      for (int x = 0; x < s; ++x) {
        const ClassId id = label(x, y);
        Colour c = label.is_ignored(id) ? kIgnoreColour : kClassColour[id];
        if (id == 3 && (x + y) % 2 == 1) c = kTextureColour;
        const double rgb[3] = {c.r, c.g, c.b};
        for (int ch = 0; ch < 3; ++ch) {
          const double noise = static_cast<double>(rng.index(21)) - 10.0;
          image(x, y, ch) = std::clamp(rgb[ch] + noise, 0.0, 255.0);
        }
      }
    }
    const std::string stem = "img_" + std::to_string(n);
    save_label_map(label, root / "labels" / (stem + ".png"));
    save_image(image, root / "images" / (stem + ".png"));
  }
}

LabelMap predict(Predictor predictor, const RasterImage& image, const LabelMap& gt) {
  LabelMap out = gt;
  switch (predictor) {
    case Predictor::kGroundTruth:
      break;
    case Predictor::kCorrupt:
      for (int y = 0; y < gt.height(); ++y) {
        for (int x = 0; x < gt.width(); ++x) {
          const ClassId id = gt(x, y);
          if (gt.is_ignored(id) || (x + 2 * y) % 5 != 0) continue;
          out(x, y) = static_cast<ClassId>((id + 1) % gt.n_classes());
        }
      }
      break;
    case Predictor::kColor: {
      struct Prototype {
        Colour c;
        ClassId id;
      };
      const Prototype prototypes[] = {{kClassColour[0], 0}, {kClassColour[1], 1},
                                      {kClassColour[2], 2}, {kClassColour[3], 3},
                                      {kTextureColour, 3}};
      for (int y = 0; y < gt.height(); ++y) {
        for (int x = 0; x < gt.width(); ++x) {
          double best = 1e300;
          ClassId best_id = 0;
          for (const auto& p : prototypes) {
            const double dr = image(x, y, 0) - p.c.r;
            const double dg = image(x, y, 1) - p.c.g;
            const double db = image(x, y, 2) - p.c.b;
            const double d = dr * dr + dg * dg + db * db;
            if (d < best) {
              best = d;
              best_id = p.id;
            }
          }
          out(x, y) = best_id;
        }
      }
      break;
    }
  }
  return out;
}

void predict_directory(Predictor predictor, const fs::path& image_dir, const fs::path& label_dir,
                       const fs::path& pred_dir) {
  fs::create_directories(pred_dir);
  const LabelFormat format{kSyntheticClasses, kDefaultIgnoreId};
  for (const auto& pair : pair_by_stem(image_dir, label_dir)) {
    const RasterImage image = load_image(pair.first);
    const LabelMap gt = load_label_map(pair.second, format);
    save_label_map(predict(predictor, image, gt), pred_dir / (pair.stem + ".png"));
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t png_pixel_hash(const fs::path& path) {
  const RasterImage img = load_image(path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::uint64_t byte) {
    h ^= byte & 0xff;
    h *= 0x100000001b3ULL;
  };
  for (int v : {img.width(), img.height(), img.channels()}) {
    for (int s = 0; s < 32; s += 8) feed(static_cast<std::uint64_t>(v) >> s);
  }
  for (double v : img.data()) feed(static_cast<std::uint64_t>(v));
  return h;
}

std::string check_golden(const fs::path& golden, const std::string& actual) {
  const char* update = std::getenv("SISAUG_UPDATE_GOLDENS");
  if (update && std::string(update) == "1") {
    fs::create_directories(golden.parent_path());
    std::ofstream out(golden, std::ios::binary);
    out << actual;
    return {};
  }
  if (!fs::exists(golden)) return "missing golden " + golden.string();
  const std::string expected = read_file(golden);
  if (expected == actual) return {};
  std::istringstream a(expected), b(actual);
  std::string la, lb;
  for (int line = 1;; ++line) {
    const bool more_a = static_cast<bool>(std::getline(a, la));
    const bool more_b = static_cast<bool>(std::getline(b, lb));
    if (!more_a && !more_b) break;
    if (la != lb || more_a != more_b) {
      return golden.filename().string() + " differs at line " + std::to_string(line) +
             ": expected '" + (more_a ? la : "<eof>") + "', got '" + (more_b ? lb : "<eof>") +
             "'";
    }
  }
  return golden.filename().string() + " differs";
}

fs::path source_dir() { return SISAUG_SOURCE_DIR; }
fs::path synthetic_dir() { return source_dir() / "tests" / "data" / "synthetic"; }
fs::path golden_dir() { return source_dir() / "tests" / "golden"; }

}  // namespace sisaug::testing
