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

#include "sisaug/perturb.hpp"

#include <algorithm>
#include <cmath>

#include "sisaug/png_io.hpp"
#include "sisaug/rng.hpp"

namespace sisaug {
namespace {

namespace fs = std::filesystem;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_mask_matches(const RasterImage& image, const ClassMask& mask) {
  if (image.width() != mask.width() || image.height() != mask.height()) {
    throw Error("mask dimensions do not match image");
  }
}

void require_support(const ClassMask& mask) {
  if (mask.count() == 0) throw Error("empty segment");
}

template <class Fill>
RasterImage compose(const RasterImage& image, const ClassMask& mask, Fill&& fill) {
  RasterImage out = image;
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      if (!mask(x, y)) continue;
      for (int c = 0; c < image.channels(); ++c) out(x, y, c) = fill(x, y, c);
    }
  }
  return out;
}

}  // namespace

std::string_view scheme_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::kConstant: return "constant";
    case SchemeKind::kAverage: return "average";
    case SchemeKind::kBlur: return "blur";
    case SchemeKind::kLognormal: return "lognormal";
  }
  return "unknown";
}

SchemeKind parse_scheme(std::string_view name) {
  for (SchemeKind k : kAllSchemes) {
    if (scheme_name(k) == name) return k;
  }
  throw Error("unknown perturbation scheme: " + std::string(name));
}

SchemeKind scheme_kind(const PerturbScheme& scheme) {
  return std::visit(Overloaded{
                        [](const ConstantScheme&) { return SchemeKind::kConstant; },
                        [](const AverageScheme&) { return SchemeKind::kAverage; },
                        [](const BlurScheme&) { return SchemeKind::kBlur; },
                        [](const LognormalScheme&) { return SchemeKind::kLognormal; },
                    },
                    scheme);
}

double LognormalFit::mean() const { return std::exp(mu + 0.5 * sigma * sigma) - 1.0; }

double LognormalFit::stddev() const {
  const double s2 = sigma * sigma;
  return std::sqrt(std::expm1(s2) * std::exp(2.0 * mu + s2));
}

LognormalFit fit_lognormal(const RasterImage& image, const ClassMask& mask, int channel) {
  check_mask_matches(image, mask);
  require_support(mask);
  double sum = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      if (mask(x, y)) {
        sum += std::log1p(image(x, y, channel));
        ++n;
      }
    }
  }
  const double mu = sum / n;
  double sq = 0.0;
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      if (mask(x, y)) {
        const double d = std::log1p(image(x, y, channel)) - mu;
        sq += d * d;
      }
    }
  }
  return {mu, std::sqrt(sq / n)};
}

ClassMask class_mask(const LabelMap& label, ClassId class_id) {
  if (class_id >= label.n_classes()) {
    throw Error("class id " + std::to_string(class_id) + " out of range for n_classes=" +
                std::to_string(label.n_classes()));
  }
  std::vector<std::uint8_t> data(label.pixel_count());
  auto ids = label.data();
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = ids[i] == class_id ? 1 : 0;
  return ClassMask(label.width(), label.height(), std::move(data));
}

RasterImage apply_perturbation(const RasterImage& image, const ClassMask& mask,
                               const PerturbScheme& scheme) {
  check_mask_matches(image, mask);
  return std::visit(
      Overloaded{
          [&](const ConstantScheme& s) {
            if (!(s.c0 >= 0.0 && s.c0 <= 255.0)) throw Error("c0 must be in [0, 255]");
            return compose(image, mask, [&](int, int, int) { return s.c0; });
          },
          [&](const AverageScheme&) {
            require_support(mask);
            // Accumulated as offsets from the first masked pixel, so a
            // constant region reproduces its value exactly.
            std::vector<double> anchor, offset(image.channels(), 0.0);
            std::size_t n = 0;
            for (int y = 0; y < image.height(); ++y) {
              for (int x = 0; x < image.width(); ++x) {
                if (!mask(x, y)) continue;
                if (n++ == 0) {
                  for (int c = 0; c < image.channels(); ++c) anchor.push_back(image(x, y, c));
                }
                for (int c = 0; c < image.channels(); ++c) offset[c] += image(x, y, c) - anchor[c];
              }
            }
            std::vector<double> mean(image.channels());
            for (int c = 0; c < image.channels(); ++c) {
              mean[c] = anchor[c] + offset[c] / static_cast<double>(n);
            }
            return compose(image, mask, [&](int, int, int c) { return mean[c]; });
          },
          [&](const BlurScheme& s) {
            if (!(s.sigma0 > 0.0)) throw Error("sigma0 must be > 0");
            if (mask.count() == 0) return image;
            const RasterImage blurred = gaussian_blur(image, s.sigma0);
            return compose(image, mask, [&](int x, int y, int c) { return blurred(x, y, c); });
          },
          [&](const LognormalScheme& s) {
            require_support(mask);
            const int nc = image.channels();
            std::vector<LognormalFit> fits;
            std::vector<Rng> rngs;
            for (int c = 0; c < nc; ++c) {
              fits.push_back(fit_lognormal(image, mask, c));
              rngs.emplace_back(derive_seed(s.seed, {static_cast<std::uint64_t>(c)}));
            }
            return compose(image, mask, [&](int, int, int c) {
              const double z = fits[c].mu + fits[c].sigma * rngs[c].normal();
              return std::clamp(std::expm1(z), 0.0, 255.0);
            });
          },
      },
      scheme);
}

std::vector<PerturbManifestEntry> perturb_dataset(const std::vector<PairedFiles>& pairs,
                                                  ClassId class_id,
                                                  const PerturbScheme& scheme,
                                                  const fs::path& out_dir,
                                                  const PerturbOptions& options) {
  if (class_id >= options.n_classes) {
    throw Error("class id " + std::to_string(class_id) + " out of range for n_classes=" +
                std::to_string(options.n_classes));
  }
  fs::create_directories(out_dir);
  const std::string name(scheme_name(scheme_kind(scheme)));
  const LabelFormat format{options.n_classes, options.ignore_id};

  std::vector<PerturbManifestEntry> entries(pairs.size());
  parallel_for(pairs.size(), options.workers, [&](std::size_t i) {
    const PairedFiles& pair = pairs[i];
    PerturbManifestEntry& entry = entries[i];
    entry.image = pair.stem + ".png";
    entry.class_id = class_id;
    entry.scheme = name;
    const fs::path out_path = out_dir / entry.image;
    try {
      const RasterImage image = load_image(pair.first);
      const LabelMap label = load_label_map(pair.second, format);
      if (image.width() != label.width() || image.height() != label.height()) {
        throw Error("dimension mismatch between image and label map");
      }
      const ClassMask mask = class_mask(label, class_id);
      entry.masked_pixels = mask.count();
      if (entry.masked_pixels == 0) {
        fs::copy_file(pair.first, out_path, fs::copy_options::overwrite_existing);
        entry.status = "absent";
        return;
      }
      PerturbScheme item_scheme = scheme;
      if (auto* ln = std::get_if<LognormalScheme>(&item_scheme)) {
        ln->seed = derive_seed(ln->seed, {i, class_id});
      }
      save_image(apply_perturbation(image, mask, item_scheme), out_path);
      entry.status = "perturbed";
    } catch (const std::exception& e) {
      entry.status = std::string("error: ") + e.what();
    }
  });
  return entries;
}

}  // namespace sisaug
