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

#include "sisaug/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <map>
#include <thread>

#include "sisaug/raster.hpp"

namespace sisaug {

namespace fs = std::filesystem;

std::vector<fs::path> list_png_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<PairedFiles> pair_by_stem(const fs::path& first_dir, const fs::path& second_dir) {
  std::map<std::string, fs::path> first;
  std::map<std::string, fs::path> second;
  for (auto& p : list_png_files(first_dir)) first.emplace(p.stem().string(), p);
  for (auto& p : list_png_files(second_dir)) second.emplace(p.stem().string(), p);

  std::vector<std::string> unpaired;
  for (auto& [stem, _] : first) {
    if (!second.count(stem)) unpaired.push_back(stem + " (missing in " + second_dir.string() + ")");
  }
  for (auto& [stem, _] : second) {
    if (!first.count(stem)) unpaired.push_back(stem + " (missing in " + first_dir.string() + ")");
  }
  if (!unpaired.empty()) {
    std::string msg = "unpaired files:";
    for (auto& u : unpaired) msg += " " + u;
    throw Error(msg);
  }
  std::vector<PairedFiles> pairs;
  for (auto& [stem, path] : first) pairs.push_back({stem, path, second.at(stem)});
  return pairs;
}

int workers_from_env(int fallback) {
  const char* env = std::getenv("SISAUG_WORKERS");
  if (!env || !*env) return fallback;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) throw Error(std::string("invalid SISAUG_WORKERS: ") + env);
  return static_cast<int>(n);
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body) {
  std::vector<std::exception_ptr> errors(n);
  auto run = [&](std::size_t i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t threads =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(workers, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) run(i);
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace sisaug
