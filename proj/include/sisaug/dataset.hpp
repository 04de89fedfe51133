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

#ifndef SISAUG_DATASET_HPP_
#define SISAUG_DATASET_HPP_

#include <cstddef>
#include <exception>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace sisaug {

// Files from two directories matched by identical stem.
struct PairedFiles {
  std::string stem;
  std::filesystem::path first;
  std::filesystem::path second;
};

// Sorted list of *.png files in a directory.
std::vector<std::filesystem::path> list_png_files(const std::filesystem::path& dir);

// Pairs the PNG files of two directories by stem, sorted by stem. Any file
// without a partner is a hard error.
std::vector<PairedFiles> pair_by_stem(const std::filesystem::path& first_dir,
                                      const std::filesystem::path& second_dir);

// Worker count from SISAUG_WORKERS, or `fallback` when unset.
int workers_from_env(int fallback = 1);

// Runs body(i) for i in [0, n) on up to `workers` threads. Exceptions are
// captured per item; the first one (by index) is rethrown after all items
// finished.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body);

}  // namespace sisaug

#endif  // SISAUG_DATASET_HPP_
