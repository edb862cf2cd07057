// Copyright 2026 The Clusterlets Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "clusterlets/dataset.hpp"

namespace clusterlets {

// Isotropic Gaussian blobs (unit standard deviation) whose centers sit on a
// square lattice with spacing `separation`. Each blob's rows are split among
// the colors by `proportions` using largest-remainder rounding.
struct SynthOptions {
  std::size_t n_blobs = 4;
  std::size_t n_per_blob = 100;
  std::vector<double> proportions{0.5, 0.5};
  double separation = 8.0;
  std::size_t dims = 2;
  std::uint64_t seed = 0;
};

void validate(const SynthOptions& o);

// Color names are "c0", "c1", ...; features "x0", "x1", ...
Dataset generate_blobs(const SynthOptions& o);

// CSV with header x0..x{d-1},color and shortest round-trip number formatting.
std::string to_csv(const Dataset& ds, const std::string& color_column = "color");

// Per-blob color counts for the given proportions.
std::vector<std::size_t> split_counts(std::size_t n, const std::vector<double>& proportions);

}  // namespace clusterlets
