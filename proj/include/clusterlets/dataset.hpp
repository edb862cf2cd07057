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
#include <optional>
#include <string>
#include <vector>

#include "clusterlets/matrix.hpp"

namespace clusterlets {

using ColorId = int;
using Histogram = std::vector<std::size_t>;

// Feature matrix plus one color per row. Colors are dense ids assigned in
// first-appearance order (or the order given at load time); color_names maps
// ids back to the source strings.
struct Dataset {
  Matrix features;
  std::vector<ColorId> colors;
  std::vector<std::string> color_names;
  std::vector<std::string> feature_names;
  Histogram color_counts;

  std::size_t size() const noexcept { return colors.size(); }
  std::size_t dims() const noexcept { return features.cols(); }
  std::size_t n_colors() const noexcept { return color_names.size(); }
};

// Builds a dataset from raw parts and checks every invariant: N >= 2, d >= 1,
// |K| >= 2 and every color present. Throws ValidationError.
Dataset make_dataset(Matrix features, std::vector<ColorId> colors,
                     std::vector<std::string> color_names,
                     std::vector<std::string> feature_names = {});

void validate(const Dataset& ds);

struct CsvOptions {
  std::string color_column;
  // Empty: every column except the color column whose first data cell parses
  // as a number.
  std::vector<std::string> feature_columns;
  // Empty: first-appearance order. Otherwise must list every color exactly
  // once; the first entry becomes color 0 (the pinball seed color).
  std::vector<std::string> color_order;
};

Dataset load_csv(const std::string& path, const CsvOptions& opts);
Dataset parse_csv(const std::string& text, const CsvOptions& opts);

// Z-scores every column with the population standard deviation; constant
// columns become zero.
Dataset standardize(const Dataset& ds);

// Index lists per color, ascending, one per color id.
using ColorPartition = std::vector<std::vector<std::size_t>>;
ColorPartition partition_by_color(const Dataset& ds);

// Row count + FNV-1a hash over column names, colors, and feature bits.
struct Fingerprint {
  std::size_t rows = 0;
  std::uint64_t hash = 0;
  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};
Fingerprint fingerprint(const Dataset& ds);

// Splits "a,b,c" into trimmed tokens; empty input gives an empty list.
std::vector<std::string> split_list(const std::string& s, char sep = ',');

}  // namespace clusterlets
