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

#include "clusterlets/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>

#include "clusterlets/errors.hpp"
#include "clusterlets/random.hpp"

namespace clusterlets {

void validate(const SynthOptions& o) {
  if (o.n_blobs < 1) throw ConfigError("synth: n_blobs must be >= 1");
  if (o.n_per_blob < 1) throw ConfigError("synth: n_per_blob must be >= 1");
  if (o.dims < 1) throw ConfigError("synth: dims must be >= 1");
  if (!(o.separation > 0.0)) throw ConfigError("synth: separation must be > 0");
  if (o.proportions.size() < 2) throw ConfigError("synth: need proportions for at least 2 colors");
  double total = 0.0;
  for (double p : o.proportions) {
    if (!(p > 0.0)) throw ConfigError("synth: proportions must be positive");
    total += p;
  }
  if (!std::isfinite(total)) throw ConfigError("synth: proportions must be finite");
  const auto per_blob = split_counts(o.n_per_blob, o.proportions);
  for (std::size_t k = 0; k < per_blob.size(); ++k)
    if (per_blob[k] == 0)
      throw ConfigError("synth: color c" + std::to_string(k) + " would receive no rows; raise n_per_blob");
}

std::vector<std::size_t> split_counts(std::size_t n, const std::vector<double>& proportions) {
  const double total = std::accumulate(proportions.begin(), proportions.end(), 0.0);
  std::vector<std::size_t> counts(proportions.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < proportions.size(); ++k) {
    const double exact = static_cast<double>(n) * proportions[k] / total;
    counts[k] = static_cast<std::size_t>(std::floor(exact));
    assigned += counts[k];
    remainders.emplace_back(exact - std::floor(exact), k);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++counts[remainders[i % remainders.size()].second];
  return counts;
}

Dataset generate_blobs(const SynthOptions& o) {
  validate(o);
  Rng rng(o.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(o.n_blobs))));
  const std::size_t n = o.n_blobs * o.n_per_blob;
  const auto counts = split_counts(o.n_per_blob, o.proportions);

  Matrix features(n, o.dims);
  std::vector<ColorId> colors;
  colors.reserve(n);
  std::size_t row = 0;
  for (std::size_t b = 0; b < o.n_blobs; ++b) {
    std::vector<double> center(o.dims, 0.0);
    center[0] = o.separation * static_cast<double>(b % side);
    if (o.dims > 1) center[1] = o.separation * static_cast<double>(b / side);
    else center[0] = o.separation * static_cast<double>(b);

    std::vector<ColorId> blob_colors;
    for (std::size_t k = 0; k < counts.size(); ++k)
      blob_colors.insert(blob_colors.end(), counts[k], static_cast<ColorId>(k));
    for (std::size_t i = blob_colors.size(); i > 1; --i)
      std::swap(blob_colors[i - 1], blob_colors[uniform_index(rng, i)]);

    for (std::size_t i = 0; i < o.n_per_blob; ++i, ++row) {
      for (std::size_t j = 0; j < o.dims; ++j) features(row, j) = center[j] + normal(rng);
      colors.push_back(blob_colors[i]);
    }
  }
  std::vector<std::string> names;
  for (std::size_t k = 0; k < o.proportions.size(); ++k) names.push_back("c" + std::to_string(k));
  return make_dataset(std::move(features), std::move(colors), std::move(names));
}

std::string to_csv(const Dataset& ds, const std::string& color_column) {
  std::string out;
  for (const auto& f : ds.feature_names) out += f + ",";
  out += color_column + "\n";
  char buf[64];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = 0; j < ds.dims(); ++j) {
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, ds.features(i, j));
      out.append(buf, p);
      out += ',';
    }
    out += ds.color_names[static_cast<std::size_t>(ds.colors[i])] + "\n";
  }
  return out;
}

}  // namespace clusterlets
