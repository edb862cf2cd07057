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
#include <vector>

#include "clusterlets/dataset.hpp"
#include "clusterlets/matrix.hpp"

namespace clusterlets {

struct ExtractionConfig {
  int k_per_color = 5;
  int max_iterations = 300;
  // Stop once the largest squared centroid shift drops below this.
  double tolerance = 1e-6;
  std::uint64_t seed = 0;
};

void validate(const ExtractionConfig& cfg);

struct KMeansResult {
  std::vector<int> assignments;
  Matrix centroids;
  double inertia = 0.0;
  // Inertia after every Lloyd update, for monotonicity checks.
  std::vector<double> inertia_history;
  int iterations = 0;
};

// Lloyd's algorithm with k-means++ seeding. Never returns an empty cluster:
// an emptied cluster takes the point farthest from its current centroid.
KMeansResult kmeans(const Matrix& points, int k, const ExtractionConfig& cfg);

// A monochrome group of instances with its cached centroid.
struct Clusterlet {
  int id = 0;
  ColorId color = 0;
  std::vector<std::size_t> members;  // dataset row indices, ascending
  std::vector<double> centroid;

  std::size_t size() const noexcept { return members.size(); }
};

// Runs k-means on each color separately (k clamped to the color population)
// and returns the union of the resulting clusters. Ids are dense, grouped by
// color id, in cluster order within a color.
std::vector<Clusterlet> extract_clusterlets(const Dataset& ds,
                                            const ColorPartition& part,
                                            const ExtractionConfig& cfg);

}  // namespace clusterlets
