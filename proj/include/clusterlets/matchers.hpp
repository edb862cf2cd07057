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
#include <string_view>
#include <vector>

#include "clusterlets/dataset.hpp"
#include "clusterlets/extraction.hpp"
#include "clusterlets/metrics.hpp"

namespace clusterlets {

enum class MatcherKind {
  kDistancePinball,        // d-pb: cumulative distance to the whole cluster
  kGreedyDistancePinball,  // g-d-pb: distance to the last added clusterlet
  kBalancePinball,         // b-pb: deviation of the grown cluster
  kGreedyBalancePinball,   // g-b-pb: deviation of last added + candidate
  kCentroid,               // sampled search over clusterlet partitions
};

std::string_view matcher_name(MatcherKind m);
// Accepts the lower-case names above, case-insensitively; "g-b" and "c" are
// aliases for g-b-pb and centroid.
std::optional<MatcherKind> parse_matcher(std::string_view name);
std::string valid_matcher_names();
bool is_pinball(MatcherKind m);

enum class SilhouetteMode { kCentroidLevel, kInstanceLevel };
std::string_view silhouette_mode_name(SilhouetteMode m);
std::optional<SilhouetteMode> parse_silhouette_mode(std::string_view s);

// kAffine:  w*s + (1-w)*(1 - max_dev)
// kLiteral: w*s + (1 - w*max_dev)   (argmax does not depend on w)
enum class ObjectiveForm { kAffine, kLiteral };
std::string_view objective_form_name(ObjectiveForm f);
std::optional<ObjectiveForm> parse_objective_form(std::string_view s);

// Candidate pool of the greedy pinball matchers. Exclusive: a clusterlet
// claimed by another cluster (every first-color clusterlet is claimed by its
// own cluster) is skipped unless no unclaimed candidate of the target color
// is left. Shared: every clusterlet of the target color is a candidate.
enum class GreedyPool { kExclusive, kShared };
std::string_view greedy_pool_name(GreedyPool p);
std::optional<GreedyPool> parse_greedy_pool(std::string_view s);

struct MatchConfig {
  MatcherKind matcher = MatcherKind::kGreedyBalancePinball;
  int hops = 1;
  double omega = 0.5;
  std::size_t sample_size = 10000;
  std::uint64_t seed = 0;
  SilhouetteMode silhouette_mode = SilhouetteMode::kCentroidLevel;
  ObjectiveForm objective = ObjectiveForm::kAffine;
  GreedyPool greedy_pool = GreedyPool::kExclusive;
};

void validate(const MatchConfig& cfg);

// Complete k-partite graph over clusterlets, one partition per color, edges
// weighted by centroid distance.
struct ClusterletGraph {
  std::vector<Clusterlet> clusterlets;  // clusterlets[i].id == i
  std::vector<std::vector<int>> by_color;
  Matrix distances;

  std::size_t size() const noexcept { return clusterlets.size(); }
  std::size_t n_colors() const noexcept { return by_color.size(); }
};

ClusterletGraph build_graph(std::vector<Clusterlet> clusterlets, std::size_t n_colors);

// Cluster being grown by a pinball matcher: the distinct clusterlets taken so
// far and their combined color histogram.
struct GrowingCluster {
  std::vector<int> ids;  // ascending, distinct
  Histogram histogram;

  bool contains(int id) const;
  void add(const Clusterlet& c);
};

double pinball_measure(MatcherKind matcher, const GrowingCluster& cluster,
                       int last_added, int candidate, const ClusterletGraph& g,
                       const Dataset& ds);

// One selection made by a pinball matcher.
struct PinballStep {
  int seed = 0;  // clusterlet that started the cluster
  int hop = 0;   // 1-based
  ColorId target = 0;
  int selected = 0;
  double measure = 0.0;
};

// Colors visited on a given hop (1-based): forward 1..K-1 on odd hops,
// backward K-2..0 on even ones. Color 0 is the seed color.
std::vector<ColorId> hop_targets(int hop, std::size_t n_colors);

Clustering pinball_match(const ClusterletGraph& g, const Dataset& ds,
                         const MatchConfig& cfg,
                         std::vector<PinballStep>* trace = nullptr);

// --- centroid matcher ---

double centroid_objective(double silhouette, double max_deviation, double omega,
                          ObjectiveForm form);

// Bell(m), or nullopt if it does not fit in 64 bits.
std::optional<std::uint64_t> bell_number(std::size_t m);

// Relabels group ids into restricted-growth form (first-appearance order).
std::vector<int> canonical_partition(std::vector<int> blocks);

struct PartitionScore {
  std::vector<int> blocks;  // restricted-growth string over clusterlet ids
  double objective = 0.0;
  double silhouette = 0.0;  // 0 for a single-block partition
  double max_deviation = 0.0;
};

PartitionScore score_partition(const ClusterletGraph& g, const Dataset& ds,
                               std::vector<int> blocks, const MatchConfig& cfg);

Clustering clustering_from_partition(const ClusterletGraph& g,
                                     std::span<const int> blocks,
                                     std::string source);

// Exhaustive when Bell(M) <= sample_size, sampled otherwise. Samples are drawn
// in fixed-size chunks with per-chunk sub-seeds; ties keep the earliest
// (chunk, index), or the lexicographically smallest partition when enumerating.
Clustering centroid_match(const ClusterletGraph& g, const Dataset& ds,
                          const MatchConfig& cfg, PartitionScore* best = nullptr);

// Dispatches on cfg.matcher.
Clustering match(const ClusterletGraph& g, const Dataset& ds, const MatchConfig& cfg);

}  // namespace clusterlets
