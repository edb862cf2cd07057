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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clusterlets/dataset.hpp"
#include "clusterlets/extraction.hpp"
#include "clusterlets/matchers.hpp"
#include "clusterlets/metrics.hpp"

namespace clusterlets {

inline constexpr int kSchemaVersion = 1;

enum class Profile { kTest, kPaper };
std::optional<Profile> parse_profile(std::string_view s);
std::size_t default_sample_size(Profile p);  // 1e4 / 2.5e5

// Everything needed to reproduce one run. Axes that do not apply to the
// matcher (omega and sample size for pinball, hops for centroid) are unset.
struct RunConfig {
  MatcherKind matcher = MatcherKind::kGreedyBalancePinball;
  int k = 5;
  std::optional<int> hops;
  std::optional<double> omega;
  std::optional<std::size_t> sample_size;
  std::uint64_t seed = 0;
  bool standardize = true;
  SilhouetteMode silhouette_mode = SilhouetteMode::kCentroidLevel;
  ObjectiveForm objective = ObjectiveForm::kAffine;
  GreedyPool greedy_pool = GreedyPool::kExclusive;
  int max_iterations = 300;
  double tolerance = 1e-6;

  ExtractionConfig extraction() const;
  MatchConfig matching() const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct RunMetrics {
  double deviation_mean = 0.0;
  double deviation_std = 0.0;
  double deviation_min = 0.0;
  double deviation_max = 0.0;
  double balance = 0.0;
  double cohesion = 0.0;
  double overlap = 0.0;
  std::optional<double> silhouette;  // crisp partitions only
  std::size_t n_clusters = 0;
  double coverage = 0.0;
  friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

struct RunRecord {
  int schema_version = kSchemaVersion;
  std::string dataset;
  RunConfig config;
  std::optional<RunMetrics> metrics;
  std::optional<std::string> error;
  double wall_time_s = 0.0;
  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

// Silhouette is exact up to this many instances and estimated on a seeded
// subsample of this size above it.
inline constexpr std::size_t kSilhouetteSampleCap = 5000;

// Metrics of an arbitrary clustering. `diameter` may be passed in to avoid
// recomputing the dataset's maximum pairwise distance.
RunMetrics evaluate(const Dataset& ds, const Clustering& c,
                    std::optional<double> diameter = std::nullopt);

struct PipelineResult {
  std::vector<Clusterlet> clusterlets;
  Clustering clustering;
  RunMetrics metrics;
};

// Extraction + matching + evaluation on an already preprocessed dataset.
PipelineResult run_pipeline(const Dataset& ds, const RunConfig& cfg,
                            std::optional<double> diameter = std::nullopt);

struct GridSpec {
  std::vector<MatcherKind> matchers;
  std::vector<int> k_values;
  std::vector<int> hops_values;
  std::vector<double> omega_values;
  std::size_t sample_size = 0;
  std::vector<std::uint64_t> seeds;
  Profile profile = Profile::kTest;
  bool standardize = true;
  GreedyPool greedy_pool = GreedyPool::kExclusive;
};

// The published grid: all five matchers, hops 1-4, omega 0-0.75,
// k in {2,5,10,20,30}, ten seeds; sample size from the profile.
GridSpec default_grid(Profile p = Profile::kTest);
void validate(const GridSpec& g);

// JSON or a flat TOML subset, detected from the first non-blank character.
// Missing keys keep their default_grid values; `fallback` is the profile used
// when the text does not name one.
GridSpec parse_grid_config(const std::string& text, Profile fallback = Profile::kTest);

// Collapsed cartesian product, in deterministic order.
std::vector<RunConfig> expand_grid(const GridSpec& g);

struct GridOptions {
  unsigned workers = 0;  // 0: CLUSTERLETS_WORKERS, else hardware concurrency
  // Called once per record, in grid order, under a single-writer guarantee.
  std::function<void(const RunRecord&)> sink;
};

unsigned resolve_workers(unsigned requested);

// Runs every cell; failures become records with `error` set.
std::vector<RunRecord> run_grid(const Dataset& ds, const std::string& dataset_name,
                                const GridSpec& grid, const GridOptions& opts = {});

enum class SelectionCriterion { kMeanDeviation, kCohesion };

struct SelectionFilters {
  std::size_t max_excluded_clusters = 2;  // drop n_clusters <= this
  double max_overlap = 0.5;               // drop overlap >= this
};

struct Selection {
  std::optional<RunRecord> best;
  std::size_t considered = 0;
  // Filter name -> number of records it removed; set whatever the outcome.
  std::map<std::string, std::size_t> excluded_by;
};

bool passes_filters(const RunRecord& r, const SelectionFilters& f);

// Best record per dataset. Ties: higher cohesion, lower max deviation, lower
// mean deviation, then the serialized config.
std::map<std::string, Selection> select_best(const std::vector<RunRecord>& records,
                                             SelectionCriterion criterion,
                                             const SelectionFilters& filters = {});

}  // namespace clusterlets
