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
#include <span>
#include <string>
#include <vector>

#include "clusterlets/dataset.hpp"
#include "clusterlets/extraction.hpp"

namespace clusterlets {

// A union of clusterlets. Members are deduplicated and ascending.
struct Cluster {
  std::vector<int> clusterlet_ids;
  std::vector<std::size_t> members;
  Histogram color_histogram;
};

Cluster make_cluster(std::vector<int> clusterlet_ids,
                     std::span<const Clusterlet> clusterlets,
                     std::size_t n_colors);

// Rebuilds the histogram of a member list against the dataset colors.
Histogram histogram_of(std::span<const std::size_t> members, const Dataset& ds);

struct Clustering {
  std::vector<Cluster> clusters;
  std::string source;  // matcher name
};

// Number of clusters containing each instance.
std::vector<int> membership_counts(const Clustering& c, std::size_t n);

// min over ordered color pairs of count ratios; 0 when any color is absent.
double balance(std::span<const std::size_t> histogram);
// min over clusters.
double balance(const Clustering& c);

// Frequency deviation: max over colors of |p_a - p_b| / max(p_a, p_b) with
// 0/0 = 0. Throws DomainError on an empty histogram.
double deviation(std::span<const std::size_t> a, std::span<const std::size_t> b);

struct DeviationStats {
  double mean = 0.0;
  double std = 0.0;  // population
  double min = 0.0;
  double max = 0.0;
};
DeviationStats mean_max_deviation(const Clustering& c, const Dataset& ds);

// Mean silhouette over instances; singletons contribute 0, as does a == b == 0.
// Throws DomainError with fewer than two clusters or an empty label range.
double silhouette(const Matrix& points, std::span<const int> labels);

// Silhouette of weighted points (clusterlet centroids weighted by size) from
// a distance matrix. Intra- and nearest-cluster distances are weighted means
// over the other points; a point alone in its cluster scores 0; the result is
// the weight-averaged score. Unit weights give silhouette().
double weighted_silhouette(const Matrix& distances,
                           std::span<const std::size_t> weights,
                           std::span<const int> labels);

double max_pairwise_distance(const Matrix& points);

// Mean pairwise distance inside a member set; sets larger than
// `subsample_above` are estimated from a seeded subsample of that size.
double mean_pairwise_distance(const Matrix& points,
                              std::span<const std::size_t> members,
                              std::size_t subsample_above = 2000,
                              std::uint64_t seed = 0);

// 1 - mean over clusters of (mean within-cluster distance / diameter).
double relative_cohesion(const Dataset& ds, const Clustering& c);
double relative_cohesion(const Dataset& ds, const Clustering& c, double diameter);

// Fraction of instances in two or more clusters.
double overlap_degree(const Clustering& c, std::size_t n);
// Fraction of instances in at least one cluster.
double coverage(const Clustering& c, std::size_t n);

// Per-instance labels if the clustering is a partition of all n instances.
std::optional<std::vector<int>> crisp_labels(const Clustering& c, std::size_t n);

}  // namespace clusterlets
