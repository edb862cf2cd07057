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

#include "clusterlets/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "clusterlets/errors.hpp"
#include "clusterlets/random.hpp"

namespace clusterlets {

Cluster make_cluster(std::vector<int> clusterlet_ids,
                     std::span<const Clusterlet> clusterlets,
                     std::size_t n_colors) {
  std::sort(clusterlet_ids.begin(), clusterlet_ids.end());
  clusterlet_ids.erase(std::unique(clusterlet_ids.begin(), clusterlet_ids.end()),
                       clusterlet_ids.end());
  Cluster c;
  c.color_histogram.assign(n_colors, 0);
  for (int id : clusterlet_ids) {
    const Clusterlet& cl = clusterlets[static_cast<std::size_t>(id)];
    c.members.insert(c.members.end(), cl.members.begin(), cl.members.end());
  }
  std::sort(c.members.begin(), c.members.end());
  c.members.erase(std::unique(c.members.begin(), c.members.end()), c.members.end());
  // Clusterlets are disjoint and monochrome.
  for (int id : clusterlet_ids) {
    const Clusterlet& cl = clusterlets[static_cast<std::size_t>(id)];
    c.color_histogram[static_cast<std::size_t>(cl.color)] += cl.size();
  }
  c.clusterlet_ids = std::move(clusterlet_ids);
  return c;
}

Histogram histogram_of(std::span<const std::size_t> members, const Dataset& ds) {
  Histogram h(ds.n_colors(), 0);
  for (std::size_t m : members) ++h[static_cast<std::size_t>(ds.colors[m])];
  return h;
}

std::vector<int> membership_counts(const Clustering& c, std::size_t n) {
  std::vector<int> counts(n, 0);
  for (const auto& cl : c.clusters)
    for (std::size_t m : cl.members) ++counts[m];
  return counts;
}

double balance(std::span<const std::size_t> histogram) {
  std::size_t lo = std::numeric_limits<std::size_t>::max();
  std::size_t hi = 0;
  for (std::size_t v : histogram) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi == 0) throw DomainError("balance: histogram has no instances");
  return static_cast<double>(lo) / static_cast<double>(hi);
}

double balance(const Clustering& c) {
  if (c.clusters.empty()) throw DomainError("balance: empty clustering");
  double b = 1.0;
  for (const auto& cl : c.clusters) b = std::min(b, balance(cl.color_histogram));
  return b;
}

double deviation(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() != b.size()) throw DomainError("deviation: histogram size mismatch");
  const double ta = static_cast<double>(std::accumulate(a.begin(), a.end(), std::size_t{0}));
  const double tb = static_cast<double>(std::accumulate(b.begin(), b.end(), std::size_t{0}));
  if (ta == 0.0 || tb == 0.0) throw DomainError("deviation: empty histogram");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double pa = static_cast<double>(a[k]) / ta;
    const double pb = static_cast<double>(b[k]) / tb;
    const double denom = std::max(pa, pb);
    if (denom == 0.0) continue;
    worst = std::max(worst, std::abs(pa - pb) / denom);
  }
  return worst;
}

DeviationStats mean_max_deviation(const Clustering& c, const Dataset& ds) {
  if (c.clusters.empty()) throw DomainError("deviation: empty clustering");
  std::vector<double> devs;
  devs.reserve(c.clusters.size());
  for (const auto& cl : c.clusters) devs.push_back(deviation(cl.color_histogram, ds.color_counts));
  const double n = static_cast<double>(devs.size());
  DeviationStats s;
  s.mean = std::accumulate(devs.begin(), devs.end(), 0.0) / n;
  double var = 0.0;
  for (double d : devs) var += (d - s.mean) * (d - s.mean);
  s.std = std::sqrt(var / n);
  s.min = *std::min_element(devs.begin(), devs.end());
  s.max = *std::max_element(devs.begin(), devs.end());
  return s;
}

namespace {

std::vector<int> dense_labels(std::span<const int> labels, int& n_clusters) {
  std::map<int, int> ids;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, _] = ids.emplace(labels[i], static_cast<int>(ids.size()));
    out[i] = it->second;
  }
  n_clusters = static_cast<int>(ids.size());
  return out;
}

double silhouette_value(double a, double b) {
  const double m = std::max(a, b);
  return m > 0.0 ? (b - a) / m : 0.0;
}

}  // namespace

double silhouette(const Matrix& points, std::span<const int> labels) {
  if (labels.size() != points.rows())
    throw DomainError("silhouette: label count does not match point count");
  int k = 0;
  const auto lab = dense_labels(labels, k);
  if (k < 2) throw DomainError("silhouette: needs at least 2 clusters");
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int l : lab) ++sizes[static_cast<std::size_t>(l)];

  const std::size_t n = points.rows();
  std::vector<double> sums(static_cast<std::size_t>(k));
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto own = static_cast<std::size_t>(lab[i]);
    if (sizes[own] < 2) continue;
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) sums[static_cast<std::size_t>(lab[j])] += distance(points.row(i), points.row(j));
    const double a = sums[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < sums.size(); ++c)
      if (c != own) b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
    total += silhouette_value(a, b);
  }
  return total / static_cast<double>(n);
}

double weighted_silhouette(const Matrix& distances,
                           std::span<const std::size_t> weights,
                           std::span<const int> labels) {
  const std::size_t m = labels.size();
  if (weights.size() != m || distances.rows() != m || distances.cols() != m)
    throw DomainError("weighted silhouette: size mismatch");
  int k = 0;
  const auto lab = dense_labels(labels, k);
  if (k < 2) throw DomainError("silhouette: needs at least 2 clusters");
  std::vector<double> cluster_weight(static_cast<std::size_t>(k), 0.0);
  std::vector<std::size_t> cluster_points(static_cast<std::size_t>(k), 0);
  double total_weight = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (weights[i] == 0) throw DomainError("weighted silhouette: zero weight");
    const auto c = static_cast<std::size_t>(lab[i]);
    cluster_weight[c] += static_cast<double>(weights[i]);
    ++cluster_points[c];
    total_weight += static_cast<double>(weights[i]);
  }
  std::vector<double> sums(static_cast<std::size_t>(k));
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto own = static_cast<std::size_t>(lab[i]);
    if (cluster_points[own] < 2) continue;  // lone point: 0
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < m; ++j)
      sums[static_cast<std::size_t>(lab[j])] += static_cast<double>(weights[j]) * distances(i, j);
    // The point itself is at distance 0, so only its weight leaves the mean.
    const double a = sums[own] / (cluster_weight[own] - static_cast<double>(weights[i]));
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < sums.size(); ++c)
      if (c != own) b = std::min(b, sums[c] / cluster_weight[c]);
    total += static_cast<double>(weights[i]) * silhouette_value(a, b);
  }
  return total / total_weight;
}

double max_pairwise_distance(const Matrix& points) {
  double best = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i)
    for (std::size_t j = i + 1; j < points.rows(); ++j)
      best = std::max(best, squared_distance(points.row(i), points.row(j)));
  return std::sqrt(best);
}

double mean_pairwise_distance(const Matrix& points,
                              std::span<const std::size_t> members,
                              std::size_t subsample_above, std::uint64_t seed) {
  std::vector<std::size_t> pick(members.begin(), members.end());
  if (subsample_above >= 2 && pick.size() > subsample_above) {
    Rng rng(seed);
    for (std::size_t i = 0; i < subsample_above; ++i) {
      const std::size_t j = i + uniform_index(rng, pick.size() - i);
      std::swap(pick[i], pick[j]);
    }
    pick.resize(subsample_above);
  }
  const std::size_t n = pick.size();
  if (n < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      sum += distance(points.row(pick[i]), points.row(pick[j]));
  return sum / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

double relative_cohesion(const Dataset& ds, const Clustering& c) {
  return relative_cohesion(ds, c, max_pairwise_distance(ds.features));
}

double relative_cohesion(const Dataset& ds, const Clustering& c, double diameter) {
  if (c.clusters.empty()) throw DomainError("cohesion: empty clustering");
  if (!(diameter > 0.0)) throw DomainError("cohesion: dataset has zero diameter");
  double acc = 0.0;
  for (std::size_t i = 0; i < c.clusters.size(); ++i)
    acc += mean_pairwise_distance(ds.features, c.clusters[i].members, 2000,
                                  mix_seed(0xC0E5, i)) / diameter;
  return 1.0 - acc / static_cast<double>(c.clusters.size());
}

double overlap_degree(const Clustering& c, std::size_t n) {
  if (n == 0) return 0.0;
  const auto counts = membership_counts(c, n);
  const auto shared = std::count_if(counts.begin(), counts.end(), [](int v) { return v >= 2; });
  return static_cast<double>(shared) / static_cast<double>(n);
}

double coverage(const Clustering& c, std::size_t n) {
  if (n == 0) return 0.0;
  const auto counts = membership_counts(c, n);
  const auto covered = std::count_if(counts.begin(), counts.end(), [](int v) { return v >= 1; });
  return static_cast<double>(covered) / static_cast<double>(n);
}

std::optional<std::vector<int>> crisp_labels(const Clustering& c, std::size_t n) {
  std::vector<int> labels(n, -1);
  for (std::size_t k = 0; k < c.clusters.size(); ++k)
    for (std::size_t m : c.clusters[k].members) {
      if (labels[m] != -1) return std::nullopt;
      labels[m] = static_cast<int>(k);
    }
  if (std::find(labels.begin(), labels.end(), -1) != labels.end()) return std::nullopt;
  return labels;
}

}  // namespace clusterlets
