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

#include "clusterlets/extraction.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "clusterlets/errors.hpp"
#include "clusterlets/random.hpp"

namespace clusterlets {
namespace {

std::vector<std::size_t> kmeanspp_seeds(const Matrix& pts, int k, Rng& rng) {
  const std::size_t n = pts.rows();
  std::vector<std::size_t> chosen;
  std::vector<char> taken(n, 0);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());

  auto take = [&](std::size_t i) {
    chosen.push_back(i);
    taken[i] = 1;
    for (std::size_t j = 0; j < n; ++j)
      d2[j] = std::min(d2[j], squared_distance(pts.row(j), pts.row(i)));
  };

  take(uniform_index(rng, n));
  while (chosen.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (!taken[j]) total += d2[j];
    std::size_t pick = n;
    if (total > 0.0) {
      const double r = uniform01(rng) * total;
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (taken[j] || d2[j] <= 0.0) continue;
        acc += d2[j];
        pick = j;
        if (acc > r) break;
      }
    } else {
      // Every remaining point coincides with a center.
      std::size_t remaining = 0;
      for (std::size_t j = 0; j < n; ++j) remaining += taken[j] ? 0 : 1;
      std::size_t target = uniform_index(rng, remaining);
      for (std::size_t j = 0; j < n; ++j) {
        if (taken[j]) continue;
        if (target-- == 0) {
          pick = j;
          break;
        }
      }
    }
    take(pick);
  }
  return chosen;
}

void recompute_centroid(const Matrix& pts, const std::vector<int>& assign,
                        int c, Matrix& centroids) {
  auto row = centroids.row(static_cast<std::size_t>(c));
  std::fill(row.begin(), row.end(), 0.0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < pts.rows(); ++i) {
    if (assign[i] != c) continue;
    ++count;
    const auto p = pts.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] += p[j];
  }
  for (auto& v : row) v /= static_cast<double>(count);
}

// Means of every cluster; emptied clusters steal the point farthest from its
// own centroid (taken from a cluster with at least two points).
Matrix update_centroids(const Matrix& pts, std::vector<int>& assign, int k) {
  const std::size_t d = pts.cols();
  Matrix centroids(static_cast<std::size_t>(k), d);
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < pts.rows(); ++i) {
    const auto c = static_cast<std::size_t>(assign[i]);
    ++counts[c];
    const auto p = pts.row(i);
    auto row = centroids.row(c);
    for (std::size_t j = 0; j < d; ++j) row[j] += p[j];
  }
  for (std::size_t c = 0; c < counts.size(); ++c)
    if (counts[c] > 0)
      for (auto& v : centroids.row(c)) v /= static_cast<double>(counts[c]);

  for (int e = 0; e < k; ++e) {
    if (counts[static_cast<std::size_t>(e)] > 0) continue;
    std::size_t far = pts.rows();
    double far_d = -1.0;
    for (std::size_t i = 0; i < pts.rows(); ++i) {
      const auto c = static_cast<std::size_t>(assign[i]);
      if (counts[c] < 2) continue;
      const double dd = squared_distance(pts.row(i), centroids.row(c));
      if (dd > far_d) {
        far_d = dd;
        far = i;
      }
    }
    const int src = assign[far];
    assign[far] = e;
    --counts[static_cast<std::size_t>(src)];
    counts[static_cast<std::size_t>(e)] = 1;
    std::copy_n(pts.row(far).begin(), d, centroids.row(static_cast<std::size_t>(e)).begin());
    recompute_centroid(pts, assign, src, centroids);
  }
  return centroids;
}

double inertia_of(const Matrix& pts, const std::vector<int>& assign,
                  const Matrix& centroids) {
  double s = 0.0;
  for (std::size_t i = 0; i < pts.rows(); ++i)
    s += squared_distance(pts.row(i), centroids.row(static_cast<std::size_t>(assign[i])));
  return s;
}

// Nearest-centroid assignment; a point stays put when its current centroid
// is among the nearest.
bool reassign(const Matrix& pts, const Matrix& centroids, std::vector<int>& assign) {
  bool changed = false;
  for (std::size_t i = 0; i < pts.rows(); ++i) {
    int best = assign[i];
    double best_d = best >= 0 ? squared_distance(pts.row(i), centroids.row(static_cast<std::size_t>(best)))
                              : std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
      const double dd = squared_distance(pts.row(i), centroids.row(c));
      if (dd < best_d) {
        best_d = dd;
        best = static_cast<int>(c);
      }
    }
    if (best != assign[i]) {
      assign[i] = best;
      changed = true;
    }
  }
  return changed;
}

}  // namespace

void validate(const ExtractionConfig& cfg) {
  if (cfg.k_per_color < 1) throw ConfigError("k must be >= 1");
  if (cfg.max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (!(cfg.tolerance >= 0.0)) throw ConfigError("tolerance must be >= 0");
}

KMeansResult kmeans(const Matrix& points, int k, const ExtractionConfig& cfg) {
  validate(cfg);
  const std::size_t n = points.rows();
  if (k < 1 || static_cast<std::size_t>(k) > n)
    throw DomainError("kmeans: need 1 <= k <= n (k=" + std::to_string(k) +
                      ", n=" + std::to_string(n) + ")");
  Rng rng(cfg.seed);
  const auto seeds = kmeanspp_seeds(points, k, rng);
  Matrix centroids(static_cast<std::size_t>(k), points.cols());
  for (std::size_t c = 0; c < seeds.size(); ++c)
    std::copy_n(points.row(seeds[c]).begin(), points.cols(), centroids.row(c).begin());

  KMeansResult res;
  res.assignments.assign(n, -1);
  reassign(points, centroids, res.assignments);

  bool stale = true;  // centroids not yet the means of the current assignment
  for (int it = 0; it < cfg.max_iterations; ++it) {
    Matrix next = update_centroids(points, res.assignments, k);
    double shift = 0.0;
    for (std::size_t c = 0; c < next.rows(); ++c)
      shift = std::max(shift, squared_distance(next.row(c), centroids.row(c)));
    centroids = std::move(next);
    stale = false;
    res.inertia_history.push_back(inertia_of(points, res.assignments, centroids));
    res.iterations = it + 1;
    if (shift < cfg.tolerance) break;
    if (!reassign(points, centroids, res.assignments)) break;
    stale = true;
  }
  if (stale) {
    centroids = update_centroids(points, res.assignments, k);
    res.inertia_history.push_back(inertia_of(points, res.assignments, centroids));
  }
  res.centroids = std::move(centroids);
  res.inertia = res.inertia_history.back();
  return res;
}

std::vector<Clusterlet> extract_clusterlets(const Dataset& ds,
                                            const ColorPartition& part,
                                            const ExtractionConfig& cfg) {
  validate(cfg);
  std::vector<Clusterlet> out;
  const std::size_t d = ds.dims();
  for (std::size_t color = 0; color < part.size(); ++color) {
    const auto& idx = part[color];
    if (idx.empty()) continue;
    Matrix pts(idx.size(), d);
    for (std::size_t r = 0; r < idx.size(); ++r)
      std::copy_n(ds.features.row(idx[r]).begin(), d, pts.row(r).begin());

    ExtractionConfig local = cfg;
    local.seed = mix_seed(cfg.seed, color);
    const int k = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(cfg.k_per_color), idx.size()));
    const KMeansResult km = kmeans(pts, k, local);

    const int base = static_cast<int>(out.size());
    for (int c = 0; c < k; ++c) {
      Clusterlet cl;
      cl.id = base + c;
      cl.color = static_cast<ColorId>(color);
      cl.centroid.assign(d, 0.0);
      out.push_back(std::move(cl));
    }
    for (std::size_t r = 0; r < idx.size(); ++r)
      out[static_cast<std::size_t>(base + km.assignments[r])].members.push_back(idx[r]);
    for (int c = 0; c < k; ++c) {
      auto& cl = out[static_cast<std::size_t>(base + c)];
      for (std::size_t m : cl.members) {
        const auto row = ds.features.row(m);
        for (std::size_t j = 0; j < d; ++j) cl.centroid[j] += row[j];
      }
      for (auto& v : cl.centroid) v /= static_cast<double>(cl.size());
    }
  }
  return out;
}

}  // namespace clusterlets
