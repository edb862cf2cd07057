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

#include "clusterlets/matchers.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <limits>
#include <string>

#include "clusterlets/errors.hpp"
#include "clusterlets/random.hpp"

namespace clusterlets {
namespace {

constexpr std::array<std::pair<std::string_view, MatcherKind>, 7> kMatcherNames{{
    {"d-pb", MatcherKind::kDistancePinball},
    {"g-d-pb", MatcherKind::kGreedyDistancePinball},
    {"b-pb", MatcherKind::kBalancePinball},
    {"g-b-pb", MatcherKind::kGreedyBalancePinball},
    {"centroid", MatcherKind::kCentroid},
    {"g-b", MatcherKind::kGreedyBalancePinball},
    {"c", MatcherKind::kCentroid},
}};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

// Samples per chunk in the centroid matcher; each chunk has its own sub-seed.
constexpr std::size_t kChunkSize = 4096;

}  // namespace

std::string_view matcher_name(MatcherKind m) {
  for (const auto& [name, kind] : kMatcherNames)
    if (kind == m) return name;
  return "?";
}

std::optional<MatcherKind> parse_matcher(std::string_view name) {
  const std::string key = lower(name);
  for (const auto& [n, kind] : kMatcherNames)
    if (n == key) return kind;
  return std::nullopt;
}

std::string valid_matcher_names() { return "d-pb, g-d-pb, b-pb, g-b-pb, centroid"; }

bool is_pinball(MatcherKind m) { return m != MatcherKind::kCentroid; }

std::string_view silhouette_mode_name(SilhouetteMode m) {
  return m == SilhouetteMode::kCentroidLevel ? "centroid-level" : "instance-level";
}

std::optional<SilhouetteMode> parse_silhouette_mode(std::string_view s) {
  const std::string key = lower(s);
  if (key == "centroid-level" || key == "centroid") return SilhouetteMode::kCentroidLevel;
  if (key == "instance-level" || key == "instance") return SilhouetteMode::kInstanceLevel;
  return std::nullopt;
}

std::string_view objective_form_name(ObjectiveForm f) {
  return f == ObjectiveForm::kAffine ? "affine" : "literal";
}

std::optional<ObjectiveForm> parse_objective_form(std::string_view s) {
  const std::string key = lower(s);
  if (key == "affine") return ObjectiveForm::kAffine;
  if (key == "literal") return ObjectiveForm::kLiteral;
  return std::nullopt;
}

std::string_view greedy_pool_name(GreedyPool p) {
  return p == GreedyPool::kExclusive ? "exclusive" : "shared";
}

std::optional<GreedyPool> parse_greedy_pool(std::string_view s) {
  const std::string key = lower(s);
  if (key == "exclusive") return GreedyPool::kExclusive;
  if (key == "shared") return GreedyPool::kShared;
  return std::nullopt;
}

void validate(const MatchConfig& cfg) {
  if (cfg.hops < 1) throw ConfigError("hops must be >= 1");
  if (!(cfg.omega >= 0.0 && cfg.omega <= 1.0)) throw ConfigError("omega must lie in [0, 1]");
  if (cfg.sample_size < 1) throw ConfigError("sample size must be >= 1");
}

ClusterletGraph build_graph(std::vector<Clusterlet> clusterlets, std::size_t n_colors) {
  ClusterletGraph g;
  g.by_color.resize(n_colors);
  for (std::size_t i = 0; i < clusterlets.size(); ++i) {
    if (clusterlets[i].id != static_cast<int>(i))
      throw DomainError("clusterlet ids must be dense and ordered");
    const auto c = static_cast<std::size_t>(clusterlets[i].color);
    if (c >= n_colors) throw DomainError("clusterlet color out of range");
    g.by_color[c].push_back(static_cast<int>(i));
  }
  for (std::size_t c = 0; c < n_colors; ++c)
    if (g.by_color[c].empty())
      throw DomainError("color " + std::to_string(c) + " has no clusterlets");

  const std::size_t m = clusterlets.size();
  g.distances = Matrix(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const double d = distance(clusterlets[i].centroid, clusterlets[j].centroid);
      g.distances(i, j) = d;
      g.distances(j, i) = d;
    }
  g.clusterlets = std::move(clusterlets);
  return g;
}

bool GrowingCluster::contains(int id) const {
  return std::binary_search(ids.begin(), ids.end(), id);
}

void GrowingCluster::add(const Clusterlet& c) {
  auto it = std::lower_bound(ids.begin(), ids.end(), c.id);
  if (it != ids.end() && *it == c.id) return;
  ids.insert(it, c.id);
  histogram[static_cast<std::size_t>(c.color)] += c.size();
}

double pinball_measure(MatcherKind matcher, const GrowingCluster& cluster,
                       int last_added, int candidate, const ClusterletGraph& g,
                       const Dataset& ds) {
  const auto cand = static_cast<std::size_t>(candidate);
  const auto last = static_cast<std::size_t>(last_added);
  switch (matcher) {
    case MatcherKind::kDistancePinball: {
      double sum = 0.0;
      for (int id : cluster.ids) sum += g.distances(cand, static_cast<std::size_t>(id));
      return sum;
    }
    case MatcherKind::kGreedyDistancePinball:
      return g.distances(last, cand);
    case MatcherKind::kBalancePinball: {
      Histogram h = cluster.histogram;
      if (!cluster.contains(candidate))
        h[static_cast<std::size_t>(g.clusterlets[cand].color)] += g.clusterlets[cand].size();
      return deviation(h, ds.color_counts);
    }
    case MatcherKind::kGreedyBalancePinball: {
      Histogram h(ds.n_colors(), 0);
      h[static_cast<std::size_t>(g.clusterlets[last].color)] += g.clusterlets[last].size();
      if (candidate != last_added)
        h[static_cast<std::size_t>(g.clusterlets[cand].color)] += g.clusterlets[cand].size();
      return deviation(h, ds.color_counts);
    }
    case MatcherKind::kCentroid:
      break;
  }
  throw ConfigError("pinball_measure: centroid is not a pinball matcher");
}

std::vector<ColorId> hop_targets(int hop, std::size_t n_colors) {
  std::vector<ColorId> out;
  const auto k = static_cast<ColorId>(n_colors);
  if (hop % 2 == 1) {
    for (ColorId c = 1; c < k; ++c) out.push_back(c);
  } else {
    for (ColorId c = k - 2; c >= 0; --c) out.push_back(c);
  }
  return out;
}

Clustering pinball_match(const ClusterletGraph& g, const Dataset& ds,
                         const MatchConfig& cfg, std::vector<PinballStep>* trace) {
  validate(cfg);
  if (!is_pinball(cfg.matcher)) throw ConfigError("pinball_match needs a pinball matcher");
  if (g.n_colors() < 2) throw DomainError("pinball matching needs at least 2 colors");

  const bool exclusive = cfg.greedy_pool == GreedyPool::kExclusive &&
                         (cfg.matcher == MatcherKind::kGreedyDistancePinball ||
                          cfg.matcher == MatcherKind::kGreedyBalancePinball);
  std::vector<int> owner(g.size(), -1);
  for (int seed : g.by_color[0]) owner[static_cast<std::size_t>(seed)] = seed;

  Clustering out;
  out.source = std::string(matcher_name(cfg.matcher));
  for (int seed : g.by_color[0]) {
    GrowingCluster cluster;
    cluster.histogram.assign(g.n_colors(), 0);
    cluster.add(g.clusterlets[static_cast<std::size_t>(seed)]);
    int last = seed;
    for (int hop = 1; hop <= cfg.hops; ++hop) {
      for (ColorId target : hop_targets(hop, g.n_colors())) {
        const auto& pool = g.by_color[static_cast<std::size_t>(target)];
        const bool restrict = exclusive && std::any_of(pool.begin(), pool.end(), [&](int c) {
          const int o = owner[static_cast<std::size_t>(c)];
          return o == -1 || o == seed;
        });
        int best = -1;
        double best_v = std::numeric_limits<double>::infinity();
        for (int cand : pool) {
          // A clusterlet is never matched with itself at distance zero.
          if (cfg.matcher == MatcherKind::kGreedyDistancePinball && cand == last) continue;
          const int o = owner[static_cast<std::size_t>(cand)];
          if (restrict && o != -1 && o != seed) continue;
          const double v = pinball_measure(cfg.matcher, cluster, last, cand, g, ds);
          if (v < best_v || best == -1) {
            best = cand;
            best_v = v;
          }
        }
        if (best == -1) continue;
        if (owner[static_cast<std::size_t>(best)] == -1) owner[static_cast<std::size_t>(best)] = seed;
        cluster.add(g.clusterlets[static_cast<std::size_t>(best)]);
        last = best;
        if (trace) trace->push_back({seed, hop, target, best, best_v});
      }
    }
    out.clusters.push_back(make_cluster(cluster.ids, g.clusterlets, g.n_colors()));
  }
  return out;
}

double centroid_objective(double silhouette, double max_deviation, double omega,
                          ObjectiveForm form) {
  if (form == ObjectiveForm::kLiteral)
    return omega * silhouette + (1.0 - omega * max_deviation);
  return omega * silhouette + (1.0 - omega) * (1.0 - max_deviation);
}

std::optional<std::uint64_t> bell_number(std::size_t m) {
  // Bell triangle; row r ends with Bell(r + 1).
  std::vector<unsigned __int128> row{1};
  if (m == 0) return 1;
  for (std::size_t r = 1; r < m; ++r) {
    std::vector<unsigned __int128> next{row.back()};
    for (auto v : row) {
      next.push_back(next.back() + v);
      if (next.back() > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
    }
    row = std::move(next);
  }
  return static_cast<std::uint64_t>(row.back());
}

std::vector<int> canonical_partition(std::vector<int> blocks) {
  std::vector<std::pair<int, int>> seen;
  for (auto& b : blocks) {
    auto it = std::find_if(seen.begin(), seen.end(), [&](auto& p) { return p.first == b; });
    if (it == seen.end()) {
      seen.emplace_back(b, static_cast<int>(seen.size()));
      b = seen.back().second;
    } else {
      b = it->second;
    }
  }
  return blocks;
}

PartitionScore score_partition(const ClusterletGraph& g, const Dataset& ds,
                               std::vector<int> blocks, const MatchConfig& cfg) {
  const std::size_t m = g.size();
  if (blocks.size() != m) throw DomainError("partition size does not match clusterlet count");
  PartitionScore s;
  s.blocks = canonical_partition(std::move(blocks));
  const int n_blocks = *std::max_element(s.blocks.begin(), s.blocks.end()) + 1;

  std::vector<Histogram> hists(static_cast<std::size_t>(n_blocks), Histogram(ds.n_colors(), 0));
  for (std::size_t i = 0; i < m; ++i)
    hists[static_cast<std::size_t>(s.blocks[i])][static_cast<std::size_t>(g.clusterlets[i].color)] +=
        g.clusterlets[i].size();
  for (const auto& h : hists) s.max_deviation = std::max(s.max_deviation, deviation(h, ds.color_counts));

  if (n_blocks >= 2) {
    if (cfg.silhouette_mode == SilhouetteMode::kCentroidLevel) {
      std::vector<std::size_t> weights(m);
      for (std::size_t i = 0; i < m; ++i) weights[i] = g.clusterlets[i].size();
      s.silhouette = weighted_silhouette(g.distances, weights, s.blocks);
    } else {
      std::vector<int> labels(ds.size(), -1);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t member : g.clusterlets[i].members) labels[member] = s.blocks[i];
      if (std::find(labels.begin(), labels.end(), -1) != labels.end())
        throw DomainError("instance-level silhouette needs clusterlets covering every instance");
      s.silhouette = silhouette(ds.features, labels);
    }
  }
  s.objective = centroid_objective(s.silhouette, s.max_deviation, cfg.omega, cfg.objective);
  return s;
}

Clustering clustering_from_partition(const ClusterletGraph& g,
                                     std::span<const int> blocks, std::string source) {
  const int n_blocks = *std::max_element(blocks.begin(), blocks.end()) + 1;
  std::vector<std::vector<int>> ids(static_cast<std::size_t>(n_blocks));
  for (std::size_t i = 0; i < blocks.size(); ++i)
    ids[static_cast<std::size_t>(blocks[i])].push_back(static_cast<int>(i));
  Clustering out;
  out.source = std::move(source);
  for (auto& block : ids)
    if (!block.empty()) out.clusters.push_back(make_cluster(std::move(block), g.clusterlets, g.n_colors()));
  return out;
}

namespace {

// Next restricted-growth string in lexicographic order; false after the last.
bool next_partition(std::vector<int>& a, std::vector<int>& prefix_max) {
  const std::size_t m = a.size();
  for (std::size_t i = m; i-- > 1;) {
    if (a[i] <= prefix_max[i - 1]) {
      ++a[i];
      prefix_max[i] = std::max(prefix_max[i - 1], a[i]);
      for (std::size_t j = i + 1; j < m; ++j) {
        a[j] = 0;
        prefix_max[j] = prefix_max[i];
      }
      return true;
    }
  }
  return false;
}

}  // namespace

Clustering centroid_match(const ClusterletGraph& g, const Dataset& ds,
                          const MatchConfig& cfg, PartitionScore* best_out) {
  validate(cfg);
  const std::size_t m = g.size();
  if (m < 2) throw DomainError("centroid matcher needs at least 2 clusterlets");

  std::optional<PartitionScore> best;
  auto offer = [&](std::vector<int> blocks) {
    PartitionScore s = score_partition(g, ds, std::move(blocks), cfg);
    if (!best || s.objective > best->objective) best = std::move(s);
  };

  const auto bell = bell_number(m);
  if (bell && *bell <= cfg.sample_size) {
    std::vector<int> a(m, 0), prefix_max(m, 0);
    do {
      offer(a);
    } while (next_partition(a, prefix_max));
  } else {
    std::vector<int> blocks(m);
    const std::size_t n_chunks = (cfg.sample_size + kChunkSize - 1) / kChunkSize;
    for (std::size_t chunk = 0; chunk < n_chunks; ++chunk) {
      Rng rng(mix_seed(cfg.seed, chunk));
      const std::size_t count = std::min(kChunkSize, cfg.sample_size - chunk * kChunkSize);
      for (std::size_t s = 0; s < count; ++s) {
        const auto groups = 2 + uniform_index(rng, m - 1);  // {2..M}
        for (auto& b : blocks) b = static_cast<int>(uniform_index(rng, groups));
        offer(blocks);
      }
    }
  }
  Clustering out = clustering_from_partition(g, best->blocks, "centroid");
  if (best_out) *best_out = std::move(*best);
  return out;
}

Clustering match(const ClusterletGraph& g, const Dataset& ds, const MatchConfig& cfg) {
  return is_pinball(cfg.matcher) ? pinball_match(g, ds, cfg) : centroid_match(g, ds, cfg);
}

}  // namespace clusterlets
