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

#include "clusterlets/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>

#include "clusterlets/errors.hpp"
#include "clusterlets/io.hpp"
#include "clusterlets/random.hpp"
#include "json.hpp"

namespace clusterlets {

using nlohmann::json;

std::optional<Profile> parse_profile(std::string_view s) {
  if (s == "test") return Profile::kTest;
  if (s == "paper") return Profile::kPaper;
  return std::nullopt;
}

std::size_t default_sample_size(Profile p) {
  return p == Profile::kPaper ? 250000 : 10000;
}

ExtractionConfig RunConfig::extraction() const {
  ExtractionConfig e;
  e.k_per_color = k;
  e.max_iterations = max_iterations;
  e.tolerance = tolerance;
  e.seed = seed;
  return e;
}

MatchConfig RunConfig::matching() const {
  MatchConfig m;
  m.matcher = matcher;
  m.hops = hops.value_or(1);
  m.omega = omega.value_or(0.0);
  m.sample_size = sample_size.value_or(default_sample_size(Profile::kTest));
  // Decorrelate the partition sampler from the k-means seeding stream.
  m.seed = mix_seed(seed, 0x5A3D);
  m.silhouette_mode = silhouette_mode;
  m.objective = objective;
  m.greedy_pool = greedy_pool;
  return m;
}

namespace {

std::optional<double> crisp_silhouette(const Dataset& ds, const Clustering& c) {
  if (c.clusters.size() < 2) return std::nullopt;
  const auto labels = crisp_labels(c, ds.size());
  if (!labels) return std::nullopt;
  if (ds.size() <= kSilhouetteSampleCap) return silhouette(ds.features, *labels);

  std::vector<std::size_t> idx(ds.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  Rng rng(mix_seed(0x5111, ds.size()));
  for (std::size_t i = 0; i < kSilhouetteSampleCap; ++i)
    std::swap(idx[i], idx[i + uniform_index(rng, idx.size() - i)]);
  idx.resize(kSilhouetteSampleCap);
  std::sort(idx.begin(), idx.end());
  Matrix sub(idx.size(), ds.dims());
  std::vector<int> sub_labels(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    std::copy_n(ds.features.row(idx[r]).begin(), ds.dims(), sub.row(r).begin());
    sub_labels[r] = (*labels)[idx[r]];
  }
  const bool multi = std::any_of(sub_labels.begin(), sub_labels.end(),
                                 [&](int l) { return l != sub_labels.front(); });
  if (!multi) return std::nullopt;
  return silhouette(sub, sub_labels);
}

PipelineResult run_prepared(const Dataset& ds, const RunConfig& cfg,
                            std::optional<double> diameter) {
  PipelineResult out;
  const auto part = partition_by_color(ds);
  out.clusterlets = extract_clusterlets(ds, part, cfg.extraction());
  const ClusterletGraph g = build_graph(out.clusterlets, ds.n_colors());
  out.clustering = match(g, ds, cfg.matching());
  out.metrics = evaluate(ds, out.clustering, diameter);
  return out;
}

}  // namespace

RunMetrics evaluate(const Dataset& ds, const Clustering& c, std::optional<double> diameter) {
  RunMetrics m;
  const DeviationStats dev = mean_max_deviation(c, ds);
  m.deviation_mean = dev.mean;
  m.deviation_std = dev.std;
  m.deviation_min = dev.min;
  m.deviation_max = dev.max;
  m.balance = balance(c);
  m.cohesion = relative_cohesion(ds, c, diameter ? *diameter : max_pairwise_distance(ds.features));
  m.overlap = overlap_degree(c, ds.size());
  m.coverage = coverage(c, ds.size());
  m.n_clusters = c.clusters.size();
  m.silhouette = crisp_silhouette(ds, c);
  return m;
}

PipelineResult run_pipeline(const Dataset& ds, const RunConfig& cfg,
                            std::optional<double> diameter) {
  if (!cfg.standardize) return run_prepared(ds, cfg, diameter);
  return run_prepared(standardize(ds), cfg, diameter);
}

GridSpec default_grid(Profile p) {
  GridSpec g;
  g.matchers = {MatcherKind::kCentroid, MatcherKind::kDistancePinball,
                MatcherKind::kBalancePinball, MatcherKind::kGreedyBalancePinball,
                MatcherKind::kGreedyDistancePinball};
  g.k_values = {2, 5, 10, 20, 30};
  g.hops_values = {1, 2, 3, 4};
  g.omega_values = {0.0, 0.25, 0.5, 0.75};
  g.sample_size = default_sample_size(p);
  for (std::uint64_t s = 0; s < 10; ++s) g.seeds.push_back(s);
  g.profile = p;
  return g;
}

void validate(const GridSpec& g) {
  if (g.matchers.empty()) throw ConfigError("grid: matchers must not be empty");
  if (g.k_values.empty()) throw ConfigError("grid: k values must not be empty");
  if (g.hops_values.empty()) throw ConfigError("grid: hops values must not be empty");
  if (g.omega_values.empty()) throw ConfigError("grid: omega values must not be empty");
  if (g.seeds.empty()) throw ConfigError("grid: seeds must not be empty");
  if (g.sample_size < 1) throw ConfigError("grid: sample size must be >= 1");
  for (int k : g.k_values)
    if (k < 1) throw ConfigError("grid: k must be >= 1");
  for (int h : g.hops_values)
    if (h < 1) throw ConfigError("grid: hops must be >= 1");
  for (double w : g.omega_values)
    if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("grid: omega must lie in [0, 1]");
}

namespace {

// Rewrites a TOML value into JSON text: single-quoted strings become
// double-quoted, digit separators and trailing array commas are dropped.
std::string toml_value_to_json(const std::string& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const char c = v[i];
    if (c == '"') {
      const auto end = v.find('"', i + 1);
      if (end == std::string::npos) throw ParseError("toml: unterminated string");
      out += v.substr(i, end - i + 1);
      i = end;
    } else if (c == '\'') {
      const auto end = v.find('\'', i + 1);
      if (end == std::string::npos) throw ParseError("toml: unterminated string");
      out += json(v.substr(i + 1, end - i - 1)).dump();
      i = end;
    } else if (c == '_' && i > 0 && std::isdigit(static_cast<unsigned char>(v[i - 1]))) {
      continue;
    } else {
      out += c;
    }
  }
  static const std::regex trailing_comma(R"(,\s*\])");
  return std::regex_replace(out, trailing_comma, "]");
}

std::string strip_toml_comment(const std::string& line) {
  bool in_dq = false, in_sq = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && !in_sq) in_dq = !in_dq;
    if (line[i] == '\'' && !in_dq) in_sq = !in_sq;
    if (line[i] == '#' && !in_dq && !in_sq) return line.substr(0, i);
  }
  return line;
}

json parse_toml_subset(const std::string& text) {
  json out = json::object();
  std::istringstream in(text);
  std::string line, key, value;
  int depth = 0;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(strip_toml_comment(line));
    if (line.empty()) continue;
    if (depth == 0) {
      if (line.front() == '[') continue;  // table headers are flattened
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ParseError("toml: line " + std::to_string(lineno) + ": expected key = value");
      key = trim(line.substr(0, eq));
      if (key.size() >= 2 && key.front() == '"' && key.back() == '"') key = key.substr(1, key.size() - 2);
      value = trim(line.substr(eq + 1));
    } else {
      value += " " + line;
    }
    depth = 0;
    bool in_str = false;
    for (char c : value) {
      if (c == '"' || c == '\'') in_str = !in_str;
      if (!in_str && c == '[') ++depth;
      if (!in_str && c == ']') --depth;
    }
    if (depth > 0) continue;
    try {
      out[key] = json::parse(toml_value_to_json(value));
    } catch (const json::exception& e) {
      throw ParseError("toml: key '" + key + "': " + e.what());
    }
  }
  if (depth > 0) throw ParseError("toml: unterminated array for key '" + key + "'");
  return out;
}

template <typename T>
std::vector<T> as_list(const json& v) {
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

}  // namespace

GridSpec parse_grid_config(const std::string& text, Profile fallback) {
  const auto first = text.find_first_not_of(" \t\r\n");
  json j;
  if (first != std::string::npos && text[first] == '{') {
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw ParseError(std::string("grid config: ") + e.what());
    }
  } else {
    j = parse_toml_subset(text);
  }

  Profile profile = fallback;
  if (j.contains("profile")) {
    const auto p = parse_profile(j["profile"].get<std::string>());
    if (!p) throw ConfigError("grid config: profile must be 'test' or 'paper'");
    profile = *p;
  }
  GridSpec g = default_grid(profile);
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "profile") continue;
      if (key == "matchers" || key == "matcher") {
        g.matchers.clear();
        for (const auto& name : as_list<std::string>(v)) {
          const auto m = parse_matcher(name);
          if (!m)
            throw ConfigError("grid config: unknown matcher '" + name + "' (valid: " +
                              valid_matcher_names() + ")");
          g.matchers.push_back(*m);
        }
      } else if (key == "k_values" || key == "k") {
        g.k_values = as_list<int>(v);
      } else if (key == "hops_values" || key == "hops") {
        g.hops_values = as_list<int>(v);
      } else if (key == "omega_values" || key == "omega") {
        g.omega_values = as_list<double>(v);
      } else if (key == "sample_size" || key == "samples") {
        g.sample_size = v.get<std::size_t>();
      } else if (key == "seeds") {
        g.seeds = as_list<std::uint64_t>(v);
      } else if (key == "n_seeds") {
        g.seeds.clear();
        for (std::uint64_t s = 0; s < v.get<std::uint64_t>(); ++s) g.seeds.push_back(s);
      } else if (key == "standardize") {
        g.standardize = v.get<bool>();
      } else if (key == "greedy_pool") {
        const auto p = parse_greedy_pool(v.get<std::string>());
        if (!p) throw ConfigError("grid config: greedy_pool must be 'exclusive' or 'shared'");
        g.greedy_pool = *p;
      } else {
        throw ConfigError("grid config: unknown key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("grid config: wrong value type: ") + e.what());
  }
  validate(g);
  return g;
}

std::vector<RunConfig> expand_grid(const GridSpec& g) {
  validate(g);
  std::vector<RunConfig> out;
  for (MatcherKind m : g.matchers)
    for (int k : g.k_values) {
      RunConfig base;
      base.matcher = m;
      base.k = k;
      base.standardize = g.standardize;
      base.greedy_pool = g.greedy_pool;
      if (is_pinball(m)) {
        for (int h : g.hops_values)
          for (auto seed : g.seeds) {
            RunConfig c = base;
            c.hops = h;
            c.seed = seed;
            out.push_back(c);
          }
      } else {
        for (double w : g.omega_values)
          for (auto seed : g.seeds) {
            RunConfig c = base;
            c.omega = w;
            c.sample_size = g.sample_size;
            c.seed = seed;
            out.push_back(c);
          }
      }
    }
  return out;
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CLUSTERLETS_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<RunRecord> run_grid(const Dataset& raw, const std::string& dataset_name,
                                const GridSpec& grid, const GridOptions& opts) {
  const auto cells = expand_grid(grid);
  const Dataset ds = grid.standardize ? standardize(raw) : raw;
  const double diameter = max_pairwise_distance(ds.features);

  std::vector<std::optional<RunRecord>> done(cells.size());
  std::vector<RunRecord> out;
  out.reserve(cells.size());
  std::mutex mu;
  std::size_t next_emit = 0;
  std::atomic<std::size_t> next_cell{0};

  auto work = [&] {
    for (;;) {
      const std::size_t i = next_cell.fetch_add(1);
      if (i >= cells.size()) return;
      RunRecord rec;
      rec.dataset = dataset_name;
      rec.config = cells[i];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        rec.metrics = run_prepared(ds, cells[i], diameter).metrics;
      } catch (const std::exception& e) {
        rec.error = e.what();
      }
      rec.wall_time_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

      std::lock_guard lock(mu);
      done[i] = std::move(rec);
      while (next_emit < done.size() && done[next_emit]) {
        if (opts.sink) opts.sink(*done[next_emit]);
        out.push_back(std::move(*done[next_emit]));
        ++next_emit;
      }
    }
  };

  const unsigned n = std::min<unsigned>(resolve_workers(opts.workers),
                                        static_cast<unsigned>(std::max<std::size_t>(1, cells.size())));
  if (n <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
  }
  return out;
}

bool passes_filters(const RunRecord& r, const SelectionFilters& f) {
  return r.metrics && r.metrics->n_clusters > f.max_excluded_clusters &&
         r.metrics->overlap < f.max_overlap;
}

std::map<std::string, Selection> select_best(const std::vector<RunRecord>& records,
                                             SelectionCriterion criterion,
                                             const SelectionFilters& filters) {
  std::map<std::string, Selection> out;
  std::map<std::string, std::string> best_key;
  const std::string clusters_filter = "n_clusters<=" + std::to_string(filters.max_excluded_clusters);
  std::ostringstream ov;
  ov << "overlap>=" << filters.max_overlap;
  const std::string overlap_filter = ov.str();

  auto better = [&](const RunRecord& a, const std::string& ka, const RunRecord& b,
                    const std::string& kb) {
    const RunMetrics& x = *a.metrics;
    const RunMetrics& y = *b.metrics;
    if (criterion == SelectionCriterion::kMeanDeviation) {
      if (x.deviation_mean != y.deviation_mean) return x.deviation_mean < y.deviation_mean;
    }
    if (x.cohesion != y.cohesion) return x.cohesion > y.cohesion;
    if (x.deviation_max != y.deviation_max) return x.deviation_max < y.deviation_max;
    if (x.deviation_mean != y.deviation_mean) return x.deviation_mean < y.deviation_mean;
    return ka < kb;
  };

  for (const auto& r : records) {
    Selection& sel = out[r.dataset];
    ++sel.considered;
    if (!r.metrics) {
      ++sel.excluded_by["error"];
      continue;
    }
    bool keep = true;
    if (r.metrics->n_clusters <= filters.max_excluded_clusters) {
      ++sel.excluded_by[clusters_filter];
      keep = false;
    }
    if (r.metrics->overlap >= filters.max_overlap) {
      ++sel.excluded_by[overlap_filter];
      keep = false;
    }
    if (!keep) continue;
    const std::string key = config_to_json(r.config);
    if (!sel.best || better(r, key, *sel.best, best_key[r.dataset])) {
      sel.best = r;
      best_key[r.dataset] = key;
    }
  }
  return out;
}

}  // namespace clusterlets
