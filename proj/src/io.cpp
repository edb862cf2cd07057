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

#include "clusterlets/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "clusterlets/errors.hpp"
#include "json.hpp"

namespace clusterlets {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

template <typename T>
ojson opt(const std::optional<T>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<T>();
}

ojson config_json(const RunConfig& c) {
  ojson j;
  j["matcher"] = std::string(matcher_name(c.matcher));
  j["k"] = c.k;
  j["hops"] = opt(c.hops);
  j["omega"] = opt(c.omega);
  j["sample_size"] = opt(c.sample_size);
  j["seed"] = c.seed;
  j["standardize"] = c.standardize;
  j["silhouette_mode"] = std::string(silhouette_mode_name(c.silhouette_mode));
  j["objective"] = std::string(objective_form_name(c.objective));
  j["greedy_pool"] = std::string(greedy_pool_name(c.greedy_pool));
  j["max_iterations"] = c.max_iterations;
  j["tolerance"] = c.tolerance;
  return j;
}

RunConfig config_of(const json& j) {
  RunConfig c;
  const auto m = parse_matcher(j.at("matcher").get<std::string>());
  if (!m) throw ParseError("unknown matcher '" + j.at("matcher").get<std::string>() + "'");
  c.matcher = *m;
  c.k = j.at("k").get<int>();
  c.hops = get_opt<int>(j, "hops");
  c.omega = get_opt<double>(j, "omega");
  c.sample_size = get_opt<std::size_t>(j, "sample_size");
  c.seed = j.at("seed").get<std::uint64_t>();
  c.standardize = j.value("standardize", true);
  if (j.contains("silhouette_mode")) {
    const auto s = parse_silhouette_mode(j["silhouette_mode"].get<std::string>());
    if (!s) throw ParseError("unknown silhouette mode");
    c.silhouette_mode = *s;
  }
  if (j.contains("objective")) {
    const auto o = parse_objective_form(j["objective"].get<std::string>());
    if (!o) throw ParseError("unknown objective form");
    c.objective = *o;
  }
  if (j.contains("greedy_pool")) {
    const auto p = parse_greedy_pool(j["greedy_pool"].get<std::string>());
    if (!p) throw ParseError("unknown greedy pool");
    c.greedy_pool = *p;
  }
  c.max_iterations = j.value("max_iterations", 300);
  c.tolerance = j.value("tolerance", 1e-6);
  return c;
}

ojson metrics_json(const RunMetrics& m) {
  ojson j;
  j["deviation_mean"] = m.deviation_mean;
  j["deviation_std"] = m.deviation_std;
  j["deviation_min"] = m.deviation_min;
  j["deviation_max"] = m.deviation_max;
  j["balance"] = m.balance;
  j["cohesion"] = m.cohesion;
  j["overlap"] = m.overlap;
  j["silhouette"] = opt(m.silhouette);
  j["n_clusters"] = m.n_clusters;
  j["coverage"] = m.coverage;
  return j;
}

RunMetrics metrics_of(const json& j) {
  RunMetrics m;
  m.deviation_mean = j.at("deviation_mean").get<double>();
  m.deviation_std = j.at("deviation_std").get<double>();
  m.deviation_min = j.at("deviation_min").get<double>();
  m.deviation_max = j.at("deviation_max").get<double>();
  m.balance = j.at("balance").get<double>();
  m.cohesion = j.at("cohesion").get<double>();
  m.overlap = j.at("overlap").get<double>();
  m.silhouette = get_opt<double>(j, "silhouette");
  m.n_clusters = j.at("n_clusters").get<std::size_t>();
  m.coverage = j.value("coverage", 0.0);
  return m;
}

template <typename F>
auto parse_json(const std::string& text, const char* what, F&& f) {
  try {
    return f(json::parse(text));
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

std::string shortest(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

constexpr const char* kCsvColumns[] = {
    "schema_version", "dataset", "matcher", "k", "hops", "omega", "sample_size", "seed",
    "standardize", "silhouette_mode", "objective", "greedy_pool", "max_iterations", "tolerance",
    "deviation_mean", "deviation_std", "deviation_min", "deviation_max", "balance",
    "cohesion", "overlap", "silhouette", "n_clusters", "coverage", "wall_time_s", "error"};

}  // namespace

std::string config_to_json(const RunConfig& c) { return config_json(c).dump(); }

RunConfig config_from_json(const std::string& text) {
  return parse_json(text, "run config", [](const json& j) { return config_of(j); });
}

std::string metrics_to_json(const RunMetrics& m, int indent) {
  return metrics_json(m).dump(indent);
}

RunMetrics metrics_from_json(const std::string& text) {
  return parse_json(text, "metrics", [](const json& j) { return metrics_of(j); });
}

std::string record_to_json(const RunRecord& r) {
  ojson j;
  j["schema_version"] = r.schema_version;
  j["dataset"] = r.dataset;
  j["config"] = config_json(r.config);
  j["metrics"] = r.metrics ? metrics_json(*r.metrics) : ojson(nullptr);
  j["error"] = opt(r.error);
  j["wall_time_s"] = r.wall_time_s;
  return j.dump();
}

RunRecord record_from_json(const std::string& line) {
  return parse_json(line, "run record", [](const json& j) {
    RunRecord r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kSchemaVersion)
      throw ParseError("run record: unsupported schema version " + std::to_string(r.schema_version));
    r.dataset = j.at("dataset").get<std::string>();
    r.config = config_of(j.at("config"));
    if (!j.at("metrics").is_null()) r.metrics = metrics_of(j["metrics"]);
    r.error = get_opt<std::string>(j, "error");
    r.wall_time_s = j.value("wall_time_s", 0.0);
    return r;
  });
}

std::string records_csv_header() {
  std::string out;
  for (const char* c : kCsvColumns) out += (out.empty() ? "" : ",") + std::string(c);
  return out;
}

std::string record_to_csv_row(const RunRecord& r) {
  auto num = [](const auto& v) -> std::string {
    if (!v) return "";
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(*v)>>) return shortest(*v);
    else return std::to_string(*v);
  };
  const RunConfig& c = r.config;
  std::vector<std::string> f{
      std::to_string(r.schema_version), csv_escape(r.dataset), std::string(matcher_name(c.matcher)),
      std::to_string(c.k), num(c.hops), num(c.omega), num(c.sample_size), std::to_string(c.seed),
      c.standardize ? "true" : "false", std::string(silhouette_mode_name(c.silhouette_mode)),
      std::string(objective_form_name(c.objective)), std::string(greedy_pool_name(c.greedy_pool)),
      std::to_string(c.max_iterations),
      shortest(c.tolerance)};
  if (r.metrics) {
    const RunMetrics& m = *r.metrics;
    for (double v : {m.deviation_mean, m.deviation_std, m.deviation_min, m.deviation_max,
                     m.balance, m.cohesion, m.overlap})
      f.push_back(shortest(v));
    f.push_back(num(m.silhouette));
    f.push_back(std::to_string(m.n_clusters));
    f.push_back(shortest(m.coverage));
  } else {
    f.insert(f.end(), 10, "");
  }
  f.push_back(shortest(r.wall_time_s));
  f.push_back(csv_escape(r.error.value_or("")));
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) out += (i ? "," : "") + f[i];
  return out;
}

namespace {

std::vector<RunRecord> records_from_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  {
    std::vector<std::string> row;
    std::string field;
    bool q = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
      const char c = text[i];
      if (q) {
        if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') field += '"', ++i;
        else if (c == '"') q = false;
        else field += c;
      } else if (c == '"') {
        q = true;
      } else if (c == ',') {
        row.push_back(std::move(field));
        field.clear();
      } else if (c == '\n') {
        row.push_back(std::move(field));
        field.clear();
        rows.push_back(std::move(row));
        row.clear();
      } else if (c != '\r') {
        field += c;
      }
    }
    if (!field.empty() || !row.empty()) {
      row.push_back(std::move(field));
      rows.push_back(std::move(row));
    }
  }
  if (rows.empty()) return {};
  const auto& header = rows.front();
  auto col = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError("results csv: missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  std::vector<RunRecord> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) throw ParseError("results csv: ragged row " + std::to_string(r));
    auto cell = [&](const char* name) -> const std::string& { return row[col(name)]; };
    auto d = [&](const char* name) { return std::stod(cell(name)); };
    try {
      RunRecord rec;
      rec.dataset = cell("dataset");
      const auto m = parse_matcher(cell("matcher"));
      if (!m) throw ParseError("results csv: unknown matcher");
      rec.config.matcher = *m;
      rec.config.k = std::stoi(cell("k"));
      if (!cell("hops").empty()) rec.config.hops = std::stoi(cell("hops"));
      if (!cell("omega").empty()) rec.config.omega = d("omega");
      if (!cell("sample_size").empty()) rec.config.sample_size = std::stoull(cell("sample_size"));
      rec.config.seed = std::stoull(cell("seed"));
      rec.config.standardize = cell("standardize") == "true";
      rec.config.silhouette_mode = parse_silhouette_mode(cell("silhouette_mode")).value_or(SilhouetteMode::kCentroidLevel);
      rec.config.objective = parse_objective_form(cell("objective")).value_or(ObjectiveForm::kAffine);
      rec.config.greedy_pool = parse_greedy_pool(cell("greedy_pool")).value_or(GreedyPool::kExclusive);
      rec.config.max_iterations = std::stoi(cell("max_iterations"));
      rec.config.tolerance = d("tolerance");
      if (!cell("deviation_mean").empty()) {
        RunMetrics mt;
        mt.deviation_mean = d("deviation_mean");
        mt.deviation_std = d("deviation_std");
        mt.deviation_min = d("deviation_min");
        mt.deviation_max = d("deviation_max");
        mt.balance = d("balance");
        mt.cohesion = d("cohesion");
        mt.overlap = d("overlap");
        if (!cell("silhouette").empty()) mt.silhouette = d("silhouette");
        mt.n_clusters = std::stoull(cell("n_clusters"));
        mt.coverage = d("coverage");
        rec.metrics = mt;
      }
      rec.wall_time_s = d("wall_time_s");
      if (!cell("error").empty()) rec.error = cell("error");
      out.push_back(std::move(rec));
    } catch (const std::logic_error& e) {
      throw ParseError("results csv: row " + std::to_string(r) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << contents;
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<RunRecord> read_records(const std::string& path) {
  const std::string text = read_file(path);
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) return records_from_csv(text);
  std::vector<RunRecord> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos) out.push_back(record_from_json(line));
  return out;
}

std::string clustering_to_json(const PipelineResult& result, const Dataset& ds,
                               const RunConfig& cfg, const DataSource& source) {
  const Fingerprint fp = fingerprint(ds);
  ojson j;
  j["schema_version"] = kSchemaVersion;
  j["matcher"] = result.clustering.source;
  j["config"] = config_json(cfg);
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << fp.hash;
  j["dataset_fingerprint"] = {{"rows", fp.rows}, {"hash", hex.str()}};
  j["data"] = {{"path", source.path},
               {"color_column", source.csv.color_column},
               {"feature_columns", ds.feature_names},
               {"colors", ds.color_names},
               {"standardize", source.standardize}};
  auto cls = ojson::array();
  for (const auto& c : result.clusterlets)
    cls.push_back({{"id", c.id}, {"color", ds.color_names[static_cast<std::size_t>(c.color)]},
                   {"members", c.members}, {"centroid", c.centroid}});
  j["clusterlets"] = cls;
  auto clusters = ojson::array();
  for (std::size_t i = 0; i < result.clustering.clusters.size(); ++i) {
    const Cluster& c = result.clustering.clusters[i];
    ojson hist = ojson::object();
    for (std::size_t k = 0; k < c.color_histogram.size(); ++k) hist[ds.color_names[k]] = c.color_histogram[k];
    clusters.push_back({{"id", i}, {"clusterlet_ids", c.clusterlet_ids}, {"members", c.members},
                        {"color_histogram", hist}});
  }
  j["clusters"] = clusters;
  return j.dump(2);
}

StoredClustering clustering_from_json(const std::string& text) {
  return parse_json(text, "clustering", [](const json& j) {
    StoredClustering s;
    s.config = config_of(j.at("config"));
    s.clustering.source = j.at("matcher").get<std::string>();
    const auto& fp = j.at("dataset_fingerprint");
    s.fingerprint.rows = fp.at("rows").get<std::size_t>();
    s.fingerprint.hash = std::stoull(fp.at("hash").get<std::string>(), nullptr, 16);
    const auto& data = j.at("data");
    s.source.path = data.value("path", "");
    s.source.csv.color_column = data.at("color_column").get<std::string>();
    s.source.csv.feature_columns = data.at("feature_columns").get<std::vector<std::string>>();
    s.color_names = data.at("colors").get<std::vector<std::string>>();
    s.source.csv.color_order = s.color_names;
    s.source.standardize = data.at("standardize").get<bool>();
    for (const auto& c : j.at("clusterlets")) {
      Clusterlet cl;
      cl.id = c.at("id").get<int>();
      const auto color = c.at("color").get<std::string>();
      const auto it = std::find(s.color_names.begin(), s.color_names.end(), color);
      if (it == s.color_names.end()) throw ParseError("clustering: unknown clusterlet color '" + color + "'");
      cl.color = static_cast<ColorId>(it - s.color_names.begin());
      cl.members = c.at("members").get<std::vector<std::size_t>>();
      cl.centroid = c.at("centroid").get<std::vector<double>>();
      s.clusterlets.push_back(std::move(cl));
    }
    for (const auto& c : j.at("clusters")) {
      Cluster cl;
      cl.clusterlet_ids = c.at("clusterlet_ids").get<std::vector<int>>();
      cl.members = c.at("members").get<std::vector<std::size_t>>();
      cl.color_histogram.assign(s.color_names.size(), 0);
      for (const auto& [name, count] : c.at("color_histogram").items()) {
        const auto it = std::find(s.color_names.begin(), s.color_names.end(), name);
        if (it == s.color_names.end()) throw ParseError("clustering: unknown histogram color '" + name + "'");
        cl.color_histogram[static_cast<std::size_t>(it - s.color_names.begin())] = count.get<std::size_t>();
      }
      s.clustering.clusters.push_back(std::move(cl));
    }
    return s;
  });
}

void check_compatible(const StoredClustering& s, const Dataset& ds) {
  if (!(fingerprint(ds) == s.fingerprint))
    throw ValidationError("clustering was produced from a different dataset (fingerprint mismatch)");
  for (const auto& c : s.clustering.clusters) {
    for (std::size_t m : c.members)
      if (m >= ds.size()) throw ValidationError("clustering references row " + std::to_string(m) + " beyond the dataset");
    if (histogram_of(c.members, ds) != c.color_histogram)
      throw ValidationError("cluster color histogram disagrees with its members");
  }
}

std::optional<double> record_value(const RunRecord& r, const std::string& name) {
  const RunConfig& c = r.config;
  if (name == "k") return c.k;
  if (name == "hops") return c.hops ? std::optional<double>(*c.hops) : std::nullopt;
  if (name == "omega") return c.omega;
  if (name == "sample_size")
    return c.sample_size ? std::optional<double>(static_cast<double>(*c.sample_size)) : std::nullopt;
  if (name == "seed") return static_cast<double>(c.seed);
  if (!r.metrics) return std::nullopt;
  const RunMetrics& m = *r.metrics;
  if (name == "deviation_mean") return m.deviation_mean;
  if (name == "deviation_std") return m.deviation_std;
  if (name == "deviation_min") return m.deviation_min;
  if (name == "deviation_max") return m.deviation_max;
  if (name == "balance") return m.balance;
  if (name == "cohesion") return m.cohesion;
  if (name == "overlap") return m.overlap;
  if (name == "silhouette") return m.silhouette;
  if (name == "n_clusters") return static_cast<double>(m.n_clusters);
  if (name == "coverage") return m.coverage;
  if (name == "wall_time_s") return r.wall_time_s;
  throw ConfigError("unknown record field '" + name + "'");
}

namespace {

bool selected(const RunRecord& r, const AnalysisOptions& o) {
  auto in = [](const std::vector<std::string>& list, const std::string& v) {
    return list.empty() || std::find(list.begin(), list.end(), v) != list.end();
  };
  if (!in(o.datasets, r.dataset)) return false;
  if (o.matchers.empty()) return true;
  for (const auto& name : o.matchers) {
    const auto m = parse_matcher(name);
    if (!m) throw ConfigError("unknown matcher '" + name + "' (valid: " + valid_matcher_names() + ")");
    if (*m == r.config.matcher) return true;
  }
  return false;
}

}  // namespace

std::string correlations_json(const std::vector<RunRecord>& records, const AnalysisOptions& opts) {
  std::vector<const RunRecord*> rows;
  for (const auto& r : records)
    if (r.metrics && selected(r, opts)) rows.push_back(&r);
  RunRecord probe;
  probe.metrics = RunMetrics{};
  for (const auto& v : opts.variables) (void)record_value(probe, v);  // rejects unknown names

  ojson j;
  j["n_records"] = rows.size();
  j["variables"] = opts.variables;
  auto pairs = ojson::array();
  for (std::size_t a = 0; a < opts.variables.size(); ++a)
    for (std::size_t b = a + 1; b < opts.variables.size(); ++b) {
      std::vector<double> xs, ys;
      for (const RunRecord* r : rows) {
        const auto x = record_value(*r, opts.variables[a]);
        const auto y = record_value(*r, opts.variables[b]);
        if (x && y) {
          xs.push_back(*x);
          ys.push_back(*y);
        }
      }
      ojson p{{"x", opts.variables[a]}, {"y", opts.variables[b]}, {"n", xs.size()}};
      if (xs.size() >= 3) {
        const Correlations c = correlations(xs, ys);
        p["pearson"] = opt(c.pearson);
        p["spearman"] = opt(c.spearman);
        p["kendall"] = opt(c.kendall);
      } else {
        p["pearson"] = p["spearman"] = p["kendall"] = nullptr;
      }
      pairs.push_back(p);
    }
  j["pairs"] = pairs;
  return j.dump(2);
}

ScoreTable matcher_scores(const std::vector<RunRecord>& records, const AnalysisOptions& opts) {
  std::map<std::string, std::map<std::string, std::pair<double, std::size_t>>> acc;
  for (const auto& r : records) {
    if (!r.metrics || !selected(r, opts)) continue;
    const auto v = record_value(r, opts.rank_metric);
    if (!v) continue;
    auto& cell = acc[r.dataset][std::string(matcher_name(r.config.matcher))];
    cell.first += *v;
    ++cell.second;
  }
  ScoreTable out;
  for (const auto& [ds, row] : acc)
    for (const auto& [m, sum] : row) out[ds][m] = sum.first / static_cast<double>(sum.second);
  return out;
}

}  // namespace clusterlets
