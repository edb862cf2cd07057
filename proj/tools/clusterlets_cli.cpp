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

// Command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "clusterlets/clusterlets.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct DatasetDeleter {
  void operator()(clusterlets_dataset* d) const { clusterlets_dataset_free(d); }
};
struct ResultDeleter {
  void operator()(clusterlets_result* r) const { clusterlets_result_free(r); }
};
struct StringDeleter {
  void operator()(char* s) const { clusterlets_string_free(s); }
};
using DatasetPtr = std::unique_ptr<clusterlets_dataset, DatasetDeleter>;
using ResultPtr = std::unique_ptr<clusterlets_result, ResultDeleter>;
using OwnedString = std::unique_ptr<char, StringDeleter>;

// Library failure -> exit code. Bad input is a usage error; everything else
// is a runtime failure.
int report(clusterlets_status s, const std::string& context) {
  std::cerr << "clusterlets: " << context << ": " << clusterlets_status_string(s) << ": "
            << clusterlets_last_error() << "\n";
  switch (s) {
    case CLUSTERLETS_ERROR_CONFIG:
    case CLUSTERLETS_ERROR_PARSE:
    case CLUSTERLETS_ERROR_VALIDATION:
    case CLUSTERLETS_ERROR_INVALID_ARGUMENT:
      return kExitUsage;
    default:
      return kExitRuntime;
  }
}

bool write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) {
    std::cerr << "clusterlets: cannot write " << path << "\n";
    return false;
  }
  return true;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* or_null(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

struct Globals {
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string profile = "test";
};

struct DataFlags {
  std::string path;
  std::string color_col;
  std::string features;
  std::string color_order;
};

void add_data_flags(CLI::App* cmd, DataFlags& d, bool required = true) {
  auto* data = cmd->add_option("--data", d.path, "Input CSV with a header row")->check(CLI::ExistingFile);
  auto* color = cmd->add_option("--color-col", d.color_col, "Column holding the color (protected attribute)");
  if (required) {
    data->required();
    color->required();
  }
  cmd->add_option("--features", d.features, "Comma list of feature columns (default: all numeric)");
  cmd->add_option("--color-order", d.color_order,
                  "Comma list fixing the color order; the first color seeds pinball matching");
}

int load(const DataFlags& d, DatasetPtr& out) {
  clusterlets_dataset* raw = nullptr;
  const auto s = clusterlets_dataset_load_csv(d.path.c_str(), d.color_col.c_str(),
                                              or_null(d.features), or_null(d.color_order), &raw);
  if (s != CLUSTERLETS_OK) return report(s, "loading " + d.path);
  out.reset(raw);
  return kExitOk;
}

bool ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) std::cerr << "clusterlets: cannot create " << dir << ": " << ec.message() << "\n";
  return !ec;
}

// --- cluster ---

struct ClusterFlags {
  DataFlags data;
  std::string matcher;
  int k = 5;
  int hops = 1;
  double omega = 0.5;
  std::uint64_t samples = 0;
  bool no_standardize = false;
  std::string silhouette_mode = "centroid-level";
  std::string objective = "affine";
  std::string greedy_pool = "exclusive";
  int max_iterations = 300;
  double tolerance = 1e-6;
};

int cmd_cluster(const ClusterFlags& f, const Globals& g) {
  DatasetPtr ds;
  if (int rc = load(f.data, ds)) return rc;
  clusterlets_run_options opts;
  clusterlets_run_options_init(&opts);
  opts.matcher = f.matcher.c_str();
  opts.k = f.k;
  opts.hops = f.hops;
  opts.omega = f.omega;
  opts.sample_size = f.samples ? f.samples : clusterlets_profile_sample_size(g.profile.c_str());
  opts.seed = g.seed;
  opts.standardize = f.no_standardize ? 0 : 1;
  opts.silhouette_mode = f.silhouette_mode.c_str();
  opts.objective = f.objective.c_str();
  opts.greedy_pool = f.greedy_pool.c_str();
  opts.max_iterations = f.max_iterations;
  opts.tolerance = f.tolerance;

  clusterlets_result* raw = nullptr;
  if (auto s = clusterlets_run(ds.get(), &opts, &raw); s != CLUSTERLETS_OK) return report(s, "cluster");
  ResultPtr result(raw);

  char* clustering = nullptr;
  char* metrics = nullptr;
  if (auto s = clusterlets_result_clustering_json(result.get(), &clustering); s != CLUSTERLETS_OK)
    return report(s, "cluster");
  OwnedString c_owned(clustering);
  if (auto s = clusterlets_result_metrics_json(result.get(), &metrics); s != CLUSTERLETS_OK)
    return report(s, "cluster");
  OwnedString m_owned(metrics);

  if (!ensure_dir(g.out_dir)) return kExitRuntime;
  const fs::path dir(g.out_dir);
  if (!write_text(dir / "clustering.json", std::string(clustering) + "\n") ||
      !write_text(dir / "metrics.json", std::string(metrics) + "\n"))
    return kExitRuntime;
  std::cout << "clusters: " << clusterlets_result_cluster_count(result.get()) << "\n"
            << metrics << "\n";
  return kExitOk;
}

// --- grid ---

struct GridFlags {
  DataFlags data;
  std::string config;
  std::string dataset_name;
  unsigned workers = 0;
  bool dry_run = false;
};

int cmd_grid(const GridFlags& f, const Globals& g) {
  const std::string text = f.config.empty() ? std::string() : slurp(f.config);
  const char* config = f.config.empty() ? nullptr : text.c_str();
  std::size_t planned = 0;
  if (auto s = clusterlets_grid_size(config, g.profile.c_str(), &planned); s != CLUSTERLETS_OK)
    return report(s, "--config");
  if (f.dry_run) {
    std::cout << planned << " runs\n";
    return kExitOk;
  }
  DatasetPtr ds;
  if (int rc = load(f.data, ds)) return rc;
  const std::string name =
      f.dataset_name.empty() ? fs::path(f.data.path).stem().string() : f.dataset_name;
  std::size_t n = 0;
  const auto s = clusterlets_grid_run(ds.get(), name.c_str(), config, g.profile.c_str(),
                                      g.out_dir.c_str(), f.workers, &n);
  if (s != CLUSTERLETS_OK) return report(s, "grid");
  std::cout << n << " records written to " << (fs::path(g.out_dir) / "results.jsonl").string() << "\n";
  return kExitOk;
}

// --- eval ---

struct EvalFlags {
  std::string clustering;
  std::string data;
  std::string out;
};

int cmd_eval(const EvalFlags& f) {
  const std::string doc = slurp(f.clustering);
  char* metrics = nullptr;
  const auto s = clusterlets_evaluate(doc.c_str(), or_null(f.data), &metrics);
  if (s != CLUSTERLETS_OK) return report(s, "eval");
  OwnedString owned(metrics);
  std::cout << metrics << "\n";
  if (!f.out.empty() && !write_text(f.out, std::string(metrics) + "\n")) return kExitRuntime;
  return kExitOk;
}

// --- select ---

struct SelectFlags {
  std::string results;
  std::string criterion = "mean_deviation";
  std::size_t max_excluded_clusters = 2;
  double max_overlap = 0.5;
  std::string out;
};

int cmd_select(const SelectFlags& f) {
  char* json = nullptr;
  const auto s = clusterlets_select_best(f.results.c_str(), f.criterion.c_str(),
                                         f.max_excluded_clusters, f.max_overlap, &json);
  if (s != CLUSTERLETS_OK) return report(s, "select");
  OwnedString owned(json);
  std::cout << json << "\n";
  if (!f.out.empty() && !write_text(f.out, std::string(json) + "\n")) return kExitRuntime;
  return kExitOk;
}

// --- stats ---

struct StatsFlags {
  std::string results;
  std::string matchers;
  std::string datasets;
  std::string variables;
  std::string rank_metric;
  bool higher_is_better = false;
  bool no_svg = false;
};

int cmd_stats(const StatsFlags& f, const Globals& g) {
  clusterlets_stats_options o;
  clusterlets_stats_options_init(&o);
  o.matchers = or_null(f.matchers);
  o.datasets = or_null(f.datasets);
  o.variables = or_null(f.variables);
  o.rank_metric = or_null(f.rank_metric);
  o.higher_is_better = f.higher_is_better ? 1 : 0;
  o.write_svg = f.no_svg ? 0 : 1;
  const auto s = clusterlets_stats(f.results.c_str(), &o, g.out_dir.c_str());
  if (s != CLUSTERLETS_OK) return report(s, "stats");
  std::cout << "wrote correlations.json and ranks.json to " << g.out_dir << "\n";
  return kExitOk;
}

// --- synth ---

struct SynthFlags {
  std::size_t n_blobs = 4;
  std::size_t n_per_blob = 100;
  std::vector<double> proportions{50, 50};
  double separation = 8.0;
  std::size_t dims = 2;
  std::string out;
};

int cmd_synth(const SynthFlags& f, const Globals& g) {
  clusterlets_synth_options o;
  clusterlets_synth_options_init(&o);
  o.n_blobs = f.n_blobs;
  o.n_per_blob = f.n_per_blob;
  o.proportions = f.proportions.data();
  o.n_colors = f.proportions.size();
  o.separation = f.separation;
  o.dims = f.dims;
  o.seed = g.seed;
  clusterlets_dataset* raw = nullptr;
  if (auto s = clusterlets_dataset_synthesize(&o, &raw); s != CLUSTERLETS_OK) return report(s, "synth");
  DatasetPtr ds(raw);
  std::string out = f.out;
  if (out.empty()) {
    if (!ensure_dir(g.out_dir)) return kExitRuntime;
    out = (fs::path(g.out_dir) / "synth.csv").string();
  }
  if (auto s = clusterlets_dataset_write_csv(ds.get(), out.c_str()); s != CLUSTERLETS_OK)
    return report(s, "synth");
  std::cout << clusterlets_dataset_rows(ds.get()) << " rows written to " << out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fair clustering with monochrome clusterlets"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", clusterlets_version());

  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "Directory for output files")->capture_default_str();
  app.add_option("--profile", g.profile, "Sample-size profile")
      ->check(CLI::IsMember({"test", "paper"}))
      ->capture_default_str();

  const CLI::Validator matcher_check(
      [](std::string& v) -> std::string {
        if (clusterlets_matcher_valid(v.c_str())) return {};
        return "unknown matcher '" + v + "'; valid names: " + clusterlets_matcher_names();
      },
      "MATCHER");

  ClusterFlags cf;
  auto* cluster = app.add_subcommand("cluster", "Extract clusterlets and match them into a clustering");
  add_data_flags(cluster, cf.data);
  cluster->add_option("--matcher", cf.matcher, std::string("One of: ") + clusterlets_matcher_names())
      ->required()
      ->check(matcher_check);
  cluster->add_option("--k", cf.k, "Clusterlets per color")->check(CLI::PositiveNumber)->capture_default_str();
  cluster->add_option("--hops", cf.hops, "Pinball hops")->check(CLI::PositiveNumber)->capture_default_str();
  cluster->add_option("--omega", cf.omega, "Silhouette weight of the centroid matcher")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cluster->add_option("--samples", cf.samples, "Centroid matcher sample size (default: from profile)")
      ->check(CLI::PositiveNumber);
  cluster->add_flag("--no-standardize", cf.no_standardize, "Use raw feature values");
  cluster->add_option("--silhouette-mode", cf.silhouette_mode)
      ->check(CLI::IsMember({"centroid-level", "instance-level"}))
      ->capture_default_str();
  cluster->add_option("--objective", cf.objective, "Centroid objective form")
      ->check(CLI::IsMember({"affine", "literal"}))
      ->capture_default_str();
  cluster->add_option("--greedy-pool", cf.greedy_pool,
                      "Whether g-d-pb and g-b-pb may reuse clusterlets claimed by other clusters")
      ->check(CLI::IsMember({"exclusive", "shared"}))
      ->capture_default_str();
  cluster->add_option("--max-iter", cf.max_iterations, "k-means iteration cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cluster->add_option("--tol", cf.tolerance, "k-means squared centroid-shift tolerance")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  GridFlags gf;
  auto* grid = app.add_subcommand("grid", "Grid search over matchers and hyperparameters");
  add_data_flags(grid, gf.data, false);
  grid->add_option("--config", gf.config, "Grid config (JSON or TOML)")->check(CLI::ExistingFile);
  grid->add_option("--dataset-name", gf.dataset_name, "Name recorded in results (default: file stem)");
  grid->add_option("--workers", gf.workers, "Parallel runs (default: CLUSTERLETS_WORKERS or all cores)");
  grid->add_flag("--dry-run", gf.dry_run, "Only print the number of runs");

  EvalFlags ef;
  auto* eval = app.add_subcommand("eval", "Recompute metrics for a stored clustering.json");
  eval->add_option("--clustering", ef.clustering)->required()->check(CLI::ExistingFile);
  eval->add_option("--data", ef.data, "Dataset path (default: the one recorded)")->check(CLI::ExistingFile);
  eval->add_option("--out", ef.out, "Also write the metrics here");

  SelectFlags sf;
  auto* select = app.add_subcommand("select", "Best configuration per dataset");
  select->add_option("--results", sf.results, "results.jsonl or results.csv")->required()->check(CLI::ExistingFile);
  select->add_option("--criterion", sf.criterion)
      ->check(CLI::IsMember({"mean_deviation", "cohesion"}))
      ->capture_default_str();
  select->add_option("--max-excluded-clusters", sf.max_excluded_clusters,
                     "Drop runs with at most this many clusters")
      ->capture_default_str();
  select->add_option("--max-overlap", sf.max_overlap, "Drop runs whose overlap reaches this")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  select->add_option("--out", sf.out, "Also write the selection here");

  StatsFlags stf;
  auto* stats = app.add_subcommand("stats", "Correlations and matcher ranking over grid results");
  stats->add_option("--results", stf.results, "results.jsonl or results.csv")->required()->check(CLI::ExistingFile);
  stats->add_option("--matchers", stf.matchers, "Comma list filter");
  stats->add_option("--datasets", stf.datasets, "Comma list filter");
  stats->add_option("--variables", stf.variables, "Comma list of fields to correlate");
  stats->add_option("--rank-metric", stf.rank_metric, "Field used to rank matchers (default deviation_mean)");
  stats->add_flag("--higher-is-better", stf.higher_is_better, "Rank metric is to be maximized");
  stats->add_flag("--no-svg", stf.no_svg, "Skip ranks.svg");

  SynthFlags syf;
  auto* synth = app.add_subcommand("synth", "Generate a colored Gaussian-blob CSV");
  synth->add_option("--n-blobs", syf.n_blobs)->check(CLI::PositiveNumber)->capture_default_str();
  synth->add_option("--n-per-blob", syf.n_per_blob)->check(CLI::PositiveNumber)->capture_default_str();
  synth->add_option("--proportions", syf.proportions, "Color proportions inside each blob, e.g. 90,10")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->expected(2, 64);
  synth->add_option("--separation", syf.separation, "Distance between blob centers")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth->add_option("--dims", syf.dims)->check(CLI::PositiveNumber)->capture_default_str();
  synth->add_option("--out", syf.out, "Output CSV (default: <out-dir>/synth.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (grid->parsed() && !gf.dry_run && (gf.data.path.empty() || gf.data.color_col.empty())) {
    std::cerr << "clusterlets: grid: --data and --color-col are required\n";
    return kExitUsage;
  }

  if (cluster->parsed()) return cmd_cluster(cf, g);
  if (grid->parsed()) return cmd_grid(gf, g);
  if (eval->parsed()) return cmd_eval(ef);
  if (select->parsed()) return cmd_select(sf);
  if (stats->parsed()) return cmd_stats(stf, g);
  if (synth->parsed()) return cmd_synth(syf, g);
  return kExitUsage;
}
