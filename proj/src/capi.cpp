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

#include "clusterlets/clusterlets.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

#include "clusterlets/dataset.hpp"
#include "clusterlets/errors.hpp"
#include "clusterlets/harness.hpp"
#include "clusterlets/io.hpp"
#include "clusterlets/stats.hpp"
#include "clusterlets/synth.hpp"
#include "json.hpp"

namespace cl = clusterlets;

struct clusterlets_dataset {
  cl::Dataset data;
  cl::DataSource source;
};

struct clusterlets_result {
  std::string clustering_json;
  std::string metrics_json;
  std::size_t n_clusters = 0;
};

namespace {

thread_local std::string g_last_error;

clusterlets_status fail(clusterlets_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

clusterlets_status status_of(cl::ErrorKind k) {
  switch (k) {
    case cl::ErrorKind::kConfig: return CLUSTERLETS_ERROR_CONFIG;
    case cl::ErrorKind::kParse: return CLUSTERLETS_ERROR_PARSE;
    case cl::ErrorKind::kValidation: return CLUSTERLETS_ERROR_VALIDATION;
    case cl::ErrorKind::kDomain: return CLUSTERLETS_ERROR_DOMAIN;
    case cl::ErrorKind::kIo: return CLUSTERLETS_ERROR_IO;
  }
  return CLUSTERLETS_ERROR_INTERNAL;
}

template <typename F>
clusterlets_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return CLUSTERLETS_OK;
  } catch (const cl::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(CLUSTERLETS_ERROR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CLUSTERLETS_ERROR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CLUSTERLETS_ERROR_INTERNAL, e.what());
  }
}

std::string str(const char* s) { return s ? std::string(s) : std::string(); }

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

cl::Profile profile_of(const char* p) {
  if (!p || !*p) return cl::Profile::kTest;
  const auto v = cl::parse_profile(p);
  if (!v) throw cl::ConfigError("profile must be 'test' or 'paper', got '" + std::string(p) + "'");
  return *v;
}

cl::RunConfig run_config_of(const clusterlets_run_options& o) {
  cl::RunConfig c;
  const auto m = cl::parse_matcher(str(o.matcher));
  if (!m)
    throw cl::ConfigError("unknown matcher '" + str(o.matcher) + "' (valid: " +
                          cl::valid_matcher_names() + ")");
  c.matcher = *m;
  c.k = o.k;
  c.seed = o.seed;
  c.standardize = o.standardize != 0;
  c.max_iterations = o.max_iterations;
  c.tolerance = o.tolerance;
  if (o.silhouette_mode) {
    const auto s = cl::parse_silhouette_mode(o.silhouette_mode);
    if (!s) throw cl::ConfigError("silhouette mode must be centroid-level or instance-level");
    c.silhouette_mode = *s;
  }
  if (o.objective) {
    const auto f = cl::parse_objective_form(o.objective);
    if (!f) throw cl::ConfigError("objective must be affine or literal");
    c.objective = *f;
  }
  if (o.greedy_pool) {
    const auto p = cl::parse_greedy_pool(o.greedy_pool);
    if (!p) throw cl::ConfigError("greedy pool must be exclusive or shared");
    c.greedy_pool = *p;
  }
  if (cl::is_pinball(c.matcher)) {
    c.hops = o.hops;
  } else {
    c.omega = o.omega;
    c.sample_size = o.sample_size;
  }
  cl::validate(c.extraction());
  cl::validate(c.matching());
  return c;
}

}  // namespace

extern "C" {

const char* clusterlets_version(void) { return "1.0.0"; }

const char* clusterlets_last_error(void) { return g_last_error.c_str(); }

const char* clusterlets_status_string(clusterlets_status s) {
  switch (s) {
    case CLUSTERLETS_OK: return "ok";
    case CLUSTERLETS_ERROR_CONFIG: return "configuration error";
    case CLUSTERLETS_ERROR_PARSE: return "parse error";
    case CLUSTERLETS_ERROR_VALIDATION: return "validation error";
    case CLUSTERLETS_ERROR_DOMAIN: return "domain error";
    case CLUSTERLETS_ERROR_IO: return "i/o error";
    case CLUSTERLETS_ERROR_INVALID_ARGUMENT: return "invalid argument";
    case CLUSTERLETS_ERROR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void clusterlets_string_free(char* s) { std::free(s); }

const char* clusterlets_matcher_names(void) {
  static const std::string names = cl::valid_matcher_names();
  return names.c_str();
}

int clusterlets_matcher_valid(const char* name) {
  return name && cl::parse_matcher(name) ? 1 : 0;
}

uint64_t clusterlets_profile_sample_size(const char* profile) {
  const auto p = cl::parse_profile(str(profile));
  return p ? cl::default_sample_size(*p) : 0;
}

clusterlets_status clusterlets_dataset_load_csv(const char* path, const char* color_column,
                                                const char* feature_columns,
                                                const char* color_order,
                                                clusterlets_dataset** out) {
  if (!path || !color_column || !out)
    return fail(CLUSTERLETS_ERROR_INVALID_ARGUMENT, "path, color column and out must be non-null");
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<clusterlets_dataset>();
    h->source.path = path;
    h->source.csv.color_column = color_column;
    h->source.csv.feature_columns = cl::split_list(str(feature_columns));
    h->source.csv.color_order = cl::split_list(str(color_order));
    h->data = cl::load_csv(path, h->source.csv);
    *out = h.release();
  });
}

void clusterlets_synth_options_init(clusterlets_synth_options* o) {
  if (!o) return;
  static const double kHalf[2] = {0.5, 0.5};
  const cl::SynthOptions d;
  o->n_blobs = d.n_blobs;
  o->n_per_blob = d.n_per_blob;
  o->proportions = kHalf;
  o->n_colors = 2;
  o->separation = d.separation;
  o->dims = d.dims;
  o->seed = d.seed;
}

clusterlets_status clusterlets_dataset_synthesize(const clusterlets_synth_options* o,
                                                  clusterlets_dataset** out) {
  if (!o || !out || (o->n_colors > 0 && !o->proportions))
    return fail(CLUSTERLETS_ERROR_INVALID_ARGUMENT, "options and out must be non-null");
  *out = nullptr;
  return guarded([&] {
    cl::SynthOptions s;
    s.n_blobs = o->n_blobs;
    s.n_per_blob = o->n_per_blob;
    s.proportions.assign(o->proportions, o->proportions + o->n_colors);
    s.separation = o->separation;
    s.dims = o->dims;
    s.seed = o->seed;
    auto h = std::make_unique<clusterlets_dataset>();
    h->data = cl::generate_blobs(s);
    h->source.csv.color_column = "color";
    *out = h.release();
  });
}

clusterlets_status clusterlets_dataset_write_csv(const clusterlets_dataset* ds, const char* path) {
  if (!ds || !path) return fail(CLUSTERLETS_ERROR_INVALID_ARGUMENT, "dataset and path must be non-null");
  return guarded([&] { cl::write_file(path, cl::to_csv(ds->data, "color")); });
}

size_t clusterlets_dataset_rows(const clusterlets_dataset* ds) { return ds ? ds->data.size() : 0; }
size_t clusterlets_dataset_dims(const clusterlets_dataset* ds) { return ds ? ds->data.dims() : 0; }
size_t clusterlets_dataset_color_count(const clusterlets_dataset* ds) {
  return ds ? ds->data.n_colors() : 0;
}
size_t clusterlets_dataset_color_size(const clusterlets_dataset* ds, size_t color) {
  return ds && color < ds->data.n_colors() ? ds->data.color_counts[color] : 0;
}
const char* clusterlets_dataset_color_name(const clusterlets_dataset* ds, size_t color) {
  return ds && color < ds->data.n_colors() ? ds->data.color_names[color].c_str() : nullptr;
}
void clusterlets_dataset_free(clusterlets_dataset* ds) { delete ds; }

void clusterlets_run_options_init(clusterlets_run_options* o) {
  if (!o) return;
  const cl::RunConfig d;
  o->matcher = "g-b-pb";
  o->k = d.k;
  o->hops = 1;
  o->omega = 0.5;
  o->sample_size = cl::default_sample_size(cl::Profile::kTest);
  o->seed = 0;
  o->standardize = 1;
  o->silhouette_mode = "centroid-level";
  o->objective = "affine";
  o->greedy_pool = "exclusive";
  o->max_iterations = d.max_iterations;
  o->tolerance = d.tolerance;
}

clusterlets_status clusterlets_run(const clusterlets_dataset* ds, const clusterlets_run_options* o,
                                   clusterlets_result** out) {
  if (!ds || !o || !out) return fail(CLUSTERLETS_ERROR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const cl::RunConfig cfg = run_config_of(*o);
    cl::DataSource src = ds->source;
    src.standardize = cfg.standardize;
    const cl::PipelineResult res = cl::run_pipeline(ds->data, cfg);
    auto h = std::make_unique<clusterlets_result>();
    h->clustering_json = cl::clustering_to_json(res, ds->data, cfg, src);
    h->metrics_json = cl::metrics_to_json(res.metrics);
    h->n_clusters = res.clustering.clusters.size();
    *out = h.release();
  });
}

size_t clusterlets_result_cluster_count(const clusterlets_result* r) { return r ? r->n_clusters : 0; }

clusterlets_status clusterlets_result_clustering_json(const clusterlets_result* r, char** out) {
  if (!r || !out) return fail(CLUSTERLETS_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = dup(r->clustering_json); });
}

clusterlets_status clusterlets_result_metrics_json(const clusterlets_result* r, char** out) {
  if (!r || !out) return fail(CLUSTERLETS_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = dup(r->metrics_json); });
}

void clusterlets_result_free(clusterlets_result* r) { delete r; }

clusterlets_status clusterlets_evaluate(const char* clustering_json, const char* data_path,
                                        char** metrics_json) {
  if (!clustering_json || !metrics_json) return fail(CLUSTERLETS_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const cl::StoredClustering s = cl::clustering_from_json(clustering_json);
    const std::string path = data_path ? std::string(data_path) : s.source.path;
    if (path.empty()) throw cl::ConfigError("clustering does not record a data path; pass one explicitly");
    const cl::Dataset raw = cl::load_csv(path, s.source.csv);
    cl::check_compatible(s, raw);
    const cl::Dataset ds = s.source.standardize ? cl::standardize(raw) : raw;
    *metrics_json = dup(cl::metrics_to_json(cl::evaluate(ds, s.clustering)));
  });
}

clusterlets_status clusterlets_grid_size(const char* config_text, const char* profile, size_t* out) {
  if (!out) return fail(CLUSTERLETS_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const cl::Profile p = profile_of(profile);
    const cl::GridSpec g = config_text ? cl::parse_grid_config(config_text, p) : cl::default_grid(p);
    *out = cl::expand_grid(g).size();
  });
}

clusterlets_status clusterlets_grid_run(const clusterlets_dataset* ds, const char* dataset_name,
                                        const char* config_text, const char* profile,
                                        const char* out_dir, unsigned workers, size_t* n_records) {
  if (!ds || !out_dir) return fail(CLUSTERLETS_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const cl::Profile p = profile_of(profile);
    const cl::GridSpec g = config_text ? cl::parse_grid_config(config_text, p) : cl::default_grid(p);
    std::filesystem::create_directories(out_dir);
    const auto dir = std::filesystem::path(out_dir);
    std::ofstream jsonl(dir / "results.jsonl", std::ios::binary | std::ios::trunc);
    std::ofstream csv(dir / "results.csv", std::ios::binary | std::ios::trunc);
    if (!jsonl || !csv) throw cl::IoError("cannot create results files in '" + std::string(out_dir) + "'");
    csv << cl::records_csv_header() << '\n';
    cl::GridOptions opts;
    opts.workers = workers;
    opts.sink = [&](const cl::RunRecord& r) {
      jsonl << cl::record_to_json(r) << '\n' << std::flush;
      csv << cl::record_to_csv_row(r) << '\n' << std::flush;
    };
    const auto records = cl::run_grid(ds->data, dataset_name ? dataset_name : "dataset", g, opts);
    if (n_records) *n_records = records.size();
  });
}

clusterlets_status clusterlets_select_best(const char* results_path, const char* criterion,
                                           size_t max_excluded_clusters, double max_overlap,
                                           char** out_json) {
  if (!results_path || !out_json) return fail(CLUSTERLETS_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const std::string c = criterion ? criterion : "mean_deviation";
    cl::SelectionCriterion crit;
    if (c == "mean_deviation") crit = cl::SelectionCriterion::kMeanDeviation;
    else if (c == "cohesion") crit = cl::SelectionCriterion::kCohesion;
    else throw cl::ConfigError("criterion must be mean_deviation or cohesion");
    cl::SelectionFilters f;
    f.max_excluded_clusters = max_excluded_clusters;
    f.max_overlap = max_overlap;
    const auto sel = cl::select_best(cl::read_records(results_path), crit, f);
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [ds, s] : sel) {
      nlohmann::ordered_json e;
      e["considered"] = s.considered;
      e["excluded_by"] = s.excluded_by;
      e["best"] = s.best ? nlohmann::ordered_json::parse(cl::record_to_json(*s.best))
                         : nlohmann::ordered_json(nullptr);
      j[ds] = e;
    }
    *out_json = dup(j.dump(2));
  });
}

void clusterlets_stats_options_init(clusterlets_stats_options* o) {
  if (!o) return;
  o->matchers = nullptr;
  o->datasets = nullptr;
  o->variables = nullptr;
  o->rank_metric = nullptr;
  o->higher_is_better = 0;
  o->write_svg = 1;
}

clusterlets_status clusterlets_stats(const char* results_path, const clusterlets_stats_options* o,
                                     const char* out_dir) {
  if (!results_path || !out_dir) return fail(CLUSTERLETS_ERROR_INVALID_ARGUMENT, "null argument");
  clusterlets_stats_options defaults;
  clusterlets_stats_options_init(&defaults);
  if (!o) o = &defaults;
  return guarded([&] {
    cl::AnalysisOptions a;
    a.matchers = cl::split_list(str(o->matchers));
    a.datasets = cl::split_list(str(o->datasets));
    if (o->variables) a.variables = cl::split_list(o->variables);
    if (o->rank_metric) a.rank_metric = o->rank_metric;
    a.higher_is_better = o->higher_is_better != 0;

    const auto records = cl::read_records(results_path);
    std::filesystem::create_directories(out_dir);
    const auto dir = std::filesystem::path(out_dir);
    cl::write_file((dir / "correlations.json").string(), cl::correlations_json(records, a));

    const cl::ScoreTable scores = cl::matcher_scores(records, a);
    std::size_t methods = 0;
    for (const auto& [_, row] : scores) methods = std::max(methods, row.size());
    if (methods < 2) {
      nlohmann::ordered_json j{{"skipped", "ranking needs at least two matchers in the results"}};
      cl::write_file((dir / "ranks.json").string(), j.dump(2));
      return;
    }
    const cl::RankTable t = cl::rank_methods(scores, a.higher_is_better);
    cl::write_file((dir / "ranks.json").string(), cl::rank_table_json(t));
    if (o->write_svg) cl::write_file((dir / "ranks.svg").string(), cl::rank_table_svg(t));
  });
}

}  // extern "C"
