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

#include <string>
#include <vector>

#include "clusterlets/dataset.hpp"
#include "clusterlets/harness.hpp"
#include "clusterlets/stats.hpp"

namespace clusterlets {

// --- run records ---

std::string config_to_json(const RunConfig& c);
RunConfig config_from_json(const std::string& text);
std::string metrics_to_json(const RunMetrics& m, int indent = 2);
RunMetrics metrics_from_json(const std::string& text);

// One line, no trailing newline.
std::string record_to_json(const RunRecord& r);
RunRecord record_from_json(const std::string& line);

std::string records_csv_header();
std::string record_to_csv_row(const RunRecord& r);

// Reads results.jsonl, or the flattened results.csv when the path ends in
// ".csv".
std::vector<RunRecord> read_records(const std::string& path);

// --- stored clusterings ---

// How the dataset behind a clustering was loaded; enough to reload it.
struct DataSource {
  std::string path;
  CsvOptions csv;
  bool standardize = true;
};

struct StoredClustering {
  Clustering clustering;
  std::vector<Clusterlet> clusterlets;
  RunConfig config;
  DataSource source;
  Fingerprint fingerprint;
  std::vector<std::string> color_names;
};

std::string clustering_to_json(const PipelineResult& result, const Dataset& ds,
                               const RunConfig& cfg, const DataSource& source);
StoredClustering clustering_from_json(const std::string& text);

// Throws ValidationError if the clustering does not belong to `ds`.
void check_compatible(const StoredClustering& s, const Dataset& ds);

// --- cross-run analysis ---

struct AnalysisOptions {
  std::vector<std::string> matchers;  // empty: all
  std::vector<std::string> datasets;  // empty: all
  std::vector<std::string> variables{"omega", "k", "hops", "deviation_mean",
                                     "deviation_max", "cohesion", "silhouette",
                                     "overlap", "n_clusters"};
  std::string rank_metric = "deviation_mean";
  bool higher_is_better = false;
};

// Record fields addressable by name in the analysis (config axes + metrics).
std::optional<double> record_value(const RunRecord& r, const std::string& name);

// Pairwise correlations over the filtered records, as JSON.
std::string correlations_json(const std::vector<RunRecord>& records,
                              const AnalysisOptions& opts);

// dataset -> matcher -> mean of rank_metric over that matcher's records.
ScoreTable matcher_scores(const std::vector<RunRecord>& records,
                          const AnalysisOptions& opts);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace clusterlets
