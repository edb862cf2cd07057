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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace clusterlets {

// Ranks with ties averaged; rank 1 goes to the smallest value.
std::vector<double> average_ranks(std::span<const double> xs);

// Each coefficient is nullopt when undefined (a constant input).
struct Correlations {
  std::optional<double> pearson;
  std::optional<double> spearman;
  std::optional<double> kendall;  // tau-b
};

// Throws DomainError on length mismatch or fewer than 3 pairs.
Correlations correlations(std::span<const double> xs, std::span<const double> ys);
std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys);
std::optional<double> kendall_tau_b(std::span<const double> xs, std::span<const double> ys);

// Two-tailed Nemenyi critical value q_0.05(m) (studentized range / sqrt 2).
// Tabulated for m <= 10, integrated numerically beyond.
double nemenyi_q05(std::size_t m);
// Same quantity obtained by integrating the studentized range distribution
// with infinite degrees of freedom.
double studentized_range_q(double alpha, std::size_t m);

// dataset -> method -> score
using ScoreTable = std::map<std::string, std::map<std::string, double>>;

struct RankTable {
  std::vector<std::string> methods;
  std::vector<std::string> datasets;
  // ranks[d][j]: rank of methods[j] on datasets[d]. 1 is the worst method,
  // m the best; ties share the average rank.
  std::vector<std::vector<double>> ranks;
  std::vector<double> average_ranks;
  double critical_difference = 0.0;
  double friedman_chi2 = 0.0;
  double iman_davenport_f = 0.0;
  std::optional<double> friedman_p;
  // Method index pairs whose average-rank gap is within the critical difference.
  std::vector<std::pair<std::size_t, std::size_t>> not_significant;
  // Maximal runs of methods (sorted by average rank) spanning at most the CD.
  std::vector<std::vector<std::string>> groups;
};

// Every method must be scored on every dataset (ValidationError otherwise).
RankTable rank_methods(const ScoreTable& scores, bool higher_is_better);

std::string rank_table_json(const RankTable& t);
std::string rank_table_svg(const RankTable& t);

}  // namespace clusterlets
