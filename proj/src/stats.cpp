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

#include "clusterlets/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/fisher_f.hpp>
#include "json.hpp"

#include "clusterlets/errors.hpp"

namespace clusterlets {

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys) {
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::optional<double> kendall_tau_b(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size();
  double concordant = 0.0, discordant = 0.0, ties_x = 0.0, ties_y = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = xs[i] - xs[j], dy = ys[i] - ys[j];
      if (dx == 0.0) ties_x += 1.0;
      if (dy == 0.0) ties_y += 1.0;
      if (dx == 0.0 || dy == 0.0) continue;
      ((dx > 0) == (dy > 0) ? concordant : discordant) += 1.0;
    }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  const double denom = std::sqrt((pairs - ties_x) * (pairs - ties_y));
  if (!(denom > 0.0)) return std::nullopt;
  return std::clamp((concordant - discordant) / denom, -1.0, 1.0);
}

Correlations correlations(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DomainError("correlations: length mismatch");
  if (xs.size() < 3) throw DomainError("correlations: need at least 3 pairs");
  Correlations c;
  c.pearson = pearson(xs, ys);
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  c.spearman = pearson(rx, ry);
  c.kendall = kendall_tau_b(xs, ys);
  return c;
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// P(range of m iid standard normals <= q).
double range_cdf(double q, std::size_t m) {
  constexpr double lo = -10.0, hi = 10.0;
  constexpr int steps = 4000;  // even, Simpson
  const double h = (hi - lo) / steps;
  auto f = [&](double z) {
    const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
    return phi * std::pow(normal_cdf(z + q) - normal_cdf(z), static_cast<double>(m - 1));
  };
  double s = f(lo) + f(hi);
  for (int i = 1; i < steps; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return static_cast<double>(m) * s * h / 3.0;
}

}  // namespace

double studentized_range_q(double alpha, std::size_t m) {
  if (m < 2) throw DomainError("studentized range needs m >= 2");
  double lo = 0.0, hi = 20.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (range_cdf(mid, m) < 1.0 - alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi) / std::sqrt(2.0);
}

double nemenyi_q05(std::size_t m) {
  static constexpr std::array<double, 9> kTable{1.960, 2.343, 2.569, 2.728, 2.850,
                                                2.949, 3.031, 3.102, 3.164};
  if (m < 2) throw DomainError("nemenyi: need at least 2 methods");
  if (m - 2 < kTable.size()) return kTable[m - 2];
  return studentized_range_q(0.05, m);
}

RankTable rank_methods(const ScoreTable& scores, bool higher_is_better) {
  if (scores.empty()) throw ValidationError("rank_methods: no datasets");
  RankTable t;
  for (const auto& [ds, row] : scores) {
    t.datasets.push_back(ds);
    for (const auto& [method, _] : row)
      if (std::find(t.methods.begin(), t.methods.end(), method) == t.methods.end())
        t.methods.push_back(method);
  }
  std::sort(t.methods.begin(), t.methods.end());
  const std::size_t m = t.methods.size();
  const std::size_t n = t.datasets.size();
  if (m < 2) throw ValidationError("rank_methods: need at least 2 methods");

  t.average_ranks.assign(m, 0.0);
  for (const auto& ds : t.datasets) {
    const auto& row = scores.at(ds);
    std::vector<double> vals(m);
    for (std::size_t j = 0; j < m; ++j) {
      auto it = row.find(t.methods[j]);
      if (it == row.end())
        throw ValidationError("rank_methods: missing score for method '" + t.methods[j] +
                              "' on dataset '" + ds + "'");
      // Rank 1 is the worst method.
      vals[j] = higher_is_better ? it->second : -it->second;
    }
    auto r = average_ranks(vals);
    for (std::size_t j = 0; j < m; ++j) t.average_ranks[j] += r[j] / static_cast<double>(n);
    t.ranks.push_back(std::move(r));
  }

  const double md = static_cast<double>(m), nd = static_cast<double>(n);
  t.critical_difference = nemenyi_q05(m) * std::sqrt(md * (md + 1.0) / (6.0 * nd));

  double sum_sq = 0.0;
  for (double r : t.average_ranks) sum_sq += r * r;
  t.friedman_chi2 = 12.0 * nd / (md * (md + 1.0)) * (sum_sq - md * (md + 1.0) * (md + 1.0) / 4.0);
  const double denom = nd * (md - 1.0) - t.friedman_chi2;
  if (n >= 2 && denom > 0.0) {
    t.iman_davenport_f = (nd - 1.0) * t.friedman_chi2 / denom;
    boost::math::fisher_f dist(md - 1.0, (md - 1.0) * (nd - 1.0));
    t.friedman_p = boost::math::cdf(boost::math::complement(dist, std::max(0.0, t.iman_davenport_f)));
  }

  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      if (std::abs(t.average_ranks[a] - t.average_ranks[b]) <= t.critical_difference)
        t.not_significant.emplace_back(a, b);

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return t.average_ranks[a] < t.average_ranks[b];
  });
  std::size_t last_end = 0;
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t j = i;
    while (j + 1 < m && t.average_ranks[order[j + 1]] - t.average_ranks[order[i]] <= t.critical_difference)
      ++j;
    if (j > i && j + 1 > last_end) {
      std::vector<std::string> g;
      for (std::size_t x = i; x <= j; ++x) g.push_back(t.methods[order[x]]);
      t.groups.push_back(std::move(g));
      last_end = j + 1;
    }
  }
  return t;
}

std::string rank_table_json(const RankTable& t) {
  nlohmann::ordered_json j;
  j["methods"] = t.methods;
  j["datasets"] = t.datasets;
  j["ranks"] = t.ranks;
  j["average_ranks"] = t.average_ranks;
  j["rank_convention"] = "1 = worst";
  j["critical_difference"] = t.critical_difference;
  j["alpha"] = 0.05;
  j["friedman_chi2"] = t.friedman_chi2;
  j["iman_davenport_f"] = t.iman_davenport_f;
  j["friedman_p"] = t.friedman_p ? nlohmann::ordered_json(*t.friedman_p) : nlohmann::ordered_json();
  auto pairs = nlohmann::ordered_json::array();
  for (auto [a, b] : t.not_significant) pairs.push_back({t.methods[a], t.methods[b]});
  j["not_significant"] = pairs;
  j["groups"] = t.groups;
  return j.dump(2);
}

std::string rank_table_svg(const RankTable& t) {
  const std::size_t m = t.methods.size();
  const double width = 640, left = 60, right = 580, axis_y = 60;
  auto x_of = [&](double rank) {
    return left + (rank - 1.0) / std::max<double>(1.0, static_cast<double>(m) - 1.0) * (right - left);
  };
  std::ostringstream s;
  s << std::fixed << std::setprecision(2);
  const double height = 120 + 22.0 * static_cast<double>(m + t.groups.size());
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<line x1=\"" << left << "\" y1=\"" << axis_y << "\" x2=\"" << right << "\" y2=\"" << axis_y
    << "\" stroke=\"black\"/>\n";
  for (std::size_t r = 1; r <= m; ++r) {
    const double x = x_of(static_cast<double>(r));
    s << "<line x1=\"" << x << "\" y1=\"" << axis_y - 5 << "\" x2=\"" << x << "\" y2=\"" << axis_y
      << "\" stroke=\"black\"/><text x=\"" << x << "\" y=\"" << axis_y - 10
      << "\" text-anchor=\"middle\">" << r << "</text>\n";
  }
  s << "<text x=\"" << left << "\" y=\"20\">CD = " << t.critical_difference
    << " (average rank, right is better)</text>\n";
  s << "<line x1=\"" << left << "\" y1=\"30\" x2=\"" << x_of(1.0 + t.critical_difference)
    << "\" y2=\"30\" stroke=\"black\" stroke-width=\"2\"/>\n";
  double y = axis_y + 25;
  for (std::size_t j = 0; j < m; ++j, y += 22) {
    const double x = x_of(t.average_ranks[j]);
    s << "<line x1=\"" << x << "\" y1=\"" << axis_y << "\" x2=\"" << x << "\" y2=\"" << y
      << "\" stroke=\"gray\"/><text x=\"" << x + 4 << "\" y=\"" << y << "\">" << t.methods[j]
      << " (" << t.average_ranks[j] << ")</text>\n";
  }
  for (const auto& g : t.groups) {
    double lo = 1e300, hi = -1e300;
    for (const auto& name : g) {
      const auto j = static_cast<std::size_t>(
          std::find(t.methods.begin(), t.methods.end(), name) - t.methods.begin());
      lo = std::min(lo, t.average_ranks[j]);
      hi = std::max(hi, t.average_ranks[j]);
    }
    s << "<line x1=\"" << x_of(lo) - 3 << "\" y1=\"" << y << "\" x2=\"" << x_of(hi) + 3 << "\" y2=\""
      << y << "\" stroke=\"black\" stroke-width=\"4\"/>\n";
    y += 22;
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace clusterlets
