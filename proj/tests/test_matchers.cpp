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


#include <algorithm>
#include <random>
#include <set>

#include "clusterlets/errors.hpp"
#include "clusterlets/matchers.hpp"
#include "doctest.h"
#include "oracles.hpp"

namespace cl = clusterlets;

namespace {

struct Piece {
  int color;
  std::vector<std::vector<double>> rows;
};

// Dataset plus one clusterlet per piece, in order.
oracle::Fixture build(const std::vector<Piece>& pieces, std::size_t n_colors = 2) {
  std::vector<int> colors;
  std::vector<std::vector<double>> rows;
  std::vector<cl::Clusterlet> cls;
  for (const auto& s : pieces) {
    cl::Clusterlet c;
    c.id = static_cast<int>(cls.size());
    c.color = s.color;
    c.centroid.assign(s.rows[0].size(), 0.0);
    for (const auto& r : s.rows) {
      c.members.push_back(rows.size());
      rows.push_back(r);
      colors.push_back(s.color);
      for (std::size_t d = 0; d < r.size(); ++d) c.centroid[d] += r[d] / s.rows.size();
    }
    cls.push_back(c);
  }
  cl::Matrix x(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t d = 0; d < rows[i].size(); ++d) x(i, d) = rows[i][d];
  std::vector<std::string> names;
  for (std::size_t c = 0; c < n_colors; ++c) names.push_back("c" + std::to_string(c));
  oracle::Fixture f;
  f.ds = cl::make_dataset(x, colors, names);
  f.graph = cl::build_graph(cls, n_colors);
  return f;
}

std::set<std::vector<int>> cluster_sets(const cl::Clustering& c) {
  std::set<std::vector<int>> out;
  for (const auto& k : c.clusters) out.insert(k.clusterlet_ids);
  return out;
}

cl::MatchConfig pinball(cl::MatcherKind m, int hops = 1) {
  cl::MatchConfig c;
  c.matcher = m;
  c.hops = hops;
  return c;
}

const cl::MatcherKind kPinballs[] = {cl::MatcherKind::kDistancePinball, cl::MatcherKind::kGreedyDistancePinball,
                                     cl::MatcherKind::kBalancePinball, cl::MatcherKind::kGreedyBalancePinball};

}  // namespace

TEST_CASE("matcher names") {
  CHECK(cl::parse_matcher("G-B-PB") == cl::MatcherKind::kGreedyBalancePinball);
  CHECK(cl::parse_matcher("g-b") == cl::MatcherKind::kGreedyBalancePinball);
  CHECK(cl::parse_matcher("centroid") == cl::MatcherKind::kCentroid);
  CHECK_FALSE(cl::parse_matcher("frac"));
  for (auto m : kPinballs) CHECK(cl::parse_matcher(cl::matcher_name(m)) == m);
  CHECK(cl::valid_matcher_names() == "d-pb, g-d-pb, b-pb, g-b-pb, centroid");
}

TEST_CASE("match config validation") {
  cl::MatchConfig c;
  c.hops = 0;
  CHECK_THROWS_AS(cl::validate(c), cl::ConfigError);
  c.hops = 1;
  c.omega = 1.5;
  CHECK_THROWS_AS(cl::validate(c), cl::ConfigError);
  c.omega = 1.0;
  c.sample_size = 0;
  CHECK_THROWS_AS(cl::validate(c), cl::ConfigError);
}

TEST_CASE("build_graph: distances") {
  const auto f = build({{0, {{0, 0}}}, {1, {{3, 4}}}, {1, {{0, 0}}}});
  CHECK(f.graph.distances(0, 1) == 5.0);
  CHECK(f.graph.distances(1, 0) == 5.0);
  CHECK(f.graph.distances(0, 2) == 0.0);
  for (std::size_t i = 0; i < 3; ++i) CHECK(f.graph.distances(i, i) == 0.0);
  CHECK(f.graph.by_color == std::vector<std::vector<int>>{{0}, {1, 2}});
}

TEST_CASE("build_graph: a color without clusterlets is a domain error") {
  auto f = build({{0, {{0, 0}}}, {1, {{1, 1}}}});
  auto cls = f.graph.clusterlets;
  CHECK_THROWS_AS(cl::build_graph(cls, 3), cl::DomainError);
}

TEST_CASE("build_graph: random graphs are symmetric with zero diagonal") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 50; ++t) {
    const auto f = oracle::random_fixture(rng, {1 + static_cast<int>(rng() % 5), 1 + static_cast<int>(rng() % 5)}, 3);
    const auto& d = f.graph.distances;
    for (std::size_t i = 0; i < d.rows(); ++i) {
      CHECK(d(i, i) == 0.0);
      for (std::size_t j = 0; j < d.rows(); ++j) CHECK(d(i, j) == d(j, i));
    }
  }
}

TEST_CASE("pinball: A1~B1, A2~B2 with G-D-PB") {
  // A1, A2 (color 0) then B1, B2 (color 1).
  const auto f = build({{0, {{0, 0}}}, {0, {{10, 0}}}, {1, {{0, 1}}}, {1, {{10, 1}}}});
  auto c = cl::pinball_match(f.graph, f.ds, pinball(cl::MatcherKind::kGreedyDistancePinball, 1));
  CHECK(cluster_sets(c) == std::set<std::vector<int>>{{0, 2}, {1, 3}});
  // The backward hop returns to color 0 and re-selects A1 without duplicating it.
  std::vector<cl::PinballStep> trace;
  c = cl::pinball_match(f.graph, f.ds, pinball(cl::MatcherKind::kGreedyDistancePinball, 2), &trace);
  CHECK(c.clusters[0].clusterlet_ids == std::vector<int>{0, 2});
  CHECK(c.clusters[0].members == std::vector<std::size_t>{0, 2});
  REQUIRE(trace.size() == 4);
  CHECK(trace[1].hop == 2);
  CHECK(trace[1].target == 0);
  CHECK(trace[1].selected == 0);
}

TEST_CASE("pinball: one clusterlet per color leaves no choice") {
  const auto f = build({{0, {{0, 0}, {1, 1}}}, {1, {{5, 5}}}, {2, {{9, 9}, {8, 8}, {7, 7}}}}, 3);
  for (auto m : kPinballs)
    for (int hops = 1; hops <= 4; ++hops) {
      const auto c = cl::pinball_match(f.graph, f.ds, pinball(m, hops));
      REQUIRE(c.clusters.size() == 1);
      CHECK(c.clusters[0].clusterlet_ids == std::vector<int>{0, 1, 2});
      CHECK(c.clusters[0].members.size() == 6);
    }
}

TEST_CASE("pinball_measure: examples") {
  // Candidate 3 sits at distance 1 from clusterlet 0 and 2 from clusterlet 1.
  const auto f = build({{0, {{0, 0}}}, {1, {{3, 0}}}, {0, {{9, 9}}}, {1, {{1, 0}}}});
  cl::GrowingCluster g;
  g.histogram.assign(2, 0);
  g.add(f.graph.clusterlets[0]);
  g.add(f.graph.clusterlets[1]);
  CHECK(cl::pinball_measure(cl::MatcherKind::kDistancePinball, g, 1, 3, f.graph, f.ds) == doctest::Approx(3.0));
  CHECK(cl::pinball_measure(cl::MatcherKind::kGreedyDistancePinball, g, 1, 3, f.graph, f.ds) == doctest::Approx(2.0));
}

TEST_CASE("pinball_measure: balance variants") {
  // Dataset: 3 of color 0, 3 of color 1.
  const auto f = build({{0, {{0}, {0}}}, {1, {{1}, {1}}}, {1, {{2}}}, {0, {{3}}}});
  cl::GrowingCluster g;
  g.histogram.assign(2, 0);
  g.add(f.graph.clusterlets[0]);
  // Adding the size-2 clusterlet mirrors the dataset frequencies.
  CHECK(cl::pinball_measure(cl::MatcherKind::kBalancePinball, g, 0, 1, f.graph, f.ds) == 0.0);
  CHECK(cl::pinball_measure(cl::MatcherKind::kBalancePinball, g, 0, 2, f.graph, f.ds) > 0.0);
  // Greedy balance: equal-size candidate beats an unequal one.
  const double equal = cl::pinball_measure(cl::MatcherKind::kGreedyBalancePinball, g, 0, 1, f.graph, f.ds);
  const double unequal = cl::pinball_measure(cl::MatcherKind::kGreedyBalancePinball, g, 0, 2, f.graph, f.ds);
  CHECK(equal == 0.0);
  CHECK(unequal == doctest::Approx(oracle::deviation({2, 1}, {3, 3})));
  CHECK(equal < unequal);
  const auto c = cl::pinball_match(f.graph, f.ds, pinball(cl::MatcherKind::kGreedyBalancePinball));
  CHECK(c.clusters[0].clusterlet_ids == std::vector<int>{0, 1});
}

TEST_CASE("hop targets bounce between the ends of the color order") {
  CHECK(cl::hop_targets(1, 2) == std::vector<int>{1});
  CHECK(cl::hop_targets(2, 2) == std::vector<int>{0});
  CHECK(cl::hop_targets(1, 4) == std::vector<int>{1, 2, 3});
  CHECK(cl::hop_targets(2, 4) == std::vector<int>{2, 1, 0});
  CHECK(cl::hop_targets(3, 4) == std::vector<int>{1, 2, 3});
}

TEST_CASE("pinball: ties go to the lowest clusterlet id") {
  // Two color-1 clusterlets equidistant from the seed.
  const auto f = build({{0, {{0, 0}}}, {1, {{1, 0}}}, {1, {{-1, 0}}}});
  for (auto m : kPinballs) {
    std::vector<cl::PinballStep> trace;
    cl::pinball_match(f.graph, f.ds, pinball(m), &trace);
    CHECK(trace[0].selected == 1);
  }
}

TEST_CASE("pinball: invariants on random graphs") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 200; ++t) {
    const int k = 2 + t % 3;
    std::vector<int> per;
    for (int c = 0; c < k; ++c) per.push_back(1 + static_cast<int>(rng() % 5));
    const auto f = oracle::random_fixture(rng, per);
    for (auto m : kPinballs)
      for (auto pool : {cl::GreedyPool::kExclusive, cl::GreedyPool::kShared}) {
        auto cfg = pinball(m, 1 + t % 4);
        cfg.greedy_pool = pool;
        const auto c = cl::pinball_match(f.graph, f.ds, cfg);
        CHECK(c.clusters.size() == f.graph.by_color[0].size());
        CHECK(cl::pinball_match(f.graph, f.ds, cfg).clusters.size() == c.clusters.size());
        for (std::size_t i = 0; i < c.clusters.size(); ++i) {
          const auto& cluster = c.clusters[i];
          CHECK(cluster.clusterlet_ids[0] <= f.graph.by_color[0][i]);
          std::set<int> colors;
          for (int id : cluster.clusterlet_ids) colors.insert(f.graph.clusterlets[id].color);
          CHECK(colors.size() == static_cast<std::size_t>(k));
          CHECK(cluster.color_histogram == cl::histogram_of(cluster.members, f.ds));
          for (auto member : cluster.members) CHECK(member < f.ds.size());
        }
        const double ov = cl::overlap_degree(c, f.ds.size());
        CHECK(ov >= 0.0);
        CHECK(ov <= 1.0);
        // Every first-color instance is covered.
        const auto counts = cl::membership_counts(c, f.ds.size());
        for (std::size_t i = 0; i < f.ds.size(); ++i)
          if (f.ds.colors[i] == 0) CHECK(counts[i] >= 1);
      }
  }
}

TEST_CASE("pinball: exclusive greedy pool is crisp when colors have equal clusterlet counts") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const auto f = oracle::random_fixture(rng, {n, n});
    for (auto m : {cl::MatcherKind::kGreedyDistancePinball, cl::MatcherKind::kGreedyBalancePinball}) {
      const auto c = cl::pinball_match(f.graph, f.ds, pinball(m, 1 + t % 4));
      CHECK(cl::overlap_degree(c, f.ds.size()) == 0.0);
      CHECK(cl::coverage(c, f.ds.size()) == 1.0);
    }
  }
}

TEST_CASE("pinball: shared greedy pool lets clusters share a clusterlet") {
  // Both seeds are closest to the same color-1 clusterlet.
  const auto f = build({{0, {{0, 0}}}, {0, {{0, 1}}}, {1, {{0, 0.5}}}, {1, {{50, 50}}}});
  auto cfg = pinball(cl::MatcherKind::kGreedyDistancePinball);
  cfg.greedy_pool = cl::GreedyPool::kShared;
  auto c = cl::pinball_match(f.graph, f.ds, cfg);
  CHECK(cluster_sets(c) == std::set<std::vector<int>>{{0, 2}, {1, 2}});
  cfg.greedy_pool = cl::GreedyPool::kExclusive;
  c = cl::pinball_match(f.graph, f.ds, cfg);
  CHECK(cluster_sets(c) == std::set<std::vector<int>>{{0, 2}, {1, 3}});
  // Non-greedy matchers ignore the pool setting.
  cfg.matcher = cl::MatcherKind::kDistancePinball;
  CHECK(cluster_sets(cl::pinball_match(f.graph, f.ds, cfg)) == std::set<std::vector<int>>{{0, 2}, {1, 2}});
}

TEST_CASE("pinball: exhausted exclusive pool falls back to reuse") {
  // Three seeds, one color-1 clusterlet.
  const auto f = build({{0, {{0}}}, {0, {{1}}}, {0, {{2}}}, {1, {{3}}}});
  const auto c = cl::pinball_match(f.graph, f.ds, pinball(cl::MatcherKind::kGreedyBalancePinball));
  for (const auto& cluster : c.clusters) CHECK(cluster.clusterlet_ids.back() == 3);
}

TEST_CASE("bell numbers and canonical partitions") {
  const std::uint64_t bell[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975};
  for (std::size_t m = 0; m < 11; ++m) CHECK(cl::bell_number(m) == bell[m]);
  CHECK(oracle::all_partitions(5).size() == 52);
  CHECK(cl::bell_number(25).has_value());
  CHECK_FALSE(cl::bell_number(40).has_value());
  CHECK(cl::canonical_partition({3, 3, 1, 7, 1}) == std::vector<int>{0, 0, 1, 2, 1});
}

TEST_CASE("centroid objective") {
  CHECK(cl::centroid_objective(0.4, 0.2, 0.25, cl::ObjectiveForm::kAffine) == doctest::Approx(0.25 * 0.4 + 0.75 * 0.8));
  CHECK(cl::centroid_objective(0.4, 0.2, 0.25, cl::ObjectiveForm::kLiteral) == doctest::Approx(0.1 + 1 - 0.05));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 1000; ++t) {
    const double w = u(rng), s = 2 * u(rng) - 1, d = u(rng), e = 0.1 * u(rng);
    CHECK(cl::centroid_objective(s + e, d, w, cl::ObjectiveForm::kAffine) >=
          cl::centroid_objective(s, d, w, cl::ObjectiveForm::kAffine));
    CHECK(cl::centroid_objective(s, std::min(1.0, d + e), w, cl::ObjectiveForm::kAffine) <=
          cl::centroid_objective(s, d, w, cl::ObjectiveForm::kAffine));
    CHECK(cl::centroid_objective(s, d, 0.0, cl::ObjectiveForm::kAffine) ==
          cl::centroid_objective(s + e, d, 0.0, cl::ObjectiveForm::kAffine));
  }
}

namespace {

cl::MatchConfig centroid(double omega, std::size_t samples = 10000, std::uint64_t seed = 0) {
  cl::MatchConfig c;
  c.matcher = cl::MatcherKind::kCentroid;
  c.omega = omega;
  c.sample_size = samples;
  c.seed = seed;
  return c;
}

// Two places; each holds a color-0 and a color-1 clusterlet of equal size.
oracle::Fixture paired_four() {
  return build({{0, {{0, 0}, {0.2, 0}}}, {0, {{10, 10}, {10.2, 10}}},
                {1, {{0, 0.3}, {0.1, 0.3}}}, {1, {{10, 10.3}, {10.1, 10.3}}}});
}

}  // namespace

TEST_CASE("centroid: omega 0 minimises the maximum deviation over all 15 partitions") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 20; ++t) {
    const auto f = oracle::random_fixture(rng, {2, 2});
    cl::PartitionScore best;
    cl::centroid_match(f.graph, f.ds, centroid(0.0), &best);
    double lowest = 1.0;
    for (const auto& p : oracle::all_partitions(4)) {
      const int nb = *std::max_element(p.begin(), p.end()) + 1;
      std::vector<cl::Histogram> h(nb, cl::Histogram(2, 0));
      for (int i = 0; i < 4; ++i) h[p[i]][f.graph.clusterlets[i].color] += f.graph.clusterlets[i].size();
      double md = 0;
      for (auto& x : h) md = std::max(md, oracle::deviation(x, f.ds.color_counts));
      lowest = std::min(lowest, md);
    }
    CHECK(best.max_deviation == doctest::Approx(lowest).epsilon(1e-12));
  }
}

TEST_CASE("centroid: omega 1 picks the two geometric pairs") {
  const auto f = paired_four();
  const auto c = cl::centroid_match(f.graph, f.ds, centroid(1.0));
  CHECK(cluster_sets(c) == std::set<std::vector<int>>{{0, 2}, {1, 3}});
  CHECK(cl::overlap_degree(c, f.ds.size()) == 0.0);
}

TEST_CASE("centroid: two clusterlets") {
  const auto f = build({{0, {{0, 0}}}, {1, {{5, 5}}}});
  // One block mirrors the dataset (J = 1 at omega 0); two singletons have
  // silhouette 0 and deviation 1.
  auto c = cl::centroid_match(f.graph, f.ds, centroid(0.0));
  CHECK(c.clusters.size() == 1);
  c = cl::centroid_match(f.graph, f.ds, centroid(0.75));
  CHECK(c.clusters.size() == 1);
  const auto lone = build({{0, {{0, 0}}}, {1, {{5, 5}}}});
  auto g = lone.graph;
  g.clusterlets.resize(1);
  g.by_color = {{0}, {}};
  g.distances = cl::Matrix(1, 1);
  CHECK_THROWS_AS(cl::centroid_match(g, lone.ds, centroid(0.5)), cl::DomainError);
}

TEST_CASE("centroid: full enumeration equals the exhaustive argmax up to six clusterlets") {
  std::mt19937_64 rng(34);
  for (int t = 0; t < 30; ++t) {
    const int m = 2 + t % 5;
    const int a = 1 + static_cast<int>(rng() % (m - 1));
    const auto f = oracle::random_fixture(rng, {a, m - a});
    for (double w : {0.0, 0.3, 0.6, 1.0}) {
      cl::PartitionScore got;
      const auto c = cl::centroid_match(f.graph, f.ds, centroid(w), &got);
      const auto want = oracle::centroid_argmax(f.graph, f.ds, w);
      CHECK(got.blocks == want.blocks);
      CHECK(got.objective == doctest::Approx(want.objective).epsilon(1e-12));
      // Output is a partition of the clusterlets.
      std::vector<int> seen;
      for (const auto& k : c.clusters) seen.insert(seen.end(), k.clusterlet_ids.begin(), k.clusterlet_ids.end());
      std::sort(seen.begin(), seen.end());
      std::vector<int> all(m);
      std::iota(all.begin(), all.end(), 0);
      CHECK(seen == all);
    }
  }
}

TEST_CASE("centroid: sampled search is seeded and returns a partition") {
  std::mt19937_64 rng(55);
  const auto f = oracle::random_fixture(rng, {6, 6});  // Bell(12) > 5000
  cl::PartitionScore a, b, other;
  const auto ca = cl::centroid_match(f.graph, f.ds, centroid(0.5, 5000, 9), &a);
  cl::centroid_match(f.graph, f.ds, centroid(0.5, 5000, 9), &b);
  cl::centroid_match(f.graph, f.ds, centroid(0.5, 5000, 10), &other);
  CHECK(a.blocks == b.blocks);
  CHECK(a.objective == b.objective);
  CHECK(cl::overlap_degree(ca, f.ds.size()) == 0.0);
  CHECK(cl::coverage(ca, f.ds.size()) == 1.0);
  CHECK(a.blocks == cl::canonical_partition(a.blocks));
  // A bigger budget extends the same sample stream, so it never does worse.
  cl::PartitionScore more;
  cl::centroid_match(f.graph, f.ds, centroid(0.5, 9000, 9), &more);
  CHECK(more.objective >= a.objective);
  // Score of the returned partition is reproducible from scratch.
  const auto rescored = cl::score_partition(f.graph, f.ds, a.blocks, centroid(0.5));
  CHECK(rescored.objective == a.objective);
}

TEST_CASE("centroid: instance-level silhouette mode") {
  const auto f = paired_four();
  auto cfg = centroid(1.0);
  cfg.silhouette_mode = cl::SilhouetteMode::kInstanceLevel;
  cl::PartitionScore best;
  const auto c = cl::centroid_match(f.graph, f.ds, cfg, &best);
  CHECK(cluster_sets(c) == std::set<std::vector<int>>{{0, 2}, {1, 3}});
  std::vector<int> labels(f.ds.size());
  for (std::size_t i = 0; i < 4; ++i)
    for (auto m : f.graph.clusterlets[i].members) labels[m] = best.blocks[i];
  CHECK(best.silhouette == doctest::Approx(oracle::instance_silhouette(f.ds.features, labels)));
}

TEST_CASE("centroid: literal objective ignores omega in the argmax") {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 10; ++t) {
    const auto f = oracle::random_fixture(rng, {2, 3});
    auto lo = centroid(0.25), hi = centroid(0.75);
    lo.objective = hi.objective = cl::ObjectiveForm::kLiteral;
    cl::PartitionScore a, b;
    cl::centroid_match(f.graph, f.ds, lo, &a);
    cl::centroid_match(f.graph, f.ds, hi, &b);
    CHECK(a.blocks == b.blocks);
  }
}

TEST_CASE("match dispatches on the matcher kind") {
  const auto f = paired_four();
  CHECK(cl::match(f.graph, f.ds, centroid(1.0)).source == "centroid");
  CHECK(cl::match(f.graph, f.ds, pinball(cl::MatcherKind::kBalancePinball)).source == "b-pb");
  CHECK_THROWS_AS(cl::pinball_match(f.graph, f.ds, centroid(0.5)), cl::ConfigError);
}
