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


#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code = -1;
  std::string output;
};

// Runs the CLI with stderr folded into stdout.
Outcome cli(const std::string& args) {
  const std::string cmd = std::string("\"") + CLUSTERLETS_CLI_PATH + "\" " + args + " 2>&1";
  Outcome o;
  FILE* p = ::popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), p)) o.output += buf.data();
  const int status = ::pclose(p);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Workspace {
  fs::path dir;
  explicit Workspace(const std::string& name) : dir(fs::temp_directory_path() / ("clusterlets_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto r = cli("--out-dir " + dir.string() + " synth --n-per-blob 40 --proportions 0.6,0.4");
    REQUIRE(r.code == 0);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string data() const { return (dir / "synth.csv").string(); }
  std::string out() const { return "--out-dir " + dir.string(); }
};

}  // namespace

TEST_CASE("cli: cluster writes a clustering and its metrics") {
  Workspace w("cluster");
  const auto r = cli(w.out() + " cluster --data " + w.data() + " --color-col color --matcher g-b-pb --k 4");
  REQUIRE(r.code == 0);
  const auto doc = json::parse(slurp(w.dir / "clustering.json"));
  CHECK(doc["clusters"].size() >= 2);
  const auto metrics = json::parse(slurp(w.dir / "metrics.json"));
  CHECK(metrics["overlap"] == 0.0);

  const auto e = cli("eval --clustering " + (w.dir / "clustering.json").string());
  REQUIRE(e.code == 0);
  CHECK(json::parse(e.output) == metrics);
}

TEST_CASE("cli: argument errors exit with 2") {
  Workspace w("errors");
  const auto base = w.out() + " cluster --data " + w.data() + " --color-col color";
  auto r = cli(base + " --matcher frac");
  CHECK(r.code == 2);
  CHECK(r.output.find("g-b-pb") != std::string::npos);
  CHECK(r.output.find("centroid") != std::string::npos);
  CHECK(cli(base + " --matcher centroid --omega 1.5").code == 2);
  CHECK(cli(w.out() + " cluster --color-col color --matcher d-pb").code == 2);
  CHECK(cli(base + " --matcher d-pb --k 0").code == 2);
  CHECK(cli(w.out() + " cluster --data " + w.data() + " --color-col shade --matcher d-pb").code == 2);
  CHECK(cli("synth --proportions 1").code == 2);
  CHECK(cli(w.out() + " synth --n-blobs 0").code == 2);
  CHECK(cli("frobnicate").code == 2);
  CHECK(cli("--help").code == 0);
}

TEST_CASE("cli: grid, select, stats") {
  Workspace w("grid");
  std::ofstream(w.dir / "grid.toml") << "matchers = [\"g-b-pb\", \"centroid\"]\nk = [2, 3]\nhops = [1]\n"
                                        "omega = [0.5]\nsamples = 200\nseeds = [0, 1]\n";
  const auto g = cli(w.out() + " grid --data " + w.data() + " --color-col color --config " +
                     (w.dir / "grid.toml").string() + " --workers 2");
  REQUIRE(g.code == 0);
  REQUIRE(fs::exists(w.dir / "results.jsonl"));
  REQUIRE(fs::exists(w.dir / "results.csv"));
  std::istringstream lines(slurp(w.dir / "results.jsonl"));
  std::string line;
  int n = 0;
  while (std::getline(lines, line))
    if (!line.empty()) {
      CHECK(json::parse(line)["dataset"] == "synth");
      ++n;
    }
  CHECK(n == 8);

  const auto dry = cli(w.out() + " grid --data " + w.data() + " --color-col color --config " +
                       (w.dir / "grid.toml").string() + " --dry-run");
  CHECK(dry.code == 0);
  CHECK(dry.output.find('8') != std::string::npos);

  const auto s = cli(w.out() + " select --results " + (w.dir / "results.jsonl").string());
  REQUIRE(s.code == 0);
  CHECK(json::parse(s.output)["synth"]["considered"] == 8);

  const auto st = cli(w.out() + " stats --results " + (w.dir / "results.jsonl").string());
  REQUIRE(st.code == 0);
  CHECK(fs::exists(w.dir / "correlations.json"));
  CHECK(fs::exists(w.dir / "ranks.json"));
  CHECK(fs::exists(w.dir / "ranks.svg"));

  std::ofstream(w.dir / "bad.toml") << "colour = 1\n";
  CHECK(cli(w.out() + " grid --data " + w.data() + " --color-col color --config " +
            (w.dir / "bad.toml").string()).code == 2);
}

TEST_CASE("cli: reruns are byte-identical") {
  Workspace w("repeat");
  const auto args = w.out() + " --seed 5 cluster --data " + w.data() +
                    " --color-col color --matcher centroid --k 3 --samples 500";
  REQUIRE(cli(args).code == 0);
  const auto first = slurp(w.dir / "clustering.json");
  REQUIRE(cli(args).code == 0);
  CHECK(slurp(w.dir / "clustering.json") == first);
}
