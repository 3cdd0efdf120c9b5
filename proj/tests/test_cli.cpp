// Copyright 2026 The fdmcar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fdmcar/cli.hpp"
#include "fdmcar/simulation.hpp"

using namespace fdmcar;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// Fresh working directory holding an MCAR sample as sample.csv.
struct Workspace {
  fs::path dir, old;
  Workspace() : old(fs::current_path()) {
    dir = fs::temp_directory_path() / ("fdmcar_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    fs::current_path(dir);
    ScenarioConfig c;
    c.n = 60;
    c.p = 30;
    c.seed = 4;
    write_csv(dir / "sample.csv", scenario_sample(c, 0));
  }
  ~Workspace() {
    fs::current_path(old);
    fs::remove_all(dir);
  }
};

json error_of(const Outcome& o) { return json::parse(o.err).at("error"); }

}  // namespace

TEST_CASE("test command writes results and a manifest") {
  Workspace ws;
  const auto o = cli({"test", "--input", "sample.csv", "--header", "--bstar", "300",
                      "--seed", "12", "--mz", "30", "--rho-points", "40"});
  REQUIRE(o.code == kExitOk);
  REQUIRE(fs::exists("sample_test.json"));
  const auto r = json::parse(slurp("sample_test.json"));
  CHECK(json::parse(o.out) == r);
  CHECK(r["schema_version"] == kSchemaVersion);
  CHECK(r["results"].size() == 3);
  for (const auto& t : r["results"]) {
    CHECK(t["p_value"].get<double>() > 0.0);
    CHECK(t["p_value"].get<double>() <= 1.0);
  }
  const auto m = json::parse(slurp("sample_test.json.manifest.json"));
  CHECK(m["seed"] == 12);
  CHECK(m["seed_source"] == "flag");
  CHECK(m["command"] == "test");
  CHECK(m.contains("timing"));
  CHECK_FALSE(r.contains("timing"));
  CHECK(fs::path(m["outputs"][0].get<std::string>()).is_absolute());
}

TEST_CASE("replay reproduces output across thread counts") {
  Workspace ws;
  REQUIRE(cli({"test", "--input", "sample.csv", "--header", "--bstar", "200",
               "--calibration", "bootstrap", "--mz", "20", "--out", "a.json"})
              .code == kExitOk);
  const std::string reference = slurp("a.json");
  for (const char* threads : {"1", "2", "4"}) {
    const std::string out = std::string("r") + threads + ".json";
    REQUIRE(cli({"replay", "a.json.manifest.json", "--threads", threads, "--out", out})
                .code == kExitOk);
    CHECK(slurp(out) == reference);
  }
}

TEST_CASE("seed falls back to the environment") {
  Workspace ws;
  ::setenv("FDMCAR_SEED", "31", 1);
  const auto o = cli({"test", "--input", "sample.csv", "--header", "--bstar", "50",
                      "--method", "l2", "--out", "e.json"});
  ::unsetenv("FDMCAR_SEED");
  REQUIRE(o.code == kExitOk);
  const auto m = json::parse(slurp("e.json.manifest.json"));
  CHECK(m["seed"] == 31);
  CHECK(m["seed_source"] == "env");
  cli({"test", "--input", "sample.csv", "--header", "--bstar", "50", "--method", "l2",
       "--out", "d.json"});
  CHECK(json::parse(slurp("d.json.manifest.json"))["seed_source"] == "default");
}

TEST_CASE("band command defaults") {
  Workspace ws;
  const auto o = cli({"band", "--input", "sample.csv", "--header", "--bstar", "200", "--plot"});
  REQUIRE(o.code == kExitOk);
  CHECK(fs::exists("sample_band.csv"));
  CHECK(fs::exists("sample_band.svg"));
  CHECK(fs::exists("sample_band.csv.manifest.json"));
  const std::string csv = slurp("sample_band.csv");
  CHECK(csv.rfind("t,center,lower,upper\n", 0) == 0);
  CHECK(slurp("sample_band.svg").find("<svg") != std::string::npos);
}

TEST_CASE("dump-estimates writes the estimator tables") {
  Workspace ws;
  REQUIRE(cli({"dump-estimates", "--input", "sample.csv", "--header"}).code == kExitOk);
  for (const char* f : {"mean.csv", "p_hat.csv", "kernel.csv", "nu.csv"})
    CHECK(fs::exists(fs::path("sample_estimates") / f));
}

TEST_CASE("simulate writes a rate table and power plot") {
  Workspace ws;
  const auto o = cli({"simulate", "--case", "2", "--n", "30", "--p", "15", "--reps", "3",
                      "--b-grid", "1:2:0.5", "--bstar", "100", "--mz", "20",
                      "--rho-points", "30", "--plot"});
  REQUIRE(o.code == kExitOk);
  CHECK(fs::exists("simulate_case2.csv"));
  CHECK(fs::exists("power.svg"));
  const std::string csv = slurp("simulate_case2.csv");
  CHECK(csv.rfind("case,n,p,a,b,method,calibration,rejections,runs,rate,se,failed\n", 0) == 0);
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 1 + 3 * 3);
}

TEST_CASE("errors are JSON on stderr with exit codes") {
  Workspace ws;
  {
    std::ofstream f("bad.csv");
    f << "1,2\n3,x\n";
  }
  auto o = cli({"test", "--input", "bad.csv"});
  CHECK(o.code == kExitInput);
  auto e = error_of(o);
  CHECK(e["kind"] == "input");
  CHECK(e["row"] == 2);
  CHECK(e["column"] == 2);
  CHECK(json::parse(o.err)["schema_version"] == kSchemaVersion);

  o = cli({"test", "--bogus"});
  CHECK(o.code == kExitInput);
  CHECK(error_of(o)["kind"] == "usage");

  o = cli({"test", "--input", "missing.csv"});
  CHECK(o.code == kExitInput);

  {
    std::ofstream f("full.csv");
    f << "1,2,3\n4,5,6\n7,8,9\n";
  }
  o = cli({"test", "--input", "full.csv"});
  CHECK(o.code == kExitValidation);
  CHECK(error_of(o)["kind"] == "assumption_violation");

  o = cli({"test", "--input", "sample.csv", "--header", "--partition", "measure:0.5",
           "--coverage", "0.99"});
  CHECK(o.code == kExitValidation);

  o = cli({"test", "--input", "sample.csv", "--header", "--method", "ks"});
  CHECK(o.code == kExitInput);
}
