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
#include "fdmcar/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <system_error>

#include "fdmcar/analysis.hpp"
#include "fdmcar/error.hpp"
#include "fdmcar/partition.hpp"
#include "fdmcar/sample_model.hpp"
#include "fdmcar/simulation.hpp"
#include "fdmcar/svg.hpp"

namespace fdmcar {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw InputError(what + " must be a non-negative integer, got '" + text + "'");
  }
  return v;
}

double parse_real(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc{} || ptr != end || !std::isfinite(v)) {
    throw InputError(what + " must be a number, got '" + text + "'");
  }
  return v;
}

std::string fmt(double v) { return format_double(v); }

std::string absolute(const std::string& path) {
  return fs::absolute(path).lexically_normal().string();
}

struct SeedChoice {
  std::uint64_t value = 0;
  std::string source = "default";
};

SeedChoice resolve_seed(const std::string& flag) {
  if (!flag.empty()) return {parse_u64(flag, "--seed"), "flag"};
  if (const char* env = std::getenv("FDMCAR_SEED"); env != nullptr && *env) {
    return {parse_u64(env, "FDMCAR_SEED"), "env"};
  }
  return {};
}

void write_text(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw InputError("failed writing '" + path + "'");
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Run {
 public:
  explicit Run(std::string command)
      : command_(std::move(command)),
        started_(utc_now()),
        clock_(std::chrono::steady_clock::now()) {}

  Json manifest(const std::vector<std::string>& argv, const SeedChoice* seed,
                unsigned threads) const {
    Json m;
    m["schema_version"] = kSchemaVersion;
    m["tool"] = "fdmcar";
    m["version"] = FDMCAR_VERSION;
    m["command"] = command_;
    m["argv"] = argv;
    if (seed) {
      m["seed"] = seed->value;
      m["seed_source"] = seed->source;
    }
    m["threads"] = threads;
    return m;
  }

  void finish(Json& manifest, const std::vector<std::string>& outputs) const {
    const double wall = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - clock_)
                            .count();
    manifest["outputs"] = outputs;
    manifest["timing"] = {{"started_utc", started_}, {"wall_seconds", wall}};
    for (const auto& out : outputs) {
      write_text(out + ".manifest.json", manifest.dump(2) + "\n");
    }
  }

 private:
  std::string command_;
  std::string started_;
  std::chrono::steady_clock::time_point clock_;
};

// ---------------------------------------------------------------- options

struct InputOptions {
  std::string input;
  bool header = false;
  std::string missing = "NA";
  std::string partition = "complete";
  double coverage = 0.1;

  void add(CLI::App& app) {
    app.add_option("--input", input, "CSV file, one curve per row")->required();
    app.add_flag("--header", header, "first row holds the grid coordinates");
    app.add_option("--missing", missing, "token marking a missing value");
    app.add_option("--partition", partition,
                   "complete | measure:<delta> | file:<path>");
    app.add_option("--coverage", coverage,
                   "keep columns observed in more than this fraction of curves "
                   "in both groups");
  }

  std::string stem() const { return fs::path(input).stem().string(); }
};

struct Loaded {
  FunctionalSample sample;
  GroupLabels labels;
  std::string partition;  // resolved
};

GroupLabels make_partition(const FunctionalSample& sample, const std::string& rule_text,
                           std::string& resolved) {
  if (rule_text == "complete") {
    resolved = rule_text;
    return partition_complete(sample);
  }
  if (rule_text.rfind("measure:", 0) == 0) {
    const double delta = parse_real(rule_text.substr(8), "--partition measure:<delta>");
    resolved = "measure:" + fmt(delta);
    return partition_by_measure(sample, delta);
  }
  if (rule_text.rfind("file:", 0) == 0) {
    const std::string path = absolute(rule_text.substr(5));
    resolved = "file:" + path;
    return load_labels(path, sample.size());
  }
  throw InputError("--partition must be complete, measure:<delta> or file:<path>");
}

Loaded load_input(const InputOptions& in) {
  CsvOptions csv;
  csv.header = in.header;
  csv.missing_token = in.missing;
  FunctionalSample sample = load_csv(in.input, csv);
  std::string resolved;
  GroupLabels labels = make_partition(sample, in.partition, resolved);
  return {std::move(sample), std::move(labels), resolved};
}

std::vector<std::string> input_argv(const InputOptions& in,
                                    const std::string& partition) {
  std::vector<std::string> a{"--input", absolute(in.input), "--missing", in.missing,
                             "--partition", partition, "--coverage",
                             fmt(in.coverage)};
  if (in.header) a.push_back("--header");
  return a;
}

struct EngineOptions {
  std::size_t bstar = 10000;
  double fve = 0.99;
  std::size_t q_max = 50;
  std::size_t mz = 100;
  std::size_t rho_points = 200;
  std::size_t max_redraws = 0;
  std::string seed;
  unsigned threads = 1;

  void add(CLI::App& app, std::size_t default_bstar) {
    bstar = default_bstar;
    app.add_option("--bstar", bstar, "calibration draws / bootstrap replicates");
    app.add_option("--fve", fve, "fraction of variance explained for truncation");
    app.add_option("--q-max", q_max, "cap on retained eigencomponents");
    app.add_option("--mz", mz, "levels drawn from nu for the CvM statistic");
    app.add_option("--rho-points", rho_points,
                   "Monte Carlo points for the indicator covariance");
    app.add_option("--max-redraws", max_redraws,
                   "bootstrap redraw budget (0: 100 * bstar)");
    app.add_option("--seed", seed, "master seed (default: $FDMCAR_SEED, else 0)");
    app.add_option("--threads", threads, "worker threads (0: all cores)");
  }

  TestConfig config(std::uint64_t seed_value, double coverage) const {
    if (bstar < 1) throw InputError("--bstar must be at least 1");
    if (!(fve > 0.0 && fve <= 1.0)) throw InputError("--fve must lie in (0, 1]");
    if (q_max < 1) throw InputError("--q-max must be at least 1");
    if (mz < 1) throw InputError("--mz must be at least 1");
    if (rho_points < 2) throw InputError("--rho-points must be at least 2");
    if (!(coverage >= 0.0 && coverage < 1.0)) {
      throw InputError("--coverage must lie in [0, 1)");
    }
    TestConfig c;
    c.bstar = bstar;
    c.fve = fve;
    c.q_max = q_max;
    c.mz = mz;
    c.rho_points = rho_points;
    c.coverage = coverage;
    c.seed = seed_value;
    c.threads = threads;
    c.max_redraws = max_redraws;
    return c;
  }

  std::vector<std::string> argv(std::uint64_t seed_value) const {
    return {"--bstar",      std::to_string(bstar),
            "--fve",        fmt(fve),
            "--q-max",      std::to_string(q_max),
            "--mz",         std::to_string(mz),
            "--rho-points", std::to_string(rho_points),
            "--max-redraws", std::to_string(max_redraws),
            "--seed",       std::to_string(seed_value),
            "--threads",    std::to_string(threads)};
  }
};

Json config_json(const TestConfig& c) {
  return {{"bstar", c.bstar},       {"fve", c.fve},
          {"q_max", c.q_max},       {"mz", c.mz},
          {"rho_points", c.rho_points}, {"coverage", c.coverage},
          {"max_redraws", c.max_redraws}};
}

std::vector<Method> parse_methods(const std::string& text) {
  if (text == "all") return {Method::L2, Method::Sup, Method::CvM};
  const auto m = parse_method(text);
  if (!m) throw InputError("--method must be l2, sup, cvm or all, got '" + text + "'");
  return {*m};
}

std::vector<Calibration> parse_calibrations(const std::string& text,
                                            bool allow_all) {
  if (allow_all && text == "all") {
    return {Calibration::Asymptotic, Calibration::Bootstrap};
  }
  const auto c = parse_calibration(text);
  if (!c) {
    throw InputError(std::string("--calibration must be asymptotic") +
                     (allow_all ? ", bootstrap or all" : " or bootstrap") +
                     ", got '" + text + "'");
  }
  return {*c};
}

Json subdomain_json(const McarAnalysis& analysis) {
  const auto& sub = analysis.subdomain();
  const auto& report = analysis.validation();
  return {{"size", sub.kept.size()},
          {"coverage_fraction", sub.coverage_fraction},
          {"columns", sub.kept},
          {"coordinates", analysis.data().coordinates},
          {"min_count_A", report.min_count_a},
          {"min_count_B", report.min_count_b}};
}

Json groups_json(const McarAnalysis& analysis) {
  return {{"A", analysis.data().group_size(Group::A)},
          {"B", analysis.data().group_size(Group::B)}};
}

// --------------------------------------------------------- dump-estimates

std::vector<std::string> dump_estimates(McarAnalysis& analysis,
                                        const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const RestrictedSample& data = analysis.data();
  const MeanEstimate a = group_mean(data, Group::A);
  const MeanEstimate b = group_mean(data, Group::B);
  const auto& t = data.coordinates;

  std::ostringstream mean;
  mean << "t,mu_A,mu_B,diff\n";
  for (std::size_t j = 0; j < data.m; ++j) {
    mean << fmt(t[j]) << ',' << fmt(a.mu[j]) << ',' << fmt(b.mu[j]) << ','
         << fmt(a.mu[j] - b.mu[j]) << '\n';
  }
  std::ostringstream phat;
  phat << "t,p_A,p_B\n";
  for (std::size_t j = 0; j < data.m; ++j) {
    phat << fmt(t[j]) << ',' << fmt(a.p_hat[j]) << ',' << fmt(b.p_hat[j]) << '\n';
  }
  const KernelMatrix& k = analysis.kernel();
  std::ostringstream kern;
  kern << 't';
  for (std::size_t j = 0; j < data.m; ++j) kern << ',' << fmt(t[j]);
  kern << '\n';
  for (std::size_t i = 0; i < data.m; ++i) {
    kern << fmt(t[i]);
    for (std::size_t j = 0; j < data.m; ++j) kern << ',' << fmt(k.k(i, j));
    kern << '\n';
  }
  const NuMeasure& nu = analysis.nu();
  std::ostringstream nucsv;
  nucsv << "theta,tau2\n" << fmt(nu.theta) << ',' << fmt(nu.tau2) << '\n';

  const fs::path base(dir);
  std::vector<std::string> files{(base / "mean.csv").string(),
                                 (base / "p_hat.csv").string(),
                                 (base / "kernel.csv").string(),
                                 (base / "nu.csv").string()};
  write_text(files[0], mean.str());
  write_text(files[1], phat.str());
  write_text(files[2], kern.str());
  write_text(files[3], nucsv.str());
  return files;
}

// ------------------------------------------------------------------ test

struct TestArgs {
  InputOptions in;
  EngineOptions engine;
  std::string method = "all";
  std::string calibration = "asymptotic";
  double alpha = 0.05;
  std::string out;
  std::string dump_dir;
};

int cmd_test(const TestArgs& a, std::ostream& out) {
  Run run("test");
  const SeedChoice seed = resolve_seed(a.engine.seed);
  const auto methods = parse_methods(a.method);
  const Calibration cal = parse_calibrations(a.calibration, false).front();
  if (!(a.alpha > 0.0 && a.alpha <= 1.0)) throw InputError("--alpha must lie in (0, 1]");
  const TestConfig config = a.engine.config(seed.value, a.in.coverage);
  Loaded loaded = load_input(a.in);
  McarAnalysis analysis(loaded.sample, loaded.labels, config);
  const auto results = analysis.run_all(methods, cal);

  const std::string out_path = absolute(a.out.empty() ? a.in.stem() + "_test.json" : a.out);
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "test";
  j["input"] = absolute(a.in.input);
  j["n"] = loaded.sample.size();
  j["p"] = loaded.sample.points();
  j["partition"] = loaded.partition;
  j["groups"] = groups_json(analysis);
  j["subdomain"] = subdomain_json(analysis);
  j["calibration"] = to_string(cal);
  j["alpha"] = a.alpha;
  j["seed"] = seed.value;
  j["config"] = config_json(config);
  Json rows = Json::array();
  Json q_used = Json::object();
  for (const auto& r : results) {
    rows.push_back({{"method", to_string(r.method)},
                    {"statistic", r.statistic},
                    {"p_value", r.p_value},
                    {"reject", r.p_value <= a.alpha},
                    {"q_used", r.q_used},
                    {"draws", r.draws.size()}});
    q_used[to_string(r.method)] = r.q_used;
  }
  j["results"] = rows;
  write_text(out_path, j.dump(2) + "\n");

  std::vector<std::string> outputs{out_path};
  std::vector<std::string> argv{"test"};
  for (auto& s : input_argv(a.in, loaded.partition)) argv.push_back(s);
  for (auto& s : a.engine.argv(seed.value)) argv.push_back(s);
  argv.insert(argv.end(), {"--method", a.method, "--calibration", to_string(cal),
                           "--alpha", fmt(a.alpha), "--out", out_path});
  if (!a.dump_dir.empty()) {
    const std::string dir = absolute(a.dump_dir);
    argv.insert(argv.end(), {"--dump-estimates", dir});
    for (auto& f : dump_estimates(analysis, dir)) outputs.push_back(f);
  }
  Json manifest = run.manifest(argv, &seed, config.threads);
  manifest["config"] = config_json(config);
  manifest["subdomain"] = subdomain_json(analysis);
  manifest["group_sizes"] = groups_json(analysis);
  manifest["q_used"] = q_used;
  run.finish(manifest, outputs);
  out << j.dump(2) << '\n';
  return kExitOk;
}

// ------------------------------------------------------------------ band

struct BandArgs {
  InputOptions in;
  EngineOptions engine;
  std::string calibration = "asymptotic";
  double level = 0.95;
  std::string out;
  std::string plot;
  bool want_plot = false;
};

int cmd_band(const BandArgs& a, std::ostream& out) {
  Run run("band");
  const SeedChoice seed = resolve_seed(a.engine.seed);
  const Calibration cal = parse_calibrations(a.calibration, false).front();
  if (!(a.level > 0.0 && a.level < 1.0)) throw InputError("--level must lie in (0, 1)");
  const TestConfig config = a.engine.config(seed.value, a.in.coverage);
  Loaded loaded = load_input(a.in);
  McarAnalysis analysis(loaded.sample, loaded.labels, config);
  const ConfidenceBand band = analysis.band(a.level, cal);

  const std::string csv_path = absolute(a.out.empty() ? a.in.stem() + "_band.csv" : a.out);
  std::ostringstream csv;
  csv << "t,center,lower,upper\n";
  for (std::size_t j = 0; j < band.center.size(); ++j) {
    csv << fmt(band.coordinates[j]) << ',' << fmt(band.center[j]) << ','
        << fmt(band.center[j] - band.half_width) << ','
        << fmt(band.center[j] + band.half_width) << '\n';
  }
  write_text(csv_path, csv.str());
  std::vector<std::string> outputs{csv_path};
  std::vector<std::string> argv{"band"};
  for (auto& s : input_argv(a.in, loaded.partition)) argv.push_back(s);
  for (auto& s : a.engine.argv(seed.value)) argv.push_back(s);
  argv.insert(argv.end(), {"--calibration", to_string(cal), "--level",
                           fmt(a.level), "--out", csv_path});
  if (a.want_plot) {
    const std::string svg_path =
        absolute(a.plot.empty() ? a.in.stem() + "_band.svg" : a.plot);
    write_text(svg_path, band_svg(band));
    outputs.push_back(svg_path);
    argv.insert(argv.end(), {"--plot", svg_path});
  }

  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "band";
  j["input"] = absolute(a.in.input);
  j["partition"] = loaded.partition;
  j["groups"] = groups_json(analysis);
  j["subdomain"] = subdomain_json(analysis);
  j["calibration"] = to_string(cal);
  j["level"] = band.level;
  j["n"] = band.n;
  j["quantile"] = band.quantile;
  j["half_width"] = band.half_width;
  j["q_used"] = band.q_used;
  j["contains_zero"] = band.contains_zero();
  j["seed"] = seed.value;
  j["outputs"] = outputs;

  Json manifest = run.manifest(argv, &seed, config.threads);
  manifest["config"] = config_json(config);
  manifest["subdomain"] = subdomain_json(analysis);
  manifest["group_sizes"] = groups_json(analysis);
  manifest["q_used"] = {{"Sup", band.q_used}};
  run.finish(manifest, outputs);
  out << j.dump(2) << '\n';
  return kExitOk;
}

// -------------------------------------------------------- dump-estimates

struct DumpArgs {
  InputOptions in;
  EngineOptions engine;
  std::string out;
};

int cmd_dump(const DumpArgs& a, std::ostream& out) {
  Run run("dump-estimates");
  const SeedChoice seed = resolve_seed(a.engine.seed);
  const TestConfig config = a.engine.config(seed.value, a.in.coverage);
  Loaded loaded = load_input(a.in);
  McarAnalysis analysis(loaded.sample, loaded.labels, config);
  const std::string dir = absolute(a.out.empty() ? a.in.stem() + "_estimates" : a.out);
  const auto files = dump_estimates(analysis, dir);
  std::vector<std::string> argv{"dump-estimates"};
  for (auto& s : input_argv(a.in, loaded.partition)) argv.push_back(s);
  for (auto& s : a.engine.argv(seed.value)) argv.push_back(s);
  argv.insert(argv.end(), {"--out", dir});
  Json manifest = run.manifest(argv, &seed, config.threads);
  manifest["subdomain"] = subdomain_json(analysis);
  manifest["group_sizes"] = groups_json(analysis);
  run.finish(manifest, files);
  Json j{{"schema_version", kSchemaVersion},
         {"command", "dump-estimates"},
         {"outputs", files}};
  out << j.dump(2) << '\n';
  return kExitOk;
}

// -------------------------------------------------------------- simulate

struct SimulateArgs {
  int scenario = 1;
  std::size_t n = 100;
  std::size_t p = 100;
  std::size_t reps = 1000;
  double alpha = 0.05;
  double a = -1.0;
  double b = 1.0;
  std::string b_grid;
  std::string method = "all";
  std::string calibration;  // default depends on the case
  EngineOptions engine;
  std::string out;
  std::string plot;
  bool want_plot = false;
};

std::vector<double> parse_grid(const std::string& text) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string::npos) {
    throw InputError("--b-grid must look like lo:hi:step, got '" + text + "'");
  }
  const double lo = parse_real(text.substr(0, c1), "--b-grid lo");
  const double hi = parse_real(text.substr(c1 + 1, c2 - c1 - 1), "--b-grid hi");
  const double step = parse_real(text.substr(c2 + 1), "--b-grid step");
  if (!(step > 0.0) || hi < lo) throw InputError("--b-grid needs lo <= hi and step > 0");
  std::vector<double> grid;
  for (std::size_t k = 0;; ++k) {
    const double v = lo + static_cast<double>(k) * step;
    if (v > hi + 1e-9 * step) break;
    grid.push_back(std::round(v * 1e9) / 1e9);
    if (grid.size() > 100000) throw InputError("--b-grid has too many points");
  }
  return grid;
}

int cmd_simulate(const SimulateArgs& s, std::ostream& out) {
  Run run("simulate");
  const SeedChoice seed = resolve_seed(s.engine.seed);
  if (s.scenario != 1 && s.scenario != 2) throw InputError("--case must be 1 or 2");
  if (s.n < 2 || s.p < 2) throw InputError("--n and --p must be at least 2");
  if (s.reps < 1) throw InputError("--reps must be at least 1");
  if (!(s.alpha > 0.0 && s.alpha <= 1.0)) throw InputError("--alpha must lie in (0, 1]");
  const std::string cal_text =
      s.calibration.empty() ? (s.scenario == 1 ? "all" : "asymptotic") : s.calibration;

  ScenarioConfig config;
  config.n = s.n;
  config.p = s.p;
  config.mechanism = s.scenario == 1 ? Mechanism::McarInterval : Mechanism::Censoring;
  config.a = s.a;
  config.b = s.b;
  config.reps = s.reps;
  config.alpha = s.alpha;
  config.seed = seed.value;
  config.methods = parse_methods(s.method);
  config.calibrations = parse_calibrations(cal_text, true);
  config.test = s.engine.config(seed.value, 0.1);
  config.threads = s.engine.threads;

  std::vector<RejectionTable> tables;
  if (s.scenario == 1) {
    if (!s.b_grid.empty()) throw InputError("--b-grid applies to --case 2 only");
    tables.push_back(run_type1_experiment(config));
  } else {
    if (!(s.a < 0.0)) throw InputError("--a must be negative");
    std::vector<double> grid =
        s.b_grid.empty() ? std::vector<double>{s.b} : parse_grid(s.b_grid);
    for (double b : grid) {
      if (!(b > 0.0)) throw InputError("censoring bounds need b > 0");
    }
    tables = run_power_experiment(config, grid);
  }

  const std::string csv_path = absolute(
      s.out.empty() ? "simulate_case" + std::to_string(s.scenario) + ".csv" : s.out);
  std::ostringstream csv;
  csv << "case,n,p,a,b,method,calibration,rejections,runs,rate,se,failed\n";
  Json rows = Json::array();
  for (const auto& t : tables) {
    for (const auto& c : t.cells) {
      const double a_col = s.scenario == 2 ? s.a : 0.0;
      csv << s.scenario << ',' << t.n << ',' << s.p << ',' << fmt(a_col) << ','
          << fmt(t.b) << ',' << to_string(c.method) << ','
          << to_string(c.calibration) << ',' << c.rejections << ',' << c.runs
          << ',' << fmt(c.rate()) << ',' << fmt(c.standard_error()) << ','
          << t.failed << '\n';
      rows.push_back({{"b", t.b},
                      {"method", to_string(c.method)},
                      {"calibration", to_string(c.calibration)},
                      {"rejections", c.rejections},
                      {"runs", c.runs},
                      {"rate", c.rate()},
                      {"se", c.standard_error()},
                      {"failed", t.failed}});
    }
  }
  write_text(csv_path, csv.str());
  std::vector<std::string> outputs{csv_path};

  std::vector<std::string> argv{"simulate",
                                "--case", std::to_string(s.scenario),
                                "--n", std::to_string(s.n),
                                "--p", std::to_string(s.p),
                                "--reps", std::to_string(s.reps),
                                "--alpha", fmt(s.alpha),
                                "--a", fmt(s.a),
                                "--b", fmt(s.b),
                                "--method", s.method,
                                "--calibration", cal_text};
  if (!s.b_grid.empty()) argv.insert(argv.end(), {"--b-grid", s.b_grid});
  for (auto& x : s.engine.argv(seed.value)) argv.push_back(x);
  argv.insert(argv.end(), {"--out", csv_path});
  if (s.want_plot) {
    if (s.scenario != 2) throw InputError("--plot draws power curves for --case 2");
    const std::string svg_path = absolute(s.plot.empty() ? "power.svg" : s.plot);
    write_text(svg_path, power_svg(tables));
    outputs.push_back(svg_path);
    argv.insert(argv.end(), {"--plot", svg_path});
  }

  Json manifest = run.manifest(argv, &seed, config.threads);
  manifest["config"] = config_json(config.test);
  manifest["config"]["case"] = s.scenario;
  manifest["config"]["n"] = s.n;
  manifest["config"]["p"] = s.p;
  manifest["config"]["reps"] = s.reps;
  manifest["config"]["alpha"] = s.alpha;
  run.finish(manifest, outputs);

  Json j{{"schema_version", kSchemaVersion},
         {"command", "simulate"},
         {"case", s.scenario},
         {"n", s.n},
         {"reps", s.reps},
         {"alpha", s.alpha},
         {"seed", seed.value},
         {"bstar", config.test.bstar},
         {"rows", rows},
         {"outputs", outputs}};
  out << j.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- replay

void set_flag(std::vector<std::string>& argv, const std::string& flag,
              const std::string& value) {
  for (std::size_t i = 1; i + 1 < argv.size(); ++i) {
    if (argv[i] == flag) {
      argv[i + 1] = value;
      return;
    }
  }
  argv.push_back(flag);
  argv.push_back(value);
}

std::vector<std::string> replay_argv(const std::string& manifest_path,
                                     const std::optional<unsigned>& threads,
                                     const std::string& out,
                                     const std::string& plot) {
  std::ifstream f(manifest_path);
  if (!f) throw InputError("cannot open manifest '" + manifest_path + "'");
  Json m;
  try {
    m = Json::parse(f);
  } catch (const Json::exception& e) {
    throw InputError("manifest '" + manifest_path + "' is not valid JSON: " + e.what());
  }
  if (!m.contains("argv") || !m["argv"].is_array() || m["argv"].empty()) {
    throw InputError("manifest '" + manifest_path + "' has no argv");
  }
  std::vector<std::string> argv;
  for (const auto& v : m["argv"]) {
    if (!v.is_string()) throw InputError("manifest argv entries must be strings");
    argv.push_back(v.get<std::string>());
  }
  if (argv.front() == "replay") throw InputError("a manifest cannot replay a replay");
  if (threads) set_flag(argv, "--threads", std::to_string(*threads));
  if (!out.empty()) set_flag(argv, "--out", out);
  if (!plot.empty()) set_flag(argv, "--plot", plot);
  return argv;
}

// ------------------------------------------------------------- dispatch

void error_json(std::ostream& err, const std::string& kind,
                const std::string& message,
                std::optional<std::size_t> row = std::nullopt,
                std::optional<std::size_t> column = std::nullopt) {
  Json e{{"kind", kind}, {"message", message}};
  if (row) e["row"] = *row;
  if (column) e["column"] = *column;
  err << Json{{"schema_version", kSchemaVersion}, {"error", e}}.dump() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Tests whether missingness in partially observed functional data "
               "is completely at random.",
               "fdmcar"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FDMCAR_VERSION);

  std::function<int()> action;

  TestArgs test;
  auto* t = app.add_subcommand("test", "run MCAR tests on a CSV sample");
  test.in.add(*t);
  test.engine.add(*t, 10000);
  t->add_option("--method", test.method, "l2 | sup | cvm | all");
  t->add_option("--calibration", test.calibration, "asymptotic | bootstrap");
  t->add_option("--alpha", test.alpha, "significance level for the reject flag");
  t->add_option("--out", test.out, "result JSON (default: <input stem>_test.json)");
  t->add_option("--dump-estimates", test.dump_dir,
                "also write mean, p_hat, kernel and nu CSVs to this directory");
  t->callback([&] { action = [&] { return cmd_test(test, out); }; });

  BandArgs band;
  auto* b = app.add_subcommand("band", "simultaneous confidence band for mu_A - mu_B");
  band.in.add(*b);
  band.engine.add(*b, 10000);
  b->add_option("--calibration", band.calibration, "asymptotic | bootstrap");
  b->add_option("--level", band.level, "coverage level");
  b->add_option("--out", band.out, "band CSV (default: <input stem>_band.csv)");
  auto* bplot = b->add_option("--plot", band.plot,
                              "SVG plot (default: <input stem>_band.svg)")
                    ->expected(0, 1);
  b->callback([&] {
    band.want_plot = bplot->count() > 0;
    action = [&] { return cmd_band(band, out); };
  });

  DumpArgs dump;
  auto* d = app.add_subcommand("dump-estimates", "write estimator CSVs");
  dump.in.add(*d);
  dump.engine.add(*d, 10000);
  d->add_option("--out", dump.out, "directory (default: <input stem>_estimates)");
  d->callback([&] { action = [&] { return cmd_dump(dump, out); }; });

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "rejection rates on simulated Brownian data");
  s->add_option("--case", sim.scenario, "1: MCAR intervals, 2: censoring")->required();
  s->add_option("--n", sim.n, "curves per sample");
  s->add_option("--p", sim.p, "grid points");
  s->add_option("--reps", sim.reps, "replications");
  s->add_option("--alpha", sim.alpha, "significance level");
  s->add_option("--a", sim.a, "lower censoring bound");
  s->add_option("--b", sim.b, "upper censoring bound");
  s->add_option("--b-grid", sim.b_grid, "lo:hi:step grid of upper bounds");
  s->add_option("--method", sim.method, "l2 | sup | cvm | all");
  s->add_option("--calibration", sim.calibration,
                "asymptotic | bootstrap | all (default: all for case 1, "
                "asymptotic for case 2)");
  sim.engine.add(*s, 2000);
  s->add_option("--out", sim.out, "table CSV (default: simulate_case<k>.csv)");
  auto* splot = s->add_option("--plot", sim.plot, "power SVG (default: power.svg)")
                    ->expected(0, 1);
  s->callback([&] {
    sim.want_plot = splot->count() > 0;
    action = [&] { return cmd_simulate(sim, out); };
  });

  std::string manifest_path;
  std::optional<unsigned> replay_threads;
  std::string replay_out;
  std::string replay_plot;
  auto* r = app.add_subcommand("replay", "re-run a command from its run manifest");
  r->add_option("manifest", manifest_path, "<output>.manifest.json")->required();
  r->add_option("--threads", replay_threads, "override the thread count");
  r->add_option("--out", replay_out, "override the output path");
  r->add_option("--plot", replay_plot, "override the plot path");
  r->callback([&] {
    action = [&] {
      return run_cli(replay_argv(manifest_path, replay_threads, replay_out,
                                 replay_plot),
                     out, err);
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << FDMCAR_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    error_json(err, "usage", e.what());
    return kExitInput;
  }

  try {
    return action();
  } catch (const InputError& e) {
    error_json(err, "input", e.what(), e.row(), e.column());
    return kExitInput;
  } catch (const ValidationError& e) {
    error_json(err, e.kind(), e.what());
    return kExitValidation;
  } catch (const NumericalError& e) {
    error_json(err, "numerical", e.what());
    return kExitValidation;
  } catch (const fs::filesystem_error& e) {
    error_json(err, "input", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    error_json(err, "internal", e.what());
    return kExitInput;
  }
}

}  // namespace fdmcar
