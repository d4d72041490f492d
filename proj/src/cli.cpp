// Copyright 2026 The llgas Authors
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

#include "llgas/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "llgas/bundles.hpp"
#include "llgas/cadlag.hpp"
#include "llgas/engine.hpp"
#include "llgas/gas.hpp"
#include "llgas/renewal.hpp"
#include "llgas/rng.hpp"

namespace llgas {

std::string format_number(double v) {
  std::string s = fmt::format("{}", v);
  if (std::isfinite(v) && s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> replicas;
  std::optional<double> horizon;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool with_replicas = true) {
  cmd->add_option("--config", c.config, "JSON experiment config")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Master seed");
  if (with_replicas) cmd->add_option("--replicas", c.replicas, "Replica count")->check(CLI::PositiveNumber);
  cmd->add_option("--horizon", c.horizon, "n (discrete) or t (continuous)");
  cmd->add_option("--out", c.out, "Output file");
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

Json base_config(const Common& c) { return c.config.empty() ? default_config() : load_json(c.config); }

Overrides overrides_of(const Common& c) { return {c.seed, c.replicas, c.horizon}; }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

void print_results(std::ostream& out, const std::string& run, const ExperimentReport& r) {
  for (const auto& c : r.checks) {
    out << fmt::format("{:<28} {:<34} {:>14} target {:>10} tol {:<8} {}\n", run, c.stat,
                       format_number(c.estimate), format_number(c.target), format_number(c.tolerance),
                       c.pass ? "PASS" : "FAIL");
  }
}

Json bundle_json(const std::string& name, const std::vector<BundleRun>& runs) {
  Json list = Json::array();
  bool pass = true;
  for (const auto& r : runs) {
    list.push_back(Json{{"name", r.name}, {"report", report_to_json(r.report)}});
    pass = pass && r.report.pass;
  }
  return Json{{"schema", "llgas.bundle/1"}, {"bundle", name}, {"runs", list}, {"pass", pass}};
}

int do_verify(const std::string& name, const Common& c, std::ostream& out) {
  const auto runs = run_bundle(name, base_config(c), overrides_of(c));
  const Json doc = bundle_json(name, runs);
  for (const auto& r : runs) print_results(out, name + "/" + r.name, r.report);
  if (!c.out.empty()) write_text(c.out, doc.dump(2) + "\n");
  const bool pass = doc.at("pass").get<bool>();
  out << (pass ? "all checks passed\n" : "some checks FAILED\n");
  return pass ? 0 : 1;
}

int do_run(const Common& c, std::ostream& out) {
  const ExperimentConfig cfg = resolve_config(base_config(c), Json::object(), overrides_of(c));
  const ExperimentReport r = run_experiment(cfg);
  print_results(out, "run", r);
  const std::string path = c.out.empty() ? cfg.output : c.out;
  if (!path.empty()) write_text(path, report_to_json(r).dump(2) + "\n");
  return r.pass ? 0 : 1;
}

int do_simulate(const Common& c, std::int64_t track_points, std::ostream& out) {
  ExperimentConfig cfg = resolve_config(base_config(c), Json::object(), overrides_of(c));
  const auto n = static_cast<std::size_t>(std::ceil(cfg.horizon));
  Philox rng = rng_for_replica(cfg.seed, 0, StreamTag::walk);
  WalkPath walk = cfg.walk.reinforced ? sample_reinforced(cfg.walk.p, n, rng, cfg.exploratory)
                                      : sample_markov(cfg.walk.law, n, rng);
  auto env = std::make_shared<const Environment>(Environment::generate(
      cfg.environment, walk.min_position(), walk.max_position(), environment_seed(cfg.seed, 0)));
  const GasTrajectory traj = build_gas(env, std::move(walk));
  std::ostringstream csv;
  if (track_points > 0) {
    write_track_csv(csv, traj, std::nextafter(traj.horizon(), 0.0), static_cast<std::size_t>(track_points));
  } else {
    write_trajectory_csv(csv, traj);
  }
  if (c.out.empty()) out << csv.str();
  else write_text(c.out, csv.str());
  return 0;
}

int do_renewal(const std::vector<int>& Ls, const std::vector<double>& ps, std::int64_t replicas,
               std::uint64_t seed, const std::string& path, std::ostream& out) {
  const TauMomentReport r = tau_moment_report(Ls, ps, replicas, seed);
  std::ostringstream csv;
  write_tau_csv(csv, r);
  if (path.empty()) out << csv.str();
  else write_text(path, csv.str());
  bool ok = true;
  for (std::size_t i = 0; i < r.p_values.size(); ++i) {
    if (!path.empty()) {
      out << fmt::format("p={} band {}\n", format_number(r.p_values[i]), r.band_ok[i] ? "PASS" : "FAIL");
    }
    ok = ok && r.band_ok[i];
  }
  return ok ? 0 : 1;
}

int do_skorokhod(const std::string& a, const std::string& b, int n_max, std::ostream& out) {
  const SkorokhodDistance d = skorokhod_distance(read_path_csv(a), read_path_csv(b), n_max);
  out << format_number(d.value) << "\n";
  return 0;
}

int do_export(const std::string& report_path, const std::string& path, std::ostream& out) {
  const Json doc = load_json(report_path);
  std::vector<std::pair<std::string, Json>> reports;
  if (doc.contains("runs")) {
    for (const auto& r : doc.at("runs")) reports.emplace_back(r.at("name").get<std::string>(), r.at("report"));
  } else {
    reports.emplace_back("run", doc);
  }
  std::ostringstream csv;
  csv << "run,kind,stat,estimate,stderr,target,tolerance,pass\n";
  bool pass = true;
  for (const auto& [name, rep] : reports) {
    for (const char* kind : {"checks", "diagnostics"}) {
      if (!rep.contains(kind)) continue;
      for (const auto& cj : rep.at(kind)) {
        const CheckResult c = check_from_json(cj);
        csv << fmt::format("{},{},\"{}\",{},{},{},{},{}\n", name, kind == std::string("checks") ? "check" : "diagnostic",
                           c.stat, format_number(c.estimate), format_number(c.stderr_est), format_number(c.target),
                           format_number(c.tolerance), c.pass ? "true" : "false");
      }
    }
    pass = pass && rep.value("pass", false);
  }
  if (path.empty()) out << csv.str();
  else write_text(path, csv.str());
  return pass ? 0 : 1;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation and verification harness for the Levy-Lorentz gas", "llgas"};
  app.require_subcommand(1);

  Common run_opts;
  auto* run = app.add_subcommand("run", "Run the checks listed in a config");
  add_common(run, run_opts);

  Common sim_opts;
  std::int64_t track_points = 0;
  auto* simulate = app.add_subcommand("simulate", "Sample one trajectory and write it as CSV");
  add_common(simulate, sim_opts, false);
  simulate->add_option("--track", track_points, "Write X_t on this many equally spaced times instead")
      ->check(CLI::NonNegativeNumber);

  Common verify_opts;
  std::string bundle_name;
  auto* verify = app.add_subcommand("verify", "Run a named check bundle");
  verify->add_option("bundle", bundle_name, "Bundle name")->required()->check(CLI::IsMember(bundle_names()));
  add_common(verify, verify_opts);

  std::vector<int> Ls{2, 3, 4, 5};
  std::vector<double> ps{1.0, 2.0};
  std::int64_t tau_replicas = 10000;
  std::uint64_t tau_seed = default_config().at("seed").get<std::uint64_t>();
  std::string tau_out;
  auto* renewal = app.add_subcommand("renewal-diag", "Scaled moments of the first renewal time");
  renewal->add_option("--L", Ls, "Run lengths")->delimiter(',');
  renewal->add_option("--p", ps, "Moment orders")->delimiter(',');
  renewal->add_option("--replicas", tau_replicas, "Replicas per run length");
  renewal->add_option("--seed", tau_seed, "Master seed");
  renewal->add_option("--out", tau_out, "CSV output file");

  std::string path_a;
  std::string path_b;
  int n_max = 3;
  auto* skorokhod = app.add_subcommand("skorokhod", "Skorokhod distance between two path CSV files");
  skorokhod->add_option("--a", path_a, "First path")->required()->check(CLI::ExistingFile);
  skorokhod->add_option("--b", path_b, "Second path")->required()->check(CLI::ExistingFile);
  skorokhod->add_option("--nmax", n_max, "Largest taper index")->check(CLI::Range(1, 30));

  std::string report_path;
  std::string export_out;
  auto* exporter = app.add_subcommand("export", "Re-emit a JSON report as CSV");
  exporter->add_option("report", report_path, "Report JSON")->required()->check(CLI::ExistingFile);
  exporter->add_option("--out", export_out, "CSV output file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*run) return do_run(run_opts, out);
    if (*simulate) return do_simulate(sim_opts, track_points, out);
    if (*verify) return do_verify(bundle_name, verify_opts, out);
    if (*renewal) return do_renewal(Ls, ps, tau_replicas, tau_seed, tau_out, out);
    if (*skorokhod) return do_skorokhod(path_a, path_b, n_max, out);
    if (*exporter) return do_export(report_path, export_out, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace llgas
