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

#include "llgas/engine.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

#include "llgas/cadlag.hpp"
#include "llgas/gas.hpp"
#include "llgas/renewal.hpp"
#include "llgas/rng.hpp"

namespace llgas {

namespace {

const std::vector<std::string> kReplicaChecks = {
    "gas_variance",  "gas_ks",          "walk_variance", "martingale_bound",
    "martingale_ks", "path_covariance", "collision_lln", "counting_lln"};

const std::vector<std::string> kDeterministicChecks = {
    "variance_recursion", "martingale_nu", "reinforced_reduction",
    "cesaro",             "eta_identity",  "tau_moments",
    "skorokhod_axioms",   "mixing",        "ell_lln"};

bool is_replica_check(const std::string& name) {
  return std::find(kReplicaChecks.begin(), kReplicaChecks.end(), name) != kReplicaChecks.end();
}

[[noreturn]] void bad_config(const std::string& what) {
  throw std::invalid_argument("config: " + what);
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    bad_config(fmt::format("field '{}' has the wrong type ({})", key, e.what()));
  }
}

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad_config(fmt::format("missing field '{}'", key));
  return j.at(key);
}

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const char* where) {
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) bad_config(fmt::format("unknown field '{}' in {}", item.key(), where));
  }
}

}  // namespace

const std::vector<std::string>& registered_checks() {
  static const std::vector<std::string> all = [] {
    std::vector<std::string> v = kReplicaChecks;
    v.insert(v.end(), kDeterministicChecks.begin(), kDeterministicChecks.end());
    return v;
  }();
  return all;
}

// ---------------------------------------------------------------------------
// JSON <-> config

DistanceLaw distance_law_from_json(const Json& j) {
  if (!j.is_object()) bad_config("environment must be an object");
  reject_unknown(j, {"kind", "alphabet", "probs", "transition"}, "environment");
  const std::string kind = get_or<std::string>(j, "kind", j.contains("transition") ? "markov" : "iid");
  const auto alphabet = get_or<std::vector<double>>(j, "alphabet", {});
  if (kind == "iid") {
    return DistanceLaw::iid(alphabet, get_or<std::vector<double>>(j, "probs", {}));
  }
  if (kind == "markov") {
    const auto rows = get_or<std::vector<std::vector<double>>>(j, "transition", {});
    Eigen::MatrixXd p(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size()) bad_config("transition matrix must be square");
      for (std::size_t k = 0; k < rows.size(); ++k) {
        p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
      }
    }
    return DistanceLaw::markov(alphabet, p);
  }
  bad_config("environment kind must be 'iid' or 'markov'");
}

Json distance_law_to_json(const DistanceLaw& law) {
  Json j;
  j["alphabet"] = std::vector<double>(law.alphabet.data(), law.alphabet.data() + law.alphabet.size());
  if (law.kind == DistanceKind::iid) {
    j["kind"] = "iid";
    j["probs"] = std::vector<double>(law.probs.data(), law.probs.data() + law.probs.size());
  } else {
    j["kind"] = "markov";
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < law.transition.rows(); ++i) {
      std::vector<double> row(static_cast<std::size_t>(law.transition.cols()));
      for (Eigen::Index k = 0; k < law.transition.cols(); ++k) row[static_cast<std::size_t>(k)] = law.transition(i, k);
      rows.push_back(row);
    }
    j["transition"] = rows;
  }
  return j;
}

WalkSpec walk_from_json(const Json& j) {
  if (!j.is_object()) bad_config("walk must be an object");
  WalkSpec w;
  const std::string kind = get_or<std::string>(j, "kind", "markov");
  if (kind == "reinforced") {
    reject_unknown(j, {"kind", "p"}, "walk");
    w.reinforced = true;
    w.p = require(j, "p").get<double>();
    if (!(w.p >= 0.0 && w.p <= 1.0)) bad_config("reinforced p must lie in [0, 1]");
    return w;
  }
  if (kind != "markov") bad_config("walk kind must be 'markov' or 'reinforced'");
  reject_unknown(j, {"kind", "support", "probs"}, "walk");
  w.law.support = get_or<std::vector<std::int64_t>>(j, "support", {});
  w.law.probs = get_or<std::vector<double>>(j, "probs", {});
  w.law.validate();
  return w;
}

Json walk_to_json(const WalkSpec& walk) {
  if (walk.reinforced) return Json{{"kind", "reinforced"}, {"p", walk.p}};
  return Json{{"kind", "markov"}, {"support", walk.law.support}, {"probs", walk.law.probs}};
}

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) bad_config("top level must be an object");
  reject_unknown(j,
                 {"environment", "walk", "mode", "horizon", "replicas", "seed", "fixed_environment",
                  "window", "failure_budget", "exploratory", "checks", "output"},
                 "config");
  ExperimentConfig c;
  c.environment = distance_law_from_json(require(j, "environment"));
  c.walk = walk_from_json(require(j, "walk"));
  const std::string mode = get_or<std::string>(j, "mode", "discrete");
  if (mode == "discrete") c.mode = Mode::discrete;
  else if (mode == "continuous") c.mode = Mode::continuous;
  else bad_config("mode must be 'discrete' or 'continuous'");

  const Json& horizon = require(j, "horizon");
  if (!horizon.is_number()) bad_config("horizon must be a number");
  c.horizon = horizon.get<double>();
  if (!(c.horizon >= 1.0)) bad_config("horizon must be >= 1");
  if (c.mode == Mode::discrete && c.horizon != std::floor(c.horizon)) {
    bad_config("discrete horizon must be an integer");
  }
  const Json& replicas = require(j, "replicas");
  if (!replicas.is_number_integer()) bad_config("replicas must be an integer");
  c.replicas = replicas.get<std::int64_t>();
  if (c.replicas < 1) bad_config("replicas must be >= 1");
  const Json& seed = require(j, "seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
    bad_config("seed must be a nonnegative integer");
  }
  c.seed = seed.get<std::uint64_t>();
  c.fixed_environment = get_or<bool>(j, "fixed_environment", true);
  c.window = get_or<double>(j, "window", 4.0);
  if (!(c.window > 0.0)) bad_config("window must be positive");
  c.failure_budget = get_or<double>(j, "failure_budget", 1e-3);
  if (!(c.failure_budget >= 0.0 && c.failure_budget <= 1.0)) bad_config("failure_budget must lie in [0, 1]");
  c.exploratory = get_or<bool>(j, "exploratory", false);
  if (c.walk.reinforced && c.walk.p >= 0.75 && !c.exploratory) {
    bad_config("reinforced p >= 3/4 requires \"exploratory\": true");
  }
  c.output = get_or<std::string>(j, "output", "");
  if (j.contains("checks")) {
    if (!j.at("checks").is_array()) bad_config("checks must be an array");
    for (const Json& cj : j.at("checks")) {
      if (!cj.is_object()) bad_config("each check must be an object");
      reject_unknown(cj, {"name", "tolerance", "params"}, "check");
      CheckSpec spec;
      spec.name = require(cj, "name").get<std::string>();
      const auto& names = registered_checks();
      if (std::find(names.begin(), names.end(), spec.name) == names.end()) {
        bad_config(fmt::format("unknown check '{}'", spec.name));
      }
      spec.tolerance = get_or<double>(cj, "tolerance", 0.0);
      if (!(spec.tolerance >= 0.0)) bad_config("check tolerance must be nonnegative");
      spec.params = cj.contains("params") ? cj.at("params") : Json::object();
      if (!spec.params.is_object()) bad_config("check params must be an object");
      c.checks.push_back(std::move(spec));
    }
  }
  return c;
}

Json config_to_json(const ExperimentConfig& c) {
  Json j;
  j["environment"] = distance_law_to_json(c.environment);
  j["walk"] = walk_to_json(c.walk);
  j["mode"] = c.mode == Mode::discrete ? "discrete" : "continuous";
  j["horizon"] = c.horizon;
  j["replicas"] = c.replicas;
  j["seed"] = c.seed;
  j["fixed_environment"] = c.fixed_environment;
  j["window"] = c.window;
  j["failure_budget"] = c.failure_budget;
  j["exploratory"] = c.exploratory;
  Json checks = Json::array();
  for (const auto& s : c.checks) {
    checks.push_back(Json{{"name", s.name}, {"tolerance", s.tolerance}, {"params", s.params}});
  }
  j["checks"] = checks;
  if (!c.output.empty()) j["output"] = c.output;
  return j;
}

Json check_to_json(const CheckResult& c) {
  return Json{{"stat", c.stat},         {"estimate", c.estimate}, {"stderr", c.stderr_est},
              {"target", c.target},     {"tolerance", c.tolerance}, {"pass", c.pass}};
}

CheckResult check_from_json(const Json& j) {
  CheckResult c;
  c.stat = j.at("stat").get<std::string>();
  auto num = [&](const char* k) { return j.at(k).is_null() ? std::nan("") : j.at(k).get<double>(); };
  c.estimate = num("estimate");
  c.stderr_est = num("stderr");
  c.target = num("target");
  c.tolerance = num("tolerance");
  c.pass = j.at("pass").get<bool>();
  return c;
}

Json report_to_json(const ExperimentReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(check_to_json(c));
  Json diags = Json::array();
  for (const auto& c : r.diagnostics) diags.push_back(check_to_json(c));
  return Json{{"schema", "llgas.report/1"},
              {"config", r.config},
              {"checks", checks},
              {"diagnostics", diags},
              {"meta", Json{{"replicas", r.replicas}, {"exhausted", r.exhausted}}},
              {"pass", r.pass}};
}

unsigned worker_count() {
  if (const char* env = std::getenv("LLGAS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// ---------------------------------------------------------------------------
// Experiment

namespace {

struct Constants {
  double ell = 0.0;
  double mean_step = 0.0;    // E[S_1]
  double second = 0.0;       // E[S_1^2], or (3 - 4p)^-1 for reinforced walks
  double walk_var = 0.0;     // limit variance of n^{-1/2}(S_n - n E[S_1])
  double abs_mean = 1.0;     // E[|V_1|]
  double max_jump = 1.0;
};

Constants constants_for(const ExperimentConfig& c) {
  Constants k;
  k.ell = analytic_ell(c.environment);
  if (c.walk.reinforced) {
    const double v = c.walk.p < 0.75 ? 1.0 / (3.0 - 4.0 * c.walk.p) : std::nan("");
    k.second = v;
    k.walk_var = v;
  } else {
    const JumpMoments m = jump_moments(c.walk.law);
    k.mean_step = m.mean;
    k.second = m.second_moment;
    k.walk_var = m.variance();
    k.abs_mean = m.abs_mean;
    k.max_jump = static_cast<double>(std::max<std::int64_t>(c.walk.law.max_abs_jump(), 1));
  }
  return k;
}

// Limit variance per unit time of the rescaled gas.
double gas_sigma2(const ExperimentConfig& c, const Constants& k) {
  return c.mode == Mode::discrete ? k.ell * k.ell * k.second : k.ell * k.second / k.abs_mean;
}

double param_or(const CheckSpec& s, const char* key, double fallback) {
  return s.params.contains(key) ? s.params.at(key).get<double>() : fallback;
}

std::vector<std::pair<double, double>> covariance_times(const CheckSpec& s) {
  std::vector<std::pair<double, double>> out;
  if (s.params.contains("times")) {
    for (const Json& p : s.params.at("times")) {
      const auto v = p.get<std::vector<double>>();
      if (v.size() != 2) bad_config("path_covariance times must be [s, t] pairs");
      out.emplace_back(std::min(v[0], v[1]), std::max(v[0], v[1]));
    }
  } else {
    out = {{0.5, 1.0}, {1.0, 2.0}};
  }
  return out;
}

CheckResult relative_check(std::string stat, double est, double se, double target, double tol) {
  return {std::move(stat), est, se, target, tol, std::abs(est - target) <= tol * std::abs(target)};
}

CheckResult absolute_check(std::string stat, double est, double se, double target, double tol) {
  return {std::move(stat), est, se, target, tol, std::abs(est - target) <= tol};
}

// Sample variance and its standard error from the spread of squared deviations.
std::pair<double, double> variance_with_se(const std::vector<double>& x) {
  MomentAccumulator acc;
  for (double v : x) acc.update(v);
  const MomentSummary s = acc.finalize();
  MomentAccumulator sq;
  for (double v : x) sq.update((v - s.mean) * (v - s.mean));
  return {s.variance, sq.finalize().stderr_mean};
}

struct ReplicaOut {
  bool exhausted = false;
  double gas = 0.0;
  double walk = 0.0;
  double martingale = 0.0;
  std::size_t violations = 0;
  std::vector<double> path;
  double time_ratio = 0.0;
  double count_ratio = 0.0;
};

struct Plan {
  bool gas = false;
  bool walk = false;
  bool martingale = false;
  bool lln = false;
  std::vector<double> path_times;
  double count_time = 0.0;
  std::int64_t n = 0;      // discrete horizon
  std::int64_t steps = 0;  // sampled walk length
  double time_needed = 0.0;
};

Plan make_plan(const ExperimentConfig& c, const Constants& k) {
  Plan plan;
  std::set<double> times;
  for (const auto& s : c.checks) {
    if (s.name == "gas_variance" || s.name == "gas_ks") plan.gas = true;
    if (s.name == "walk_variance") plan.walk = true;
    if (s.name == "martingale_bound" || s.name == "martingale_ks") plan.martingale = true;
    if (s.name == "collision_lln" || s.name == "counting_lln") plan.lln = true;
    if (s.name == "counting_lln") plan.count_time = param_or(s, "t", c.horizon);
    if (s.name == "path_covariance") {
      for (auto [a, b] : covariance_times(s)) {
        if (a < -c.window || b > c.window) bad_config("path_covariance times lie outside the window");
        times.insert(a);
        times.insert(b);
      }
    }
  }
  plan.path_times.assign(times.begin(), times.end());
  if (c.mode == Mode::continuous && (plan.walk || plan.martingale)) {
    bad_config("walk and martingale checks need discrete mode");
  }
  if (plan.martingale && !c.walk.reinforced) bad_config("martingale checks need a reinforced walk");

  const double speed = k.abs_mean * k.ell;
  if (c.mode == Mode::discrete) {
    plan.n = static_cast<std::int64_t>(c.horizon);
    plan.steps = plan.n;
    if (!plan.path_times.empty()) {
      plan.steps = std::max(plan.steps,
                            static_cast<std::int64_t>(std::floor(static_cast<double>(plan.n) * c.window)));
    }
    plan.time_needed = plan.count_time;
  } else {
    plan.time_needed = c.horizon * (plan.path_times.empty() ? 1.0 : c.window);
    plan.time_needed = std::max(plan.time_needed, plan.count_time);
  }
  if (plan.time_needed > 0.0) {
    // 25% slack over the law-of-large-numbers length plus a fixed margin.
    plan.steps = std::max(plan.steps,
                          static_cast<std::int64_t>(std::ceil(1.25 * plan.time_needed / speed)) + 1000);
  }
  return plan;
}

WalkPath sample_walk(const ExperimentConfig& c, std::int64_t steps, Philox& rng) {
  const auto n = static_cast<std::size_t>(steps);
  return c.walk.reinforced ? sample_reinforced(c.walk.p, n, rng, c.exploratory)
                           : sample_markov(c.walk.law, n, rng);
}

std::vector<ReplicaOut> run_replicas(const ExperimentConfig& c, const Constants& k, const Plan& plan) {
  std::shared_ptr<const Environment> fixed;
  const bool needs_env = plan.gas || plan.lln || !plan.path_times.empty();
  if (needs_env && c.fixed_environment) {
    const auto reach = static_cast<std::int64_t>(static_cast<double>(plan.steps) * k.max_jump);
    fixed = std::make_shared<const Environment>(
        Environment::generate(c.environment, -reach, reach, environment_seed(c.seed, 0)));
  }
  std::optional<MartingaleCoeffs> coeffs;
  if (plan.martingale) coeffs = martingale_coeffs(c.walk.p, static_cast<std::size_t>(plan.steps));

  const double drift_c = k.mean_step / k.abs_mean;  // continuous-time centering speed
  std::vector<ReplicaOut> out(static_cast<std::size_t>(c.replicas));
  parallel_for(c.replicas, [&](std::int64_t i) {
    ReplicaOut& r = out[static_cast<std::size_t>(i)];
    Philox rng = rng_for_replica(c.seed, static_cast<std::uint64_t>(i), StreamTag::walk);
    WalkPath walk = sample_walk(c, plan.steps, rng);
    const auto n = static_cast<std::size_t>(plan.n);
    if (plan.martingale) {
      const MartingaleDiag d = martingale_path(walk, c.walk.p, *coeffs);
      r.violations = d.bound_violations;
      r.martingale = d.M_seq[n] / std::sqrt(d.nu_seq[n]);
    }
    if (plan.walk) {
      r.walk = (static_cast<double>(walk.position(n)) - k.mean_step * plan.n) / std::sqrt(static_cast<double>(plan.n));
    }
    if (!needs_env) return;
    std::shared_ptr<const Environment> env = fixed;
    if (!env) {
      env = std::make_shared<const Environment>(
          Environment::generate(c.environment, walk.min_position(), walk.max_position(),
                                environment_seed(c.seed, static_cast<std::uint64_t>(i))));
    }
    const GasTrajectory traj = build_gas(std::move(env), std::move(walk));
    if (plan.time_needed > 0.0 && !(traj.horizon() > plan.time_needed)) {
      r.exhausted = true;
      return;
    }
    if (c.mode == Mode::discrete) {
      const double root = std::sqrt(static_cast<double>(plan.n));
      r.gas = (traj.positions[n] - k.ell * k.mean_step * static_cast<double>(plan.n)) / root;
      if (!plan.path_times.empty()) {
        const CadlagPath path = rescale_discrete(traj, plan.n, k.ell, k.mean_step, c.window);
        for (double t : plan.path_times) r.path.push_back(path.evaluate(t));
      }
      if (plan.lln) r.time_ratio = traj.times[n] / static_cast<double>(plan.n);
    } else {
      const double t = c.horizon;
      r.gas = (interpolate(traj, t) - drift_c * t) / std::sqrt(t);
      if (!plan.path_times.empty()) {
        const CadlagPath path = rescale_continuous(traj, t, k.ell, drift_c / k.ell, c.window);
        for (double s : plan.path_times) r.path.push_back(path.evaluate(s));
      }
      if (plan.lln) r.time_ratio = traj.times[traj.length()] / static_cast<double>(traj.length());
    }
    if (plan.count_time > 0.0) {
      r.count_ratio = plan.count_time / static_cast<double>(n_of_t(traj, plan.count_time));
    }
  });
  return out;
}

// --- deterministic checks --------------------------------------------------

double require_reinforced_p(const ExperimentConfig& c, const std::string& check) {
  if (!c.walk.reinforced) bad_config(check + " needs a reinforced walk");
  return c.walk.p;
}

void check_variance_recursion(const ExperimentConfig& c, const CheckSpec& s, ExperimentReport& rep) {
  const double p = require_reinforced_p(c, s.name);
  const auto n = static_cast<std::size_t>(param_or(s, "n", 1e6));
  const std::vector<double> u = variance_recursion(p, n);
  rep.checks.push_back(relative_check("variance_recursion", u.back() / static_cast<double>(n), 0.0,
                                      1.0 / (3.0 - 4.0 * p), s.tolerance));
}

void check_martingale_nu(const ExperimentConfig& c, const CheckSpec& s, ExperimentReport& rep) {
  const double p = require_reinforced_p(c, s.name);
  const auto n = static_cast<std::size_t>(param_or(s, "n", 1e6));
  const MartingaleCoeffs mc = martingale_coeffs(p, n);
  const double a = mc.a;
  const double nd = static_cast<double>(n);
  const double g = std::exp(std::lgamma(a + 1.0));
  rep.checks.push_back(relative_check("martingale_nu", std::pow(nd, 2.0 * a - 1.0) * mc.nu_seq[n], 0.0,
                                      g * g / (1.0 - 2.0 * a), s.tolerance));
  rep.diagnostics.push_back(relative_check("martingale_a_asymptotic", std::pow(nd, a) * mc.a_seq[n], 0.0,
                                           g, s.tolerance));
}

void check_reinforced_reduction(const CheckSpec& s, ExperimentReport& rep) {
  const int n_max = static_cast<int>(param_or(s, "n_max", 10));
  double worst = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const Pmf a = reinforced_exact_dist(0.5, n);
    const Pmf b = exact_pmf(JumpLaw::nearest_neighbour(), n);
    for (std::int64_t x = -n; x <= n; ++x) worst = std::max(worst, std::abs(a.at(x) - b.at(x)));
  }
  rep.checks.push_back({"reinforced_reduction", worst, 0.0, 0.0, s.tolerance, worst <= s.tolerance});
}

Pmf walk_pmf_for(const ExperimentConfig& c, std::int64_t n) {
  if (c.walk.reinforced) bad_config("cesaro needs a markov walk");
  const JumpLaw& law = c.walk.law;
  if (n <= 64) return exact_pmf(law, static_cast<int>(n));
  double up = 0.0;
  for (std::size_t i = 0; i < law.support.size(); ++i) {
    if (law.support[i] == 1) up += law.probs[i];
    else if (law.support[i] != -1 && law.probs[i] > 0.0) bad_config("cesaro beyond n = 64 needs a +-1 walk");
  }
  return binomial_walk_pmf(up, n);
}

void check_cesaro(const ExperimentConfig& c, const CheckSpec& s, ExperimentReport& rep) {
  const auto n = static_cast<std::int64_t>(param_or(s, "n", c.horizon));
  std::vector<std::int64_t> betas{-50, 0, 50};
  if (s.params.contains("betas")) betas = s.params.at("betas").get<std::vector<std::int64_t>>();
  const Pmf pmf = walk_pmf_for(c, n);
  std::int64_t reach = std::max(-pmf.min_position, pmf.max_position());
  for (auto b : betas) reach = std::max(reach, std::max(pmf.max_position() + b, -(pmf.min_position + b)));
  const Environment env =
      Environment::generate(c.environment, -reach - 1, reach + 1, environment_seed(c.seed, 0));
  const double ell = analytic_ell(c.environment);
  for (auto b : betas) {
    rep.checks.push_back(absolute_check(fmt::format("cesaro(beta={})", b), cesaro_sum(env, pmf, b), 0.0,
                                        ell, s.tolerance));
  }
}

void check_eta_identity(const ExperimentConfig& c, const CheckSpec& s, ExperimentReport& rep) {
  const auto w = static_cast<std::int64_t>(param_or(s, "window", 1e5));
  const Environment env = Environment::generate(c.environment, 0, w, environment_seed(c.seed, 0));
  Philox rng = rng_for_replica(c.seed, 0, StreamTag::epsilon);
  const EpsilonField eps = sample_epsilon(static_cast<std::size_t>(w), rng);
  const double mean = analytic_ell(c.environment);
  const AuxField aux = eta_field(env, eps, mean);
  double worst = 0.0;
  double field_gap = 0.0;
  double partial = 0.0;
  for (std::int64_t r = 1; r <= w; ++r) {
    const double avg = epsilon_average(env, r, mean);
    worst = std::max(worst, std::abs(avg - env.zeta(r)));
    field_gap = std::max(field_gap, std::abs(aux[r] - eta_value(env.zeta(r), eps[static_cast<std::size_t>(r)], mean)));
    partial += avg;
  }
  rep.checks.push_back({"eta_identity", worst, 0.0, 0.0, s.tolerance, worst <= s.tolerance});
  const double gap = std::abs(partial - env.omega(w));
  rep.checks.push_back({"eta_partial_sum", gap, 0.0, 0.0, s.tolerance, gap <= s.tolerance});
  rep.diagnostics.push_back({"eta_field_formula", field_gap, 0.0, 0.0, 0.0, field_gap == 0.0});
}

void check_tau_moments(const ExperimentConfig& c, const CheckSpec& s, ExperimentReport& rep) {
  std::vector<int> Ls{2, 3, 4, 5};
  std::vector<double> ps{1.0, 2.0};
  if (s.params.contains("L")) Ls = s.params.at("L").get<std::vector<int>>();
  if (s.params.contains("p")) ps = s.params.at("p").get<std::vector<double>>();
  const auto replicas = static_cast<std::int64_t>(param_or(s, "replicas", 1e4));
  const double band = s.tolerance > 0.0 ? s.tolerance : 4.0;
  const double floor = param_or(s, "floor", 0.1);
  const TauMomentReport tr = tau_moment_report(Ls, ps, replicas, c.seed);
  for (const auto& row : tr.rows) {
    rep.diagnostics.push_back({fmt::format("tau_moment(L={},p={})", row.L, row.p), row.estimate,
                               row.stderr_est, 0.0, 0.0, row.misses == 0});
  }
  for (double p : ps) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& row : tr.rows) {
      if (row.p != p) continue;
      lo = std::min(lo, row.estimate);
      hi = std::max(hi, row.estimate);
    }
    rep.checks.push_back({fmt::format("tau_band(p={})", p), hi / lo, 0.0, band, band, hi <= band * lo});
    if (p == 1.0) {
      rep.checks.push_back({"tau_floor(p=1)", lo, 0.0, floor, 0.0, lo >= floor});
    }
  }
}

CadlagPath random_step_path(Philox& rng, double half, int max_jumps) {
  const int jumps = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_jumps)));
  std::vector<double> times;
  for (int i = 0; i < jumps; ++i) times.push_back(-half + 2.0 * half * rng.uniform());
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  std::vector<Segment> segs{{-half, 2.0 * rng.uniform() - 1.0, 0.0}};
  for (double t : times) {
    if (t > -half) segs.push_back({t, 2.0 * rng.uniform() - 1.0, 0.0});
  }
  return CadlagPath(-half, half, std::move(segs));
}

void check_skorokhod_axioms(const ExperimentConfig& c, const CheckSpec& s, ExperimentReport& rep) {
  const auto triples = static_cast<std::int64_t>(param_or(s, "triples", 200));
  const int n_max = static_cast<int>(param_or(s, "n_max", 3));
  const int max_jumps = static_cast<int>(param_or(s, "max_jumps", 3));
  const double exact_tol = param_or(s, "exact_tol", 1e-9);
  const double constant_tol = param_or(s, "constant_tol", 1e-6);
  const double half = n_max + 1.0;

  struct TripleOut {
    double identity = 0.0;
    double symmetry = 0.0;
    double triangle = -std::numeric_limits<double>::infinity();
  };
  std::vector<TripleOut> out(static_cast<std::size_t>(triples));
  parallel_for(triples, [&](std::int64_t i) {
    Philox rng = rng_for_replica(c.seed, static_cast<std::uint64_t>(i), StreamTag::solver);
    const CadlagPath x = random_step_path(rng, half, max_jumps);
    const CadlagPath y = random_step_path(rng, half, max_jumps);
    const CadlagPath z = random_step_path(rng, half, max_jumps);
    auto d = [&](const CadlagPath& a, const CadlagPath& b) { return skorokhod_distance(a, b, n_max).value; };
    const double xy = d(x, y);
    const double yz = d(y, z);
    const double xz = d(x, z);
    TripleOut& o = out[static_cast<std::size_t>(i)];
    o.identity = d(x, x);
    o.symmetry = std::abs(xy - d(y, x));
    o.triangle = std::max({xz - xy - yz, xy - xz - yz, yz - xy - xz});
  });
  TripleOut worst;
  for (const auto& o : out) {
    worst.identity = std::max(worst.identity, o.identity);
    worst.symmetry = std::max(worst.symmetry, o.symmetry);
    worst.triangle = std::max(worst.triangle, o.triangle);
  }
  rep.checks.push_back({"skorokhod_identity", worst.identity, 0.0, 0.0, exact_tol, worst.identity <= exact_tol});
  rep.checks.push_back({"skorokhod_symmetry", worst.symmetry, 0.0, 0.0, exact_tol, worst.symmetry <= exact_tol});
  rep.checks.push_back({"skorokhod_triangle", worst.triangle, 0.0, 0.0, s.tolerance, worst.triangle <= s.tolerance});

  const CadlagPath zero = CadlagPath::constant(-half, half, 0.0);
  const CadlagPath half_path = CadlagPath::constant(-half, half, 0.5);
  const double expected = 0.5 * (1.0 - std::ldexp(1.0, -n_max));
  const double got = skorokhod_distance(zero, half_path, n_max).value;
  rep.checks.push_back(absolute_check("skorokhod_constant", got, 0.0, expected, constant_tol));
}

void check_mixing(const ExperimentConfig& c, const CheckSpec& s, ExperimentReport& rep) {
  const int window = static_cast<int>(param_or(s, "window", 4));
  const int separation = static_cast<int>(param_or(s, "separation", 6));
  for (int w = 1; w <= window; ++w) {
    const MixingFit fit = mixing_ratio_check(c.environment, w, separation);
    rep.checks.push_back({fmt::format("mixing(window={})", w), fit.g_fit, 0.0, 0.0, 0.0, fit.ok});
    for (std::size_t d = 0; d < fit.log_ratios.size(); ++d) {
      const double bound = fit.C_fit * std::exp(-fit.g_fit * static_cast<double>(d + 1));
      rep.diagnostics.push_back({fmt::format("mixing_log_ratio(window={},sep={})", w, d + 1),
                                 fit.log_ratios[d], 0.0, bound, 0.0, fit.log_ratios[d] <= bound * (1 + 1e-12)});
    }
  }
}

void check_ell_lln(const ExperimentConfig& c, const CheckSpec& s, ExperimentReport& rep) {
  const auto n = static_cast<std::int64_t>(param_or(s, "n", 1e6));
  const Environment env = Environment::generate(c.environment, 0, n, environment_seed(c.seed, 0));
  const EllEstimate e = empirical_ell(env);
  rep.checks.push_back(absolute_check("ell_lln", e.estimate, e.half_width / 2.262157162740992,
                                      analytic_ell(c.environment), s.tolerance));
}

// --- replica checks ---------------------------------------------------------

void finish_replica_checks(const ExperimentConfig& c, const Constants& k, const Plan& plan,
                           const std::vector<ReplicaOut>& out, ExperimentReport& rep) {
  std::vector<double> gas;
  std::vector<double> walk;
  std::vector<double> mart;
  std::vector<std::vector<double>> path(plan.path_times.size());
  std::size_t violations = 0;
  for (const auto& r : out) {
    if (r.exhausted) continue;
    gas.push_back(r.gas);
    walk.push_back(r.walk);
    mart.push_back(r.martingale);
    violations += r.violations;
    for (std::size_t i = 0; i < r.path.size(); ++i) path[i].push_back(r.path[i]);
  }
  if (gas.empty()) throw std::runtime_error("every replica exhausted its horizon");
  const double sigma2 = gas_sigma2(c, k);
  auto index_of = [&](double t) {
    return static_cast<std::size_t>(std::lower_bound(plan.path_times.begin(), plan.path_times.end(), t) -
                                    plan.path_times.begin());
  };

  for (const auto& s : c.checks) {
    if (s.name == "gas_variance") {
      const auto [v, se] = variance_with_se(gas);
      rep.checks.push_back(relative_check("gas_variance", v, se, sigma2, s.tolerance));
    } else if (s.name == "gas_ks") {
      const double d = ks_statistic(gas, sigma2);
      rep.checks.push_back({"gas_ks", d, 0.0, 0.0, s.tolerance, d <= s.tolerance});
    } else if (s.name == "walk_variance") {
      const auto [v, se] = variance_with_se(walk);
      rep.checks.push_back(relative_check("walk_variance", v, se, k.walk_var, s.tolerance));
    } else if (s.name == "martingale_bound") {
      const auto v = static_cast<double>(violations);
      rep.checks.push_back({"martingale_bound", v, 0.0, 0.0, s.tolerance, v <= s.tolerance});
    } else if (s.name == "martingale_ks") {
      const double d = ks_statistic(mart, 1.0);
      rep.checks.push_back({"martingale_ks", d, 0.0, 0.0, s.tolerance, d <= s.tolerance});
    } else if (s.name == "path_covariance") {
      for (auto [a, b] : covariance_times(s)) {
        const CovarianceEstimate e = covariance_of(path[index_of(a)], path[index_of(b)]);
        const std::string tag = fmt::format("(s={},t={})", a, b);
        rep.checks.push_back(relative_check("path_covariance" + tag, e.cov, e.stderr_cov, sigma2 * a,
                                            s.tolerance));
        // Exact finite-n covariance of the reinforced walk, scaled by ell^2:
        // E[S_j S_k] = E[S_j^2] a_j / a_k for j <= k.
        if (c.walk.reinforced && c.mode == Mode::discrete && c.walk.p > 0.0 && c.walk.p < 0.75 && a > 0.0) {
          const auto j = static_cast<std::size_t>(std::floor(a * static_cast<double>(plan.n)));
          const auto kk = static_cast<std::size_t>(std::floor(b * static_cast<double>(plan.n)));
          const std::vector<double> u = variance_recursion(c.walk.p, kk);
          const MartingaleCoeffs mc = martingale_coeffs(c.walk.p, kk);
          const double exact = k.ell * k.ell * u[j - 1] * mc.a_seq[j] / mc.a_seq[kk] / static_cast<double>(plan.n);
          rep.diagnostics.push_back(relative_check("path_covariance_walk_exact" + tag, e.cov, e.stderr_cov,
                                                   exact, s.tolerance));
        }
      }
    } else if (s.name == "collision_lln") {
      if (out.front().exhausted) throw std::runtime_error("collision_lln: replica 0 exhausted");
      rep.checks.push_back(absolute_check("collision_lln", out.front().time_ratio, 0.0, k.abs_mean * k.ell,
                                          s.tolerance));
    } else if (s.name == "counting_lln") {
      if (out.front().exhausted) throw std::runtime_error("counting_lln: replica 0 exhausted");
      rep.checks.push_back(absolute_check("counting_lln", out.front().count_ratio, 0.0, k.abs_mean * k.ell,
                                          s.tolerance));
    }
  }
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& c) {
  if (c.replicas < 1) bad_config("replicas must be >= 1");
  ExperimentReport rep;
  rep.config = config_to_json(c);
  rep.replicas = c.replicas;
  const Constants k = constants_for(c);

  const bool any_replica = std::any_of(c.checks.begin(), c.checks.end(),
                                       [](const CheckSpec& s) { return is_replica_check(s.name); });
  if (any_replica) {
    const Plan plan = make_plan(c, k);
    const std::vector<ReplicaOut> out = run_replicas(c, k, plan);
    for (const auto& r : out) rep.exhausted += r.exhausted ? 1 : 0;
    if (static_cast<double>(rep.exhausted) > c.failure_budget * static_cast<double>(c.replicas)) {
      throw std::runtime_error(fmt::format("{} of {} replicas exhausted their horizon (budget {})",
                                           rep.exhausted, c.replicas, c.failure_budget));
    }
    finish_replica_checks(c, k, plan, out, rep);
  }
  for (const auto& s : c.checks) {
    if (s.name == "variance_recursion") check_variance_recursion(c, s, rep);
    else if (s.name == "martingale_nu") check_martingale_nu(c, s, rep);
    else if (s.name == "reinforced_reduction") check_reinforced_reduction(s, rep);
    else if (s.name == "cesaro") check_cesaro(c, s, rep);
    else if (s.name == "eta_identity") check_eta_identity(c, s, rep);
    else if (s.name == "tau_moments") check_tau_moments(c, s, rep);
    else if (s.name == "skorokhod_axioms") check_skorokhod_axioms(c, s, rep);
    else if (s.name == "mixing") check_mixing(c, s, rep);
    else if (s.name == "ell_lln") check_ell_lln(c, s, rep);
  }
  rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(), [](const CheckResult& r) { return r.pass; });
  return rep;
}

}  // namespace llgas
