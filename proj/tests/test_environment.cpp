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

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "llgas/environment.hpp"
#include "llgas/rng.hpp"
#include "llgas/stats.hpp"

using namespace llgas;

namespace {

DistanceLaw fair() { return DistanceLaw::iid({1.0, 2.0}, {0.5, 0.5}); }

DistanceLaw sticky() {
  Eigen::MatrixXd p(2, 2);
  p << 0.9, 0.1, 0.1, 0.9;
  return DistanceLaw::markov({1.0, 2.0}, p);
}

DistanceLaw lopsided() {
  Eigen::MatrixXd p(2, 2);
  p << 0.9, 0.1, 0.2, 0.8;
  return DistanceLaw::markov({1.0, 2.0}, p);
}

}  // namespace

TEST_CASE("unit spacing gives omega_r = r") {
  const Environment env = Environment::generate(DistanceLaw::iid({1.0}, {1.0}), -5, 5, 1);
  for (std::int64_t r = -5; r <= 5; ++r) CHECK(env.omega(r) == static_cast<double>(r));
}

TEST_CASE("two-point law: values in the alphabet, strictly increasing positions") {
  const Environment env = Environment::generate(fair(), -1000, 1000, 3);
  CHECK(env.omega(0) == 0.0);
  for (std::int64_t r = -999; r <= 1000; ++r) {
    const double z = env.zeta(r);
    REQUIRE((z == 1.0 || z == 2.0));
    REQUIRE(env.omega(r) - env.omega(r - 1) == z);
  }
}

TEST_CASE("generation is deterministic and rejects bad input") {
  const Environment a = Environment::generate(sticky(), -300, 300, 11);
  const Environment b = Environment::generate(sticky(), -300, 300, 11);
  CHECK(std::equal(a.zetas().begin(), a.zetas().end(), b.zetas().begin(), b.zetas().end()));
  CHECK_THROWS(Environment::generate(fair(), 5, -5, 1));
  CHECK_THROWS(DistanceLaw::iid({1.0, -2.0}, {0.5, 0.5}));
  CHECK_THROWS(DistanceLaw::iid({1.0, 2.0}, {0.5, 0.6}));
  Eigen::MatrixXd zero(2, 2);
  zero << 1.0, 0.0, 0.5, 0.5;
  CHECK_THROWS(DistanceLaw::markov({1.0, 2.0}, zero));
}

TEST_CASE("extension preserves every generated entry") {
  for (const DistanceLaw& law : {fair(), sticky()}) {
    const Environment small = Environment::generate(law, -5, 5, 8);
    const Environment same = small.extend(-5, 5);
    CHECK(std::equal(small.omegas().begin(), small.omegas().end(), same.omegas().begin(),
                     same.omegas().end()));
    const Environment big = small.extend(-10, 10);
    for (std::int64_t r = -5; r <= 5; ++r) CHECK(big.omega(r) == small.omega(r));
    // Growing directly gives the same values as growing in steps.
    const Environment direct = Environment::generate(law, -10, 10, 8);
    for (std::int64_t r = -10; r <= 10; ++r) CHECK(big.omega(r) == direct.omega(r));
    CHECK_THROWS(small.extend(-4, 5));
  }
}

TEST_CASE("iid extension: new entries do not depend on old ones") {
  // Split replicas by the last old entry and compare the first new entry.
  std::vector<double> after_one;
  std::vector<double> after_two;
  for (std::uint64_t s = 0; s < 4000; ++s) {
    const Environment env = Environment::generate(fair(), -5, 5, environment_seed(77, s)).extend(-5, 6);
    (env.zeta(5) == 1.0 ? after_one : after_two).push_back(env.zeta(6));
  }
  CHECK(ks_two_sample(after_one, after_two) <
        ks_two_sample_critical(after_one.size(), after_two.size(), 0.01));
}

TEST_CASE("stationary distributions") {
  Eigen::MatrixXd p(2, 2);
  p << 0.9, 0.1, 0.1, 0.9;
  const Eigen::VectorXd a = stationary_distribution(p);
  CHECK(a(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(a(1) == doctest::Approx(0.5).epsilon(1e-12));
  p << 0.9, 0.1, 0.2, 0.8;
  const Eigen::VectorXd b = stationary_distribution(p);
  // Balance: pi_0 * 0.1 = pi_1 * 0.2.
  CHECK(b(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(b(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  p << 1.0, 0.0, 0.5, 0.5;
  CHECK_THROWS(stationary_distribution(p));
}

TEST_CASE("analytic ell") {
  CHECK(analytic_ell(fair()) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(analytic_ell(sticky()) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(analytic_ell(DistanceLaw::iid({2.75}, {1.0})) == 2.75);
  CHECK(analytic_ell(lopsided()) == doctest::Approx(2.0 / 3.0 + 2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("empirical ell") {
  const EllEstimate unit = empirical_ell(Environment::generate(DistanceLaw::iid({1.0}, {1.0}), 0, 500, 1));
  CHECK(unit.estimate == 1.0);
  CHECK(unit.half_width <= 1e-12);
  const EllEstimate iid = empirical_ell(Environment::generate(fair(), 0, 1000000, 21));
  CHECK(std::abs(iid.estimate - 1.5) <= 0.01);
  CHECK(iid.half_width > 0.0);
  const EllEstimate mk = empirical_ell(Environment::generate(sticky(), 0, 1000000, 22));
  CHECK(std::abs(mk.estimate - 1.5) <= 0.02);
  CHECK_THROWS(empirical_ell(Environment::generate(fair(), 0, 99, 1)));
}

TEST_CASE("law of large numbers over 50 seeds") {
  const double slack = 5.0 / std::sqrt(1e6) * std::sqrt(interdistance_variance(fair()));
  int failures = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Environment env = Environment::generate(fair(), 0, 1000000, environment_seed(5150, s));
    failures += std::abs(env.omega(1000000) / 1e6 - 1.5) > slack;
  }
  CHECK(failures == 0);
}

TEST_CASE("autocovariance: closed forms") {
  CHECK(autocovariance(fair(), 3) == 0.0);
  CHECK(autocovariance(fair(), 0) == doctest::Approx(0.25));
  // Second eigenvalue of the sticky chain is 0.8 and the centered alphabet is +-0.5.
  for (int r = 0; r <= 12; ++r) {
    CHECK(autocovariance(sticky(), r) == doctest::Approx(0.25 * std::pow(0.8, r)).epsilon(1e-12));
  }
  // Lopsided chain: eigenvalue 0.7, pi = (2/3, 1/3), Var = 2/9.
  for (int r = 0; r <= 12; ++r) {
    CHECK(autocovariance(lopsided(), r) == doctest::Approx(2.0 / 9.0 * std::pow(0.7, r)).epsilon(1e-12));
  }
}

TEST_CASE("empirical autocovariance matches the analytic one within 3 standard errors") {
  const std::int64_t n = 2000000;
  const Environment env = Environment::generate(sticky(), 0, n, 31);
  const double mean = analytic_ell(sticky());
  // Batch means over 40 blocks give the standard error of each lag estimate.
  const int blocks = 40;
  const std::int64_t len = n / blocks;
  for (int lag = 1; lag <= 10; ++lag) {
    MomentAccumulator acc;
    for (int b = 0; b < blocks; ++b) {
      CompensatedSum s;
      for (std::int64_t r = 1 + b * len; r <= (b + 1) * len - lag; ++r) {
        s.add((env.zeta(r) - mean) * (env.zeta(r + lag) - mean));
      }
      acc.update(s.value() / static_cast<double>(len - lag));
    }
    const MomentSummary m = acc.finalize();
    CHECK(std::abs(m.mean - autocovariance(sticky(), lag)) <= 3.0 * m.stderr_mean);
  }
}

TEST_CASE("markov marginal matches the stationary law") {
  const Environment env = Environment::generate(sticky(), -10000, 10000, 41);
  double ones = 0.0;
  for (std::int64_t r = -9999; r <= 10000; ++r) ones += env.zeta(r) == 1.0;
  // For two atoms the KS distance is the gap in the mass of the first atom.
  CHECK(std::abs(ones / 20000.0 - 0.5) <= 0.02);
}

TEST_CASE("two-sided stationarity of windows left of the origin") {
  // Law of (zeta_{-2}, zeta_{-1}, zeta_0) against the forward chain started
  // from pi, which gives the law of any three consecutive sites.
  const DistanceLaw law = lopsided();
  const Eigen::VectorXd pi = stationary_distribution(law.transition);
  std::map<int, double> exact;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) exact[4 * a + 2 * b + c] = pi(a) * law.transition(a, b) * law.transition(b, c);
    }
  }
  const int reps = 40000;
  std::map<int, double> freq;
  for (int s = 0; s < reps; ++s) {
    const Environment env = Environment::generate(law, -3, 1, environment_seed(606, static_cast<std::uint64_t>(s)));
    freq[4 * env.state(-2) + 2 * env.state(-1) + env.state(0)] += 1.0 / reps;
  }
  for (const auto& [key, p] : exact) {
    const double se = std::sqrt(p * (1.0 - p) / reps);
    CHECK(std::abs(freq[key] - p) <= 4.0 * se);
  }
}

TEST_CASE("mixing ratio check") {
  const MixingFit iid = mixing_ratio_check(fair(), 3, 4);
  CHECK(iid.ok);
  CHECK(iid.C_fit == 0.0);
  for (double r : iid.log_ratios) CHECK(r == 0.0);

  const MixingFit mk = mixing_ratio_check(sticky(), 4, 6);
  CHECK(mk.ok);
  CHECK(mk.monotone);
  REQUIRE(mk.log_ratios.size() == 6);
  for (std::size_t d = 0; d < mk.log_ratios.size(); ++d) {
    CHECK(mk.log_ratios[d] <= mk.C_fit * std::exp(-mk.g_fit * static_cast<double>(d + 1)) * (1 + 1e-12));
  }
  CHECK_THROWS(mixing_ratio_check(sticky(), 4, 0));
}

TEST_CASE("mixing log-ratio at separation one, by hand") {
  // Window {1}, left neighbour l, perturbed site 2.  The law of zeta_1 given
  // (l, c) is proportional to P(l, x) P(x, c).  For l = 0 the weights are
  // (0.81, 0.01) for c = 0 and (0.09, 0.09) for c = 1, so at x = 1 the ratio
  // is (0.01 / 0.82) / (1 / 2) = 1 / 41.  Every other choice is a mirror image
  // or smaller.
  const MixingFit mk = mixing_ratio_check(sticky(), 1, 1);
  REQUIRE(mk.log_ratios.size() == 1);
  CHECK(mk.log_ratios[0] == doctest::Approx(std::log(41.0)).epsilon(1e-12));
}
