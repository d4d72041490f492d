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
#include <memory>
#include <sstream>

#include "doctest.h"
#include "llgas/cadlag.hpp"
#include "llgas/gas.hpp"
#include "llgas/stats.hpp"
#include "llgas/rng.hpp"

using namespace llgas;

namespace {

std::shared_ptr<const Environment> unit_env(std::int64_t half = 50) {
  return std::make_shared<const Environment>(
      Environment::generate(DistanceLaw::iid({1.0}, {1.0}), -half, half, 1));
}

DistanceLaw fair() { return DistanceLaw::iid({1.0, 2.0}, {0.5, 0.5}); }

}  // namespace

TEST_CASE("unit spacing: the gas is the walk") {
  Philox rng(1, 0);
  const JumpLaw j{{3, -1, 0}, {0.2, 0.5, 0.3}};
  WalkPath w = sample_markov(j, 200, rng);
  const GasTrajectory g = build_gas(unit_env(10), w);  // forces an extension
  double t = 0.0;
  for (std::size_t k = 0; k <= 200; ++k) {
    CHECK(g.positions[k] == static_cast<double>(w.position(k)));
    if (k > 0) t += std::abs(static_cast<double>(w.step(k)));
    CHECK(g.times[k] == t);
  }
  CHECK(g.env->covers(w.min_position(), w.max_position()));
}

TEST_CASE("single jump over two sites") {
  // Pick an environment with zeta_1 = 1 and zeta_2 = 2.
  std::uint64_t seed = 0;
  for (;; ++seed) {
    const Environment e = Environment::generate(fair(), -2, 2, seed);
    if (e.zeta(1) == 1.0 && e.zeta(2) == 2.0) break;
  }
  auto env = std::make_shared<const Environment>(Environment::generate(fair(), -2, 2, seed));
  const GasTrajectory g = build_gas(env, WalkPath({2}));
  CHECK(g.positions[1] == 3.0);
  CHECK(g.times[1] == 3.0);
}

TEST_CASE("empty walk") {
  const GasTrajectory g = build_gas(unit_env(), WalkPath());
  CHECK(g.positions.size() == 1);
  CHECK(g.positions[0] == 0.0);
  CHECK(g.times[0] == 0.0);
}

TEST_CASE("interpolation") {
  const GasTrajectory up = build_gas(unit_env(), WalkPath({1, 1, 1}));
  CHECK(interpolate(up, 1.5) == 1.5);
  const GasTrajectory back = build_gas(unit_env(), WalkPath({-2, 1}));
  CHECK(interpolate(back, 1.0) == -1.0);
  CHECK(interpolate(back, 2.0) == -2.0);  // left end of the second flight
  CHECK_THROWS(interpolate(back, 3.0));
  CHECK_THROWS(interpolate(back, -0.1));
}

TEST_CASE("zero jumps are skipped by the interpolation") {
  const GasTrajectory g = build_gas(unit_env(), WalkPath({1, 0, 0, -1, 2}));
  CHECK(g.times[2] == g.times[1]);
  CHECK(interpolate(g, 1.0) == 1.0);
  CHECK(interpolate(g, 1.5) == 0.5);
  CHECK(n_of_t(g, 1.0) == 3);
}

TEST_CASE("counting process") {
  const GasTrajectory up = build_gas(unit_env(), WalkPath(std::vector<std::int64_t>(20, 1)));
  for (double t : {0.0, 0.3, 1.0, 7.9, 19.5}) CHECK(n_of_t(up, t) == static_cast<std::int64_t>(std::floor(t)));
  const GasTrajectory far = build_gas(unit_env(), WalkPath({5, 1}));
  CHECK(n_of_t(far, 4.9) == 0);
}

TEST_CASE("speed normalization and consistency at collision times") {
  Philox rng(17, 0);
  auto env = std::make_shared<const Environment>(Environment::generate(fair(), -100, 100, 9));
  const GasTrajectory g = build_gas(env, sample_markov(JumpLaw{{2, -1, 0}, {0.3, 0.5, 0.2}}, 500, rng));
  for (std::size_t k = 0; k < 500; ++k) {
    if (g.times[k] < g.horizon()) CHECK(std::abs(interpolate(g, g.times[k]) - g.positions[k]) <= 1e-12);
  }
  Philox u(18, 0);
  for (int i = 0; i < 2000; ++i) {
    const double s = u.uniform() * g.horizon();
    const double t = u.uniform() * g.horizon();
    REQUIRE(std::abs(interpolate(g, t) - interpolate(g, s)) <= std::abs(t - s) + 1e-12);
    // Equality inside one flight.
    const auto k = static_cast<std::size_t>(n_of_t(g, s));
    const double end = g.times[k + 1];
    const double t2 = s + 0.5 * (end - s);
    CHECK(std::abs(std::abs(interpolate(g, t2) - interpolate(g, s)) - (t2 - s)) <= 1e-9);
  }
}

TEST_CASE("laws of large numbers for collision times, standard setup") {
  const std::size_t n = 100000;
  Philox rng = rng_for_replica(20261016, 0);
  auto env = std::make_shared<const Environment>(Environment::generate(fair(), 0, 0, environment_seed(20261016, 0)));
  const GasTrajectory g = build_gas(env, sample_markov(JumpLaw::nearest_neighbour(), 2 * n, rng));
  CHECK(std::abs(g.times[n] / static_cast<double>(n) - 1.5) <= 0.02 * 1.5);
  const double t = 1e5;
  CHECK(std::abs(t / static_cast<double>(n_of_t(g, t)) - 1.5) <= 0.02 * 1.5);
}

TEST_CASE("laws of large numbers for collision times, reinforced walk") {
  // Every step crosses one stationary spacing, so E[T_n / n] = 1.5 exactly
  // whatever the walk; check it across independent environments.
  const std::size_t n = 100000;
  MomentAccumulator acc;
  for (std::uint64_t r = 0; r < 100; ++r) {
    Philox rng = rng_for_replica(20261016, r);
    auto env = std::make_shared<const Environment>(Environment::generate(fair(), 0, 0, environment_seed(20261016, r)));
    const GasTrajectory g = build_gas(env, sample_reinforced(0.6, n, rng));
    acc.update(g.times[n] / static_cast<double>(n));
  }
  const MomentSummary s = acc.finalize();
  CHECK(std::abs(s.mean - 1.5) <= 4.0 * s.stderr_mean);
}

TEST_CASE("discrete rescaling") {
  Philox rng(23, 0);
  auto env = std::make_shared<const Environment>(Environment::generate(fair(), -10, 10, 3));
  const std::int64_t n = 100;
  const GasTrajectory g = build_gas(env, sample_markov(JumpLaw::nearest_neighbour(), 400, rng));
  const CadlagPath p = rescale_discrete(g, n, 1.5, 0.0, 4.0);
  CHECK(p(-0.5) == 0.0);
  CHECK(p(1.0) == doctest::Approx(g.positions[100] / 10.0).epsilon(1e-14));
  CHECK(p(0.555) == doctest::Approx(g.positions[55] / 10.0).epsilon(1e-14));
  for (const auto& s : p.segments()) CHECK(s.slope == 0.0);
  // Drifted walk: the centering is linear in t.
  Philox rng2(24, 0);
  const JumpLaw drifted{{2, -1}, {0.5, 0.5}};
  const GasTrajectory h = build_gas(env, sample_markov(drifted, 400, rng2));
  const CadlagPath q = rescale_discrete(h, n, 1.5, 0.5, 4.0);
  CHECK(q(1.0) == doctest::Approx((h.positions[100] - 1.5 * 0.5 * 100) / 10.0).epsilon(1e-12));
  CHECK(q(0.505) == doctest::Approx((h.positions[50] - 1.5 * 0.5 * 50.5) / 10.0).epsilon(1e-12));
  CHECK_THROWS(rescale_discrete(g, 101, 1.5, 0.0, 4.0));
}

TEST_CASE("continuous rescaling") {
  const GasTrajectory up = build_gas(unit_env(100), WalkPath(std::vector<std::int64_t>(60, 1)));
  const CadlagPath zero = rescale_continuous(up, 10.0, 1.0, 1.0, 4.0);
  for (double s = -4.0; s < 4.0; s += 0.37) CHECK(std::abs(zero(s)) <= 1e-12);

  Philox rng(29, 0);
  auto env = std::make_shared<const Environment>(Environment::generate(fair(), -10, 10, 3));
  const GasTrajectory g = build_gas(env, sample_markov(JumpLaw::nearest_neighbour(), 2000, rng));
  const double t = 200.0;
  const CadlagPath p = rescale_continuous(g, t, 1.5, 0.0, 4.0);
  CHECK(p.is_continuous(1e-9));
  CHECK(p(1.0) == doctest::Approx(interpolate(g, t) / std::sqrt(t)).epsilon(1e-12));
  CHECK(p(2.3) == doctest::Approx(interpolate(g, 2.3 * t) / std::sqrt(t)).epsilon(1e-12));
  CHECK_THROWS(rescale_continuous(g, 1e6, 1.5, 0.0, 4.0));
}

TEST_CASE("the gas path factors as environment path composed with walk path") {
  Philox rng(31, 0);
  const std::int64_t n = 400;
  const double window = 2.0;
  const WalkPath w = sample_markov(JumpLaw::nearest_neighbour(), static_cast<std::size_t>(n * window), rng);
  auto env = std::make_shared<const Environment>(
      Environment::generate(fair(), w.min_position() - 1, w.max_position() + 1, 37));
  const GasTrajectory g = build_gas(env, w);
  const CadlagPath omega = environment_path(*env, n, env->lo(), env->hi());
  const CadlagPath walk = rescale_walk(w, n, window);
  const CadlagPath composed = compose(omega, walk);
  const CadlagPath direct = rescale_discrete(g, n, 1.5, 0.0, window);
  for (double t : direct.breakpoints()) {
    CHECK(std::abs(composed(t) - direct(t)) <= 1e-9);
    CHECK(std::abs(composed.left_limit(t) - direct.left_limit(t)) <= 1e-9);
  }
}

TEST_CASE("csv exports") {
  const GasTrajectory g = build_gas(unit_env(), WalkPath({1, -2}));
  std::ostringstream a;
  write_trajectory_csv(a, g);
  CHECK(a.str() == "k,S_k,X_k,T_k\n0,0,0,0\n1,1,1,1\n2,-1,-1,3\n");
  std::ostringstream b;
  write_track_csv(b, g, 2.0, 3);
  CHECK(b.str() == "t,X_t\n0,0\n1,1\n2,0\n");
}
