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

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "llgas/gas.hpp"
#include "llgas/stats.hpp"

using namespace llgas;

namespace {

// Phi(x) by composite Simpson integration of the density from 0.
double simpson_phi(double x) {
  const int n = 20000;
  const double h = x / n;
  auto f = [](double u) { return std::exp(-0.5 * u * u); };
  double s = f(0.0) + f(x);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return 0.5 + s * h / 3.0 / std::sqrt(2.0 * std::acos(-1.0));
}

double normal_quantile(double p) {
  double lo = -40.0;
  double hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double plain_covariance(const std::vector<double>& u, const std::vector<double>& v) {
  const double n = static_cast<double>(u.size());
  const double mu = std::accumulate(u.begin(), u.end(), 0.0) / n;
  const double mv = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += (u[i] - mu) * (v[i] - mv);
  return s / (n - 1.0);
}

}  // namespace

TEST_CASE("moment accumulator") {
  MomentAccumulator a;
  for (double x : {1.0, 2.0, 3.0}) a.update(x);
  const MomentSummary s = a.finalize();
  CHECK(s.count == 3);
  CHECK(s.mean == 2.0);
  CHECK(s.variance == 1.0);
  CHECK(s.min == 1.0);
  CHECK(s.max == 3.0);

  MomentAccumulator l;
  MomentAccumulator r;
  l.update(1.0);
  l.update(2.0);
  r.update(3.0);
  l.merge(r);
  CHECK(l.finalize().count == 3);
  CHECK(l.finalize().mean == 2.0);

  MomentAccumulator single;
  single.update(4.0);
  CHECK(single.finalize().variance == 0.0);
  CHECK_THROWS(MomentAccumulator().finalize());

  Philox rng(1, 0);
  std::vector<double> xs(10000);
  for (auto& x : xs) x = 1e3 + rng.uniform();
  std::vector<MomentSummary> orders;
  for (int perm = 0; perm < 4; ++perm) {
    std::vector<MomentAccumulator> parts(7);
    for (std::size_t i = 0; i < xs.size(); ++i) parts[(i * 7919 + perm) % 7].update(xs[i]);
    MomentAccumulator total;
    for (std::size_t k = 0; k < parts.size(); ++k) total.merge(parts[(k + perm) % parts.size()]);
    orders.push_back(total.finalize());
    std::shuffle(xs.begin(), xs.end(), rng);
  }
  for (const auto& o : orders) {
    CHECK(o.count == orders[0].count);
    CHECK(o.mean == orders[0].mean);
    CHECK(o.variance == doctest::Approx(orders[0].variance).epsilon(1e-9));
  }
}

TEST_CASE("pair accumulator") {
  PairAccumulator a;
  PairAccumulator b;
  const std::vector<double> u{1.0, 2.0, 4.0, 7.0, -1.0};
  const std::vector<double> v{0.5, -1.0, 3.0, 2.0, 0.0};
  for (std::size_t i = 0; i < u.size(); ++i) (i < 2 ? a : b).update(u[i], v[i]);
  a.merge(b);
  const PairSummary s = a.finalize();
  CHECK(s.count == 5);
  CHECK(s.mean_u == doctest::Approx(2.6).epsilon(1e-15));
  CHECK(s.covariance == doctest::Approx(plain_covariance(u, v)).epsilon(1e-13));
}

TEST_CASE("compensated summation") {
  CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1000.0);
  CompensatedSum a;
  CompensatedSum b;
  a.add(0.1);
  b.add(0.2);
  b.add(-0.3);
  a.merge(b);
  // The exact sum of the three doubles is 2^-55.
  CHECK(a.value() == std::ldexp(1.0, -55));
}

TEST_CASE("gaussian cdf") {
  CHECK(gaussian_cdf(0.0, 1.0) == 0.5);
  CHECK(gaussian_cdf(1.0, 1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-14));
  CHECK(gaussian_cdf(3.0, 9.0) == doctest::Approx(0.8413447460685429).epsilon(1e-14));
  CHECK(gaussian_cdf(-std::numeric_limits<double>::infinity(), 2.0) == 0.0);
  CHECK(gaussian_cdf(-40.0, 1.0) == 0.0);
  for (double x = -6.0; x <= 6.0; x += 0.25) {
    CHECK(std::abs(gaussian_cdf(x, 1.0) - simpson_phi(x)) <= 1e-12);
    CHECK(std::abs(gaussian_cdf(2.0 * x, 4.0) - simpson_phi(x)) <= 1e-12);
  }
  CHECK_THROWS(gaussian_cdf(0.0, 0.0));
  CHECK_THROWS(gaussian_cdf(0.0, -1.0));
}

TEST_CASE("one-sample Kolmogorov-Smirnov") {
  for (int m : {10, 100, 1000}) {
    std::vector<double> q;
    for (int i = 1; i <= m; ++i) q.push_back(normal_quantile((i - 0.5) / m));
    CHECK(ks_statistic(q, 1.0) == doctest::Approx(0.5 / m).epsilon(1e-9));
    std::reverse(q.begin(), q.end());
    CHECK(ks_statistic(q, 1.0) == doctest::Approx(0.5 / m).epsilon(1e-9));
  }
  const std::vector<double> zeros(50, 0.0);
  CHECK(ks_statistic(zeros, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS(ks_statistic(std::vector<double>{}, 1.0));

  int rejections = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Philox rng(seed, 0);
    std::normal_distribution<double> normal;
    std::vector<double> x(10000);
    for (auto& v : x) v = normal(rng);
    if (ks_statistic(x, 1.0) >= 1.63 / 100.0) ++rejections;
  }
  // 1% level over 20 seeds: more than one rejection has probability 1.7%.
  CHECK(rejections <= 1);
}

TEST_CASE("two-sample Kolmogorov-Smirnov") {
  CHECK(ks_two_sample(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}) == 0.0);
  CHECK(ks_two_sample(std::vector<double>{1, 2}, std::vector<double>{3, 4}) == 1.0);
  CHECK(ks_two_sample(std::vector<double>{1, 3}, std::vector<double>{2, 4}) == 0.5);
  CHECK(ks_two_sample_critical(100, 100, 0.05) ==
        doctest::Approx(std::sqrt(-std::log(0.025) / 2.0) * std::sqrt(0.02)).epsilon(1e-14));
}

TEST_CASE("covariance with jackknife error") {
  Philox rng(21, 0);
  std::vector<double> u(300);
  std::vector<double> v(300);
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = rng.uniform();
    v[i] = u[i] * u[i] + 0.3 * rng.uniform();
  }
  // Brute-force delete-one jackknife.
  std::vector<double> theta;
  for (std::size_t i = 0; i < u.size(); ++i) {
    std::vector<double> a;
    std::vector<double> b;
    for (std::size_t j = 0; j < u.size(); ++j) {
      if (j == i) continue;
      a.push_back(u[j]);
      b.push_back(v[j]);
    }
    theta.push_back(plain_covariance(a, b));
  }
  const double n = static_cast<double>(theta.size());
  const double mean = std::accumulate(theta.begin(), theta.end(), 0.0) / n;
  double ss = 0.0;
  for (double t : theta) ss += (t - mean) * (t - mean);
  const double se = std::sqrt((n - 1.0) / n * ss);

  const CovarianceEstimate c = covariance_of(u, v);
  CHECK(c.cov == doctest::Approx(plain_covariance(u, v)).epsilon(1e-12));
  CHECK(c.stderr_cov == doctest::Approx(se).epsilon(1e-8));
  CHECK_THROWS(covariance_of(std::vector<double>{1, 2}, std::vector<double>{1, 2}));
  CHECK_THROWS(covariance_of(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}));
}

TEST_CASE("covariance across paths") {
  std::vector<CadlagPath> zero(100, CadlagPath::constant(-1.0, 1.0, 0.0));
  const CovarianceEstimate z = covariance_at(zero, 0.5, 1.0);
  CHECK(z.cov == 0.0);
  CHECK(z.stderr_cov == 0.0);
  CHECK_THROWS(covariance_at(std::span<const CadlagPath>(zero).first(99), 0.5, 1.0));

  std::vector<CadlagPath> steps;
  std::vector<double> at;
  Philox rng(8, 0);
  for (int i = 0; i < 200; ++i) {
    at.push_back(rng.uniform() - 0.5);
    steps.push_back(CadlagPath::constant(-1.0, 1.0, at.back()));
  }
  MomentAccumulator m;
  for (double a : at) m.update(a);
  CHECK(covariance_at(steps, 0.3, 0.3).cov == doctest::Approx(m.finalize().variance).epsilon(1e-12));

  // Annealed ensemble of the standard gas: iid {1, 2} spacings, +-1 walk.
  const DistanceLaw law = DistanceLaw::iid({1.0, 2.0}, {0.5, 0.5});
  const std::int64_t n = 400;
  std::vector<CadlagPath> gas;
  for (std::uint64_t r = 0; r < 5000; ++r) {
    auto env = std::make_shared<const Environment>(
        Environment::generate(law, -n, n, environment_seed(31, r)));
    Philox walk_rng = rng_for_replica(31, r);
    gas.push_back(rescale_discrete(build_gas(env, sample_markov(JumpLaw::nearest_neighbour(), n, walk_rng)),
                                   n, 1.5, 0.0, 1.0));
  }
  const CovarianceEstimate g = covariance_at(gas, 0.5, 1.0);
  CHECK(std::abs(g.cov - 1.125) <= 0.1125);
}

TEST_CASE("Cesaro sums") {
  const DistanceLaw law = DistanceLaw::iid({1.0, 2.0}, {0.5, 0.5});
  const Environment constant = Environment::generate(DistanceLaw::iid({2.5}, {1.0}), -200, 200, 1);
  const Pmf p = exact_pmf(JumpLaw{{-2, 1, 3}, {0.3, 0.5, 0.2}}, 30);
  CHECK(cesaro_sum(constant, p, 0) == doctest::Approx(2.5).epsilon(1e-13));
  CHECK(cesaro_sum(constant, p, -17) == doctest::Approx(2.5).epsilon(1e-13));

  // Linear in the pmf.
  const Environment env = Environment::generate(law, -200, 200, 2);
  const Pmf q = exact_pmf(JumpLaw::nearest_neighbour(), 40);
  Pmf mix;
  mix.min_position = -90;
  mix.probs.assign(181, 0.0);
  for (std::int64_t x = p.min_position; x <= p.max_position(); ++x) mix.probs[static_cast<std::size_t>(x + 90)] += 0.25 * p.at(x);
  for (std::int64_t x = q.min_position; x <= q.max_position(); ++x) mix.probs[static_cast<std::size_t>(x + 90)] += 0.75 * q.at(x);
  CHECK(cesaro_sum(env, mix, 3) ==
        doctest::Approx(0.25 * cesaro_sum(env, p, 3) + 0.75 * cesaro_sum(env, q, 3)).epsilon(1e-13));
  CHECK_THROWS(cesaro_sum(env, p, 150));

  const std::int64_t n = 10000;
  const Environment big = Environment::generate(law, -n - 2, n + 2, 20261016);
  const Pmf b = binomial_walk_pmf(0.5, n);
  const double c0 = cesaro_sum(big, b, 0);
  const double c1 = cesaro_sum(big, b, 1);
  MESSAGE("cesaro beta=0: " << c0 << ", beta=1: " << c1);
  CHECK(std::abs(c0 - 1.5) <= 0.02);
  CHECK(std::abs(c1 - c0) <= 0.03);
}

TEST_CASE("Cesaro sums fluctuate as predicted across environments") {
  // For iid spacings the sum is 1.5 plus sum_k (zeta_k - 1.5) pmf(k), whose
  // standard deviation is 0.5 * sqrt(sum_k pmf(k)^2).
  const DistanceLaw law = DistanceLaw::iid({1.0, 2.0}, {0.5, 0.5});
  const std::int64_t n = 10000;
  const Pmf b = binomial_walk_pmf(0.5, n);
  double sq = 0.0;
  for (double p : b.probs) sq += p * p;
  const double sd = 0.5 * std::sqrt(sq);
  MomentAccumulator acc;
  for (std::uint64_t r = 0; r < 400; ++r) {
    const Environment env = Environment::generate(law, -n - 1, n, environment_seed(77, r));
    acc.update(cesaro_sum(env, b, 0));
  }
  const MomentSummary s = acc.finalize();
  MESSAGE("mean " << s.mean << ", sd " << std::sqrt(s.variance) << ", predicted sd " << sd);
  CHECK(std::abs(s.mean - 1.5) <= 4.0 * sd / std::sqrt(400.0));
  // The sample variance of 400 near-Gaussian values has relative error about 7%.
  CHECK(std::abs(s.variance / (sd * sd) - 1.0) <= 0.3);
}
