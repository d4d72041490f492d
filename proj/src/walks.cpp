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

#include "llgas/walks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace llgas {

namespace {

constexpr double kProbTol = 1e-12;

void check_memory(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("memory parameter p must lie in [0, 1]");
}

void check_diffusive(double p) {
  // p = 0 gives gamma_1 = 0, so a_2 = a_1 / gamma_1 is infinite.
  if (!(p > 0.0 && p < 0.75)) {
    throw std::invalid_argument("martingale diagnostics require 0 < p < 3/4");
  }
}

}  // namespace

void JumpLaw::validate() const {
  if (support.empty()) throw std::invalid_argument("jump law support is empty");
  if (support.size() != probs.size()) {
    throw std::invalid_argument("jump law support and probs differ in length");
  }
  double total = 0.0;
  double p_zero = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0)) throw std::invalid_argument("jump law has a negative probability");
    total += probs[i];
    if (support[i] == 0) p_zero += probs[i];
  }
  if (std::abs(total - 1.0) > kProbTol) throw std::invalid_argument("jump law probs do not sum to 1");
  if (p_zero >= 1.0 - kProbTol) throw std::invalid_argument("jump law never moves");
}

std::int64_t JumpLaw::max_abs_jump() const {
  std::int64_t m = 0;
  for (auto k : support) m = std::max(m, k < 0 ? -k : k);
  return m;
}

JumpLaw JumpLaw::nearest_neighbour() { return JumpLaw{{-1, 1}, {0.5, 0.5}}; }

JumpMoments jump_moments(const JumpLaw& law) {
  law.validate();
  JumpMoments m;
  for (std::size_t i = 0; i < law.support.size(); ++i) {
    const auto k = static_cast<double>(law.support[i]);
    m.mean += k * law.probs[i];
    m.second_moment += k * k * law.probs[i];
    m.abs_mean += std::abs(k) * law.probs[i];
  }
  return m;
}

WalkPath::WalkPath(std::vector<std::int64_t> steps, std::optional<double> memory)
    : steps_(std::move(steps)), memory_(memory) {
  sums_.resize(steps_.size() + 1);
  sums_[0] = 0;
  for (std::size_t k = 0; k < steps_.size(); ++k) {
    sums_[k + 1] = sums_[k] + steps_[k];
    min_ = std::min(min_, sums_[k + 1]);
    max_ = std::max(max_, sums_[k + 1]);
  }
}

WalkPath sample_markov(const JumpLaw& law, std::size_t n, Philox& rng) {
  law.validate();
  std::vector<double> cum(law.probs.size());
  std::partial_sum(law.probs.begin(), law.probs.end(), cum.begin());
  std::vector<std::int64_t> steps(n);
  for (auto& v : steps) {
    const double u = rng.uniform() * cum.back();
    auto idx = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
    v = law.support[std::min(idx, cum.size() - 1)];
  }
  return WalkPath(std::move(steps));
}

double Pmf::at(std::int64_t x) const {
  if (x < min_position || x > max_position()) return 0.0;
  return probs[static_cast<std::size_t>(x - min_position)];
}

double Pmf::total() const {
  double s = 0.0;
  double c = 0.0;
  for (double p : probs) {
    const double y = p - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

Pmf exact_pmf(const JumpLaw& law, int n) {
  law.validate();
  if (n < 0 || n > 64) throw std::invalid_argument("exact_pmf supports 0 <= n <= 64");
  const auto [lo_it, hi_it] = std::minmax_element(law.support.begin(), law.support.end());
  const std::int64_t kmin = *lo_it;
  const std::int64_t width = *hi_it - kmin + 1;

  std::vector<double> step(static_cast<std::size_t>(width), 0.0);
  for (std::size_t i = 0; i < law.support.size(); ++i) {
    step[static_cast<std::size_t>(law.support[i] - kmin)] += law.probs[i];
  }

  Pmf pmf{0, {1.0}};
  for (int j = 0; j < n; ++j) {
    std::vector<double> next(pmf.probs.size() + step.size() - 1, 0.0);
    for (std::size_t a = 0; a < pmf.probs.size(); ++a) {
      if (pmf.probs[a] == 0.0) continue;
      for (std::size_t b = 0; b < step.size(); ++b) next[a + b] += pmf.probs[a] * step[b];
    }
    pmf.probs = std::move(next);
    pmf.min_position += kmin;
  }
  return pmf;
}

Pmf binomial_walk_pmf(double q, std::int64_t n) {
  check_memory(q);
  if (n < 0) throw std::invalid_argument("binomial_walk_pmf requires n >= 0");
  Pmf pmf{-n, std::vector<double>(static_cast<std::size_t>(2 * n + 1), 0.0)};
  // Weights of k up-steps (S_n = 2k - n), built outward from the mode by the
  // ratio w(k + 1) / w(k) = (n - k) q / ((k + 1) (1 - q)), then normalized.
  auto slot = [&](std::int64_t k) -> double& { return pmf.probs[static_cast<std::size_t>(2 * k)]; };
  if (q == 0.0 || q == 1.0) {
    slot(q == 0.0 ? 0 : n) = 1.0;
    return pmf;
  }
  const double odds = q / (1.0 - q);
  const std::int64_t mode =
      std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(static_cast<double>(n + 1) * q)), 0, n);
  slot(mode) = 1.0;
  for (std::int64_t k = mode; k < n && slot(k) > 0.0; ++k) {
    slot(k + 1) = slot(k) * odds * static_cast<double>(n - k) / static_cast<double>(k + 1);
  }
  for (std::int64_t k = mode; k > 0 && slot(k) > 0.0; --k) {
    slot(k - 1) = slot(k) / odds * static_cast<double>(k) / static_cast<double>(n - k + 1);
  }
  std::vector<double> sorted = pmf.probs;
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  for (double w : sorted) total += w;
  for (double& w : pmf.probs) w /= total;
  return pmf;
}

double ReinforcedState::prob_plus() const {
  if (n == 0) return 0.5;
  const double nd = static_cast<double>(n);
  const double np = static_cast<double>(n_plus);
  return p * np / nd + (1.0 - p) * (nd - np) / nd;
}

void ReinforcedState::push(int step) {
  ++n;
  if (step > 0) ++n_plus;
}

WalkPath sample_reinforced(double p, std::size_t n, Philox& rng, bool exploratory) {
  check_memory(p);
  if (p >= 0.75 && !exploratory) {
    throw std::invalid_argument("p >= 3/4 is outside the diffusive regime; set exploratory");
  }
  if (n < 1) throw std::invalid_argument("reinforced walk needs n >= 1");
  ReinforcedState state{p, 0, 0};
  std::vector<std::int64_t> steps(n);
  for (auto& v : steps) {
    v = rng.uniform() < state.prob_plus() ? 1 : -1;
    state.push(static_cast<int>(v));
  }
  return WalkPath(std::move(steps), p);
}

Pmf reinforced_exact_dist(double p, int n) {
  check_memory(p);
  if (n < 1 || n > 20) throw std::invalid_argument("reinforced_exact_dist supports 1 <= n <= 20");
  // w[j] = P(n_plus = j) after the current number of steps.
  std::vector<double> w{0.5, 0.5};
  for (int m = 1; m < n; ++m) {
    std::vector<double> next(static_cast<std::size_t>(m + 2), 0.0);
    for (int j = 0; j <= m; ++j) {
      const double up = ReinforcedState{p, m, j}.prob_plus();
      next[static_cast<std::size_t>(j + 1)] += w[static_cast<std::size_t>(j)] * up;
      next[static_cast<std::size_t>(j)] += w[static_cast<std::size_t>(j)] * (1.0 - up);
    }
    w = std::move(next);
  }
  Pmf pmf{-n, std::vector<double>(static_cast<std::size_t>(2 * n + 1), 0.0)};
  for (int j = 0; j <= n; ++j) pmf.probs[static_cast<std::size_t>(2 * j)] = w[static_cast<std::size_t>(j)];
  return pmf;
}

std::vector<double> variance_recursion(double p, std::size_t n) {
  check_memory(p);
  if (n < 1) throw std::invalid_argument("variance_recursion needs n >= 1");
  const double a = 2.0 * p - 1.0;
  std::vector<double> u(n);
  u[0] = 1.0;
  for (std::size_t k = 1; k < n; ++k) {
    u[k] = (1.0 + 2.0 * a / static_cast<double>(k)) * u[k - 1] + 1.0;
  }
  return u;
}

MartingaleCoeffs martingale_coeffs(double p, std::size_t n) {
  check_diffusive(p);
  MartingaleCoeffs c;
  c.a = 2.0 * p - 1.0;
  c.a_seq.resize(n + 1);
  c.nu_seq.resize(n + 1);
  const double lg_a1 = std::lgamma(c.a + 1.0);
  c.a_seq[0] = 1.0;
  if (n >= 1) c.a_seq[1] = 1.0;
  for (std::size_t k = 2; k <= n; ++k) {
    const double kd = static_cast<double>(k);
    c.a_seq[k] = std::exp(lg_a1 + std::lgamma(kd) - std::lgamma(kd + c.a));
  }
  c.nu_seq[0] = 0.0;
  for (std::size_t k = 1; k <= n; ++k) c.nu_seq[k] = c.nu_seq[k - 1] + c.a_seq[k] * c.a_seq[k];
  return c;
}

MartingaleCoeffs martingale_coeffs_product(double p, std::size_t n) {
  check_diffusive(p);
  MartingaleCoeffs c;
  c.a = 2.0 * p - 1.0;
  c.a_seq.resize(n + 1);
  c.nu_seq.resize(n + 1);
  c.a_seq[0] = 1.0;
  if (n >= 1) c.a_seq[1] = 1.0;
  for (std::size_t k = 1; k < n; ++k) {
    c.a_seq[k + 1] = c.a_seq[k] / (1.0 + c.a / static_cast<double>(k));
  }
  c.nu_seq[0] = 0.0;
  for (std::size_t k = 1; k <= n; ++k) c.nu_seq[k] = c.nu_seq[k - 1] + c.a_seq[k] * c.a_seq[k];
  return c;
}

namespace {

void check_reinforced_path(const WalkPath& path, double p) {
  if (!path.memory().has_value()) {
    throw std::invalid_argument("martingale diagnostics need a path from sample_reinforced");
  }
  if (*path.memory() != p) {
    throw std::invalid_argument("path was sampled with a different memory parameter");
  }
}

}  // namespace

MartingaleDiag martingale_path(const WalkPath& path, double p) {
  check_diffusive(p);
  return martingale_path(path, p, martingale_coeffs(p, path.length()));
}

MartingaleDiag martingale_path(const WalkPath& path, double p, const MartingaleCoeffs& coeffs) {
  check_diffusive(p);
  check_reinforced_path(path, p);
  const std::size_t n = path.length();
  if (coeffs.a_seq.size() < n + 1 || coeffs.a != 2.0 * p - 1.0) {
    throw std::invalid_argument("martingale coefficients do not match the path");
  }
  MartingaleDiag d;
  d.a = coeffs.a;
  d.a_seq.assign(coeffs.a_seq.begin(), coeffs.a_seq.begin() + static_cast<std::ptrdiff_t>(n + 1));
  d.nu_seq.assign(coeffs.nu_seq.begin(), coeffs.nu_seq.begin() + static_cast<std::ptrdiff_t>(n + 1));
  d.M_seq.resize(n + 1);
  d.qv_seq.resize(n + 1);
  const double a2 = d.a * d.a;
  double correction = 0.0;
  d.qv_seq[0] = 0.0;
  d.M_seq[0] = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const auto s = static_cast<double>(path.position(k));
    d.M_seq[k] = d.a_seq[k] * s;
    if (k >= 2) {
      const auto s_prev = static_cast<double>(path.position(k - 1));
      const double r = d.a_seq[k] / static_cast<double>(k - 1);
      correction += r * r * s_prev * s_prev;
    }
    d.qv_seq[k] = d.nu_seq[k] - a2 * correction;
    if (d.qv_seq[k] > d.nu_seq[k]) ++d.bound_violations;
  }
  return d;
}

std::vector<double> quadratic_variation_direct(const WalkPath& path,
                                               const MartingaleCoeffs& coeffs) {
  const std::size_t n = path.length();
  if (coeffs.a_seq.size() < n + 1) throw std::invalid_argument("coefficients too short");
  std::vector<double> qv(n + 1, 0.0);
  if (n == 0) return qv;
  // First increment is a_1 V_1 with V_1 = +-1.
  qv[1] = coeffs.a_seq[1] * coeffs.a_seq[1];
  for (std::size_t k = 1; k < n; ++k) {
    const double g = coeffs.a / static_cast<double>(k);
    const auto s = static_cast<double>(path.position(k));
    const double ak1 = coeffs.a_seq[k + 1];
    qv[k + 1] = qv[k] + ak1 * ak1 * (1.0 - g * g * s * s);
  }
  return qv;
}

InnovationMoments innovation_moments(double p, std::int64_t n, std::int64_t position) {
  check_memory(p);
  if (n < 1 || std::llabs(position) > n) throw std::invalid_argument("invalid reinforced state");
  const double m = (2.0 * p - 1.0) * static_cast<double>(position) / static_cast<double>(n);
  const double m2 = m * m;
  return {1.0 - m2, 1.0 + 2.0 * m2 - 3.0 * m2 * m2};
}

}  // namespace llgas
