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

#include "llgas/environment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "llgas/rng.hpp"

namespace llgas {

namespace {

constexpr double kStochasticTol = 1e-12;

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void check_transition(const Eigen::MatrixXd& p) {
  if (p.rows() == 0 || p.rows() != p.cols()) {
    throw std::invalid_argument("transition matrix must be square and nonempty");
  }
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    if ((p.row(i).array() <= 0.0).any()) {
      throw std::invalid_argument("transition matrix must have strictly positive entries");
    }
    if (std::abs(p.row(i).sum() - 1.0) > kStochasticTol) {
      throw std::invalid_argument("transition row " + std::to_string(i) + " does not sum to 1");
    }
  }
}

std::vector<double> cumulative(const Eigen::VectorXd& w) {
  std::vector<double> c(static_cast<std::size_t>(w.size()));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    acc += w[i];
    c[static_cast<std::size_t>(i)] = acc;
  }
  return c;
}

int pick(const std::vector<double>& cum, double u) {
  const auto it = std::upper_bound(cum.begin(), cum.end(), u);
  if (it == cum.end()) return static_cast<int>(cum.size()) - 1;
  return static_cast<int>(it - cum.begin());
}

}  // namespace

DistanceLaw DistanceLaw::iid(const std::vector<double>& alphabet, const std::vector<double>& probs) {
  DistanceLaw law;
  law.kind = DistanceKind::iid;
  law.alphabet = to_vector(alphabet);
  law.probs = to_vector(probs);
  law.validate();
  return law;
}

DistanceLaw DistanceLaw::markov(const std::vector<double>& alphabet,
                                const Eigen::MatrixXd& transition) {
  DistanceLaw law;
  law.kind = DistanceKind::markov;
  law.alphabet = to_vector(alphabet);
  law.transition = transition;
  law.validate();
  return law;
}

void DistanceLaw::validate() const {
  if (alphabet.size() == 0) throw std::invalid_argument("alphabet must be nonempty");
  if ((alphabet.array() <= 0.0).any() || !alphabet.allFinite()) {
    throw std::invalid_argument("interdistances must be finite and strictly positive");
  }
  if (kind == DistanceKind::iid) {
    if (probs.size() != alphabet.size()) {
      throw std::invalid_argument("probs and alphabet differ in length");
    }
    if ((probs.array() < 0.0).any()) throw std::invalid_argument("negative probability");
    if (std::abs(probs.sum() - 1.0) > kStochasticTol) {
      throw std::invalid_argument("probs do not sum to 1");
    }
  } else {
    if (transition.rows() != alphabet.size()) {
      throw std::invalid_argument("transition size does not match alphabet");
    }
    check_transition(transition);
  }
}

Eigen::VectorXd DistanceLaw::marginal() const {
  return kind == DistanceKind::iid ? probs : stationary_distribution(transition);
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& transition) {
  check_transition(transition);
  const Eigen::Index k = transition.rows();
  Eigen::RowVectorXd pi = Eigen::RowVectorXd::Constant(k, 1.0 / static_cast<double>(k));
  for (int it = 0; it < 1'000'000; ++it) {
    Eigen::RowVectorXd next = pi * transition;
    next /= next.sum();
    const double diff = (next - pi).cwiseAbs().maxCoeff();
    pi = next;
    if (diff < 1e-13) return pi.transpose();
  }
  throw std::runtime_error("stationary distribution did not converge in 10^6 iterations");
}

Eigen::MatrixXd reversed_chain(const Eigen::MatrixXd& transition, const Eigen::VectorXd& pi) {
  const Eigen::Index k = transition.rows();
  Eigen::MatrixXd rev(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) rev(i, j) = pi[j] * transition(j, i) / pi[i];
    rev.row(i) /= rev.row(i).sum();
  }
  return rev;
}

double analytic_ell(const DistanceLaw& law) {
  law.validate();
  return law.marginal().dot(law.alphabet);
}

double interdistance_variance(const DistanceLaw& law) {
  law.validate();
  const Eigen::VectorXd w = law.marginal();
  const double mean = w.dot(law.alphabet);
  return w.dot((law.alphabet.array() - mean).square().matrix());
}

double autocovariance(const DistanceLaw& law, std::int64_t lag) {
  if (lag < 0) throw std::invalid_argument("lag must be nonnegative");
  law.validate();
  if (lag == 0) return interdistance_variance(law);
  if (law.kind == DistanceKind::iid) return 0.0;
  const Eigen::VectorXd pi = stationary_distribution(law.transition);
  const double mean = pi.dot(law.alphabet);
  // E[zeta_0 zeta_r] = sum_ij pi_i a_i (P^r)_ij a_j, carried as a vector.
  Eigen::VectorXd h = law.alphabet;
  for (std::int64_t r = 0; r < lag; ++r) h = law.transition * h;
  return pi.cwiseProduct(law.alphabet).dot(h) - mean * mean;
}

// ---------------------------------------------------------------------------
// Environment

struct Environment::Tables {
  DistanceLaw law;
  std::vector<double> first;                  // law of zeta_1 (or of every iid site)
  std::vector<std::vector<double>> forward;   // rows of P
  std::vector<std::vector<double>> backward;  // rows of the reversed chain
};

const DistanceLaw& Environment::law() const { return tables_->law; }

Environment Environment::generate(DistanceLaw law, std::int64_t lo, std::int64_t hi,
                                  std::uint64_t seed) {
  law.validate();
  if (lo > 0 || hi < 0 || lo > hi) {
    throw std::invalid_argument("environment window must satisfy lo <= 0 <= hi");
  }
  auto tables = std::make_shared<Tables>();
  tables->first = cumulative(law.marginal());
  if (law.kind == DistanceKind::markov) {
    const Eigen::VectorXd pi = stationary_distribution(law.transition);
    const Eigen::MatrixXd rev = reversed_chain(law.transition, pi);
    for (Eigen::Index i = 0; i < law.size(); ++i) {
      tables->forward.push_back(cumulative(law.transition.row(i).transpose()));
      tables->backward.push_back(cumulative(rev.row(i).transpose()));
    }
  }
  tables->law = std::move(law);

  Environment env;
  env.tables_ = std::move(tables);
  env.seed_ = seed;
  env.key_ = stream_key(seed, StreamTag::environment);
  // Start from the window [0, 1] of zeta indices {1} and grow outward.
  env.lo_ = 0;
  env.hi_ = 0;
  env.zhi_ = 1;
  const int s1 = pick(env.tables_->first, Philox::uniform_at(env.key_, 1));
  env.state_ = {s1};
  env.zeta_ = {env.tables_->law.alphabet[s1]};
  env.omega_ = {0.0};
  env.grow_to(lo, hi);
  return env;
}

Environment Environment::extend(std::int64_t new_lo, std::int64_t new_hi) const {
  if (new_lo > lo_ || new_hi < hi_) {
    throw std::invalid_argument("extend cannot shrink the environment window");
  }
  Environment copy = *this;
  copy.grow_to(new_lo, new_hi);
  return copy;
}

void Environment::grow_to(std::int64_t lo, std::int64_t hi) {
  if (lo > 0 || hi < 0) throw std::invalid_argument("window must contain 0");
  if (hi > hi_) fill_right(hi);
  if (lo < lo_) fill_left(lo);
}

void Environment::fill_right(std::int64_t new_hi) {
  const auto& t = *tables_;
  const bool markov = t.law.kind == DistanceKind::markov;
  // zeta for indices zhi_+1 .. new_hi
  for (std::int64_t r = zhi_ + 1; r <= new_hi; ++r) {
    const double u = Philox::uniform_at(key_, static_cast<std::uint64_t>(r));
    const int s = markov ? pick(t.forward[static_cast<std::size_t>(state_.back())], u)
                         : pick(t.first, u);
    state_.push_back(s);
    zeta_.push_back(t.law.alphabet[s]);
  }
  zhi_ = std::max(zhi_, new_hi);
  omega_.reserve(static_cast<std::size_t>(new_hi - lo_ + 1));
  for (std::int64_t r = hi_ + 1; r <= new_hi; ++r) {
    omega_.push_back(omega_.back() + zeta_[static_cast<std::size_t>(r - lo_ - 1)]);
    hi_ = r;
  }
}

void Environment::fill_left(std::int64_t new_lo) {
  const auto& t = *tables_;
  const bool markov = t.law.kind == DistanceKind::markov;
  const auto count = static_cast<std::size_t>(lo_ - new_lo);
  // New zeta indices new_lo+1 .. lo_, generated from lo_ downward.
  std::vector<int> states(count);
  std::vector<double> zetas(count);
  int right = state_.front();
  for (std::size_t i = 0; i < count; ++i) {
    const std::int64_t r = lo_ - static_cast<std::int64_t>(i);
    const double u = Philox::uniform_at(key_, static_cast<std::uint64_t>(r));
    const int s = markov ? pick(t.backward[static_cast<std::size_t>(right)], u) : pick(t.first, u);
    states[count - 1 - i] = s;
    zetas[count - 1 - i] = t.law.alphabet[s];
    right = s;
  }
  state_.insert(state_.begin(), states.begin(), states.end());
  zeta_.insert(zeta_.begin(), zetas.begin(), zetas.end());

  // omega_{r-1} = omega_r - zeta_r, walking left from the current lo_.
  std::vector<double> omegas(count);
  double w = omega_.front();
  for (std::size_t i = 0; i < count; ++i) {
    w -= zetas[count - 1 - i];
    omegas[count - 1 - i] = w;
  }
  omega_.insert(omega_.begin(), omegas.begin(), omegas.end());
  lo_ = new_lo;
}

double Environment::zeta(std::int64_t r) const {
  if (r <= lo_ || r > hi_) throw std::out_of_range("zeta index outside environment window");
  return zeta_[static_cast<std::size_t>(r - lo_ - 1)];
}

int Environment::state(std::int64_t r) const {
  if (r <= lo_ || r > hi_) throw std::out_of_range("zeta index outside environment window");
  return state_[static_cast<std::size_t>(r - lo_ - 1)];
}

double Environment::omega(std::int64_t r) const {
  if (r < lo_ || r > hi_) throw std::out_of_range("omega index outside environment window");
  return omega_[static_cast<std::size_t>(r - lo_)];
}

double Environment::omega_at(double x) const {
  return omega(static_cast<std::int64_t>(std::floor(x)));
}

std::span<const double> Environment::zetas() const {
  return std::span<const double>(zeta_).first(static_cast<std::size_t>(hi_ - lo_));
}

// ---------------------------------------------------------------------------

EllEstimate empirical_ell(const Environment& env) {
  const std::int64_t n = env.hi();
  if (n < 100) throw std::invalid_argument("empirical_ell needs hi >= 100");
  constexpr int kBlocks = 10;
  constexpr double kT9 = 2.262157162740992;  // Student t, 9 dof, 0.975
  const double total = env.omega(n);
  EllEstimate out;
  out.estimate = total / static_cast<double>(n);

  std::array<double, kBlocks> loo{};
  double loo_mean = 0.0;
  for (int b = 0; b < kBlocks; ++b) {
    const std::int64_t start = n * b / kBlocks;
    const std::int64_t stop = n * (b + 1) / kBlocks;
    const double block_sum = env.omega(stop) - env.omega(start);
    loo[static_cast<std::size_t>(b)] =
        (total - block_sum) / static_cast<double>(n - (stop - start));
    loo_mean += loo[static_cast<std::size_t>(b)] / kBlocks;
  }
  double ss = 0.0;
  for (double v : loo) ss += (v - loo_mean) * (v - loo_mean);
  const double se = std::sqrt(static_cast<double>(kBlocks - 1) / kBlocks * ss);
  out.half_width = kT9 * se;
  return out;
}

// ---------------------------------------------------------------------------

MixingFit mixing_ratio_check(const DistanceLaw& law, int window, int separation) {
  law.validate();
  if (separation < 1) throw std::invalid_argument("separation must be >= 1");
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  MixingFit fit;
  if (law.kind == DistanceKind::iid) {
    fit.log_ratios.assign(static_cast<std::size_t>(separation), 0.0);
    fit.ok = true;
    fit.monotone = true;
    return fit;
  }
  const auto k = static_cast<int>(law.size());
  if (k > 3 || window > 8) {
    throw std::invalid_argument("alphabet/window too large for exact enumeration");
  }
  const Eigen::MatrixXd& p = law.transition;

  // Configurations of Delta = {1..window}, encoded base k.
  int configs = 1;
  for (int i = 0; i < window; ++i) configs *= k;
  std::vector<std::vector<int>> paths(static_cast<std::size_t>(configs));
  for (int c = 0; c < configs; ++c) {
    int code = c;
    auto& path = paths[static_cast<std::size_t>(c)];
    for (int i = 0; i < window; ++i) {
      path.push_back(code % k);
      code /= k;
    }
  }

  Eigen::MatrixXd gap = Eigen::MatrixXd::Identity(k, k);  // P^(d-1)
  for (int d = 1; d <= separation; ++d) {
    if (d > 1) gap = gap * p;
    const Eigen::MatrixXd bridge = gap * p;  // P^d: last Delta site -> perturbed site
    double worst = 0.0;
    for (int left = 0; left < k; ++left) {
      for (int c1 = 0; c1 < k; ++c1) {
        for (int c2 = 0; c2 < k; ++c2) {
          if (c1 == c2) continue;
          // Joint weights of the Delta configuration with each boundary pair,
          // normalized into conditional laws by exhaustive summation.
          std::vector<double> w1(static_cast<std::size_t>(configs));
          std::vector<double> w2(static_cast<std::size_t>(configs));
          double z1 = 0.0;
          double z2 = 0.0;
          for (int c = 0; c < configs; ++c) {
            const auto& path = paths[static_cast<std::size_t>(c)];
            double w = p(left, path[0]);
            for (int i = 1; i < window; ++i) w *= p(path[i - 1], path[i]);
            const int last = path.back();
            w1[static_cast<std::size_t>(c)] = w * bridge(last, c1);
            w2[static_cast<std::size_t>(c)] = w * bridge(last, c2);
            z1 += w1[static_cast<std::size_t>(c)];
            z2 += w2[static_cast<std::size_t>(c)];
          }
          for (int c = 0; c < configs; ++c) {
            const double r = std::log((w1[static_cast<std::size_t>(c)] / z1) /
                                      (w2[static_cast<std::size_t>(c)] / z2));
            worst = std::max(worst, std::abs(r));
          }
        }
      }
    }
    fit.log_ratios.push_back(worst);
  }

  fit.monotone = true;
  for (std::size_t i = 1; i < fit.log_ratios.size(); ++i) {
    if (!(fit.log_ratios[i] < fit.log_ratios[i - 1])) fit.monotone = false;
  }

  // Least-squares line through (d, log ratio_d), then lift to an envelope.
  const auto m = static_cast<double>(separation);
  if (separation == 1) {
    fit.g_fit = 0.0;
    fit.C_fit = fit.log_ratios[0];
  } else {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int d = 1; d <= separation; ++d) {
      const double y = std::log(std::max(fit.log_ratios[static_cast<std::size_t>(d - 1)],
                                         std::numeric_limits<double>::min()));
      sx += d;
      sy += y;
      sxx += static_cast<double>(d) * d;
      sxy += d * y;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    fit.g_fit = -slope;
    double log_c = -std::numeric_limits<double>::infinity();
    for (int d = 1; d <= separation; ++d) {
      const double y = std::log(std::max(fit.log_ratios[static_cast<std::size_t>(d - 1)],
                                         std::numeric_limits<double>::min()));
      log_c = std::max(log_c, y + fit.g_fit * d);
    }
    fit.C_fit = std::exp(log_c);
  }
  bool dominates = true;
  for (int d = 1; d <= separation; ++d) {
    const double bound = fit.C_fit * std::exp(-fit.g_fit * d);
    if (bound * (1.0 + 1e-12) < fit.log_ratios[static_cast<std::size_t>(d - 1)]) dominates = false;
  }
  fit.ok = fit.g_fit > 0.0 && fit.monotone && dominates;
  return fit;
}

}  // namespace llgas
