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

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace llgas {

enum class DistanceKind { iid, markov };

/// Generative law of the scatterer interdistances zeta_r.
///
/// Interdistances take values in a finite alphabet of positive lengths,
/// either i.i.d. with weights `probs` or as a stationary Markov chain with a
/// strictly positive transition matrix (exponentially mixing).
struct DistanceLaw {
  DistanceKind kind = DistanceKind::iid;
  Eigen::VectorXd alphabet;
  Eigen::VectorXd probs;
  Eigen::MatrixXd transition;

  static DistanceLaw iid(const std::vector<double>& alphabet, const std::vector<double>& probs);
  static DistanceLaw markov(const std::vector<double>& alphabet, const Eigen::MatrixXd& transition);

  /// Throws std::invalid_argument if the law violates its invariants.
  void validate() const;

  /// One-site marginal: `probs` for iid, the stationary distribution for markov.
  Eigen::VectorXd marginal() const;

  Eigen::Index size() const { return alphabet.size(); }
};

/// Stationary distribution by iterated left multiplication.
///
/// Requires a square, row-stochastic matrix with strictly positive entries.
/// Iterates pi <- pi P from the uniform vector until successive iterates
/// differ by less than 1e-13 in max norm; throws std::runtime_error after
/// 10^6 iterations without convergence.
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& transition);

/// Time reversal P~_ij = pi_j P_ji / pi_i of a stationary chain.
Eigen::MatrixXd reversed_chain(const Eigen::MatrixXd& transition, const Eigen::VectorXd& pi);

/// Almost-sure limit of omega_n / n: the stationary mean interdistance.
double analytic_ell(const DistanceLaw& law);

/// Var(zeta_0) under the stationary marginal.
double interdistance_variance(const DistanceLaw& law);

/// Cov(zeta_0, zeta_r) under stationarity.
double autocovariance(const DistanceLaw& law, std::int64_t lag);

/// Scatterer environment over the integer window [lo, hi].
///
/// omega_0 = 0 and omega_r - omega_{r-1} = zeta_r > 0.  Every zeta_r is a
/// pure function of (law, seed, r): each site draws its uniform from a
/// counter-based stream keyed by the seed and indexed by r, and markov sites
/// propagate outward from zeta_1 (rightward with the transition matrix,
/// leftward with the reversed chain).  Extending the window therefore never
/// changes entries that already exist.
class Environment {
 public:
  static Environment generate(DistanceLaw law, std::int64_t lo, std::int64_t hi,
                              std::uint64_t seed);

  /// Copy over a window containing the current one.
  Environment extend(std::int64_t new_lo, std::int64_t new_hi) const;

  /// In-place growth; a no-op when the window already covers [lo, hi].
  void grow_to(std::int64_t lo, std::int64_t hi);

  std::int64_t lo() const { return lo_; }
  std::int64_t hi() const { return hi_; }
  std::uint64_t seed() const { return seed_; }
  const DistanceLaw& law() const;

  bool covers(std::int64_t a, std::int64_t b) const { return lo_ <= a && b <= hi_; }

  /// zeta_r for lo < r <= hi.
  double zeta(std::int64_t r) const;
  /// omega_r for lo <= r <= hi.
  double omega(std::int64_t r) const;
  /// omega at floor(x).
  double omega_at(double x) const;

  /// Alphabet index of zeta_r for lo < r <= hi.
  int state(std::int64_t r) const;

  /// zeta over (lo, hi] in index order.
  std::span<const double> zetas() const;
  /// omega over [lo, hi] in index order.
  std::span<const double> omegas() const { return omega_; }

 private:
  struct Tables;

  Environment() = default;
  void fill_right(std::int64_t new_hi);
  void fill_left(std::int64_t new_lo);

  std::shared_ptr<const Tables> tables_;
  std::uint64_t seed_ = 0;
  std::uint64_t key_ = 0;
  std::int64_t lo_ = 0;
  std::int64_t hi_ = 0;
  // zeta_/state_ cover indices [lo_ + 1, zhi_] with zhi_ = max(hi_, 1): zeta_1
  // is always materialized because the leftward chain starts from it.
  std::int64_t zhi_ = 1;
  std::vector<double> zeta_;
  std::vector<int> state_;
  std::vector<double> omega_;
};

struct EllEstimate {
  double estimate = 0.0;
  double half_width = 0.0;
};

/// omega_hi / hi with a delete-one-block jackknife over 10 equal blocks.
/// half_width = t_{9, 0.975} * jackknife standard error.  Requires hi >= 100.
EllEstimate empirical_ell(const Environment& env);

struct MixingFit {
  double C_fit = 0.0;
  double g_fit = 0.0;
  bool ok = false;
  /// Maximal log Radon-Nikodym ratio for separations 1..separation.
  std::vector<double> log_ratios;
  /// log_ratios strictly decrease in the separation.
  bool monotone = false;
};

/// Exact check of the exponential decorrelation bound on a small window.
///
/// Delta = {1..window}; the perturbed site sits `d` sites to the right of
/// Delta for d = 1..separation.  For every left boundary value, every Delta
/// configuration and every pair of values at the perturbed site, the exact
/// conditional probabilities of the Delta configuration are compared; the
/// maximal |log ratio| per separation is recorded.  A line
/// log C - g d is fitted by least squares and C is raised to the smallest
/// value whose curve dominates every observation; ok requires g > 0,
/// strictly decreasing observations and domination.
MixingFit mixing_ratio_check(const DistanceLaw& law, int window, int separation);

}  // namespace llgas
