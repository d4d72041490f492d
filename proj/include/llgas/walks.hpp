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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "llgas/rng.hpp"

namespace llgas {

/// Finite-support jump distribution on the integers.
struct JumpLaw {
  std::vector<std::int64_t> support;
  std::vector<double> probs;

  void validate() const;
  std::int64_t max_abs_jump() const;

  static JumpLaw nearest_neighbour();
};

struct JumpMoments {
  double mean = 0.0;           // E[S_1]
  double second_moment = 0.0;  // E[S_1^2]
  double abs_mean = 0.0;       // E[|V_1|]

  double variance() const { return second_moment - mean * mean; }
};

JumpMoments jump_moments(const JumpLaw& law);

/// Realized walk S_0 = 0, S_k = V_1 + ... + V_k.
class WalkPath {
 public:
  WalkPath() : sums_{0} {}
  explicit WalkPath(std::vector<std::int64_t> steps, std::optional<double> memory = std::nullopt);

  std::size_t length() const { return steps_.size(); }
  /// V_k, 1 <= k <= length().
  std::int64_t step(std::size_t k) const { return steps_.at(k - 1); }
  /// S_k, 0 <= k <= length().
  std::int64_t position(std::size_t k) const { return sums_.at(k); }

  std::span<const std::int64_t> steps() const { return steps_; }
  std::span<const std::int64_t> positions() const { return sums_; }

  std::int64_t min_position() const { return min_; }
  std::int64_t max_position() const { return max_; }

  /// Memory parameter p when the path came from the step-reinforced sampler.
  std::optional<double> memory() const { return memory_; }

 private:
  std::vector<std::int64_t> steps_;
  std::vector<std::int64_t> sums_;
  std::int64_t min_ = 0;
  std::int64_t max_ = 0;
  std::optional<double> memory_;
};

/// n i.i.d. steps from `law`.
WalkPath sample_markov(const JumpLaw& law, std::size_t n, Philox& rng);

/// Exact probability table of a walk position, dense over
/// [min_position, min_position + probs.size()).
struct Pmf {
  std::int64_t min_position = 0;
  std::vector<double> probs;

  std::int64_t max_position() const {
    return min_position + static_cast<std::int64_t>(probs.size()) - 1;
  }
  double at(std::int64_t x) const;
  double total() const;
};

/// Law of S_n by n-fold discrete convolution; n <= 64.
Pmf exact_pmf(const JumpLaw& law, int n);

/// Law of S_n for the nearest-neighbour walk with P(+1) = q, any n >= 0.
/// Built from term ratios outward from the mode, then normalized.
Pmf binomial_walk_pmf(double q, std::int64_t n);

/// Collapsed state of the step-reinforced walk.
///
/// Only the counts (n, n_plus) enter the law of the next step: picking a
/// uniform past step and keeping it with probability p (reversing it with
/// probability 1 - p) gives P(V = +1) = p n_plus / n + (1 - p)(n - n_plus) / n.
struct ReinforcedState {
  double p = 0.5;
  std::int64_t n = 0;
  std::int64_t n_plus = 0;

  double prob_plus() const;
  void push(int step);
  std::int64_t position() const { return 2 * n_plus - n; }
};

/// Step-reinforced walk of length n >= 1.  p must lie in [0, 1]; p >= 3/4 is
/// accepted only with `exploratory` set.
WalkPath sample_reinforced(double p, std::size_t n, Philox& rng, bool exploratory = false);

/// Exact law of the reinforced walk at time n <= 20 by dynamic programming
/// over n_plus.
Pmf reinforced_exact_dist(double p, int n);

/// u_k = E[(S_k)^2] for the reinforced walk, k = 1..n (element k-1).
std::vector<double> variance_recursion(double p, std::size_t n);

/// Martingale normalizers a_k and nu_k = a_1^2 + ... + a_k^2 for k = 0..n.
struct MartingaleCoeffs {
  double a = 0.0;  // memory drift 2p - 1
  std::vector<double> a_seq;
  std::vector<double> nu_seq;
};

/// Coefficients from log-gamma differences; requires 0 < p < 3/4.
MartingaleCoeffs martingale_coeffs(double p, std::size_t n);
/// Same coefficients as a running product of 1/gamma_k; used as a cross-check.
MartingaleCoeffs martingale_coeffs_product(double p, std::size_t n);

struct MartingaleDiag {
  double a = 0.0;
  std::vector<double> a_seq;
  std::vector<double> nu_seq;
  std::vector<double> M_seq;   // M_k = a_k S_k
  std::vector<double> qv_seq;  // predictable quadratic variation <M>_k
  std::size_t bound_violations = 0;  // #{k : <M>_k > nu_k}
};

MartingaleDiag martingale_path(const WalkPath& path, double p);
/// Variant that reuses precomputed coefficients (length >= path length).
MartingaleDiag martingale_path(const WalkPath& path, double p, const MartingaleCoeffs& coeffs);

/// <M>_k accumulated termwise from E[(Delta M_k)^2 | F_{k-1}].
std::vector<double> quadratic_variation_direct(const WalkPath& path, const MartingaleCoeffs& coeffs);

/// Conditional second and fourth moments of the innovation
/// eps_{n+1} = S_{n+1} - gamma_n S_n given S_n.
struct InnovationMoments {
  double second = 0.0;
  double fourth = 0.0;
};
InnovationMoments innovation_moments(double p, std::int64_t n, std::int64_t position);

}  // namespace llgas
