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
#include <iosfwd>
#include <optional>
#include <vector>

#include "llgas/environment.hpp"
#include "llgas/rng.hpp"

namespace llgas {

/// I.i.d. field over {-1, 0, +1} with weights (1/4, 1/2, 1/4), indexed 1..horizon.
class EpsilonField {
 public:
  explicit EpsilonField(std::vector<std::int8_t> values);

  std::size_t horizon() const { return values_.size(); }
  int operator[](std::size_t j) const { return values_.at(j - 1); }
  const std::vector<std::int8_t>& values() const { return values_; }

 private:
  std::vector<std::int8_t> values_;
};

EpsilonField sample_epsilon(std::size_t horizon, Philox& rng);

/// Renewal times for run length L: tau_n is the first j >= tau_{n-1} + L with
/// eps_{j-L} = ... = eps_{j-1} = +1 and eps_j in {-1, 0}; tau_0 = 0.
struct TauTimes {
  int L = 1;
  std::vector<std::int64_t> times;
};

TauTimes tau_times(const EpsilonField& eps, int L);

/// tau_1 drawn lazily from `rng`; nullopt if it exceeds `horizon`.
std::optional<std::int64_t> first_tau(int L, Philox& rng, std::int64_t horizon);

struct TauMomentRow {
  int L = 0;
  double p = 0.0;
  double estimate = 0.0;  // E[(4^-L tau_1)^p]^(1/p)
  double stderr_est = 0.0;
  std::int64_t replicas = 0;  // replicas that found tau_1
  std::int64_t misses = 0;
};

struct TauMomentReport {
  std::vector<TauMomentRow> rows;
  std::vector<double> p_values;
  /// Per p: max estimate / min estimate over L is at most 4.
  std::vector<bool> band_ok;
};

/// Monte Carlo scaled moments of tau_1.  Each replica searches up to
/// 50 * 4^L positions.  Requires 1 <= L <= 7, p >= 1, replicas >= 1000; throws
/// if more than 1% of replicas miss.
TauMomentReport tau_moment_report(const std::vector<int>& L_list, const std::vector<double>& p_list,
                                  std::int64_t replicas, std::uint64_t seed);

/// Columns L,p,estimate,stderr,replicas.
void write_tau_csv(std::ostream& out, const TauMomentReport& report);

/// eta_r = 2 m 1{eps_r = +-1} + 2 (zeta_r - m) 1{eps_r = 0} for r = 1..horizon,
/// with m the mean interdistance.
struct AuxField {
  double mean_zeta = 0.0;
  std::vector<double> eta;  // element r - 1

  double operator[](std::int64_t r) const { return eta.at(static_cast<std::size_t>(r - 1)); }
};

AuxField eta_field(const Environment& env, const EpsilonField& eps, double mean_zeta);

/// eta_r for a given value of eps_r.
double eta_value(double zeta, int eps, double mean_zeta);

/// (1/4) eta(+1) + (1/4) eta(-1) + (1/2) eta(0); equals zeta_r.
double epsilon_average(const Environment& env, std::int64_t r, double mean_zeta);

}  // namespace llgas
