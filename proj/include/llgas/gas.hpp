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
#include <memory>
#include <vector>

#include "llgas/cadlag.hpp"
#include "llgas/environment.hpp"
#include "llgas/walks.hpp"

namespace llgas {

/// Discrete gas X_k = omega_{S_k} with collision times
/// T_k = |X_1 - X_0| + ... + |X_k - X_{k-1}|.
struct GasTrajectory {
  WalkPath walk;
  std::vector<double> positions;
  std::vector<double> times;
  std::shared_ptr<const Environment> env;

  std::size_t length() const { return walk.length(); }
  double horizon() const { return times.back(); }
};

/// Builds the trajectory; if the walk leaves the environment window, a
/// widened copy of the environment is attached instead of the original.
GasTrajectory build_gas(std::shared_ptr<const Environment> env, WalkPath walk);

/// Unit-speed interpolation at time t, 0 <= t < T_n.  Flights of zero jumps
/// are empty and never returned.
double interpolate(const GasTrajectory& traj, double t);

/// N_t = max{k : T_k <= t} for 0 <= t < T_n.
std::int64_t n_of_t(const GasTrajectory& traj, double t);

/// t -> n^{-1/2} (X_{floor(nt)} - ell * drift * n t) on [-window, window],
/// zero for t < 0.  Needs at least floor(n * window) steps.
CadlagPath rescale_discrete(const GasTrajectory& traj, std::int64_t n, double ell, double drift,
                            double window = 4.0);

/// s -> t^{-1/2} (X~_{ts} - ell * drift * t s) on [-window, window], zero for
/// s < 0.  Needs T_n >= t * window.
CadlagPath rescale_continuous(const GasTrajectory& traj, double t_scale, double ell,
                              double drift, double window = 4.0);

/// t -> n^{-1/2} S_{floor(nt)} on [-window, window], zero for t < 0.
CadlagPath rescale_walk(const WalkPath& walk, std::int64_t n, double window = 4.0);

/// u -> n^{-1/2} omega(sqrt(n) u), linear between lattice sites, on
/// [site_lo / sqrt(n), site_hi / sqrt(n)].
CadlagPath environment_path(const Environment& env, std::int64_t n, std::int64_t site_lo,
                            std::int64_t site_hi);

/// Columns k,S_k,X_k,T_k.
void write_trajectory_csv(std::ostream& out, const GasTrajectory& traj);
/// Columns t,X_t on `points` equally spaced times in [0, t_end]; t_end < T_n.
void write_track_csv(std::ostream& out, const GasTrajectory& traj, double t_end,
                     std::size_t points);

}  // namespace llgas
