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

#include "llgas/gas.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace llgas {

GasTrajectory build_gas(std::shared_ptr<const Environment> env, WalkPath walk) {
  if (!env) throw std::invalid_argument("build_gas needs an environment");
  if (!env->covers(walk.min_position(), walk.max_position())) {
    env = std::make_shared<const Environment>(env->extend(std::min(env->lo(), walk.min_position()),
                                                          std::max(env->hi(), walk.max_position())));
  }
  GasTrajectory traj;
  const std::size_t n = walk.length();
  traj.positions.resize(n + 1);
  traj.times.resize(n + 1);
  traj.positions[0] = 0.0;
  traj.times[0] = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    traj.positions[k] = env->omega(walk.position(k));
    traj.times[k] = traj.times[k - 1] + std::abs(traj.positions[k] - traj.positions[k - 1]);
  }
  traj.walk = std::move(walk);
  traj.env = std::move(env);
  return traj;
}

double interpolate(const GasTrajectory& traj, double t) {
  if (t < 0.0) throw std::invalid_argument("interpolate: negative time");
  if (!(t < traj.horizon())) throw std::out_of_range("interpolate: beyond realized horizon");
  // First k with T_k > t; then T_{k-1} <= t < T_k, so flight k is nonempty.
  const auto it = std::upper_bound(traj.times.begin(), traj.times.end(), t);
  const auto k = static_cast<std::size_t>(it - traj.times.begin());
  const double dir = traj.positions[k] > traj.positions[k - 1] ? 1.0 : -1.0;
  return traj.positions[k - 1] + dir * (t - traj.times[k - 1]);
}

std::int64_t n_of_t(const GasTrajectory& traj, double t) {
  if (t < 0.0) throw std::invalid_argument("n_of_t: negative time");
  if (!(t < traj.horizon())) throw std::out_of_range("n_of_t: beyond realized horizon");
  const auto it = std::upper_bound(traj.times.begin(), traj.times.end(), t);
  return static_cast<std::int64_t>(it - traj.times.begin()) - 1;
}

CadlagPath rescale_discrete(const GasTrajectory& traj, std::int64_t n, double ell, double drift,
                            double window) {
  if (n < 1 || !(window > 0.0)) throw std::invalid_argument("rescale_discrete: bad scale or window");
  const auto needed = static_cast<std::int64_t>(std::floor(static_cast<double>(n) * window));
  if (static_cast<std::int64_t>(traj.length()) < needed) {
    throw std::invalid_argument("rescale_discrete: trajectory has too few steps");
  }
  const double nd = static_cast<double>(n);
  const double root = std::sqrt(nd);
  const double slope = -ell * drift * root;
  std::vector<Segment> segs{{-window, 0.0, 0.0}};
  for (std::int64_t k = 0;; ++k) {
    const double t = static_cast<double>(k) / nd;
    if (!(t < window)) break;
    const double x = traj.positions[static_cast<std::size_t>(k)];
    segs.push_back({t, (x - ell * drift * static_cast<double>(k)) / root, slope});
  }
  return CadlagPath(-window, window, std::move(segs));
}

CadlagPath rescale_continuous(const GasTrajectory& traj, double t_scale, double ell, double drift,
                              double window) {
  if (!(t_scale > 0.0) || !(window > 0.0)) {
    throw std::invalid_argument("rescale_continuous: bad scale or window");
  }
  if (traj.horizon() < t_scale * window) {
    throw std::out_of_range("rescale_continuous: realized horizon too short");
  }
  const double root = std::sqrt(t_scale);
  std::vector<Segment> segs{{-window, 0.0, 0.0}};
  for (std::size_t k = 1; k < traj.times.size(); ++k) {
    const double t0 = traj.times[k - 1];
    if (traj.times[k] == t0) continue;
    const double s0 = t0 / t_scale;
    if (!(s0 < window)) break;
    const double dir = traj.positions[k] > traj.positions[k - 1] ? 1.0 : -1.0;
    segs.push_back({s0, (traj.positions[k - 1] - ell * drift * t0) / root,
                    root * (dir - ell * drift)});
  }
  return CadlagPath(-window, window, std::move(segs));
}

CadlagPath rescale_walk(const WalkPath& walk, std::int64_t n, double window) {
  if (n < 1 || !(window > 0.0)) throw std::invalid_argument("rescale_walk: bad scale or window");
  const auto needed = static_cast<std::int64_t>(std::floor(static_cast<double>(n) * window));
  if (static_cast<std::int64_t>(walk.length()) < needed) {
    throw std::invalid_argument("rescale_walk: walk has too few steps");
  }
  const double nd = static_cast<double>(n);
  const double root = std::sqrt(nd);
  std::vector<Segment> segs{{-window, 0.0, 0.0}};
  for (std::int64_t k = 0;; ++k) {
    const double t = static_cast<double>(k) / nd;
    if (!(t < window)) break;
    segs.push_back({t, static_cast<double>(walk.position(static_cast<std::size_t>(k))) / root, 0.0});
  }
  return CadlagPath(-window, window, std::move(segs));
}

CadlagPath environment_path(const Environment& env, std::int64_t n, std::int64_t site_lo,
                            std::int64_t site_hi) {
  if (n < 1 || site_lo >= site_hi) throw std::invalid_argument("environment_path: bad arguments");
  const double root = std::sqrt(static_cast<double>(n));
  std::vector<double> us;
  std::vector<double> vs;
  for (std::int64_t r = site_lo; r <= site_hi; ++r) {
    us.push_back(static_cast<double>(r) / root);
    vs.push_back(env.omega(r) / root);
  }
  return CadlagPath::linear_interpolant(us, vs);
}

void write_trajectory_csv(std::ostream& out, const GasTrajectory& traj) {
  out << "k,S_k,X_k,T_k\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << fmt::format("{},{},{},{}\n", k, traj.walk.position(k), traj.positions[k], traj.times[k]);
  }
}

void write_track_csv(std::ostream& out, const GasTrajectory& traj, double t_end,
                     std::size_t points) {
  if (points < 2) throw std::invalid_argument("track needs at least two points");
  out << "t,X_t\n";
  for (std::size_t i = 0; i < points; ++i) {
    const double t = t_end * static_cast<double>(i) / static_cast<double>(points - 1);
    out << fmt::format("{},{}\n", t, interpolate(traj, t));
  }
}

}  // namespace llgas
