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
#include <string>
#include <vector>

namespace llgas {

/// Linear piece v + s (t - start) on [start, next start).
struct Segment {
  double start = 0.0;
  double value = 0.0;
  double slope = 0.0;
};

/// Right-continuous piecewise-linear path on a closed window [lo, hi].
///
/// Segment starts are strictly increasing and the first one equals lo.  A
/// jump may sit at any segment start after the first; the path takes the new
/// segment's value there.
class CadlagPath {
 public:
  CadlagPath(double lo, double hi, std::vector<Segment> segments);

  static CadlagPath constant(double lo, double hi, double c);
  /// before on [lo, at), after on [at, hi].
  static CadlagPath step(double lo, double hi, double at, double before, double after);
  /// Continuous interpolation through (ts[i], values[i]); ts[0] = lo, ts.back() = hi.
  static CadlagPath linear_interpolant(const std::vector<double>& ts,
                                       const std::vector<double>& values);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::vector<Segment>& segments() const { return segs_; }
  std::size_t size() const { return segs_.size(); }

  double evaluate(double t) const;
  double operator()(double t) const { return evaluate(t); }
  /// Left limit; at lo it equals the value.
  double left_limit(double t) const;

  /// Index of the segment containing t.
  std::size_t segment_index(double t) const;
  /// Left limit at the end of segment i.
  double end_value(std::size_t i) const;

  /// Segment starts other than lo.
  std::vector<double> breakpoints() const;

  bool is_continuous(double tol = 1e-12) const;
  bool is_nondecreasing(double tol = 1e-12) const;

  /// Drops breakpoints where the path is continuous with an unchanged slope.
  CadlagPath simplified() const;

 private:
  double lo_;
  double hi_;
  std::vector<Segment> segs_;
};

/// (x o y)(t) = x(y(t)) for continuous nondecreasing x; exact on the
/// piecewise-linear representation.
CadlagPath compose(const CadlagPath& x, const CadlagPath& y);

/// k_N x where k_N is 1 on [-N, N], 0 outside [-(N+1), N+1] and linear in
/// between.  Quadratic pieces on the ramps are replaced by chords with error
/// at most 1e-6, using at least 64 chords per ramp piece.
CadlagPath taper(const CadlagPath& path, int N);

/// Strictly increasing continuous piecewise-linear map with fixed endpoints.
class TimeChange {
 public:
  TimeChange(std::vector<double> knots, std::vector<double> images);

  static TimeChange identity(double lo, double hi);

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& images() const { return images_; }
  double lo() const { return knots_.front(); }
  double hi() const { return knots_.back(); }

  double operator()(double t) const;
  TimeChange inverse() const;
  std::vector<double> slopes() const;

 private:
  std::vector<double> knots_;
  std::vector<double> images_;
};

/// sup over t > s of |log((lambda(t) - lambda(s)) / (t - s))|, attained on a
/// single linear piece.
double timechange_norm(const TimeChange& lambda);

struct SkorokhodOptions {
  int restarts = 3;
  int max_sweeps = 30;
  std::uint64_t seed = 0x5eed;
  /// Caller-supplied feasible time changes; the result never exceeds their value.
  std::vector<TimeChange> seeds;
};

/// sup_t |(k_N x)(lambda(t)) - (k_N y)(t)| + ||lambda|| for lambda on
/// [-(N+1), N+1] extended by the identity.
double skorokhod_objective(const CadlagPath& x, const CadlagPath& y, int N,
                           const TimeChange& lambda);

/// Upper approximation of delta_N(x, y), symmetric by construction.
double skorokhod_delta(const CadlagPath& x, const CadlagPath& y, int N,
                       const SkorokhodOptions& options = {});

struct SkorokhodDistance {
  double value = 0.0;
  double truncation_error = 0.0;  // 2^-N_max
};

/// sum_{N=1}^{N_max} 2^-N min(delta_N, 1).
SkorokhodDistance skorokhod_distance(const CadlagPath& x, const CadlagPath& y, int N_max,
                                     const SkorokhodOptions& options = {});

/// CSV with header t,value_right,value_left_if_jump: one row per segment
/// start plus a closing row at hi.
void write_path_csv(std::ostream& out, const CadlagPath& path);
CadlagPath read_path_csv(std::istream& in);
CadlagPath read_path_csv(const std::string& filename);

}  // namespace llgas
