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

#include "llgas/cadlag.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "llgas/rng.hpp"

namespace llgas {

namespace {

// Points closer than this are treated as one event time when the J1
// objective is evaluated, so that a jump matched by a time change is not
// split by rounding into a spurious sliver.
constexpr double kEventTol = 1e-12;

bool close_relative(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

void push_segment(std::vector<Segment>& out, double start, double value, double slope) {
  out.push_back({start, value + 0.0, slope + 0.0});
}

}  // namespace

// ---------------------------------------------------------------------------
// CadlagPath

CadlagPath::CadlagPath(double lo, double hi, std::vector<Segment> segments)
    : lo_(lo), hi_(hi), segs_(std::move(segments)) {
  if (!(lo_ < hi_)) throw std::invalid_argument("path window must satisfy lo < hi");
  if (segs_.empty()) throw std::invalid_argument("path needs at least one segment");
  if (segs_.front().start != lo_) throw std::invalid_argument("first segment must start at lo");
  for (std::size_t i = 0; i < segs_.size(); ++i) {
    const auto& s = segs_[i];
    if (!std::isfinite(s.value) || !std::isfinite(s.slope)) {
      throw std::invalid_argument("path values must be finite");
    }
    if (i > 0 && !(s.start > segs_[i - 1].start)) {
      throw std::invalid_argument("segment starts must be strictly increasing");
    }
    if (s.start >= hi_ && i > 0) throw std::invalid_argument("segment starts beyond hi");
  }
}

CadlagPath CadlagPath::constant(double lo, double hi, double c) {
  return CadlagPath(lo, hi, {{lo, c, 0.0}});
}

CadlagPath CadlagPath::step(double lo, double hi, double at, double before, double after) {
  if (at <= lo) return constant(lo, hi, after);
  if (at >= hi) return CadlagPath(lo, hi, {{lo, before, 0.0}, {hi, after, 0.0}}).simplified();
  return CadlagPath(lo, hi, {{lo, before, 0.0}, {at, after, 0.0}});
}

CadlagPath CadlagPath::linear_interpolant(const std::vector<double>& ts,
                                          const std::vector<double>& values) {
  if (ts.size() < 2 || ts.size() != values.size()) {
    throw std::invalid_argument("interpolant needs matching knots and at least two of them");
  }
  std::vector<Segment> segs;
  segs.reserve(ts.size() - 1);
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    push_segment(segs, ts[i], values[i], (values[i + 1] - values[i]) / (ts[i + 1] - ts[i]));
  }
  return CadlagPath(ts.front(), ts.back(), std::move(segs));
}

std::size_t CadlagPath::segment_index(double t) const {
  const auto it = std::upper_bound(segs_.begin(), segs_.end(), t,
                                   [](double v, const Segment& s) { return v < s.start; });
  return it == segs_.begin() ? 0 : static_cast<std::size_t>(it - segs_.begin()) - 1;
}

double CadlagPath::evaluate(double t) const {
  if (!(t >= lo_ && t <= hi_)) throw std::out_of_range("time outside path window");
  const auto& s = segs_[segment_index(t)];
  return s.value + s.slope * (t - s.start);
}

double CadlagPath::left_limit(double t) const {
  if (!(t >= lo_ && t <= hi_)) throw std::out_of_range("time outside path window");
  const std::size_t i = segment_index(t);
  if (i > 0 && segs_[i].start == t) return end_value(i - 1);
  const auto& s = segs_[i];
  return s.value + s.slope * (t - s.start);
}

double CadlagPath::end_value(std::size_t i) const {
  const double end = i + 1 < segs_.size() ? segs_[i + 1].start : hi_;
  return segs_[i].value + segs_[i].slope * (end - segs_[i].start);
}

std::vector<double> CadlagPath::breakpoints() const {
  std::vector<double> out;
  out.reserve(segs_.size());
  for (std::size_t i = 1; i < segs_.size(); ++i) out.push_back(segs_[i].start);
  return out;
}

bool CadlagPath::is_continuous(double tol) const {
  for (std::size_t i = 1; i < segs_.size(); ++i) {
    if (!close_relative(end_value(i - 1), segs_[i].value, tol)) return false;
  }
  return true;
}

bool CadlagPath::is_nondecreasing(double tol) const {
  for (std::size_t i = 0; i < segs_.size(); ++i) {
    if (segs_[i].slope < -tol) return false;
    if (i > 0 && segs_[i].value < end_value(i - 1) - tol * std::max(1.0, std::abs(segs_[i].value))) {
      return false;
    }
  }
  return true;
}

CadlagPath CadlagPath::simplified() const {
  std::vector<Segment> out;
  out.reserve(segs_.size());
  out.push_back(segs_.front());
  for (std::size_t i = 1; i < segs_.size(); ++i) {
    const Segment& prev = out.back();
    const double reach = prev.value + prev.slope * (segs_[i].start - prev.start);
    if (close_relative(reach, segs_[i].value, 1e-14) &&
        close_relative(prev.slope, segs_[i].slope, 1e-14)) {
      continue;
    }
    out.push_back(segs_[i]);
  }
  return CadlagPath(lo_, hi_, std::move(out));
}

// ---------------------------------------------------------------------------

CadlagPath compose(const CadlagPath& x, const CadlagPath& y) {
  if (!x.is_continuous(1e-9)) throw std::invalid_argument("compose: outer path must be continuous");
  if (!x.is_nondecreasing(1e-12)) {
    throw std::invalid_argument("compose: outer path must be nondecreasing");
  }
  const auto& ys = y.segments();
  const double slack = 1e-12 * std::max(1.0, std::max(std::abs(x.lo()), std::abs(x.hi())));
  auto inside = [&](double v) { return v >= x.lo() - slack && v <= x.hi() + slack; };
  auto clamp = [&](double v) { return std::clamp(v, x.lo(), x.hi()); };
  auto x_linear = [&](std::size_t xi, double v) {
    const auto& s = x.segments()[xi];
    return s.value + s.slope * (v - s.start);
  };

  const std::vector<double> xbp = x.breakpoints();
  std::vector<Segment> out;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double a = ys[i].start;
    const double b = i + 1 < ys.size() ? ys[i + 1].start : y.hi();
    const double v0 = ys[i].value;
    const double m = ys[i].slope;
    const double v1 = y.end_value(i);
    if (!inside(v0) || !inside(v1)) {
      throw std::invalid_argument("compose: range of inner path escapes outer window");
    }
    if (m == 0.0) {
      push_segment(out, a, x.evaluate(clamp(v0)), 0.0);
      continue;
    }
    // Times where y crosses a breakpoint of x.
    std::vector<double> cuts{a};
    const double vmin = std::min(v0, v1);
    const double vmax = std::max(v0, v1);
    for (double bp : xbp) {
      if (bp > vmin && bp < vmax) {
        const double tc = a + (bp - v0) / m;
        if (tc > a && tc < b) cuts.push_back(tc);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(b);
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double ta = cuts[c];
      const double tb = cuts[c + 1];
      if (!(tb > ta)) continue;
      const double ym = clamp(v0 + m * (0.5 * (ta + tb) - a));
      const std::size_t xi = x.segment_index(ym);
      push_segment(out, ta, x_linear(xi, v0 + m * (ta - a)), x.segments()[xi].slope * m);
    }
  }
  return CadlagPath(y.lo(), y.hi(), std::move(out));
}

CadlagPath taper(const CadlagPath& path, int N) {
  if (N < 1) throw std::invalid_argument("taper requires N >= 1");
  const double n = N;
  const double m = n + 1.0;
  if (path.lo() > -m || path.hi() < m) {
    throw std::invalid_argument("path window must cover [-(N+1), N+1]");
  }
  std::vector<double> cuts{path.lo()};
  for (double bp : path.breakpoints()) cuts.push_back(bp);
  for (double c : {-m, -n, n, m}) {
    if (c > path.lo() && c < path.hi()) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto k_of = [&](double t) { return std::clamp(m - std::abs(t), 0.0, 1.0); };

  std::vector<Segment> out;
  for (std::size_t c = 0; c < cuts.size(); ++c) {
    const double a = cuts[c];
    const double b = c + 1 < cuts.size() ? cuts[c + 1] : path.hi();
    const double mid = 0.5 * (a + b);
    const auto& seg = path.segments()[path.segment_index(mid)];
    auto xv = [&](double t) { return seg.value + seg.slope * (t - seg.start); };
    double kd = 0.0;
    if (mid > n && mid < m) kd = -1.0;
    if (mid < -n && mid > -m) kd = 1.0;
    if (kd == 0.0) {
      const double k = std::abs(mid) <= n ? 1.0 : 0.0;
      push_segment(out, a, k * xv(a), k * seg.slope);
      continue;
    }
    if (seg.slope == 0.0) {
      push_segment(out, a, k_of(a) * seg.value, kd * seg.value);
      continue;
    }
    // Product of two linear functions: chords on a grid fine enough that
    // |f''| h^2 / 8 = |slope| h^2 / 4 stays below 1e-6.
    const auto pieces = static_cast<std::size_t>(
        std::max(64.0, std::ceil((b - a) * std::sqrt(std::abs(seg.slope) / 4e-6))));
    auto f = [&](double t) { return (m - std::abs(t)) * xv(t); };
    double t0 = a;
    double f0 = f(a);
    for (std::size_t j = 1; j <= pieces; ++j) {
      const double t1 = j == pieces ? b : a + (b - a) * static_cast<double>(j) / static_cast<double>(pieces);
      const double f1 = f(t1);
      push_segment(out, t0, f0, (f1 - f0) / (t1 - t0));
      t0 = t1;
      f0 = f1;
    }
  }
  return CadlagPath(path.lo(), path.hi(), std::move(out)).simplified();
}

// ---------------------------------------------------------------------------
// TimeChange

TimeChange::TimeChange(std::vector<double> knots, std::vector<double> images)
    : knots_(std::move(knots)), images_(std::move(images)) {
  if (knots_.size() < 2 || knots_.size() != images_.size()) {
    throw std::invalid_argument("time change needs matching knots and at least two of them");
  }
  if (knots_.front() != images_.front() || knots_.back() != images_.back()) {
    throw std::invalid_argument("time change must fix its endpoints");
  }
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i] > knots_[i - 1]) || !(images_[i] > images_[i - 1])) {
      throw std::invalid_argument("time change has a non-increasing segment");
    }
  }
}

TimeChange TimeChange::identity(double lo, double hi) { return TimeChange({lo, hi}, {lo, hi}); }

double TimeChange::operator()(double t) const {
  if (t <= knots_.front() || t >= knots_.back()) return t;
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  const auto j = static_cast<std::size_t>(it - knots_.begin()) - 1;
  if (t == knots_[j]) return images_[j];
  const double slope = (images_[j + 1] - images_[j]) / (knots_[j + 1] - knots_[j]);
  return images_[j] + slope * (t - knots_[j]);
}

TimeChange TimeChange::inverse() const { return TimeChange(images_, knots_); }

std::vector<double> TimeChange::slopes() const {
  std::vector<double> s(knots_.size() - 1);
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    s[i] = (images_[i + 1] - images_[i]) / (knots_[i + 1] - knots_[i]);
  }
  return s;
}

double timechange_norm(const TimeChange& lambda) {
  double worst = 0.0;
  for (double s : lambda.slopes()) {
    if (!(s > 0.0)) throw std::invalid_argument("time change has a non-increasing segment");
    worst = std::max(worst, std::abs(std::log(s)));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Skorokhod J1

namespace {

// Extends lambda by the identity so that its domain contains [lo, hi].
TimeChange widen(const TimeChange& lambda, double lo, double hi) {
  if (lambda.lo() <= lo && lambda.hi() >= hi) return lambda;
  std::vector<double> k;
  std::vector<double> v;
  if (lo < lambda.lo()) {
    k.push_back(lo);
    v.push_back(lo);
  }
  k.insert(k.end(), lambda.knots().begin(), lambda.knots().end());
  v.insert(v.end(), lambda.images().begin(), lambda.images().end());
  if (hi > lambda.hi()) {
    k.push_back(hi);
    v.push_back(hi);
  }
  return TimeChange(std::move(k), std::move(v));
}

double linear_at(const Segment& s, double t) { return s.value + s.slope * (t - s.start); }

// sup_t |X(lambda(t)) - Y(t)| for tapered X, Y, plus ||lambda||.  Both paths
// are piecewise linear in t between merged event times, so the sup is attained
// at event times from one side or the other.  Each open interval is assigned
// segments by its midpoint and both ends are evaluated with those formulas.
double objective_tapered(const CadlagPath& X, const CadlagPath& Y, double M,
                         const TimeChange& lambda_in) {
  const TimeChange lambda = widen(lambda_in, -M, M);
  const double A = lambda.lo();
  const double B = lambda.hi();
  if (X.lo() > A || X.hi() < B || Y.lo() > A || Y.hi() < B) {
    throw std::invalid_argument("path windows do not cover the time-change domain");
  }
  const auto& kn = lambda.knots();
  const auto& im = lambda.images();

  std::vector<double> pts(kn.begin(), kn.end());
  for (double b : Y.breakpoints()) {
    if (b > A && b < B) pts.push_back(b);
  }
  for (double b : X.breakpoints()) {
    if (b > A && b < B) {
      // lambda^{-1}(b), exact when b is a knot image.
      const auto it = std::upper_bound(im.begin(), im.end(), b);
      const auto j = static_cast<std::size_t>(it - im.begin()) - 1;
      pts.push_back(b == im[j] ? kn[j]
                               : kn[j] + (b - im[j]) * (kn[j + 1] - kn[j]) / (im[j + 1] - im[j]));
    }
  }
  std::sort(pts.begin(), pts.end());
  std::vector<double> ev;
  ev.reserve(pts.size());
  for (double p : pts) {
    if (ev.empty() || !close_relative(p, ev.back(), kEventTol)) ev.push_back(p);
  }
  if (ev.back() != B) {
    if (close_relative(ev.back(), B, kEventTol)) ev.back() = B;
    else ev.push_back(B);
  }

  double sup = 0.0;
  std::size_t j = 0;
  for (std::size_t i = 0; i + 1 < ev.size(); ++i) {
    const double u = ev[i];
    const double w = ev[i + 1];
    const double mid = 0.5 * (u + w);
    while (j + 2 < kn.size() && kn[j + 1] <= mid) ++j;
    const double slope = (im[j + 1] - im[j]) / (kn[j + 1] - kn[j]);
    auto L = [&](double t) { return im[j] + slope * (t - kn[j]); };
    const Segment& xs = X.segments()[X.segment_index(L(mid))];
    const Segment& ysg = Y.segments()[Y.segment_index(mid)];
    const double fu = linear_at(xs, L(u)) - linear_at(ysg, u);
    const double fw = linear_at(xs, L(w)) - linear_at(ysg, w);
    sup = std::max({sup, std::abs(fu), std::abs(fw)});
  }
  return sup + timechange_norm(lambda);
}

// Coordinate descent over knot images.  A time change is described by a set
// of anchored knots; between anchors it is linear, which is the slope-optimal
// completion.  Each move anchors one knot at a golden-section minimizer, at a
// breakpoint of X (jump matching), at itself, or releases it.
class Solver {
 public:
  Solver(const CadlagPath& X, const CadlagPath& Y, double M, std::vector<double> knots,
         std::vector<double> snaps)
      : X_(X), Y_(Y), M_(M), knots_(std::move(knots)), snaps_(std::move(snaps)) {}

  double evaluate(const std::vector<std::optional<double>>& anchors) const {
    return objective_tapered(X_, Y_, M_, build(anchors));
  }

  double descend(std::vector<std::optional<double>>& anchors, int max_sweeps) const {
    double best = evaluate(anchors);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      bool improved = false;
      for (std::size_t j = 0; j < knots_.size(); ++j) {
        const auto saved = anchors[j];
        anchors[j].reset();
        double lo = -M_;
        double hi = M_;
        for (std::size_t i = j; i-- > 0;) {
          if (anchors[i]) {
            lo = *anchors[i];
            break;
          }
        }
        for (std::size_t i = j + 1; i < knots_.size(); ++i) {
          if (anchors[i]) {
            hi = *anchors[i];
            break;
          }
        }
        std::optional<double> choice = saved;
        double choice_val = best;
        auto consider = [&](std::optional<double> v) {
          if (v && !(*v > lo && *v < hi)) return;
          anchors[j] = v;
          const double val = evaluate(anchors);
          if (val < choice_val - 1e-15) {
            choice_val = val;
            choice = v;
          }
        };
        consider(std::nullopt);
        consider(knots_[j]);
        for (double s : snaps_) consider(s);
        const double margin = 1e-9 * (hi - lo);
        consider(golden(anchors, j, lo + margin, hi - margin));
        anchors[j] = choice;
        if (choice_val < best - 1e-15) {
          best = choice_val;
          improved = true;
        }
      }
      if (!improved) break;
    }
    return best;
  }

  std::size_t size() const { return knots_.size(); }
  const std::vector<double>& knots() const { return knots_; }

 private:
  TimeChange build(const std::vector<std::optional<double>>& anchors) const {
    std::vector<double> k{-M_};
    std::vector<double> v{-M_};
    for (std::size_t i = 0; i < knots_.size(); ++i) {
      if (anchors[i]) {
        k.push_back(knots_[i]);
        v.push_back(*anchors[i]);
      }
    }
    k.push_back(M_);
    v.push_back(M_);
    return TimeChange(std::move(k), std::move(v));
  }

  double golden(std::vector<std::optional<double>>& anchors, std::size_t j, double a,
                double b) const {
    if (!(b > a)) return 0.5 * (a + b);
    constexpr double kInvPhi = 0.6180339887498949;
    auto f = [&](double v) {
      anchors[j] = v;
      return evaluate(anchors);
    };
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = f(c);
    double fd = f(d);
    const double tol = 1e-9 * std::max(1.0, M_);
    while (b - a > tol) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - kInvPhi * (b - a);
        fc = f(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + kInvPhi * (b - a);
        fd = f(d);
      }
    }
    return fc <= fd ? c : d;
  }

  const CadlagPath& X_;
  const CadlagPath& Y_;
  double M_;
  std::vector<double> knots_;
  std::vector<double> snaps_;
};

constexpr std::size_t kMaxKnots = 128;

std::vector<double> interior_points(const CadlagPath& p, double M) {
  std::vector<double> out;
  for (double b : p.breakpoints()) {
    if (b > -M && b < M) out.push_back(b);
  }
  return out;
}

double one_direction(const CadlagPath& x, const CadlagPath& y, int N,
                     const SkorokhodOptions& options, bool invert_seeds) {
  const double M = N + 1.0;
  const CadlagPath X = taper(x, N);
  const CadlagPath Y = taper(y, N);

  std::vector<double> knots = interior_points(x, M);
  for (double b : interior_points(y, M)) knots.push_back(b);
  for (double c : {-static_cast<double>(N), static_cast<double>(N)}) knots.push_back(c);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  if (knots.size() > kMaxKnots) {
    std::vector<double> thin;
    for (std::size_t i = 0; i < kMaxKnots; ++i) thin.push_back(knots[i * knots.size() / kMaxKnots]);
    knots = std::move(thin);
  }
  std::vector<double> snaps = interior_points(x, M);
  if (snaps.size() > kMaxKnots) snaps.resize(kMaxKnots);

  const Solver solver(X, Y, M, knots, snaps);
  std::vector<std::optional<double>> anchors(solver.size());
  double best = solver.descend(anchors, options.max_sweeps);

  Philox rng(stream_key(options.seed, StreamTag::solver), static_cast<std::uint64_t>(N));
  for (int r = 0; r < options.restarts; ++r) {
    std::vector<std::optional<double>> start(solver.size());
    std::vector<double> images;
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < solver.size(); ++i) {
      if (rng.bernoulli(0.5)) {
        chosen.push_back(i);
        images.push_back(-M + 2.0 * M * rng.uniform());
      }
    }
    std::sort(images.begin(), images.end());
    bool strict = true;
    for (std::size_t i = 0; i < images.size(); ++i) {
      if (images[i] <= -M || (i > 0 && !(images[i] > images[i - 1]))) strict = false;
    }
    if (!strict) continue;
    for (std::size_t i = 0; i < chosen.size(); ++i) start[chosen[i]] = images[i];
    best = std::min(best, solver.descend(start, options.max_sweeps));
  }

  for (const TimeChange& seed : options.seeds) {
    const TimeChange lam = invert_seeds ? seed.inverse() : seed;
    best = std::min(best, objective_tapered(X, Y, M, lam));
    // Restart from the seed sampled at the solver knots.
    std::vector<std::optional<double>> start(solver.size());
    for (std::size_t i = 0; i < solver.size(); ++i) start[i] = lam(solver.knots()[i]);
    bool feasible = true;
    double prev = -M;
    for (const auto& a : start) {
      if (!(*a > prev)) feasible = false;
      prev = *a;
    }
    if (feasible && prev < M) best = std::min(best, solver.descend(start, options.max_sweeps));
  }
  return best;
}

void check_window(const CadlagPath& p, int N) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  const double m = N + 1.0;
  if (p.lo() > -m || p.hi() < m) throw std::invalid_argument("path window must cover [-(N+1), N+1]");
}

}  // namespace

double skorokhod_objective(const CadlagPath& x, const CadlagPath& y, int N,
                           const TimeChange& lambda) {
  check_window(x, N);
  check_window(y, N);
  return objective_tapered(taper(x, N), taper(y, N), N + 1.0, lambda);
}

double skorokhod_delta(const CadlagPath& x, const CadlagPath& y, int N,
                       const SkorokhodOptions& options) {
  check_window(x, N);
  check_window(y, N);
  return std::min(one_direction(x, y, N, options, false), one_direction(y, x, N, options, true));
}

SkorokhodDistance skorokhod_distance(const CadlagPath& x, const CadlagPath& y, int N_max,
                                     const SkorokhodOptions& options) {
  if (N_max < 1) throw std::invalid_argument("N_max must be >= 1");
  check_window(x, N_max);
  check_window(y, N_max);
  SkorokhodDistance d;
  double weight = 1.0;
  for (int N = 1; N <= N_max; ++N) {
    weight *= 0.5;
    d.value += weight * std::min(skorokhod_delta(x, y, N, options), 1.0);
  }
  d.truncation_error = weight;
  return d;
}

// ---------------------------------------------------------------------------
// CSV

void write_path_csv(std::ostream& out, const CadlagPath& path) {
  out << "t,value_right,value_left_if_jump\n";
  const auto& segs = path.segments();
  for (std::size_t i = 0; i < segs.size(); ++i) {
    out << fmt::format("{},{},", segs[i].start, segs[i].value);
    if (i > 0) {
      const double left = path.end_value(i - 1);
      if (left != segs[i].value) out << fmt::format("{}", left);
    }
    out << '\n';
  }
  out << fmt::format("{},{},\n", path.hi(), path.end_value(segs.size() - 1));
}

CadlagPath read_path_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("path CSV is empty");
  struct Row {
    double t;
    double right;
    std::optional<double> left;
  };
  std::vector<Row> rows;
  auto parse = [](const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::runtime_error("malformed number in path CSV: " + s);
    return v;
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (cells.size() < 2 || cells.size() > 3) throw std::runtime_error("path CSV row needs 2 or 3 cells");
    Row r{parse(cells[0]), parse(cells[1]), std::nullopt};
    if (cells.size() == 3 && !cells[2].empty()) r.left = parse(cells[2]);
    rows.push_back(r);
  }
  if (rows.size() < 2) throw std::runtime_error("path CSV needs at least two rows");
  std::vector<Segment> segs;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const double end_left = rows[i + 1].left.value_or(rows[i + 1].right);
    segs.push_back({rows[i].t, rows[i].right, (end_left - rows[i].right) / (rows[i + 1].t - rows[i].t)});
  }
  return CadlagPath(rows.front().t, rows.back().t, std::move(segs));
}

CadlagPath read_path_csv(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw std::runtime_error("cannot open " + filename);
  return read_path_csv(in);
}

}  // namespace llgas
