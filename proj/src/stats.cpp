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

#include "llgas/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace llgas {

namespace {

// Knuth's error-free transformation: a + b = s + e exactly.
inline void two_sum(double a, double b, double& s, double& e) noexcept {
  s = a + b;
  const double bb = s - a;
  e = (a - (s - bb)) + (b - bb);
}

}  // namespace

void CompensatedSum::add(double x) noexcept {
  double s;
  double e;
  two_sum(hi_, x, s, e);
  lo_ += e;
  two_sum(s, lo_, hi_, lo_);
}

void CompensatedSum::merge(const CompensatedSum& other) noexcept {
  double s;
  double e;
  two_sum(hi_, other.hi_, s, e);
  e += lo_ + other.lo_;
  two_sum(s, e, hi_, lo_);
}

void MomentAccumulator::update(double x) noexcept {
  ++count_;
  sum_.add(x);
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - mean_);
  min_ = std::min(min_, x);
  max_ = std::max(max_, x);
}

void MomentAccumulator::merge(const MomentAccumulator& other) noexcept {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const auto na = static_cast<double>(count_);
  const auto nb = static_cast<double>(other.count_);
  const double n = na + nb;
  const double delta = other.mean_ - mean_;
  m2_ += other.m2_ + delta * delta * na * nb / n;
  count_ += other.count_;
  sum_.merge(other.sum_);
  mean_ = sum_.value() / n;
  min_ = std::min(min_, other.min_);
  max_ = std::max(max_, other.max_);
}

MomentSummary MomentAccumulator::finalize() const {
  if (count_ == 0) throw std::logic_error("finalize on an empty accumulator");
  MomentSummary s;
  s.count = count_;
  const auto n = static_cast<double>(count_);
  s.mean = sum_.value() / n;
  s.variance = count_ > 1 ? std::max(m2_, 0.0) / (n - 1.0) : 0.0;
  s.stderr_mean = std::sqrt(s.variance / n);
  s.min = min_;
  s.max = max_;
  return s;
}

void PairAccumulator::update(double u, double v) noexcept {
  ++count_;
  sum_u_.add(u);
  sum_v_.add(v);
  const auto n = static_cast<double>(count_);
  const double du = u - mean_u_;
  mean_u_ += du / n;
  mean_v_ += (v - mean_v_) / n;
  co_m2_ += du * (v - mean_v_);
}

void PairAccumulator::merge(const PairAccumulator& other) noexcept {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const auto na = static_cast<double>(count_);
  const auto nb = static_cast<double>(other.count_);
  const double n = na + nb;
  co_m2_ += other.co_m2_ + (other.mean_u_ - mean_u_) * (other.mean_v_ - mean_v_) * na * nb / n;
  count_ += other.count_;
  sum_u_.merge(other.sum_u_);
  sum_v_.merge(other.sum_v_);
  mean_u_ = sum_u_.value() / n;
  mean_v_ = sum_v_.value() / n;
}

PairSummary PairAccumulator::finalize() const {
  if (count_ == 0) throw std::logic_error("finalize on an empty accumulator");
  const auto n = static_cast<double>(count_);
  return {count_, sum_u_.value() / n, sum_v_.value() / n, count_ > 1 ? co_m2_ / (n - 1.0) : 0.0};
}

double gaussian_cdf(double x, double sigma2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("gaussian_cdf requires sigma2 > 0");
  return 0.5 * std::erfc(-x / std::sqrt(2.0 * sigma2));
}

double ks_statistic(std::span<const double> samples, double sigma2) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic on an empty sample");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("ks_statistic requires sigma2 > 0");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const auto m = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = gaussian_cdf(x[i], sigma2);
    d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
  }
  return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample on an empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const auto n = static_cast<double>(x.size());
  const auto m = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return d;
}

double ks_two_sample_critical(std::size_t n, std::size_t m, double alpha) {
  const auto nd = static_cast<double>(n);
  const auto md = static_cast<double>(m);
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) * std::sqrt((nd + md) / (nd * md));
}

CovarianceEstimate covariance_of(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw std::invalid_argument("covariance_of: length mismatch");
  const std::size_t count = u.size();
  if (count < 3) throw std::invalid_argument("covariance_of needs at least 3 pairs");
  const auto n = static_cast<double>(count);
  CompensatedSum su;
  CompensatedSum sv;
  for (std::size_t i = 0; i < count; ++i) {
    su.add(u[i]);
    sv.add(v[i]);
  }
  const double mu = su.value() / n;
  const double mv = sv.value() / n;
  // Work with centered data; the residual sums of the centered values are
  // kept so the leave-one-out formula stays exact.
  CompensatedSum cu;
  CompensatedSum cv;
  CompensatedSum cuv;
  for (std::size_t i = 0; i < count; ++i) {
    const double a = u[i] - mu;
    const double b = v[i] - mv;
    cu.add(a);
    cv.add(b);
    cuv.add(a * b);
  }
  const double Su = cu.value();
  const double Sv = cv.value();
  const double Suv = cuv.value();
  CovarianceEstimate est;
  est.cov = (Suv - Su * Sv / n) / (n - 1.0);

  std::vector<double> loo(count);
  double loo_mean = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double a = u[i] - mu;
    const double b = v[i] - mv;
    loo[i] = (Suv - a * b - (Su - a) * (Sv - b) / (n - 1.0)) / (n - 2.0);
    loo_mean += loo[i];
  }
  loo_mean /= n;
  double ss = 0.0;
  for (double c : loo) ss += (c - loo_mean) * (c - loo_mean);
  est.stderr_cov = std::sqrt((n - 1.0) / n * ss);
  return est;
}

CovarianceEstimate covariance_at(std::span<const CadlagPath> paths, double s, double t) {
  if (paths.size() < 100) throw std::invalid_argument("covariance_at needs at least 100 paths");
  std::vector<double> u(paths.size());
  std::vector<double> v(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    u[i] = paths[i].evaluate(s);
    v[i] = paths[i].evaluate(t);
  }
  return covariance_of(u, v);
}

double cesaro_sum(const Environment& env, const Pmf& pmf, std::int64_t beta) {
  const std::int64_t first = pmf.min_position + beta;
  const std::int64_t last = pmf.max_position() + beta;
  if (first <= env.lo() || last > env.hi()) {
    throw std::out_of_range("cesaro_sum: pmf support escapes the environment window");
  }
  CompensatedSum acc;
  for (std::size_t i = 0; i < pmf.probs.size(); ++i) {
    if (pmf.probs[i] == 0.0) continue;
    acc.add(env.zeta(first + static_cast<std::int64_t>(i)) * pmf.probs[i]);
  }
  return acc.value();
}

}  // namespace llgas
