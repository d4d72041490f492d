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
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "llgas/cadlag.hpp"
#include "llgas/environment.hpp"
#include "llgas/walks.hpp"

namespace llgas {

/// Double-double running sum (Knuth two-sum); merging two sums is exact in
/// the high/low pair, so the rounded total is insensitive to merge order for
/// all practical inputs.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  void merge(const CompensatedSum& other) noexcept;
  double value() const noexcept { return hi_ + lo_; }

 private:
  double hi_ = 0.0;
  double lo_ = 0.0;
};

struct MomentSummary {
  std::int64_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // divisor count - 1; zero for a single sample
  double stderr_mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Streaming mean/variance (Welford update, Chan merge).
class MomentAccumulator {
 public:
  void update(double x) noexcept;
  void merge(const MomentAccumulator& other) noexcept;
  /// Throws std::logic_error when empty.
  MomentSummary finalize() const;

  std::int64_t count() const noexcept { return count_; }

 private:
  std::int64_t count_ = 0;
  CompensatedSum sum_;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double min_ = std::numeric_limits<double>::infinity();
  double max_ = -std::numeric_limits<double>::infinity();
};

struct PairSummary {
  std::int64_t count = 0;
  double mean_u = 0.0;
  double mean_v = 0.0;
  double covariance = 0.0;  // divisor count - 1
};

class PairAccumulator {
 public:
  void update(double u, double v) noexcept;
  void merge(const PairAccumulator& other) noexcept;
  PairSummary finalize() const;

  std::int64_t count() const noexcept { return count_; }

 private:
  std::int64_t count_ = 0;
  CompensatedSum sum_u_;
  CompensatedSum sum_v_;
  double mean_u_ = 0.0;
  double mean_v_ = 0.0;
  double co_m2_ = 0.0;
};

/// P(Z <= x) for Z ~ N(0, sigma2).
double gaussian_cdf(double x, double sigma2);

/// sup_x |F_m(x) - Phi(x / sqrt(sigma2))|; the input need not be sorted.
double ks_statistic(std::span<const double> samples, double sigma2);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(std::span<const double> a, std::span<const double> b);
/// Asymptotic critical value sqrt(-log(alpha / 2) / 2) * sqrt((n + m) / (n m)).
double ks_two_sample_critical(std::size_t n, std::size_t m, double alpha);

struct CovarianceEstimate {
  double cov = 0.0;
  double stderr_cov = 0.0;  // delete-one jackknife
};

/// Sample covariance with a delete-one jackknife standard error; n >= 3.
CovarianceEstimate covariance_of(std::span<const double> u, std::span<const double> v);

/// Covariance of (path(s), path(t)) across at least 100 paths.
CovarianceEstimate covariance_at(std::span<const CadlagPath> paths, double s, double t);

/// sum_k zeta_{k + beta} pmf(k) over the whole pmf table.
double cesaro_sum(const Environment& env, const Pmf& pmf, std::int64_t beta);

/// One pass/fail line of a report.
struct CheckResult {
  std::string stat;
  double estimate = 0.0;
  double stderr_est = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

}  // namespace llgas
