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

#include "llgas/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "llgas/stats.hpp"

namespace llgas {

namespace {

// Two fair bits: 00 -> -1, 01 and 10 -> 0, 11 -> +1.
inline std::int8_t from_bits(std::uint64_t b) {
  return static_cast<std::int8_t>(static_cast<int>(b & 1U) + static_cast<int>((b >> 1) & 1U) - 1);
}

// Draws epsilon values two bits at a time from one 64-bit word.
class EpsilonStream {
 public:
  explicit EpsilonStream(Philox& rng) : rng_(rng) {}
  int next() {
    if (left_ == 0) {
      word_ = rng_();
      left_ = 32;
    }
    const int e = from_bits(word_);
    word_ >>= 2;
    --left_;
    return e;
  }

 private:
  Philox& rng_;
  std::uint64_t word_ = 0;
  int left_ = 0;
};

}  // namespace

EpsilonField::EpsilonField(std::vector<std::int8_t> values) : values_(std::move(values)) {
  for (auto v : values_) {
    if (v < -1 || v > 1) throw std::invalid_argument("epsilon values must lie in {-1, 0, 1}");
  }
}

EpsilonField sample_epsilon(std::size_t horizon, Philox& rng) {
  if (horizon < 1) throw std::invalid_argument("sample_epsilon needs horizon >= 1");
  std::vector<std::int8_t> v(horizon);
  EpsilonStream stream(rng);
  for (auto& e : v) e = static_cast<std::int8_t>(stream.next());
  return EpsilonField(std::move(v));
}

TauTimes tau_times(const EpsilonField& eps, int L) {
  if (L < 1) throw std::invalid_argument("tau_times needs L >= 1");
  TauTimes out;
  out.L = L;
  std::int64_t run = 0;  // consecutive +1 entries ending at j - 1
  std::int64_t prev = 0;
  const auto h = static_cast<std::int64_t>(eps.horizon());
  for (std::int64_t j = 1; j <= h; ++j) {
    const int e = eps[static_cast<std::size_t>(j)];
    if (e != 1 && run >= L && j >= prev + L) {
      out.times.push_back(j);
      prev = j;
    }
    run = e == 1 ? run + 1 : 0;
  }
  return out;
}

std::optional<std::int64_t> first_tau(int L, Philox& rng, std::int64_t horizon) {
  if (L < 1) throw std::invalid_argument("first_tau needs L >= 1");
  EpsilonStream stream(rng);
  std::int64_t run = 0;
  for (std::int64_t j = 1; j <= horizon; ++j) {
    const int e = stream.next();
    if (e != 1 && run >= L) return j;
    run = e == 1 ? run + 1 : 0;
  }
  return std::nullopt;
}

TauMomentReport tau_moment_report(const std::vector<int>& L_list, const std::vector<double>& p_list,
                                  std::int64_t replicas, std::uint64_t seed) {
  if (replicas < 1000) throw std::invalid_argument("tau_moment_report needs at least 1000 replicas");
  if (L_list.empty() || p_list.empty()) throw std::invalid_argument("empty L or p list");
  for (int L : L_list) {
    if (L < 1 || L > 7) throw std::invalid_argument("tau_moment_report supports 1 <= L <= 7");
  }
  for (double p : p_list) {
    if (!(p >= 1.0)) throw std::invalid_argument("moment order p must be >= 1");
  }

  TauMomentReport report;
  report.p_values = p_list;
  for (int L : L_list) {
    const double scale = std::ldexp(1.0, -2 * L);
    const auto horizon = static_cast<std::int64_t>(50) << (2 * L);
    std::vector<double> x;
    x.reserve(static_cast<std::size_t>(replicas));
    std::int64_t misses = 0;
    for (std::int64_t r = 0; r < replicas; ++r) {
      // Stream ids are disjoint across L.
      Philox rng = rng_for_replica(seed, (static_cast<std::uint64_t>(L) << 40) + static_cast<std::uint64_t>(r),
                                   StreamTag::epsilon);
      const auto tau = first_tau(L, rng, horizon);
      if (tau) x.push_back(scale * static_cast<double>(*tau));
      else ++misses;
    }
    if (misses * 100 > replicas) {
      throw std::runtime_error(fmt::format("tau search horizon exhausted in {} of {} replicas (L = {})",
                                           misses, replicas, L));
    }
    for (double p : p_list) {
      MomentAccumulator acc;
      for (double v : x) acc.update(std::pow(v, p));
      const MomentSummary s = acc.finalize();
      TauMomentRow row;
      row.L = L;
      row.p = p;
      row.estimate = std::pow(s.mean, 1.0 / p);
      // Delta method for m^(1/p).
      row.stderr_est = std::pow(s.mean, 1.0 / p - 1.0) / p * s.stderr_mean;
      row.replicas = s.count;
      row.misses = misses;
      report.rows.push_back(row);
    }
  }
  for (double p : p_list) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& row : report.rows) {
      if (row.p != p) continue;
      lo = std::min(lo, row.estimate);
      hi = std::max(hi, row.estimate);
    }
    report.band_ok.push_back(hi <= 4.0 * lo);
  }
  return report;
}

void write_tau_csv(std::ostream& out, const TauMomentReport& report) {
  out << "L,p,estimate,stderr,replicas\n";
  for (const auto& r : report.rows) {
    out << fmt::format("{},{},{},{},{}\n", r.L, r.p, r.estimate, r.stderr_est, r.replicas);
  }
}

double eta_value(double zeta, int eps, double mean_zeta) {
  return eps == 0 ? 2.0 * (zeta - mean_zeta) : 2.0 * mean_zeta;
}

AuxField eta_field(const Environment& env, const EpsilonField& eps, double mean_zeta) {
  const auto h = static_cast<std::int64_t>(eps.horizon());
  if (env.hi() < h) throw std::out_of_range("eta_field: environment shorter than epsilon horizon");
  AuxField f;
  f.mean_zeta = mean_zeta;
  f.eta.resize(eps.horizon());
  for (std::int64_t r = 1; r <= h; ++r) {
    f.eta[static_cast<std::size_t>(r - 1)] =
        eta_value(env.zeta(r), eps[static_cast<std::size_t>(r)], mean_zeta);
  }
  return f;
}

double epsilon_average(const Environment& env, std::int64_t r, double mean_zeta) {
  const double z = env.zeta(r);
  return 0.25 * eta_value(z, 1, mean_zeta) + 0.25 * eta_value(z, -1, mean_zeta) +
         0.5 * eta_value(z, 0, mean_zeta);
}

}  // namespace llgas
