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

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "llgas/environment.hpp"
#include "llgas/stats.hpp"
#include "llgas/walks.hpp"

namespace llgas {

using Json = nlohmann::json;

enum class Mode { discrete, continuous };

struct WalkSpec {
  bool reinforced = false;
  JumpLaw law;    // markov walks
  double p = 0.5; // reinforced walks
};

struct CheckSpec {
  std::string name;
  double tolerance = 0.0;
  Json params = Json::object();
};

struct ExperimentConfig {
  DistanceLaw environment;
  WalkSpec walk;
  Mode mode = Mode::discrete;
  double horizon = 1.0;  // n (discrete) or t (continuous)
  std::int64_t replicas = 1;
  std::uint64_t seed = 0;
  bool fixed_environment = true;
  double window = 4.0;
  double failure_budget = 1e-3;
  bool exploratory = false;
  std::vector<CheckSpec> checks;
  std::string output;
};

/// Names accepted in the "checks" list.
const std::vector<std::string>& registered_checks();

/// Throws std::invalid_argument on malformed or out-of-range fields.
ExperimentConfig config_from_json(const Json& j);
/// Canonical echo of a parsed config.
Json config_to_json(const ExperimentConfig& config);

DistanceLaw distance_law_from_json(const Json& j);
Json distance_law_to_json(const DistanceLaw& law);
WalkSpec walk_from_json(const Json& j);
Json walk_to_json(const WalkSpec& walk);

struct ExperimentReport {
  Json config;
  std::vector<CheckResult> checks;
  /// Reference values that are reported but never gate the run.
  std::vector<CheckResult> diagnostics;
  std::int64_t replicas = 0;
  std::int64_t exhausted = 0;
  bool pass = false;
};

Json check_to_json(const CheckResult& c);
CheckResult check_from_json(const Json& j);
Json report_to_json(const ExperimentReport& report);

/// Runs every replica and every named check.  The report depends only on
/// the config, never on the worker count.  Throws std::runtime_error when
/// horizon exhaustion exceeds the failure budget.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Worker count: LLGAS_THREADS if set and positive, otherwise the hardware
/// concurrency.
unsigned worker_count();

/// Calls fn(i) for i in [0, count) on up to worker_count() threads.  fn must
/// only write to per-index storage.  The first exception is rethrown.
template <class Fn>
void parallel_for(std::int64_t count, Fn&& fn) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::int64_t>(worker_count(), std::max<std::int64_t>(count, 1)));
  if (workers <= 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace llgas
