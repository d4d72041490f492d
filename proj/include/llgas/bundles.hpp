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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "llgas/engine.hpp"

namespace llgas {

/// The standard setup: iid interdistances {1, 2} with equal weights, a
/// symmetric nearest-neighbour walk, one pinned environment.
Json default_config();

/// One experiment of a bundle, stored as a JSON merge patch.
struct BundleEntry {
  std::string name;
  Json patch;
};

/// Names accepted by `verify`.
std::vector<std::string> bundle_names();

/// Throws std::invalid_argument for an unknown name.
std::vector<BundleEntry> bundle(const std::string& name);

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> replicas;
  std::optional<double> horizon;
};

/// base <- patch (RFC 7386) <- overrides, then parsed.
ExperimentConfig resolve_config(const Json& base, const Json& patch, const Overrides& overrides);

struct BundleRun {
  std::string name;
  ExperimentReport report;
};

std::vector<BundleRun> run_bundle(const std::string& name, const Json& base, const Overrides& overrides);

}  // namespace llgas
