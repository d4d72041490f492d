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

#include "llgas/bundles.hpp"

#include <stdexcept>

namespace llgas {

namespace {

Json check(const std::string& name, double tolerance, Json params = Json::object()) {
  return Json{{"name", name}, {"tolerance", tolerance}, {"params", std::move(params)}};
}

// Null members delete keys inherited from the base config.
const Json kCorrelated = {{"kind", "markov"},
                          {"alphabet", {1.0, 2.0}},
                          {"probs", nullptr},
                          {"transition", {{0.9, 0.1}, {0.1, 0.9}}}};

Json reinforced(double p) {
  return {{"kind", "reinforced"}, {"p", p}, {"support", nullptr}, {"probs", nullptr}};
}

const Json kReinforced = reinforced(0.6);

std::vector<BundleEntry> clt_discrete() {
  const Json checks = {check("gas_variance", 0.05), check("gas_ks", 0.015)};
  return {
      {"iid", {{"mode", "discrete"}, {"horizon", 10000}, {"replicas", 20000}, {"checks", checks}}},
      {"markov",
       {{"environment", kCorrelated}, {"mode", "discrete"}, {"horizon", 10000}, {"replicas", 20000},
        {"checks", checks}}},
  };
}

std::vector<BundleEntry> clt_continuous() {
  return {{"iid",
           {{"mode", "continuous"},
            {"horizon", 10000},
            {"replicas", 20000},
            {"checks", {check("gas_variance", 0.05), check("gas_ks", 0.015)}}}}};
}

std::vector<BundleEntry> clt_reinforced() {
  return {
      {"p=0.6",
       {{"walk", kReinforced},
        {"mode", "discrete"},
        {"horizon", 10000},
        {"replicas", 20000},
        {"checks",
         {check("variance_recursion", 0.01, {{"n", 1000000}}), check("walk_variance", 0.05),
          check("gas_variance", 0.07), check("martingale_bound", 0.0), check("martingale_ks", 0.02),
          check("martingale_nu", 0.005, {{"n", 1000000}})}}}},
      {"p=0.5",
       {{"walk", reinforced(0.5)},
        {"horizon", 10},
        {"replicas", 1},
        {"checks", {check("reinforced_reduction", 1e-12, {{"n_max", 10}})}}}},
  };
}

std::vector<BundleEntry> fclt() {
  const Json checks = {check("path_covariance", 0.1, {{"times", {{0.5, 1.0}, {1.0, 2.0}}}})};
  return {
      {"standard",
       {{"mode", "discrete"}, {"horizon", 10000}, {"replicas", 20000}, {"window", 2.0}, {"checks", checks}}},
      {"reinforced",
       {{"walk", kReinforced},
        {"mode", "discrete"},
        {"horizon", 10000},
        {"replicas", 20000},
        {"window", 2.0},
        {"checks", checks}}},
  };
}

std::vector<BundleEntry> lln() {
  return {
      {"standard",
       {{"mode", "discrete"},
        {"horizon", 100000},
        {"replicas", 1},
        {"checks",
         {check("collision_lln", 0.03), check("counting_lln", 0.03, {{"t", 100000}}),
          check("ell_lln", 0.01, {{"n", 1000000}})}}}},
  };
}

std::vector<BundleEntry> cesaro() {
  return {{"markov",
           {{"environment", kCorrelated},
            {"horizon", 10000},
            {"replicas", 1},
            {"checks", {check("cesaro", 0.02, {{"n", 10000}, {"betas", {-50, 0, 50}}})}}}}};
}

std::vector<BundleEntry> regeneration() {
  return {{"markov",
           {{"environment", kCorrelated},
            {"horizon", 100000},
            {"replicas", 1},
            {"checks",
             {check("tau_moments", 4.0,
                    {{"L", {2, 3, 4, 5}}, {"p", {1.0, 2.0}}, {"replicas", 10000}, {"floor", 0.1}}),
              check("eta_identity", 0.0, {{"window", 100000}})}}}}};
}

std::vector<BundleEntry> skorokhod_axioms() {
  return {{"random-steps",
           {{"horizon", 1},
            {"replicas", 1},
            {"checks",
             {check("skorokhod_axioms", 1e-3,
                    {{"triples", 200}, {"n_max", 3}, {"max_jumps", 3}, {"exact_tol", 1e-9},
                     {"constant_tol", 1e-6}})}}}}};
}

std::vector<BundleEntry> mixing() {
  return {{"markov",
           {{"environment", kCorrelated},
            {"horizon", 1},
            {"replicas", 1},
            {"checks", {check("mixing", 0.0, {{"window", 4}, {"separation", 6}})}}}}};
}

using Factory = std::vector<BundleEntry> (*)();

const std::vector<std::pair<std::string, Factory>>& factories() {
  static const std::vector<std::pair<std::string, Factory>> f = {
      {"clt-discrete", clt_discrete},     {"clt-continuous", clt_continuous},
      {"clt-reinforced", clt_reinforced}, {"fclt", fclt},
      {"lln", lln},                       {"cesaro", cesaro},
      {"regeneration", regeneration},     {"skorokhod-axioms", skorokhod_axioms},
      {"mixing", mixing},
  };
  return f;
}

}  // namespace

Json default_config() {
  return Json{{"environment", {{"kind", "iid"}, {"alphabet", {1.0, 2.0}}, {"probs", {0.5, 0.5}}}},
              {"walk", {{"kind", "markov"}, {"support", {-1, 1}}, {"probs", {0.5, 0.5}}}},
              {"mode", "discrete"},
              {"horizon", 10000},
              {"replicas", 1000},
              {"seed", 20261016},
              {"fixed_environment", true},
              {"window", 4.0},
              {"failure_budget", 0.001},
              {"exploratory", false},
              {"checks", Json::array()}};
}

std::vector<std::string> bundle_names() {
  std::vector<std::string> names;
  for (const auto& [name, make] : factories()) names.push_back(name);
  names.emplace_back("all");
  return names;
}

std::vector<BundleEntry> bundle(const std::string& name) {
  if (name == "all") {
    std::vector<BundleEntry> all;
    for (const auto& [bundle_name, make] : factories()) {
      for (auto& e : make()) all.push_back({bundle_name + "/" + e.name, std::move(e.patch)});
    }
    return all;
  }
  for (const auto& [bundle_name, make] : factories()) {
    if (bundle_name == name) return make();
  }
  throw std::invalid_argument("unknown bundle '" + name + "'");
}

ExperimentConfig resolve_config(const Json& base, const Json& patch, const Overrides& overrides) {
  Json merged = base;
  merged.merge_patch(patch);
  if (overrides.seed) merged["seed"] = *overrides.seed;
  if (overrides.replicas) merged["replicas"] = *overrides.replicas;
  if (overrides.horizon) merged["horizon"] = *overrides.horizon;
  return config_from_json(merged);
}

std::vector<BundleRun> run_bundle(const std::string& name, const Json& base, const Overrides& overrides) {
  std::vector<BundleRun> runs;
  for (const auto& entry : bundle(name)) {
    runs.push_back({entry.name, run_experiment(resolve_config(base, entry.patch, overrides))});
  }
  return runs;
}

}  // namespace llgas
