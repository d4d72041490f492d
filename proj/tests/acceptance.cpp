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

// Runs every check bundle at its configured tolerance and prints one
// PASS/FAIL line per acceptance criterion.  Optional arguments restrict the
// run to the listed criterion numbers.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "llgas/bundles.hpp"

namespace {

using llgas::CheckResult;

struct Criterion {
  int id;
  std::string title;
  std::string run;  // bundle/entry
  std::function<bool(const std::string&)> select;
};

auto all_checks() {
  return [](const std::string&) { return true; };
}

auto prefixed(std::initializer_list<const char*> prefixes) {
  std::vector<std::string> keep(prefixes.begin(), prefixes.end());
  return [keep](const std::string& stat) {
    for (const auto& p : keep) {
      if (stat.rfind(p, 0) == 0) return true;
    }
    return false;
  };
}

class RunCache {
 public:
  // Throws on a failed run; the caller reports it as a failure.
  const llgas::ExperimentReport& get(const std::string& key) {
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const auto slash = key.find('/');
    const std::string bundle = key.substr(0, slash);
    const std::string entry = key.substr(slash + 1);
    for (const auto& e : llgas::bundle(bundle)) {
      if (e.name != entry) continue;
      const auto start = std::chrono::steady_clock::now();
      auto report = llgas::run_experiment(llgas::resolve_config(llgas::default_config(), e.patch, {}));
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::printf("  [%s ran in %.1f s]\n", key.c_str(), secs);
      return cache_.emplace(key, std::move(report)).first->second;
    }
    throw std::invalid_argument("no bundle entry " + key);
  }

 private:
  std::map<std::string, llgas::ExperimentReport> cache_;
};

void print_result(const char* kind, const CheckResult& c) {
  std::printf("    %-10s %-40s estimate=%.6g stderr=%.3g target=%.6g tol=%.3g %s\n", kind, c.stat.c_str(),
              c.estimate, c.stderr_est, c.target, c.tolerance, c.pass ? "ok" : "FAILED");
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  const std::vector<Criterion> criteria = {
      {1, "discrete CLT, iid environment", "clt-discrete/iid", all_checks()},
      {2, "continuous CLT, iid environment", "clt-continuous/iid", all_checks()},
      {3, "discrete CLT, correlated environment", "clt-discrete/markov", all_checks()},
      {4, "collision and counting LLN", "lln/standard", prefixed({"collision_lln", "counting_lln"})},
      {5, "Cesaro limit", "cesaro/markov", all_checks()},
      {6, "reinforced walk and gas variance", "clt-reinforced/p=0.6",
       prefixed({"variance_recursion", "walk_variance", "gas_variance"})},
      {7, "reinforced walk at p = 1/2 is the simple walk", "clt-reinforced/p=0.5", all_checks()},
      {8, "martingale diagnostics", "clt-reinforced/p=0.6",
       prefixed({"martingale_bound", "martingale_ks", "martingale_nu"})},
      {9, "functional CLT covariance, standard walk", "fclt/standard", all_checks()},
      {9, "functional CLT covariance, reinforced walk", "fclt/reinforced", all_checks()},
      {10, "regeneration time bounds", "regeneration/markov", prefixed({"tau_"})},
      {11, "auxiliary field identity", "regeneration/markov", prefixed({"eta_"})},
      {12, "Skorokhod metric axioms", "skorokhod-axioms/random-steps", all_checks()},
      {13, "environment mixing", "mixing/markov", all_checks()},
  };

  RunCache cache;
  std::map<int, bool> verdict;
  std::map<int, std::string> titles;
  std::vector<int> order;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    if (!verdict.count(c.id)) {
      verdict[c.id] = true;
      order.push_back(c.id);
      titles[c.id] = c.title;
    } else {
      titles[c.id] = c.title.substr(0, c.title.find(',')) + " (both walks)";
    }
    std::printf("criterion %d: %s\n", c.id, c.title.c_str());
    try {
      const auto& report = cache.get(c.run);
      int used = 0;
      for (const auto& r : report.checks) {
        if (!c.select(r.stat)) continue;
        ++used;
        print_result("check", r);
        verdict[c.id] = verdict[c.id] && r.pass;
      }
      for (const auto& r : report.diagnostics) {
        if (c.select(r.stat)) print_result("diagnostic", r);
      }
      if (used == 0) verdict[c.id] = false;
    } catch (const std::exception& e) {
      std::printf("    error: %s\n", e.what());
      verdict[c.id] = false;
    }
  }

  std::printf("\n");
  int failed = 0;
  for (int id : order) {
    std::printf("%s criterion %2d: %s\n", verdict[id] ? "PASS" : "FAIL", id, titles[id].c_str());
    failed += verdict[id] ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(order.size()) - failed, order.size());
  return failed == 0 ? 0 : 1;
}
