// Copyright 2026 The graphmfg Authors
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

#ifndef GRAPHMFG_RUNNER_HPP_
#define GRAPHMFG_RUNNER_HPP_

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "graphmfg/config.hpp"

namespace graphmfg {

struct RunOptions {
  std::optional<std::string> suite;    // run only this suite
  int jobs = 1;                        // suites run concurrently
  std::optional<std::string> out_dir;  // overrides config and environment
};

// A checked quantity: value `relation` tolerance, e.g. residual <= 1e-6.
// Soft checks are logged but never fail a suite.
struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;
  double tolerance = 0.0;
  bool hard = true;
  bool passed = false;
};

struct SuiteResult {
  std::string name;
  std::string status;  // "pass", "fail", "not-applicable", "skipped"
  std::vector<Check> checks;
  std::string error;
  double seconds = 0.0;
  bool passed() const { return status != "fail"; }
};

struct RunResult {
  std::string out_dir;
  std::vector<SuiteResult> suites;
  bool passed() const;
};

// Environment variable that overrides the configured output directory.
inline constexpr const char* kOutputEnv = "GRAPHMFG_OUT";

// Runs the selected suites and writes <out>/summary.json, <out>/<suite>.json,
// CSV dumps and <out>/metadata.json (timestamps and timings only).
RunResult run_experiment(const ExperimentConfig& config, const RunOptions& opts,
                         std::ostream& log);

// 17 significant digits, the shortest form that reloads bit-exactly.
std::string format_double(double x);

}  // namespace graphmfg

#endif  // GRAPHMFG_RUNNER_HPP_
