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

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "graphmfg/config.hpp"
#include "graphmfg/errors.hpp"
#include "graphmfg/runner.hpp"

// Exit codes: 0 all hard checks passed, 1 a check failed, 2 bad config.
int main(int argc, char** argv) {
  using namespace graphmfg;
  CLI::App app{"Mean field games on finite graphs: solvers and certificates"};
  app.require_subcommand(1);

  std::string run_config;
  std::string suite;
  int jobs = 1;
  std::string out_dir;
  CLI::App* run = app.add_subcommand("run", "Run the suites of an experiment");
  run->add_option("config", run_config, "Experiment config (JSON)")->required();
  run->add_option("--suite", suite, "Only this suite")
      ->check(CLI::IsMember({"interiority", "mfg", "master", "hjb", "nash"}));
  run->add_option("--jobs", jobs, "Suites run concurrently")->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "Output directory");

  std::string validate_config;
  CLI::App* validate = app.add_subcommand("validate", "Check a config without computing");
  validate->add_option("config", validate_config, "Experiment config (JSON)")->required();

  CLI::App* generators = app.add_subcommand("list-generators", "List graph generators");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*generators) {
      for (const auto& g : list_generators()) {
        std::cout << g.name << "  (" << g.params << ")\n    " << g.description << "\n";
      }
      std::cout << "torus sweep {\"k\": [4, 8, 16]} expands to:\n";
      for (const auto& s : expand_torus_sweep(TorusSweep{1, {4, 8, 16}, 0.5})) {
        std::cout << "    " << s << "\n";
      }
      return 0;
    }
    if (*validate) {
      const ExperimentConfig c = load_config(validate_config);
      std::cout << "OK " << validate_config << ": " << c.name << ", "
                << c.graph.description << ", " << c.graph.edges().size()
                << " edges, " << c.initial.size() << " initial point(s), suites";
      for (const auto& s : c.suites) std::cout << " " << s;
      std::cout << "\n";
      if (c.torus_sweep) {
        for (const auto& s : expand_torus_sweep(*c.torus_sweep)) {
          std::cout << "  " << s << "\n";
        }
      }
      return 0;
    }
    const ExperimentConfig c = load_config(run_config);
    RunOptions opts;
    if (!suite.empty()) opts.suite = suite;
    opts.jobs = jobs;
    if (!out_dir.empty()) opts.out_dir = out_dir;
    const RunResult r = run_experiment(c, opts, std::cout);
    return r.passed() ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
