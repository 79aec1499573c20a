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

#ifndef GRAPHMFG_CONFIG_HPP_
#define GRAPHMFG_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graphmfg/mfg_solver.hpp"

namespace graphmfg {

inline const std::vector<std::string> kSuiteNames = {
    "interiority", "mfg", "master", "hjb", "nash"};

struct InitialPoint {
  double t = 0.0;
  Vector mu;
};

struct TorusSweep {
  int d = 1;
  std::vector<int> k;
  double amplitude = 0.5;
};

// One experiment; every vertex index in the file is 1-based.
struct ExperimentConfig {
  std::string source;  // path of the config file, empty for inline text
  std::string name;
  WeightedGraph graph = path_graph(2);
  ModelParams model;
  double horizon = 1.0;
  std::vector<InitialPoint> initial;
  std::vector<std::string> suites;  // expanded, in kSuiteNames order

  SolverOptions solver;
  int direct_steps = 256;
  double direct_grad_tol = 1e-7;
  double h_t = 2.5e-3;             // master / HJB time step for dt u
  int convexity_chords = 20;
  std::optional<std::uint64_t> seed;
  int mc_paths = 100000;
  int threads = 1;
  std::optional<TorusSweep> torus_sweep;

  // Hard tolerances of the runner.
  double tol_mfg = 1e-6;
  double tol_master = 1e-4;
  double tol_hjb = 1e-4;
  double tol_equality = 1e-5;
  double tol_gap = 1e-8;

  std::string output_dir;  // resolved against the working directory
};

// Parses and validates; throws ConfigError carrying the 1-based line and
// column of the offending JSON value.
ExperimentConfig parse_config(const std::string& text,
                              const std::string& source = "");
ExperimentConfig load_config(const std::string& path);

// Graph from the graph section alone, e.g.
//   {"n": 3, "edges": [[1, 2, 1.0], [2, 3, 0.5]]}
//   {"generator": "torus", "params": {"d": 1, "k": 8}}
WeightedGraph parse_graph(const std::string& text);

struct GeneratorInfo {
  std::string name;
  std::string params;
  std::string description;
};
std::vector<GeneratorInfo> list_generators();

// Torus instances of a sweep: "torus d=1 k=4 h=0.25 omega=16", ...
std::vector<std::string> expand_torus_sweep(const TorusSweep& sweep);

}  // namespace graphmfg

#endif  // GRAPHMFG_CONFIG_HPP_
