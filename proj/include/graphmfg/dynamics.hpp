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

#ifndef GRAPHMFG_DYNAMICS_HPP_
#define GRAPHMFG_DYNAMICS_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "graphmfg/graph.hpp"
#include "graphmfg/trajectory.hpp"

namespace graphmfg {

// Flux A(s, mu) for the continuity equation rho' = div A(s, rho) + lap rho,
// together with a dominating profile h: |A_ij| <= (mu^i + mu^j) h(mu^j/mu^i).
struct FluxSpec {
  std::function<EdgeField(double, const Vector&)> flux;
  std::function<double(double)> dominating;  // may be empty
};

struct DensityTrajectory {
  VectorSeries rho;
  std::string scheme = "rk4";
  double base_dt = 0.0;
  int rejected_steps = 0;      // steps split because of the positivity floor
  double min_substep = 0.0;    // smallest accepted sub-step
};

inline constexpr double kDensityFloor = 1e-14;
inline constexpr int kMaxHalvings = 40;
// Total split budget of one integration.
inline constexpr int kMaxRejectedSteps = 1 << 16;

// RK4 with the given base step (rounded so the grid is uniform); a step is
// split in two whenever a stage or the result drops below kDensityFloor.
// Throws NonPositiveDensity after kMaxHalvings nested splits or
// kMaxRejectedSteps splits in total.
DensityTrajectory integrate_continuity(const WeightedGraph& g,
                                       const FluxSpec& flux,
                                       const SimplexPoint& mu0, double t0,
                                       double t1, double dt);

// Largest violation of the domination bound over random interior samples
// (<= 0 means the bound held everywhere).
double flux_domination_violation(const WeightedGraph& g, const FluxSpec& flux,
                                 double t, int samples, std::uint64_t seed);

struct InteriorityReport {
  double eps = 0.0;
  std::vector<double> times;
  std::vector<double> min_profile;
  double fitted_c = 0.0;
  double fitted_r = 0.0;
  bool bound_holds = false;
};
// Fits min_i rho_i(s) >= c eps exp(-r (s - s0)) over the grid.
InteriorityReport interiority_report(const DensityTrajectory& traj,
                                     double eps);

struct SmallnessReport {
  bool reached = false;
  double t0 = 0.0;
  int vertex = -1;
  std::vector<double> min_before;  // min over [s0, t0] of rho_i
  std::vector<double> ratio;       // min_before / delta
  std::vector<int> distance;       // hop distance to `vertex`
  double fitted_k = 0.0;           // max ratio
};
SmallnessReport smallness_propagation_probe(const WeightedGraph& g,
                                            const DensityTrajectory& traj,
                                            double delta);

struct WaitingTimeReport {
  std::optional<double> t0;
  std::optional<double> t1;
  std::optional<double> gap;
};
// First times (linearly interpolated) where min_i rho hits delta and
// delta / (2K).
WaitingTimeReport waiting_time_probe(const DensityTrajectory& traj, double k,
                                     double delta);

}  // namespace graphmfg

#endif  // GRAPHMFG_DYNAMICS_HPP_
