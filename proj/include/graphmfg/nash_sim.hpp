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

#ifndef GRAPHMFG_NASH_SIM_HPP_
#define GRAPHMFG_NASH_SIM_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "graphmfg/mfg_solver.hpp"

namespace graphmfg {

// Time-dependent velocity field v(s).
using Control = std::function<EdgeField(double)>;

// Off-diagonal entries below -kAdmissibilitySlack count as violations.
inline constexpr double kAdmissibilitySlack = 1e-12;

struct RateViolation {
  double t = 0.0;
  int i = 0, j = 0;
  double value = 0.0;
};

// Rate matrices sampled on the nodes and interval midpoints of `grid`
// (a uniform grid with twice the steps), cubic in between.
struct RateMatrixPath {
  UniformGrid grid;       // coarse grid
  MatrixSeries q;         // on the refined grid
  double min_offdiag = 0.0;
  int violation_count = 0;
  std::vector<RateViolation> violations;  // first 100
  bool admissible() const { return violation_count == 0; }
  Matrix at(double s) const { return q.at(s); }
  double max_exit_rate() const;
};

// Q^{ij} = w_ij - sqrt(w_ij) d1theta(rho^i, rho^j) (v + grad log rho)^{ij}
// on edges, zero off the graph, rows summing to zero.
RateMatrixPath rate_matrix(const WeightedGraph& g, const VectorSeries& rho_star,
                           const Control& v);

// Psi(s_k, s_j) for j = k..N from dPsi/dt = Psi Q (RK4 on the refined
// samples); entry j - k of the result.
std::vector<Matrix> propagator(const RateMatrixPath& q, int start_node = 0);

// max_k |mu Psi(0, t_k) - rho_star(t_k)|_inf with mu = rho_star(t_0).
double consistency_check(const RateMatrixPath& q, const VectorSeries& rho_star);

// Equilibrium of the MFG from (0, mu): v = h'(-grad phi) - grad log rho.
struct EquilibriumControl {
  MFGSolution solution;
  Control v;
  Control vbar;
  RateMatrixPath q;
};
EquilibriumControl optimal_control(const GameSpec& spec, const SimplexPoint& mu,
                                   const SolverOptions& opts);

// Running cost L(x, rho_star, v + grad log rho_star) for every vertex x,
// sampled on the refined grid of `grid`.
VectorSeries running_cost(const GameSpec& spec, const VectorSeries& rho_star,
                          const Control& v);

// Backward Kolmogorov equation -z' = Q z + l, z(T) = terminal; z[k](i) is
// the expected cost from vertex i at time t_k.
VectorSeries cost_J_ode(const RateMatrixPath& q, const VectorSeries& running,
                        const Vector& terminal);

// J(t_0, .; v_star, v) for the game: builds Q[v | rho_star], the running
// cost and g(rho_star(T)).
Vector cost_J(const GameSpec& spec, const VectorSeries& rho_star,
              const Control& v);

struct ChainSample {
  std::uint64_t seed = 0;
  std::vector<double> times;  // times[0] = start time, then jump times
  std::vector<int> states;    // state held from times[k] on
  int state_at(double s) const;
};

// Per-path generator seeded from (seed, index) by splitmix64.
std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index);

// Uniformized sampling with global rate 1.05 max |Q^{ii}| and thinning.
ChainSample sample_chain(const RateMatrixPath& q, int start, std::uint64_t seed);

struct MCEstimate {
  Vector mean;
  Vector stderr_;
  int n_paths = 0;
  double rate = 0.0;  // uniformization rate
};

// Monte Carlo of the pathwise cost from every start vertex at t_0; the
// running cost is integrated exactly for its cubic interpolant. Paths are
// independent streams, summed pairwise in index order.
MCEstimate cost_J_mc(const RateMatrixPath& q, const VectorSeries& running,
                     const Vector& terminal, int n_paths, std::uint64_t seed,
                     int threads = 1);

struct MartingaleReport {
  double mean = 0.0;     // mean of int (f, dM)
  double stderr_ = 0.0;
  double max_identity_error = 0.0;  // per-path error of the Ito formula
  int n_paths = 0;
};
// f and its time derivative on the coarse grid; paths start at `start`.
MartingaleReport martingale_probe(const RateMatrixPath& q,
                                  const VectorSeries& f,
                                  const VectorSeries& fdot, int start,
                                  int n_paths, std::uint64_t seed,
                                  int threads = 1);

// v[a] at vertex i: v^{il} + a^l and v^{li} - a^l on edges at i; a(i) is
// ignored, off-graph entries vanish.
EdgeField deviate(const WeightedGraph& g, const EdgeField& v, int i,
                  const Vector& a);

// True when D_{v^{kl}} D_{mu^i} L-bar vanishes for i outside {k, l}; holds
// for every edge-separable family of this library.
bool separable_cost(const GameSpec& spec);

struct DeviationResult {
  int vertex = 0;
  Vector a;              // empty for general perturbations
  std::string kind;      // "coordinate", "random" or "general"
  bool admissible = true;
  double gap = 0.0;      // J(v*, deviation) - J(v*, v*) at the vertex
};

struct NashOptions {
  SolverOptions solver;
  std::vector<double> magnitudes = {-0.5, -0.25, 0.25, 0.5};
  int random_directions = 20;
  int general_perturbations = 10;
  int mc_paths = 100000;
  std::uint64_t seed = 2026;
  int threads = 1;
};

struct NashReport {
  bool admissible = false;
  double margin = 0.0;  // min off-diagonal Q of the equilibrium control
  std::vector<RateViolation> violations;
  Vector j_ode;                 // J(0, i; v*, v*)
  Vector u0;                    // u(0, e_i)
  double equality_gap = 0.0;
  std::vector<DeviationResult> deviations;
  int skipped = 0;
  double min_deviation_gap = 0.0;
  double quadratic_ratio = 0.0;  // gap(a/2) / gap(a) on a small deviation
  bool separable = false;
  MCEstimate mc;
  double max_mc_zscore = 0.0;
  double consistency_gap = 0.0;
};

// Reports NOT-APPLICABLE (admissible = false, no deviation data) when the
// equilibrium control is inadmissible.
NashReport nash_certificate(const GameSpec& spec, const SimplexPoint& mu,
                            const NashOptions& opts);

struct TorusPoint {
  int n = 0;
  double mesh = 0.0;
  double margin = 0.0;
  bool admissible = false;
};
// One-dimensional torus grids with omega = n^2 and the density
// mu^i ~ 1 + amplitude cos(2 pi i / n); margin = min off-diagonal Q along the
// equilibrium.
std::vector<TorusPoint> torus_admissibility_sweep(
    const std::vector<int>& sizes, const ModelParams& params, double horizon,
    double amplitude, const SolverOptions& opts);

}  // namespace graphmfg

#endif  // GRAPHMFG_NASH_SIM_HPP_
