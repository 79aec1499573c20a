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

#ifndef GRAPHMFG_HJB_HPP_
#define GRAPHMFG_HJB_HPP_

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "graphmfg/mfg_solver.hpp"

namespace graphmfg {

// Discrete curve for the action: densities at the nodes, fluxes on the
// intervals, tied by rho_{k+1} = rho_k - ds div m_k.
struct ActionPath {
  UniformGrid grid;
  std::vector<Vector> rho;     // grid.nodes() entries
  std::vector<EdgeField> m;    // grid.steps() entries
  double continuity_defect(const WeightedGraph& g) const;
  double min_density() const;
};

// Path generated from mu by the forward recursion.
ActionPath path_from_fluxes(const WeightedGraph& g, const Vector& mu,
                            const UniformGrid& grid,
                            std::vector<EdgeField> m);

// Crank-Nicolson heat flow from mu with m_k = -grad of the interval
// midpoint, so that the kinetic term vanishes exactly.
ActionPath heat_path(const WeightedGraph& g, const Vector& mu,
                     const UniformGrid& grid);

// Midpoint rule for the integral of L(rho, m + grad rho) - F(rho); +inf if
// some L is infinite. An empty path has zero action.
double action(const GameSpec& spec, const ActionPath& path);

struct HJBValue {
  double t = 0.0;
  Vector mu;
  double value = 0.0;            // U(t, mu)
  EdgeField grad_w;              // Wasserstein gradient of U at (t, mu)
  double dt_value = std::numeric_limits<double>::quiet_NaN();
  ActionPath path;               // minimizing curve
  std::string method;            // "fb" or "direct"
  int iterations = 0;
  double gradient_norm = 0.0;    // direct: final sup-norm gradient per unit time
  double min_density = 0.0;
};

// Solves the forward-backward system, rebuilds m = D_p Ham(rho, -grad phi)
// - grad rho and adds U_T(rho(T)) to its action (Simpson rule with the
// solution's cubic midpoints). grad_w = grad phi(t).
HJBValue value_by_fb(const GameSpec& spec, double t, const SimplexPoint& mu,
                     const SolverOptions& opts);

struct DirectOptions {
  int steps = 256;
  int max_iter = 50000;
  double grad_tol = 1e-7;      // sup-norm gradient per unit time
  double stall_floor = 1e-6;   // line-search stall below this is accepted
  int memory = 10;             // L-BFGS pairs
  bool warm_start_fb = false;  // start from the FB fluxes instead of heat
  SolverOptions fb;            // used by the warm start
};

// Objective of the transcription (action + terminal cost) as a function of
// the interval fluxes, with its gradient by the adjoint recursion when
// `grad` is non-null; `dmu` receives the derivative in mu at fixed fluxes.
// Returns +inf outside the interior.
double direct_objective(const GameSpec& spec, const Vector& mu,
                        const UniformGrid& grid,
                        const std::vector<EdgeField>& m,
                        std::vector<EdgeField>* grad, Vector* dmu = nullptr);

// Minimizes direct_objective with L-BFGS and Armijo backtracking; interior
// violations are rejected by the line search. Throws LineSearchStall if the
// search fails while the gradient is above stall_floor.
HJBValue value_by_direct_min(const GameSpec& spec, double t,
                             const SimplexPoint& mu,
                             const DirectOptions& opts);

struct IotaBounds {
  double lower = 0.0;  // -max U_T^- - T max|F| - T C_L
  double upper = 0.0;  // T max|F| + max U_T
};
IotaBounds iota_bounds(const GameSpec& spec);

struct GradientIdentityReport {
  std::vector<double> times;  // t and the midpoint of [t, T]
  std::vector<double> gaps;   // |grad(FD of U) - grad phi(s)|_inf
  double max_gap = 0.0;
};
// Wasserstein gradient of U by central differences of value_by_fb along the
// spanning-tree directions (step h_mu), compared with grad phi along the
// minimizer.
GradientIdentityReport gradient_identity_check(const GameSpec& spec, double t,
                                               const SimplexPoint& mu,
                                               const SolverOptions& opts,
                                               double h_mu = 1e-4);

struct HJBResidual {
  double residual = 0.0;
  double dt_value = 0.0;
  std::string time_scheme;
};
// -dt U + Ham(mu, -grad_W U) - Delta_ind U + F(mu), with dt U by differences
// of value_by_fb on rescaled grids of equal size.
HJBResidual hjb_residual(const GameSpec& spec, double t,
                         const SimplexPoint& mu, double h_t,
                         const SolverOptions& opts);

struct ConvexityReport {
  std::vector<double> margins;  // chord value minus value at the chord point
  double min_margin = 0.0;
};
// Random chords in P_eps with s uniform in (0.1, 0.9).
ConvexityReport convexity_probe(const GameSpec& spec, double t, int samples,
                                std::uint64_t seed, const SolverOptions& opts,
                                double eps = 0.02);
// Margin of one chord.
double convexity_margin(const GameSpec& spec, double t, const Vector& mu0,
                        const Vector& mu1, double s,
                        const SolverOptions& opts);

struct SemiconcavityReport {
  double h = 0.0;
  double ratio = 0.0;       // max second difference / h^2 at step h
  double ratio_half = 0.0;  // same at h / 2
};
// Directions: the orthonormal tangent basis and the normalized
// spanning-tree edges.
SemiconcavityReport semiconcavity_probe(const GameSpec& spec, double t,
                                        const SimplexPoint& mu, double h,
                                        const SolverOptions& opts);

struct HolderReport {
  double exponent = 0.0;       // 1 / p0'
  double rho_dot_norm = 0.0;   // |rho'|_{L^p0(l2)} of the discrete path
  double max_ratio = 0.0;      // max |rho_b - rho_a| / (|s_b-s_a|^e |rho'|)
};
HolderReport holder_check(const GameSpec& spec, const ActionPath& path);

}  // namespace graphmfg

#endif  // GRAPHMFG_HJB_HPP_
