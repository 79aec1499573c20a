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

#ifndef GRAPHMFG_MFG_SOLVER_HPP_
#define GRAPHMFG_MFG_SOLVER_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "graphmfg/model.hpp"
#include "graphmfg/trajectory.hpp"

namespace graphmfg {

struct SolverOptions {
  int steps = 1000;        // grid steps on [t, T]
  double damping = 0.5;    // initial Picard damping in (0, 1]
  double tol = 1e-9;       // sup-norm gap between successive potentials
  int max_iter = 3000;
  bool adapt_damping = true;  // halve damping after two gap increases
  int homotopy_steps = 5;     // fallback continuation in lambda
};

struct MFGSolution {
  double t = 0.0;
  double lambda = 1.0;
  VectorSeries phi;
  VectorSeries rho;
  int iterations = 0;
  double picard_gap = 0.0;
  double final_damping = 0.0;
  double terminal_residual = 0.0;   // |phi(T) - g(rho(T))|_inf
  double initial_residual = 0.0;    // |rho(t) - mu|_inf
  double phi_defect = 0.0;          // fourth-order ODE defects on the grid
  double rho_defect = 0.0;
  double min_density = 0.0;
  int rejected_steps = 0;

  const UniformGrid& grid() const { return phi.grid(); }
  double residual() const {
    return std::max({terminal_residual, phi_defect, rho_defect});
  }
};

// Damped Picard iteration phi <- d T(phi) + (1 - d) phi, where T solves the
// forward continuity equation with flux B(rho, lambda grad phi) and then the
// backward potential equation with source H(rho, lambda grad phi).
// `initial_phi`, if given, must live on the same grid.
MFGSolution picard_solve(const GameSpec& spec, double t, const SimplexPoint& mu,
                         double lambda, const SolverOptions& opts,
                         const VectorSeries* initial_phi = nullptr);

// Continuation lambda = 1/K, 2/K, ..., 1 with warm starts.
MFGSolution homotopy_solve(const GameSpec& spec, double t,
                           const SimplexPoint& mu, int lambda_steps,
                           const SolverOptions& opts);

// Picard at lambda = 1; on NoConvergence falls back to homotopy_solve.
MFGSolution solve_mfg(const GameSpec& spec, double t, const SimplexPoint& mu,
                      const SolverOptions& opts);

struct LinearizedSolution {
  VectorSeries psi;
  VectorSeries eta;
  Vector nu;
  double condition = 0.0;          // 2-norm condition of the shooting matrix
  double terminal_residual = 0.0;  // |psi(T) - Dg eta(T)|_inf
  double max_tangent_drift = 0.0;  // max |sum eta(s)|
};

// Propagator of the linearized system along a base solution, assembled once
// and reusable for many directions.
class ShootingOperator {
 public:
  ShootingOperator(const GameSpec& spec, const MFGSolution& base);

  // psi(t) for a direction nu (the shooting unknown q*).
  Vector initial_costate(const Vector& nu) const;
  // Full (psi, eta) trajectories for a direction nu.
  LinearizedSolution solve(const Vector& nu) const;
  double condition() const { return condition_; }

 private:
  Matrix system_matrix(const Vector& rho, const EdgeField& p) const;

  const GameSpec& spec_;
  UniformGrid grid_;
  std::vector<Matrix> a_nodes_, a_mid_;
  Matrix m0_;       // d mismatch / d q
  Matrix m_nu_;     // d mismatch / d nu
  Eigen::PartialPivLU<Matrix> lu_;
  double condition_ = 0.0;
};

inline constexpr double kMaxShootingCondition = 1e12;

LinearizedSolution linearized_solve(const GameSpec& spec,
                                    const MFGSolution& base, const Vector& nu);

// lambda (phi(T), rho(T)) - lambda (phi(t), mu) - 2 C1 (T - t); <= 0.
double lasry_lions_probe(const GameSpec& spec, const MFGSolution& sol);

// eps * max|lambda phi| / ((4 (T - t) + 3) C1); flagged when > 1.
double phi_bound_probe(const GameSpec& spec, const MFGSolution& sol,
                       double eps);

// Max over s in [t1, T] of |rho(s;t,mu) - rho(s;t1,rho(t1))| +
// |phi(s;t,mu) - phi(s;t1,rho(t1))|; the second solve uses the same step.
double flow_property_check(const GameSpec& spec, double t, double t1,
                           const SimplexPoint& mu, const SolverOptions& opts);
double flow_property_check(const GameSpec& spec, const MFGSolution& base,
                           double t1, const SolverOptions& opts);

// Solves from `count` random initial potentials a + (s - t)/(T - t) b with
// Gaussian a, b of standard deviation `amplitude` and returns the largest
// sup-norm deviation (phi and rho) from `base`.
double uniqueness_probe(const GameSpec& spec, const MFGSolution& base,
                        const SolverOptions& opts, int count,
                        std::uint64_t seed, double amplitude = 1.0);

// Exact defects of the computed pair, recomputed from scratch.
void evaluate_residuals(const GameSpec& spec, const SimplexPoint& mu,
                        MFGSolution& sol);

}  // namespace graphmfg

#endif  // GRAPHMFG_MFG_SOLVER_HPP_
