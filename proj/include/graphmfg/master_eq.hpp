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

#ifndef GRAPHMFG_MASTER_EQ_HPP_
#define GRAPHMFG_MASTER_EQ_HPP_

#include <array>
#include <string>
#include <vector>

#include "graphmfg/mfg_solver.hpp"

namespace graphmfg {

enum class DerivativeMethod { kShooting, kFiniteDifference };

const char* to_string(DerivativeMethod m);

struct ValueSample {
  double t = 0.0;
  Vector mu;
  Vector u;
  Matrix dmu;   // column i is delta_mu u^i, a tangent vector
  Vector dt_u;  // filled by master_residual
  DerivativeMethod method = DerivativeMethod::kShooting;
  double fd_step = 0.0;  // simplex step actually used by the fd method
};

// u(t, mu) = phi^{t,mu}(t) from a converged solve with opts.steps steps on
// [t, T]; u(T, .) = g.
Vector value(const GameSpec& spec, double t, const SimplexPoint& mu,
             const SolverOptions& opts);

// Tangent derivative of u. The shooting path reuses one linearization for a
// basis of tangent directions; the fd path takes central differences along
// the spanning-tree directions (e_i - e_j)/sqrt(2), halving h_mu until
// mu +- h d stays strictly interior.
ValueSample dmu_value(const GameSpec& spec, double t, const SimplexPoint& mu,
                      DerivativeMethod method, const SolverOptions& opts,
                      double h_mu = 1e-4);

// Same as the shooting path of dmu_value, reusing a solve started at (t, mu).
Matrix dmu_from_solution(const GameSpec& spec, const MFGSolution& base);

// Graph gradient of one component's tangent derivative.
EdgeField wasserstein_grad(const WeightedGraph& g, const Vector& dmu_row);

// (div grad_W, mu).
double individual_noise(const WeightedGraph& g, const Vector& mu,
                        const EdgeField& grad_w);

// The three equivalent expressions (div grad_W, mu), -(grad_W, grad mu) and
// -(grad_W, grad log mu)_mu.
std::array<double, 3> individual_noise_forms(const WeightedGraph& g,
                                             const Vector& mu,
                                             const EdgeField& grad_w);

struct MasterResidual {
  ValueSample sample;
  Vector residual;
  double norm = 0.0;
  std::string time_scheme;  // "central", "forward" or "backward"
};

// dt u - (grad_W u^i, B(mu, grad u)) + Delta_ind u^i - H^i(mu, grad u)
// + Delta u^i, with dt u from re-solves at t +- h_t on rescaled grids of
// the same size (one-sided second-order stencils near 0 and T).
MasterResidual master_residual(
    const GameSpec& spec, double t, const SimplexPoint& mu, double h_t,
    const SolverOptions& opts,
    DerivativeMethod method = DerivativeMethod::kShooting,
    double h_mu = 1e-4);

// max over the sample times s of |u(s, rho(s)) - phi(s)|_inf, where the
// re-solve from (s, rho(s)) uses the base grid spacing. Sample times are
// snapped to the base grid.
double trajectory_consistency(const GameSpec& spec, const MFGSolution& base,
                              const std::vector<double>& times,
                              const SolverOptions& opts);

}  // namespace graphmfg

#endif  // GRAPHMFG_MASTER_EQ_HPP_
