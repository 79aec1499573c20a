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

#ifndef GRAPHMFG_MODEL_HPP_
#define GRAPHMFG_MODEL_HPP_

#include <cstdint>
#include <functional>
#include <string>

#include "graphmfg/graph.hpp"

namespace graphmfg {

enum class Family { kQuadratic, kPower };

// The convex conjugate pair (l, h) shared by every edge. Both are even.
//   quadratic: l(s) = s^2/2,        h(p) = p^2/2
//   power:     l(s) = |s|^p0 / p0,  h(p) = |p|^q / q,  1/p0 + 1/q = 1
class EdgeCost {
 public:
  static EdgeCost quadratic();
  static EdgeCost power(double p0);

  Family family() const { return family_; }
  double p0() const { return p0_; }
  double q() const { return q_; }

  double l(double s) const;
  double dl(double s) const;
  double h(double p) const;
  double dh(double p) const;
  // +inf at p = 0 when q < 2.
  double d2h(double p) const;

 private:
  Family family_ = Family::kQuadratic;
  double p0_ = 2.0;
  double q_ = 2.0;
};

struct ModelParams {
  Family family = Family::kQuadratic;
  double p0 = 2.0;
  double cF = 1.0;  // coupling F(mu) = -(cF/2)|mu|^2
  double cT = 1.0;  // terminal U_T(mu) = (cT/2)|mu|^2
  // Extended instance: B = theta h'(p) (1 + beta |mu|^2); beta = 0 recovers
  // the flux derived from the Hamiltonian.
  double beta = 0.0;
};

// One game instance: graph, separable model, coupling, terminal cost and
// horizon, with the derived maps of the extended MFG system
//   H(mu, p) = D_mu Ham(mu, -p) + D_mu F(mu),  B(mu, p) = -D_p Ham(mu, -p),
//   g = D_mu U_T.
class GameSpec {
 public:
  GameSpec(WeightedGraph graph, ModelParams params, double horizon);

  const WeightedGraph& graph() const { return graph_; }
  const ModelParams& params() const { return params_; }
  const EdgeCost& cost() const { return cost_; }
  double horizon() const { return horizon_; }
  int size() const { return graph_.size(); }
  bool extended() const { return params_.beta != 0.0; }

  double coupling(const Vector& mu) const;             // F
  Vector coupling_grad(const Vector& mu) const;        // D_mu F
  double terminal(const Vector& mu) const;             // U_T
  Vector terminal_grad(const Vector& mu) const;        // g = D_mu U_T
  Matrix terminal_hessian() const;                     // Dg

  Vector H(const Vector& mu, const EdgeField& p) const;
  EdgeField B(const Vector& mu, const EdgeField& p) const;
  Vector g(const Vector& mu) const { return terminal_grad(mu); }

  // Directional derivatives of H and B, used by the linearized system.
  Vector dH_dmu(const Vector& mu, const EdgeField& p, const Vector& eta) const;
  Vector dH_dp(const Vector& mu, const EdgeField& p, const EdgeField& q) const;
  EdgeField dB_dmu(const Vector& mu, const EdgeField& p,
                   const Vector& eta) const;
  EdgeField dB_dp(const Vector& mu, const EdgeField& p,
                  const EdgeField& q) const;

  // Structural constant with (B,p) >= (H,mu) - C1, H_i >= -C1, |g| <= C1.
  double structural_c1() const;
  // Coercivity constant C_L with L(mu, m) >= C_L |m|^{p0} - style bound
  // used in the value-function bounds (see hjb).
  double coercivity_cl() const;

 private:
  WeightedGraph graph_;
  ModelParams params_;
  EdgeCost cost_;
  double horizon_;
};

// Derivative calls require every component of mu above this floor.
inline constexpr double kDerivativeFloor = 1e-10;
void require_interior(const Vector& mu, const char* what);

double hamiltonian(const GameSpec& spec, const Vector& mu, const EdgeField& p);
// Extended-valued: +inf when theta_ij = 0 and m^{ij} != 0.
double lagrangian(const GameSpec& spec, const Vector& mu, const EdgeField& m);
EdgeField dp_hamiltonian(const GameSpec& spec, const Vector& mu,
                         const EdgeField& p);
Vector dmu_hamiltonian(const GameSpec& spec, const Vector& mu,
                       const EdgeField& p);
EdgeField dm_lagrangian(const GameSpec& spec, const Vector& mu,
                        const EdgeField& m);
Vector dmu_lagrangian(const GameSpec& spec, const Vector& mu,
                      const EdgeField& m);
// L-bar(mu, w) = L(mu, theta * w).
double bar_lagrangian(const GameSpec& spec, const Vector& mu,
                      const EdgeField& w);
Vector dmu_bar_lagrangian(const GameSpec& spec, const Vector& mu,
                          const EdgeField& w);
// L(mu, w) = D_mu L-bar(mu, w) - D_mu F(mu), a vector over vertices.
Vector running_cost_L(const GameSpec& spec, const Vector& mu,
                      const EdgeField& w);

// The momentum p with L-bar(mu, vbar) + Ham(mu, p) = (vbar, p)_mu, namely
// p = l'(vbar) edgewise. Throws DomainError if the Fenchel-Young residual
// exceeds 1e-10 (relative).
EdgeField unique_momentum_check(const GameSpec& spec, const Vector& mu,
                                const EdgeField& vbar);
// The variational expression for D_{mu^i} Ham evaluated at the control w:
//   sum_{l ~ i} (w + grad log mu)^{il} p^{il} d1theta(mu^i, mu^l)
//     - D_{mu^i} L-bar(mu, w + grad log mu).
// Maximal (and equal to D_{mu^i} Ham) when w + grad log mu = h'(p).
double dmu_H_variational(const GameSpec& spec, int i, const Vector& mu,
                         const EdgeField& p, const EdgeField& w);

struct HBMaps {
  std::function<Vector(const Vector&, const EdgeField&)> H;
  std::function<EdgeField(const Vector&, const EdgeField&)> B;
  std::function<Vector(const Vector&)> g;
  // Mobility profile a(u, p) with |B_ij| <= (mu^i + mu^j) a(mu^j/mu^i, p).
  std::function<double(double, const EdgeField&)> a;
};
HBMaps hb_maps(const GameSpec& spec);

struct MonotonicityReport {
  int samples = 0;
  // min over samples of (q, D_pp Ham q) - (eta, D_mumu Ham eta + D^2F eta).
  double min_hamiltonian_gap = 0.0;
  // Same condition written with the derived (H, B) derivatives.
  double min_differential_gap = 0.0;
  // min of (p1-p2, B1-B2) - (mu1-mu2, H1-H2) over random pairs.
  double min_integrated_gap = 0.0;
  // min of (g(mu1)-g(mu2), mu1-mu2).
  double min_terminal_gap = 0.0;
  // Empirical C1 lower bounds: max of (H,mu)-(B,p), of -H_i, of |g_i|.
  double empirical_c1 = 0.0;
  bool passed = false;
};
MonotonicityReport monotonicity_check(const GameSpec& spec, int samples,
                                      std::uint64_t seed = 1);

}  // namespace graphmfg

#endif  // GRAPHMFG_MODEL_HPP_
