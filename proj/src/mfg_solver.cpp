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

#include "graphmfg/mfg_solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "graphmfg/dynamics.hpp"
#include "graphmfg/errors.hpp"

namespace graphmfg {
namespace {

// Momenta lambda grad(phi) at the nodes and midpoints of the grid.
struct MomentumTable {
  std::vector<EdgeField> nodes, mid;
};

MomentumTable momenta(const WeightedGraph& g, const VectorSeries& phi,
                      double lambda) {
  MomentumTable t;
  const int steps = phi.grid().steps();
  t.nodes.reserve(steps + 1);
  t.mid.reserve(steps);
  for (int k = 0; k <= steps; ++k) t.nodes.push_back(lambda * grad(g, phi[k]));
  for (int k = 0; k < steps; ++k) {
    t.mid.push_back(lambda * grad(g, phi.midpoint(k)));
  }
  return t;
}

VectorSeries forward_density(const GameSpec& spec, const SimplexPoint& mu,
                             const VectorSeries& phi, double lambda,
                             const MomentumTable& p, int* rejected) {
  const UniformGrid& grid = phi.grid();
  const WeightedGraph& g = spec.graph();
  FluxSpec flux;
  flux.flux = [&](double s, const Vector& rho) -> EdgeField {
    const double x = 2.0 * (s - grid.t0()) / grid.dt();
    const long j = std::lround(x);
    if (std::abs(x - j) < 1e-7 && j >= 0 && j <= 2L * grid.steps()) {
      const EdgeField& pk = (j % 2 == 0) ? p.nodes[j / 2] : p.mid[j / 2];
      return spec.B(rho, pk);
    }
    // Sub-steps introduced by positivity halving.
    return spec.B(rho, lambda * grad(g, phi.at(s)));
  };
  DensityTrajectory traj =
      integrate_continuity(g, flux, mu, grid.t0(), grid.t1(), grid.dt());
  if (rejected) *rejected = traj.rejected_steps;
  return std::move(traj.rho);
}

VectorSeries backward_potential(const GameSpec& spec, const VectorSeries& rho,
                                const MomentumTable& p) {
  const UniformGrid& grid = rho.grid();
  const int steps = grid.steps();
  const Matrix lap = spec.graph().laplacian_matrix();
  std::vector<Vector> phi(steps + 1);
  phi[steps] = spec.g(rho.back());
  const double h = -grid.dt();
  Vector src_hi = spec.H(rho[steps], p.nodes[steps]);
  for (int k = steps - 1; k >= 0; --k) {
    const Vector src_mid = spec.H(rho.midpoint(k), p.mid[k]);
    const Vector src_lo = spec.H(rho[k], p.nodes[k]);
    const Vector& y = phi[k + 1];
    const Vector k1 = src_hi - lap * y;
    const Vector k2 = src_mid - lap * (y + 0.5 * h * k1);
    const Vector k3 = src_mid - lap * (y + 0.5 * h * k2);
    const Vector k4 = src_lo - lap * (y + h * k3);
    phi[k] = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    src_hi = src_lo;
  }
  return VectorSeries(grid, std::move(phi));
}

void check_point(const GameSpec& spec, double t, const SimplexPoint& mu) {
  check_size(spec.graph(), mu, "mfg solve");
  if (!(t >= 0.0) || !(t < spec.horizon())) {
    throw DomainError("mfg solve: need 0 <= t < T");
  }
}

}  // namespace

void evaluate_residuals(const GameSpec& spec, const SimplexPoint& mu,
                        MFGSolution& sol) {
  const WeightedGraph& g = spec.graph();
  const double lambda = sol.lambda;
  const VectorSeries& rho = sol.rho;
  const VectorSeries& phi = sol.phi;
  sol.phi_defect = ode_defect(phi, [&](double, const Vector& y, int k) {
    return Vector(spec.H(rho[k], lambda * grad(g, y)) - laplacian(g, y));
  });
  sol.rho_defect = ode_defect(rho, [&](double, const Vector& y, int k) {
    return Vector(div(g, spec.B(y, lambda * grad(g, phi[k]))).values() +
                  laplacian(g, y));
  });
  sol.terminal_residual =
      (phi.back() - spec.g(rho.back())).cwiseAbs().maxCoeff();
  sol.initial_residual = (rho.front() - mu.values()).cwiseAbs().maxCoeff();
  double lo = INFINITY;
  for (const Vector& r : rho.values()) lo = std::min(lo, r.minCoeff());
  sol.min_density = lo;
}

MFGSolution picard_solve(const GameSpec& spec, double t, const SimplexPoint& mu,
                         double lambda, const SolverOptions& opts,
                         const VectorSeries* initial_phi) {
  check_point(spec, t, mu);
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw DomainError("picard_solve: lambda must lie in [0, 1]");
  }
  if (!(opts.damping > 0.0 && opts.damping <= 1.0)) {
    throw DomainError("picard_solve: damping must lie in (0, 1]");
  }
  const UniformGrid grid(t, spec.horizon(), opts.steps);
  const WeightedGraph& g = spec.graph();

  VectorSeries phi;
  if (initial_phi) {
    if (initial_phi->nodes() != grid.nodes() ||
        initial_phi->grid().t0() != grid.t0()) {
      throw DimensionMismatch("picard_solve: initial guess on another grid");
    }
    phi = *initial_phi;
  } else {
    phi = VectorSeries(grid, std::vector<Vector>(grid.nodes(), spec.g(mu)));
  }

  double damping = opts.damping;
  double prev_gap = INFINITY;
  int increases = 0;
  MFGSolution sol;
  sol.t = t;
  sol.lambda = lambda;
  for (int it = 1; it <= opts.max_iter; ++it) {
    const MomentumTable p = momenta(g, phi, lambda);
    int rejected = 0;
    VectorSeries rho = forward_density(spec, mu, phi, lambda, p, &rejected);
    VectorSeries next = backward_potential(spec, rho, p);
    const double gap = max_abs_diff(next, phi);
    if (!std::isfinite(gap)) {
      throw NoConvergence("picard_solve: iteration diverged", it, gap);
    }
    if (gap < opts.tol) {
      sol.phi = std::move(next);
      sol.rho = std::move(rho);
      sol.iterations = it;
      sol.picard_gap = gap;
      sol.final_damping = damping;
      sol.rejected_steps = rejected;
      evaluate_residuals(spec, mu, sol);
      return sol;
    }
    if (opts.adapt_damping) {
      increases = gap > prev_gap ? increases + 1 : 0;
      if (increases >= 2) {
        damping *= 0.5;
        increases = 0;
      }
    }
    prev_gap = gap;
    for (int k = 0; k < grid.nodes(); ++k) {
      phi[k] = damping * next[k] + (1.0 - damping) * phi[k];
    }
  }
  throw NoConvergence("picard_solve: no convergence within " +
                          std::to_string(opts.max_iter) + " iterations",
                      opts.max_iter, prev_gap);
}

MFGSolution homotopy_solve(const GameSpec& spec, double t,
                           const SimplexPoint& mu, int lambda_steps,
                           const SolverOptions& opts) {
  if (lambda_steps < 1) throw DomainError("homotopy needs >= 1 step");
  MFGSolution sol;
  int total = 0;
  for (int k = 1; k <= lambda_steps; ++k) {
    const double lambda = static_cast<double>(k) / lambda_steps;
    try {
      sol = picard_solve(spec, t, mu, lambda, opts,
                         k == 1 ? nullptr : &sol.phi);
    } catch (const NoConvergence& e) {
      throw NoConvergence("homotopy failed at lambda = " +
                              std::to_string(lambda) + ": " + e.what(),
                          e.iterations(), e.gap());
    }
    total += sol.iterations;
  }
  sol.iterations = total;
  return sol;
}

MFGSolution solve_mfg(const GameSpec& spec, double t, const SimplexPoint& mu,
                      const SolverOptions& opts) {
  try {
    return picard_solve(spec, t, mu, 1.0, opts);
  } catch (const NoConvergence&) {
    SolverOptions o = opts;
    o.damping = 0.5 * opts.damping;
    return homotopy_solve(spec, t, mu, opts.homotopy_steps, o);
  }
}

ShootingOperator::ShootingOperator(const GameSpec& spec,
                                   const MFGSolution& base)
    : spec_(spec), grid_(base.grid()) {
  if (base.lambda != 1.0) {
    throw DomainError("linearized solve needs a lambda = 1 base solution");
  }
  if (spec.cost().family() == Family::kPower && spec.cost().q() < 2.0) {
    throw DomainError(
        "linearized solve needs h in C^2 (power family with p0 <= 2)");
  }
  const WeightedGraph& g = spec.graph();
  const int n = g.size();
  const int steps = grid_.steps();
  a_nodes_.reserve(steps + 1);
  a_mid_.reserve(steps);
  for (int k = 0; k <= steps; ++k) {
    a_nodes_.push_back(system_matrix(base.rho[k], grad(g, base.phi[k])));
  }
  for (int k = 0; k < steps; ++k) {
    a_mid_.push_back(system_matrix(base.rho.midpoint(k),
                                   grad(g, base.phi.midpoint(k))));
  }
  // Fundamental matrix over [t, T].
  Matrix phi = Matrix::Identity(2 * n, 2 * n);
  const double h = grid_.dt();
  for (int k = 0; k < steps; ++k) {
    const Matrix k1 = a_nodes_[k] * phi;
    const Matrix k2 = a_mid_[k] * (phi + 0.5 * h * k1);
    const Matrix k3 = a_mid_[k] * (phi + 0.5 * h * k2);
    const Matrix k4 = a_nodes_[k + 1] * (phi + h * k3);
    phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  const Matrix dg = spec.terminal_hessian();
  m0_ = phi.topLeftCorner(n, n) - dg * phi.bottomLeftCorner(n, n);
  m_nu_ = phi.topRightCorner(n, n) - dg * phi.bottomRightCorner(n, n);
  Eigen::JacobiSVD<Matrix> svd(m0_);
  const Vector sv = svd.singularValues();
  condition_ = sv(0) / sv(n - 1);
  if (!(condition_ <= kMaxShootingCondition)) {
    throw SingularShooting("shooting matrix is numerically singular (cond = " +
                               std::to_string(condition_) + ")",
                           condition_);
  }
  lu_.compute(m0_);
}

Matrix ShootingOperator::system_matrix(const Vector& rho,
                                       const EdgeField& p) const {
  const WeightedGraph& g = spec_.graph();
  const int n = g.size();
  Matrix a = Matrix::Zero(2 * n, 2 * n);
  for (int c = 0; c < n; ++c) {
    const Vector e = Vector::Unit(n, c);
    const EdgeField q = grad(g, e);
    a.block(0, c, n, 1) = spec_.dH_dp(rho, p, q) - laplacian(g, e);
    a.block(n, c, n, 1) = div(g, spec_.dB_dp(rho, p, q)).values();
    a.block(0, n + c, n, 1) = spec_.dH_dmu(rho, p, e);
    a.block(n, n + c, n, 1) =
        div(g, spec_.dB_dmu(rho, p, e)).values() + laplacian(g, e);
  }
  return a;
}

Vector ShootingOperator::initial_costate(const Vector& nu) const {
  return -lu_.solve(m_nu_ * nu);
}

LinearizedSolution ShootingOperator::solve(const Vector& nu) const {
  const int n = spec_.size();
  if (nu.size() != n) throw DimensionMismatch("linearized solve: nu size");
  LinearizedSolution out;
  out.nu = nu;
  out.condition = condition_;
  const int steps = grid_.steps();
  const double h = grid_.dt();
  Vector y(2 * n);
  y << initial_costate(nu), nu;
  std::vector<Vector> psi, eta;
  psi.reserve(steps + 1);
  eta.reserve(steps + 1);
  psi.push_back(y.head(n));
  eta.push_back(y.tail(n));
  for (int k = 0; k < steps; ++k) {
    const Vector k1 = a_nodes_[k] * y;
    const Vector k2 = a_mid_[k] * (y + 0.5 * h * k1);
    const Vector k3 = a_mid_[k] * (y + 0.5 * h * k2);
    const Vector k4 = a_nodes_[k + 1] * (y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    psi.push_back(y.head(n));
    eta.push_back(y.tail(n));
  }
  for (const Vector& e : eta) {
    out.max_tangent_drift = std::max(out.max_tangent_drift, std::abs(e.sum()));
  }
  out.terminal_residual =
      (psi.back() - spec_.terminal_hessian() * eta.back()).cwiseAbs().maxCoeff();
  out.psi = VectorSeries(grid_, std::move(psi));
  out.eta = VectorSeries(grid_, std::move(eta));
  return out;
}

LinearizedSolution linearized_solve(const GameSpec& spec,
                                    const MFGSolution& base, const Vector& nu) {
  TangentVector checked(nu);  // nu must be tangent
  return ShootingOperator(spec, base).solve(checked.values());
}

double lasry_lions_probe(const GameSpec& spec, const MFGSolution& sol) {
  const double c1 = spec.structural_c1();
  const double tau = spec.horizon() - sol.t;
  return sol.lambda * sol.phi.back().dot(sol.rho.back()) -
         sol.lambda * sol.phi.front().dot(sol.rho.front()) - 2.0 * c1 * tau;
}

double phi_bound_probe(const GameSpec& spec, const MFGSolution& sol,
                       double eps) {
  double sup = 0.0;
  for (const Vector& p : sol.phi.values()) {
    sup = std::max(sup, sol.lambda * p.cwiseAbs().maxCoeff());
  }
  const double bound =
      (4.0 * (spec.horizon() - sol.t) + 3.0) * spec.structural_c1();
  return eps * sup / bound;
}

double flow_property_check(const GameSpec& spec, const MFGSolution& base,
                           double t1, const SolverOptions& opts) {
  const double t = base.t;
  const double T = spec.horizon();
  if (!(t1 >= t && t1 < T)) throw DomainError("flow check: need t <= t1 < T");
  const int steps1 = static_cast<int>(std::lround((T - t1) / base.grid().dt()));
  SolverOptions o = opts;
  o.steps = steps1;
  const SimplexPoint mu1(base.rho.at(t1));
  const MFGSolution sub = solve_mfg(spec, t1, mu1, o);
  double worst = 0.0;
  for (int k = 0; k < sub.grid().nodes(); ++k) {
    const double s = sub.grid().time(k);
    const double d =
        (base.rho.at(s) - sub.rho[k]).cwiseAbs().maxCoeff() +
        (base.phi.at(s) - sub.phi[k]).cwiseAbs().maxCoeff();
    worst = std::max(worst, d);
  }
  return worst;
}

double flow_property_check(const GameSpec& spec, double t, double t1,
                           const SimplexPoint& mu, const SolverOptions& opts) {
  const MFGSolution base = solve_mfg(spec, t, mu, opts);
  return flow_property_check(spec, base, t1, opts);
}

double uniqueness_probe(const GameSpec& spec, const MFGSolution& base,
                        const SolverOptions& opts, int count,
                        std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, amplitude);
  const int n = spec.size();
  const UniformGrid& grid = base.grid();
  const SimplexPoint mu(base.rho.front());
  double worst = 0.0;
  for (int c = 0; c < count; ++c) {
    // Random affine-in-time potential.
    Vector a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a(i) = gauss(rng);
      b(i) = gauss(rng);
    }
    std::vector<Vector> guess;
    for (int k = 0; k < grid.nodes(); ++k) {
      const double x = static_cast<double>(k) / grid.steps();
      guess.push_back(a + x * b);
    }
    const VectorSeries init(grid, std::move(guess));
    SolverOptions o = opts;
    o.steps = grid.steps();
    const MFGSolution other =
        picard_solve(spec, base.t, mu, base.lambda, o, &init);
    worst = std::max({worst, max_abs_diff(other.phi, base.phi),
                      max_abs_diff(other.rho, base.rho)});
  }
  return worst;
}

}  // namespace graphmfg
