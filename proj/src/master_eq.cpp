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

#include "graphmfg/master_eq.hpp"

#include <cmath>

#include "graphmfg/errors.hpp"

namespace graphmfg {

namespace {

// Smallest component allowed for an fd evaluation point.
constexpr double kFdInteriorFloor = 1e-12;

}  // namespace

const char* to_string(DerivativeMethod m) {
  return m == DerivativeMethod::kShooting ? "shooting" : "fd";
}

Vector value(const GameSpec& spec, double t, const SimplexPoint& mu,
             const SolverOptions& opts) {
  check_size(spec.graph(), mu.values(), "value");
  const double T = spec.horizon();
  if (t == T) return spec.g(mu);
  if (!(t >= 0.0 && t < T)) throw DomainError("value: t outside [0, T]");
  return solve_mfg(spec, t, mu, opts).phi.front();
}

Matrix dmu_from_solution(const GameSpec& spec, const MFGSolution& base) {
  const int n = spec.graph().size();
  const Matrix basis = tangent_basis(n);
  const ShootingOperator op(spec, base);
  // Psi maps nu to psi(t); its rows restricted to the tangent space are the
  // derivatives of the components.
  Matrix psi_v(n, n - 1);
  for (int k = 0; k < n - 1; ++k) {
    psi_v.col(k) = op.initial_costate(basis.col(k));
  }
  return (psi_v * basis.transpose()).transpose();
}

ValueSample dmu_value(const GameSpec& spec, double t, const SimplexPoint& mu,
                      DerivativeMethod method, const SolverOptions& opts,
                      double h_mu) {
  const WeightedGraph& g = spec.graph();
  const int n = g.size();
  check_size(g, mu.values(), "dmu_value");
  ValueSample out;
  out.t = t;
  out.mu = mu.values();
  out.method = method;
  const double T = spec.horizon();
  if (t == T) {
    out.u = spec.g(mu);
    const Matrix hess = spec.terminal_hessian();
    out.dmu.resize(n, n);
    for (int i = 0; i < n; ++i) {
      out.dmu.col(i) = project_tangent(Vector(hess.row(i).transpose())).values();
    }
    return out;
  }
  if (method == DerivativeMethod::kShooting) {
    const MFGSolution base = solve_mfg(spec, t, mu, opts);
    out.u = base.phi.front();
    out.dmu = dmu_from_solution(spec, base);
    return out;
  }
  if (!(h_mu > 0.0)) throw DomainError("dmu_value: h_mu must be > 0");
  out.u = value(spec, t, mu, opts);
  const std::vector<Edge> tree = g.spanning_tree();
  const Vector& m = mu.values();
  Matrix dirs(n, n - 1);
  for (int k = 0; k < n - 1; ++k) {
    dirs.col(k) = (Vector::Unit(n, tree[k].i) - Vector::Unit(n, tree[k].j)) /
                  std::sqrt(2.0);
  }
  double h = h_mu;
  auto interior = [&](double step) {
    for (int k = 0; k < n - 1; ++k) {
      if ((m + step * dirs.col(k)).minCoeff() <= kFdInteriorFloor ||
          (m - step * dirs.col(k)).minCoeff() <= kFdInteriorFloor) {
        return false;
      }
    }
    return true;
  };
  int halvings = 0;
  while (!interior(h)) {
    h *= 0.5;
    if (++halvings > 60) throw DomainError("dmu_value: mu on the boundary");
  }
  out.fd_step = h;
  Matrix c(n, n - 1);
  for (int k = 0; k < n - 1; ++k) {
    const Vector up = value(spec, t, SimplexPoint(m + h * dirs.col(k)), opts);
    const Vector dn = value(spec, t, SimplexPoint(m - h * dirs.col(k)), opts);
    c.col(k) = (up - dn) / (2.0 * h);
  }
  // Rows of Psi lie in the tangent space: Psi = X V^T with X (V^T D) = C.
  const Matrix basis = tangent_basis(n);
  const Matrix x = (basis.transpose() * dirs)
                       .transpose()
                       .partialPivLu()
                       .solve(c.transpose())
                       .transpose();
  out.dmu = (x * basis.transpose()).transpose();
  return out;
}

EdgeField wasserstein_grad(const WeightedGraph& g, const Vector& dmu_row) {
  return grad(g, dmu_row);
}

std::array<double, 3> individual_noise_forms(const WeightedGraph& g,
                                             const Vector& mu,
                                             const EdgeField& grad_w) {
  check_size(g, mu, "individual_noise");
  const double first = static_cast<const Vector&>(div(g, grad_w)).dot(mu);
  const double second = -edge_inner(grad_w, grad(g, mu));
  double third = 0.0;
  for (const Edge& e : g.edges()) {
    const double dlog =
        e.sqrt_omega * (std::log(mu(e.i)) - std::log(mu(e.j)));
    third -= theta(mu(e.i), mu(e.j)) * grad_w(e.i, e.j) * dlog;
  }
  return {first, second, third};
}

double individual_noise(const WeightedGraph& g, const Vector& mu,
                        const EdgeField& grad_w) {
  return individual_noise_forms(g, mu, grad_w)[0];
}

MasterResidual master_residual(const GameSpec& spec, double t,
                               const SimplexPoint& mu, double h_t,
                               const SolverOptions& opts,
                               DerivativeMethod method, double h_mu) {
  const WeightedGraph& g = spec.graph();
  const int n = g.size();
  const double T = spec.horizon();
  if (!(t > 0.0 && t < T)) throw DomainError("master_residual: need 0 < t < T");
  if (!(h_t > 0.0)) throw DomainError("master_residual: h_t must be > 0");
  MasterResidual r;
  r.sample = dmu_value(spec, t, mu, method, opts, h_mu);
  const Vector& u = r.sample.u;
  auto val = [&](double s) { return value(spec, s, mu, opts); };
  if (t - h_t >= 0.0 && t + h_t <= T) {
    r.time_scheme = "central";
    r.sample.dt_u = (val(t + h_t) - val(t - h_t)) / (2.0 * h_t);
  } else if (t + h_t > T) {
    if (t - 2.0 * h_t < 0.0) throw DomainError("master_residual: h_t too big");
    r.time_scheme = "backward";
    r.sample.dt_u =
        (3.0 * u - 4.0 * val(t - h_t) + val(t - 2.0 * h_t)) / (2.0 * h_t);
  } else {
    if (t + 2.0 * h_t > T) throw DomainError("master_residual: h_t too big");
    r.time_scheme = "forward";
    r.sample.dt_u =
        (-3.0 * u + 4.0 * val(t + h_t) - val(t + 2.0 * h_t)) / (2.0 * h_t);
  }
  const Vector& m = mu.values();
  const EdgeField p = grad(g, u);
  const EdgeField b = spec.B(m, p);
  const Vector h = spec.H(m, p);
  const Vector lap = laplacian(g, u);
  r.residual.resize(n);
  for (int i = 0; i < n; ++i) {
    const EdgeField gw = wasserstein_grad(g, r.sample.dmu.col(i));
    r.residual(i) = r.sample.dt_u(i) - edge_inner(gw, b) +
                    individual_noise(g, m, gw) - h(i) + lap(i);
  }
  r.norm = r.residual.cwiseAbs().maxCoeff();
  return r;
}

double trajectory_consistency(const GameSpec& spec, const MFGSolution& base,
                              const std::vector<double>& times,
                              const SolverOptions& opts) {
  const UniformGrid& grid = base.grid();
  double worst = 0.0;
  for (double s : times) {
    if (!(s >= grid.t0() && s <= grid.t1())) {
      throw DomainError("trajectory_consistency: time outside the base grid");
    }
    const int k = static_cast<int>(std::lround((s - grid.t0()) / grid.dt()));
    const SimplexPoint rho_s(base.rho[k]);
    SolverOptions o = opts;
    o.steps = grid.steps() - k;
    Vector u;
    if (k == grid.steps()) {
      u = spec.g(rho_s);
    } else if (o.steps < 3) {
      throw DomainError("trajectory_consistency: sample too close to T");
    } else {
      u = value(spec, grid.time(k), rho_s, o);
    }
    worst = std::max(worst, (u - base.phi[k]).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace graphmfg
