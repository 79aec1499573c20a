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

#include "graphmfg/hjb.hpp"

#include <cmath>
#include <deque>
#include <random>

#include "graphmfg/errors.hpp"
#include "graphmfg/master_eq.hpp"

namespace graphmfg {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;

std::vector<EdgeField> fb_fluxes(const GameSpec& spec, const MFGSolution& sol,
                                 const UniformGrid& grid) {
  const WeightedGraph& g = spec.graph();
  std::vector<EdgeField> m;
  m.reserve(grid.steps());
  for (int k = 0; k < grid.steps(); ++k) {
    const double s = grid.time(k) + 0.5 * grid.dt();
    const Vector rho = sol.rho.at(s);
    const EdgeField w =
        dp_hamiltonian(spec, rho, -1.0 * grad(g, sol.phi.at(s)));
    m.push_back(w - grad(g, rho));
  }
  return m;
}

void require_potential_game(const GameSpec& spec) {
  if (spec.extended()) {
    throw DomainError("hjb: the extended flux has no action functional");
  }
}

Vector random_in_simplex(int n, double eps, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  Vector x = Vector::NullaryExpr(n, [&] { return e(rng); });
  x /= x.sum();
  return Vector::Constant(n, eps) + (1.0 - n * eps) * x;
}

}  // namespace

double ActionPath::continuity_defect(const WeightedGraph& g) const {
  double out = 0.0;
  const double ds = grid.dt();
  for (std::size_t k = 0; k < m.size(); ++k) {
    const Vector r = rho[k + 1] - rho[k] +
                     ds * static_cast<const Vector&>(div(g, m[k]));
    out = std::max(out, r.cwiseAbs().maxCoeff());
  }
  return out;
}

double ActionPath::min_density() const {
  double out = INFINITY;
  for (const Vector& r : rho) out = std::min(out, r.minCoeff());
  return out;
}

ActionPath path_from_fluxes(const WeightedGraph& g, const Vector& mu,
                            const UniformGrid& grid,
                            std::vector<EdgeField> m) {
  check_size(g, mu, "path_from_fluxes");
  if (static_cast<int>(m.size()) != grid.steps()) {
    throw DimensionMismatch("path_from_fluxes: one flux per interval");
  }
  ActionPath p;
  p.grid = grid;
  p.rho.reserve(grid.nodes());
  p.rho.push_back(mu);
  for (const EdgeField& mk : m) {
    p.rho.push_back(p.rho.back() -
                    grid.dt() * static_cast<const Vector&>(div(g, mk)));
  }
  p.m = std::move(m);
  return p;
}

ActionPath heat_path(const WeightedGraph& g, const Vector& mu,
                     const UniformGrid& grid) {
  check_size(g, mu, "heat_path");
  const int n = g.size();
  const double ds = grid.dt();
  const Matrix lap = g.laplacian_matrix();
  const Matrix id = Matrix::Identity(n, n);
  const Eigen::PartialPivLU<Matrix> lu(id - 0.5 * ds * lap);
  const Matrix rhs = id + 0.5 * ds * lap;
  ActionPath p;
  p.grid = grid;
  p.rho.push_back(mu);
  for (int k = 0; k < grid.steps(); ++k) {
    const Vector next = lu.solve(rhs * p.rho.back());
    p.m.push_back(-1.0 * grad(g, 0.5 * (p.rho.back() + next)));
    p.rho.push_back(next);
  }
  return p;
}

double action(const GameSpec& spec, const ActionPath& path) {
  const WeightedGraph& g = spec.graph();
  const double ds = path.grid.dt();
  double total = 0.0;
  for (std::size_t k = 0; k < path.m.size(); ++k) {
    const Vector rb = 0.5 * (path.rho[k] + path.rho[k + 1]);
    const double l = lagrangian(spec, rb, path.m[k] + grad(g, rb));
    if (!std::isfinite(l)) return INFINITY;
    total += ds * (l - spec.coupling(rb));
  }
  return total;
}

HJBValue value_by_fb(const GameSpec& spec, double t, const SimplexPoint& mu,
                     const SolverOptions& opts) {
  require_potential_game(spec);
  const WeightedGraph& g = spec.graph();
  HJBValue out;
  out.t = t;
  out.mu = mu.values();
  out.method = "fb";
  if (t == spec.horizon()) {
    out.value = spec.terminal(mu);
    out.grad_w = grad(g, spec.g(mu));
    out.min_density = mu.values().minCoeff();
    return out;
  }
  const MFGSolution sol = solve_mfg(spec, t, mu, opts);
  const UniformGrid& grid = sol.grid();
  auto integrand = [&](const Vector& rho, const Vector& phi) {
    const EdgeField w = dp_hamiltonian(spec, rho, -1.0 * grad(g, phi));
    return lagrangian(spec, rho, w) - spec.coupling(rho);
  };
  double total = 0.0;
  for (int k = 0; k < grid.steps(); ++k) {
    const double a = integrand(sol.rho[k], sol.phi[k]);
    const double b = integrand(sol.rho.midpoint(k), sol.phi.midpoint(k));
    const double c = integrand(sol.rho[k + 1], sol.phi[k + 1]);
    total += grid.dt() * (a + 4.0 * b + c) / 6.0;
  }
  out.value = total + spec.terminal(sol.rho.back());
  out.grad_w = grad(g, sol.phi.front());
  out.iterations = sol.iterations;
  out.path.grid = grid;
  out.path.rho = sol.rho.values();
  out.path.m = fb_fluxes(spec, sol, grid);
  out.min_density = sol.min_density;
  return out;
}

namespace {

// The transcription over a flat vector x[k * E + e] of interval fluxes on
// the edges (i < j), avoiding dense edge fields in the inner loop.
class Transcription {
 public:
  Transcription(const GameSpec& spec, const Vector& mu, const UniformGrid& grid)
      : spec_(spec), mu_(mu), steps_(grid.steps()), ds_(grid.dt()),
        edges_(spec.graph().edges()),
        n_(spec.size()), ne_(static_cast<int>(edges_.size())) {}

  int size() const { return steps_ * ne_; }

  Vector pack(const std::vector<EdgeField>& m) const {
    Vector x(size());
    for (int k = 0; k < steps_; ++k) {
      for (int e = 0; e < ne_; ++e) x(k * ne_ + e) = m[k](edges_[e].i, edges_[e].j);
    }
    return x;
  }

  std::vector<EdgeField> unpack(const Vector& x) const {
    std::vector<EdgeField> m(steps_, EdgeField(n_));
    for (int k = 0; k < steps_; ++k) {
      for (int e = 0; e < ne_; ++e) {
        m[k].set(edges_[e].i, edges_[e].j, x(k * ne_ + e));
      }
    }
    return m;
  }

  // Objective; fills the gradient and the derivative in mu when requested.
  double eval(const Vector& x, Vector* gx, Vector* dmu) const {
    std::vector<Vector> rho(steps_ + 1);
    rho[0] = mu_;
    for (int k = 0; k < steps_; ++k) {
      rho[k + 1] = rho[k];
      for (int e = 0; e < ne_; ++e) {
        const Edge& ed = edges_[e];
        const double f = ds_ * ed.sqrt_omega * x(k * ne_ + e);
        // rho_{k+1} = rho_k - ds div m_k with (div m)^i = -sqrt(w) m^{ij}.
        rho[k + 1](ed.i) += f;
        rho[k + 1](ed.j) -= f;
      }
      if (!(rho[k + 1].minCoeff() > kDerivativeFloor)) return INFINITY;
    }
    const EdgeCost& cost = spec_.cost();
    double total = 0.0;
    std::vector<Vector> gbar;
    Vector dw;
    if (gx) {
      gbar.assign(steps_, Vector::Zero(n_));
      dw.resize(size());
    }
    for (int k = 0; k < steps_; ++k) {
      const Vector rb = 0.5 * (rho[k] + rho[k + 1]);
      double l_sum = 0.0;
      for (int e = 0; e < ne_; ++e) {
        const Edge& ed = edges_[e];
        const double a = rb(ed.i), b = rb(ed.j);
        const double w = x(k * ne_ + e) + ed.sqrt_omega * (a - b);
        if (!gx) {
          const double th = theta(a, b);
          l_sum += th * cost.l(w / th);
          continue;
        }
        const ThetaJet jet = theta_jet(a, b);
        const double xi = w / jet.value;
        const double l = cost.l(xi), dl = cost.dl(xi);
        l_sum += jet.value * l;
        dw(k * ne_ + e) = dl;
        const double tail = l - xi * dl;
        gbar[k](ed.i) += jet.d1 * tail + ed.sqrt_omega * dl;
        gbar[k](ed.j) += jet.d2 * tail - ed.sqrt_omega * dl;
      }
      total += ds_ * (l_sum - spec_.coupling(rb));
      if (gx) gbar[k] = ds_ * (gbar[k] - spec_.coupling_grad(rb));
    }
    total += spec_.terminal(rho[steps_]);
    if (!std::isfinite(total)) return INFINITY;
    if (!gx) return total;
    gx->resize(size());
    Vector lam = spec_.terminal_grad(rho[steps_]) + 0.5 * gbar[steps_ - 1];
    for (int k = steps_ - 1; k >= 0; --k) {
      for (int e = 0; e < ne_; ++e) {
        const Edge& ed = edges_[e];
        (*gx)(k * ne_ + e) =
            ds_ * (dw(k * ne_ + e) + ed.sqrt_omega * (lam(ed.i) - lam(ed.j)));
      }
      lam += 0.5 * gbar[k];
      if (k >= 1) lam += 0.5 * gbar[k - 1];
    }
    if (dmu) *dmu = lam;
    return total;
  }

 private:
  const GameSpec& spec_;
  Vector mu_;
  int steps_;
  double ds_;
  std::vector<Edge> edges_;
  int n_, ne_;
};

}  // namespace

double direct_objective(const GameSpec& spec, const Vector& mu,
                        const UniformGrid& grid,
                        const std::vector<EdgeField>& m,
                        std::vector<EdgeField>* grad_out, Vector* dmu_out) {
  check_size(spec.graph(), mu, "direct_objective");
  if (static_cast<int>(m.size()) != grid.steps()) {
    throw DimensionMismatch("direct_objective: one flux per interval");
  }
  const Transcription tr(spec, mu, grid);
  if (!grad_out) return tr.eval(tr.pack(m), nullptr, dmu_out);
  Vector gx;
  const double f = tr.eval(tr.pack(m), &gx, dmu_out);
  if (std::isfinite(f)) *grad_out = tr.unpack(gx);
  return f;
}

HJBValue value_by_direct_min(const GameSpec& spec, double t,
                             const SimplexPoint& mu,
                             const DirectOptions& opts) {
  require_potential_game(spec);
  const WeightedGraph& g = spec.graph();
  const double T = spec.horizon();
  if (!(t >= 0.0 && t < T)) throw DomainError("direct min: need 0 <= t < T");
  const UniformGrid grid(t, T, opts.steps);
  const double ds = grid.dt();
  const Transcription tr(spec, mu.values(), grid);
  Vector x;
  if (opts.warm_start_fb) {
    const MFGSolution sol = solve_mfg(spec, t, mu, opts.fb);
    x = tr.pack(fb_fluxes(spec, sol, grid));
  } else {
    x = tr.pack(heat_path(g, mu.values(), grid).m);
  }
  Vector gx;
  double f = tr.eval(x, &gx, nullptr);
  if (!std::isfinite(f)) throw DomainError("direct min: infeasible start");
  std::deque<std::pair<Vector, Vector>> mem;
  auto gnorm = [&] { return gx.cwiseAbs().maxCoeff() / ds; };
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    if (gnorm() < opts.grad_tol) break;
    // Two-loop recursion for d = -H g.
    Vector q = gx;
    std::vector<double> alpha(mem.size());
    for (int j = static_cast<int>(mem.size()) - 1; j >= 0; --j) {
      alpha[j] = mem[j].first.dot(q) / mem[j].second.dot(mem[j].first);
      q -= alpha[j] * mem[j].second;
    }
    if (!mem.empty()) {
      const auto& [s, y] = mem.back();
      q *= s.dot(y) / y.dot(y);
    }
    for (std::size_t j = 0; j < mem.size(); ++j) {
      const auto& [s, y] = mem[j];
      q += (alpha[j] - y.dot(q) / y.dot(s)) * s;
    }
    Vector d = -q;
    double slope = gx.dot(d);
    if (!(slope < 0.0)) {
      mem.clear();
      d = -gx;
      slope = gx.dot(d);
    }
    double step = 1.0;
    bool accepted = false;
    Vector xn, gn;
    double fn = INFINITY;
    for (int b = 0; b < kMaxBacktracks; ++b) {
      xn = x + step * d;
      fn = tr.eval(xn, &gn, nullptr);
      if (std::isfinite(fn) && fn <= f + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!mem.empty()) {
        mem.clear();
        continue;
      }
      if (gnorm() < opts.stall_floor) break;
      throw LineSearchStall(
          "direct min: line search failed with gradient " +
              std::to_string(gnorm()),
          f);
    }
    Vector s = xn - x, y = gn - gx;
    if (s.dot(y) > 1e-300) {
      mem.emplace_back(std::move(s), std::move(y));
      if (static_cast<int>(mem.size()) > opts.memory) mem.pop_front();
    }
    x = std::move(xn);
    gx = std::move(gn);
    f = fn;
  }
  if (it == opts.max_iter && gnorm() >= opts.stall_floor) {
    throw NoConvergence("direct min: iteration cap reached", it, gnorm());
  }
  HJBValue out;
  out.t = t;
  out.mu = mu.values();
  out.method = "direct";
  out.value = f;
  out.iterations = it;
  out.gradient_norm = gnorm();
  out.path = path_from_fluxes(g, mu.values(), grid, tr.unpack(x));
  out.min_density = out.path.min_density();
  // At the optimum the adjoint at the first node is the derivative of the
  // discrete value in mu.
  Vector dmu, unused;
  tr.eval(x, &unused, &dmu);
  out.grad_w = grad(g, dmu);
  return out;
}

IotaBounds iota_bounds(const GameSpec& spec) {
  // Over the simplex |mu|^2 ranges in [1/n, 1]; F = -(cF/2)|mu|^2 and
  // U_T = (cT/2)|mu|^2 are extremal at the vertices.
  const ModelParams& p = spec.params();
  const double T = spec.horizon();
  const double max_f = 0.5 * std::abs(p.cF);
  const double max_ut = p.cT >= 0 ? 0.5 * p.cT : 0.5 * p.cT / spec.size();
  const double max_ut_minus = p.cT >= 0 ? 0.0 : -0.5 * p.cT;
  return {-max_ut_minus - T * max_f - T * spec.coercivity_cl(),
          T * max_f + max_ut};
}

GradientIdentityReport gradient_identity_check(const GameSpec& spec, double t,
                                               const SimplexPoint& mu,
                                               const SolverOptions& opts,
                                               double h_mu) {
  require_potential_game(spec);
  const WeightedGraph& g = spec.graph();
  const int n = g.size();
  const MFGSolution base = solve_mfg(spec, t, mu, opts);
  const std::vector<Edge> tree = g.spanning_tree();
  const Matrix basis = tangent_basis(n);
  Matrix dirs(n, n - 1);
  for (int k = 0; k < n - 1; ++k) {
    dirs.col(k) = (Vector::Unit(n, tree[k].i) - Vector::Unit(n, tree[k].j)) /
                  std::sqrt(2.0);
  }
  const Matrix vd = basis.transpose() * dirs;
  GradientIdentityReport r;
  const int mid = base.grid().steps() / 2;
  for (int node : {0, mid}) {
    const double s = base.grid().time(node);
    const Vector& rho = base.rho[node];
    SolverOptions o = opts;
    o.steps = base.grid().steps() - node;
    Vector c(n - 1);
    for (int k = 0; k < n - 1; ++k) {
      const double up =
          value_by_fb(spec, s, SimplexPoint(rho + h_mu * dirs.col(k)), o).value;
      const double dn =
          value_by_fb(spec, s, SimplexPoint(rho - h_mu * dirs.col(k)), o).value;
      c(k) = (up - dn) / (2.0 * h_mu);
    }
    // delta U = V x with (V^T D)^T x = c.
    const Vector x = vd.transpose().partialPivLu().solve(c);
    const EdgeField fd = grad(g, basis * x);
    const double gap = (fd - grad(g, base.phi[node])).max_abs();
    r.times.push_back(s);
    r.gaps.push_back(gap);
    r.max_gap = std::max(r.max_gap, gap);
  }
  return r;
}

HJBResidual hjb_residual(const GameSpec& spec, double t,
                         const SimplexPoint& mu, double h_t,
                         const SolverOptions& opts) {
  require_potential_game(spec);
  const WeightedGraph& g = spec.graph();
  const double T = spec.horizon();
  if (!(t > 0.0 && t < T)) throw DomainError("hjb_residual: need 0 < t < T");
  if (!(h_t > 0.0)) throw DomainError("hjb_residual: h_t must be > 0");
  const HJBValue here = value_by_fb(spec, t, mu, opts);
  auto val = [&](double s) { return value_by_fb(spec, s, mu, opts).value; };
  HJBResidual r;
  if (t - h_t >= 0.0 && t + h_t <= T) {
    r.time_scheme = "central";
    r.dt_value = (val(t + h_t) - val(t - h_t)) / (2.0 * h_t);
  } else if (t + h_t > T) {
    if (t - 2.0 * h_t < 0.0) throw DomainError("hjb_residual: h_t too big");
    r.time_scheme = "backward";
    r.dt_value = (3.0 * here.value - 4.0 * val(t - h_t) +
                  val(t - 2.0 * h_t)) / (2.0 * h_t);
  } else {
    if (t + 2.0 * h_t > T) throw DomainError("hjb_residual: h_t too big");
    r.time_scheme = "forward";
    r.dt_value = (-3.0 * here.value + 4.0 * val(t + h_t) -
                  val(t + 2.0 * h_t)) / (2.0 * h_t);
  }
  const Vector& m = mu.values();
  r.residual = -r.dt_value + hamiltonian(spec, m, -1.0 * here.grad_w) -
               individual_noise(g, m, here.grad_w) + spec.coupling(m);
  return r;
}

double convexity_margin(const GameSpec& spec, double t, const Vector& mu0,
                        const Vector& mu1, double s,
                        const SolverOptions& opts) {
  const double u0 = value_by_fb(spec, t, SimplexPoint(mu0), opts).value;
  const double u1 = value_by_fb(spec, t, SimplexPoint(mu1), opts).value;
  const double us =
      value_by_fb(spec, t, SimplexPoint(s * mu0 + (1 - s) * mu1), opts).value;
  return s * u0 + (1 - s) * u1 - us;
}

ConvexityReport convexity_probe(const GameSpec& spec, double t, int samples,
                                std::uint64_t seed, const SolverOptions& opts,
                                double eps) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> us(0.1, 0.9);
  ConvexityReport r;
  r.min_margin = INFINITY;
  for (int k = 0; k < samples; ++k) {
    const Vector a = random_in_simplex(spec.size(), eps, rng);
    const Vector b = random_in_simplex(spec.size(), eps, rng);
    const double m = convexity_margin(spec, t, a, b, us(rng), opts);
    r.margins.push_back(m);
    r.min_margin = std::min(r.min_margin, m);
  }
  return r;
}

SemiconcavityReport semiconcavity_probe(const GameSpec& spec, double t,
                                        const SimplexPoint& mu, double h,
                                        const SolverOptions& opts) {
  SemiconcavityReport r;
  r.h = h;
  if (h == 0.0) return r;
  const WeightedGraph& g = spec.graph();
  const int n = g.size();
  std::vector<Vector> dirs;
  const Matrix basis = tangent_basis(n);
  for (int k = 0; k < n - 1; ++k) dirs.push_back(basis.col(k));
  for (const Edge& e : g.spanning_tree()) {
    dirs.push_back((Vector::Unit(n, e.i) - Vector::Unit(n, e.j)) /
                   std::sqrt(2.0));
  }
  const double u0 = value_by_fb(spec, t, mu, opts).value;
  auto ratio = [&](double step) {
    double worst = -INFINITY;
    for (const Vector& d : dirs) {
      const Vector& m = mu.values();
      const double up = value_by_fb(spec, t, SimplexPoint(m + step * d), opts)
                            .value;
      const double dn = value_by_fb(spec, t, SimplexPoint(m - step * d), opts)
                            .value;
      worst = std::max(worst, (up + dn - 2.0 * u0) / (step * step));
    }
    return worst;
  };
  r.ratio = ratio(h);
  r.ratio_half = ratio(0.5 * h);
  return r;
}

HolderReport holder_check(const GameSpec& spec, const ActionPath& path) {
  const double p0 = spec.params().p0;
  HolderReport r;
  r.exponent = 1.0 - 1.0 / p0;  // 1 / p0' with p0' = p0 / (p0 - 1)
  const double ds = path.grid.dt();
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < path.rho.size(); ++k) {
    acc += ds * std::pow((path.rho[k + 1] - path.rho[k]).norm() / ds, p0);
  }
  r.rho_dot_norm = std::pow(acc, 1.0 / p0);
  if (r.rho_dot_norm == 0.0) return r;
  const int n = static_cast<int>(path.rho.size());
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const double span = (b - a) * ds;
      r.max_ratio = std::max(r.max_ratio,
                             (path.rho[b] - path.rho[a]).norm() /
                                 (std::pow(span, r.exponent) * r.rho_dot_norm));
    }
  }
  return r;
}

}  // namespace graphmfg
