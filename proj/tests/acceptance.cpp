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


// Acceptance run: one [PASS]/[FAIL] line per criterion, exit 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "graphmfg/dynamics.hpp"
#include "graphmfg/hjb.hpp"
#include "graphmfg/master_eq.hpp"
#include "graphmfg/mfg_solver.hpp"
#include "graphmfg/model.hpp"
#include "graphmfg/nash_sim.hpp"
#include "graphmfg/theta.hpp"

namespace graphmfg {
namespace {

// Collects the quantities behind one criterion.
class Criterion {
 public:
  Criterion(std::string id, std::string title, double budget_s)
      : id_(std::move(id)), title_(std::move(title)), budget_(budget_s),
        start_(std::chrono::steady_clock::now()) {}

  void at_most(const std::string& what, double value, double bound) {
    add(what, value, "<=", bound, value <= bound);
  }
  void at_least(const std::string& what, double value, double bound) {
    add(what, value, ">=", bound, value >= bound);
  }
  void above(const std::string& what, double value, double bound) {
    add(what, value, ">", bound, value > bound);
  }
  void below(const std::string& what, double value, double bound) {
    add(what, value, "<", bound, value < bound);
  }
  void holds(const std::string& what, bool ok) {
    parts_.push_back(what + (ok ? " yes" : " NO"));
    ok_ = ok_ && ok;
  }
  void note(const std::string& text) { parts_.push_back(text); }
  void error(const std::string& what) {
    parts_.push_back("exception: " + what);
    ok_ = false;
  }

  bool finish() {
    const double s = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start_).count();
    below("runtime_s", s, budget_);
    std::string line = std::string(ok_ ? "[PASS] " : "[FAIL] ") + id_ + " " +
                       title_ + ":";
    for (std::size_t k = 0; k < parts_.size(); ++k) {
      line += (k == 0 ? " " : "; ") + parts_[k];
    }
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    return ok_;
  }

 private:
  void add(const std::string& what, double value, const char* rel,
           double bound, bool ok) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s %.3g %s %.3g%s", what.c_str(), value,
                  rel, bound, ok ? "" : " (violated)");
    parts_.emplace_back(buf);
    ok_ = ok_ && ok;
  }

  std::string id_, title_;
  double budget_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> parts_;
  bool ok_ = true;
};

bool run(Criterion c, const std::function<void(Criterion&)>& body) {
  try {
    body(c);
  } catch (const std::exception& e) {
    c.error(e.what());
  }
  return c.finish();
}

SimplexPoint point(std::initializer_list<double> v) {
  Vector mu(static_cast<Eigen::Index>(v.size()));
  int k = 0;
  for (double x : v) mu(k++) = x;
  return SimplexPoint(mu);
}

SimplexPoint baseline_mu() { return point({0.4, 0.3, 0.2, 0.1}); }
GameSpec baseline_spec() { return GameSpec(cycle_graph(4), ModelParams{}, 1.0); }

SolverOptions tight(int steps = 1000) {
  SolverOptions o;
  o.steps = steps;
  o.tol = 1e-13;
  return o;
}

int worker_threads() {
  return static_cast<int>(
      std::clamp(std::thread::hardware_concurrency(), 1u, 8u));
}

// Connected graph on 2..12 vertices: random tree plus random chords, weights
// log-uniform in [0.1, 10].
WeightedGraph random_graph(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(2, 12);
  std::uniform_real_distribution<double> lw(std::log(0.1), std::log(10.0));
  std::uniform_real_distribution<double> u01;
  const int n = size(rng);
  std::vector<std::tuple<int, int, double>> edges;
  Matrix used = Matrix::Zero(n, n);
  for (int j = 1; j < n; ++j) {
    const int i = std::uniform_int_distribution<int>(0, j - 1)(rng);
    edges.emplace_back(i, j, std::exp(lw(rng)));
    used(i, j) = 1;
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (used(i, j) == 0 && u01(rng) < 0.3) {
        edges.emplace_back(i, j, std::exp(lw(rng)));
      }
  return WeightedGraph(n, edges);
}

Vector random_vector(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> z(0.0, scale);
  return Vector::NullaryExpr(n, [&] { return z(rng); });
}

EdgeField random_field(const WeightedGraph& g, std::mt19937_64& rng,
                       double scale = 1.0) {
  std::normal_distribution<double> z(0.0, scale);
  EdgeField m(g.size());
  for (const Edge& e : g.edges()) m.set(e.i, e.j, z(rng));
  return m;
}

Vector random_interior(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> lu(std::log(1e-3), 0.0);
  Vector mu = Vector::NullaryExpr(n, [&] { return std::exp(lu(rng)); });
  return mu / mu.sum();
}

double rel(double x) { return std::max(1.0, std::abs(x)); }

// ---------------------------------------------------------------------------

void graph_identities(Criterion& c) {
  std::mt19937_64 rng(101);
  double ibp = 0.0, lap = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const WeightedGraph g = random_graph(rng);
    const EdgeField m = random_field(g, rng);
    const Vector u = random_vector(g.size(), rng);
    const double lhs = div(g, m).values().dot(u);
    ibp = std::max(ibp, std::abs(lhs + edge_inner(m, grad(g, u))) / rel(lhs));
    const Vector a = laplacian(g, u);
    const Vector b = div(g, grad(g, u)).values();
    lap = std::max(lap, (a - b).cwiseAbs().maxCoeff() / rel(a.cwiseAbs().maxCoeff()));
  }
  std::uniform_real_distribution<double> lu(std::log(1e-8), std::log(1e2));
  double euler = 0.0, exchange = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double r = std::exp(lu(rng)), s = std::exp(lu(rng));
    const ThetaJet j = theta_jet(r, s);
    euler = std::max(euler, std::abs(r * j.d1 + s * j.d2 - j.value) / rel(j.value));
    exchange = std::max(exchange,
                        std::abs(j.d1 - theta_d2(s, r)) / rel(j.d1));
  }
  c.at_most("integration_by_parts", ibp, 1e-12);
  c.at_most("theta_euler", euler, 1e-10);
  c.at_most("theta_exchange", exchange, 1e-12);
  c.at_most("laplacian_div_grad", lap, 1e-12);
}

void duality(Criterion& c) {
  std::mt19937_64 rng(202);
  const WeightedGraph g = complete_graph(4);
  double scalar_fy = 0.0, fy = 0.0, dual = 0.0;
  const double exponents[] = {1.5, 2.0, 3.0, 4.0};
  std::uniform_real_distribution<double> s_dist(-2.0, 2.0);
  for (int k = 0; k < 1000; ++k) {
    const double p0 = exponents[k % 4];
    const EdgeCost cost = EdgeCost::power(p0);
    const double s = s_dist(rng);
    const double p = cost.dl(s);
    scalar_fy = std::max(scalar_fy, std::abs(cost.l(s) + cost.h(p) - s * p) /
                                        rel(s * p));
    ModelParams mp;
    mp.family = p0 == 2.0 ? Family::kQuadratic : Family::kPower;
    mp.p0 = p0;
    const GameSpec spec(g, mp, 1.0);
    const Vector mu = random_interior(4, rng);
    const EdgeField m = random_field(g, rng, 0.5);
    const EdgeField pm = dm_lagrangian(spec, mu, m);
    const double mp_inner = edge_inner(m, pm);
    fy = std::max(fy, std::abs(lagrangian(spec, mu, m) +
                               hamiltonian(spec, mu, pm) - mp_inner) /
                          rel(mp_inner));
    const EdgeField w = random_field(g, rng, 0.5);
    // Relative to the terms: for p0 > 2 and small theta both sides reach
    // ~1e5 and cancel to the last bits.
    const Vector dl = dmu_lagrangian(spec, mu, w);
    const Vector d = dl + dmu_hamiltonian(spec, mu, dm_lagrangian(spec, mu, w));
    dual = std::max(dual, d.cwiseAbs().maxCoeff() / rel(dl.cwiseAbs().maxCoeff()));
  }
  const WeightedGraph k5 = complete_graph(5);
  const GameSpec quad(k5, ModelParams{}, 1.0);
  double mobility = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Vector mu = random_interior(5, rng);
    const EdgeField p = random_field(k5, rng);
    const EdgeField d = dp_hamiltonian(quad, mu, p);
    for (const Edge& e : k5.edges()) {
      const double rhs = (mu(e.i) + mu(e.j)) * h_log(mu(e.j) / mu(e.i)) *
                         std::abs(p(e.i, e.j));
      mobility = std::max(mobility, std::abs(std::abs(d(e.i, e.j)) - rhs));
    }
  }
  c.at_most("fenchel_young_scalar", scalar_fy, 1e-10);
  c.at_most("fenchel_young", fy, 1e-9);
  c.at_most("dmu_duality", dual, 1e-8);
  c.at_most("mobility_identity", mobility, 1e-10);
}

// Flux of size m theta(mu^i, mu^j) pushing mass away from `sink`.
FluxSpec draining_flux(const WeightedGraph& g, int sink, double m,
                       bool alternate = false) {
  FluxSpec f;
  const std::vector<int> dist = g.hop_distances(sink);
  f.flux = [&g, dist, m, alternate](double s, const Vector& mu) {
    const double sign = alternate && std::sin(6.0 * s) < 0 ? -1.0 : 1.0;
    EdgeField a(mu.size());
    for (const Edge& e : g.edges()) {
      const double dir = dist[e.i] < dist[e.j]   ? 1.0
                         : dist[e.i] > dist[e.j] ? -1.0
                                                 : 0.0;
      a.set(e.i, e.j, sign * dir * m * theta(mu(e.i), mu(e.j)));
    }
    return a;
  };
  f.dominating = [m](double u) { return m * h_log(u); };
  return f;
}

FluxSpec zero_flux() {
  return {[](double, const Vector& mu) { return EdgeField(mu.size()); },
          [](double) { return 0.0; }};
}

void continuity(Criterion& c) {
  const WeightedGraph k2 = complete_graph(2);
  const auto heat = [&](double dt) {
    const auto tr =
        integrate_continuity(k2, zero_flux(), point({0.9, 0.1}), 0.0, 1.0, dt);
    return std::abs(tr.rho.back()(0) - 0.5 - 0.4 * std::exp(-2.0));
  };
  c.at_most("k2_closed_form", heat(1e-3), 1e-8);
  c.at_least("rk4_order_factor_heat", heat(0.1) / heat(0.05), 12.0);
  const FluxSpec drain = draining_flux(k2, 0, 1.0);
  const auto err = [&](double dt) {
    const auto a = integrate_continuity(k2, drain, point({0.7, 0.3}), 0, 1, dt);
    const auto r =
        integrate_continuity(k2, drain, point({0.7, 0.3}), 0, 1, dt / 4);
    return (a.rho.back() - r.rho.back()).cwiseAbs().maxCoeff();
  };
  c.at_least("rk4_order_factor_nonlinear", err(0.05) / err(0.025), 12.0);

  const WeightedGraph c6 = cycle_graph(6, 1.5);
  const GameSpec spec(c6, ModelParams{}, 1.0);
  FluxSpec f;
  f.flux = [&](double s, const Vector& mu) {
    Vector u(6);
    for (int i = 0; i < 6; ++i) u(i) = std::sin(3.0 * s + i);
    return dp_hamiltonian(spec, mu, grad(c6, u));
  };
  const auto tr = integrate_continuity(
      c6, f, point({0.3, 0.05, 0.2, 0.1, 0.25, 0.1}), 0.0, 1.0, 5e-4);
  double drift = 0.0;
  for (int k = 0; k < tr.rho.nodes(); ++k) {
    drift = std::max(drift, std::abs(tr.rho[k].sum() - 1.0));
  }
  c.at_most("mass_drift", drift, 1e-10);

  const WeightedGraph p5 = path_graph(5);
  const std::vector<std::pair<const WeightedGraph*, FluxSpec>> cases = {
      {&c6, draining_flux(c6, 0, 1.0)},
      {&c6, draining_flux(c6, 0, 5.0)},
      {&c6, draining_flux(c6, 2, 3.0, true)},
      {&p5, draining_flux(p5, 0, 4.0)},
      {&k2, draining_flux(k2, 0, 10.0)},
  };
  int envelopes = 0;
  double worst_c = INFINITY, worst_r = 0.0;
  for (const auto& [g, flux] : cases) {
    const auto t = integrate_continuity(
        *g, flux, SimplexPoint::uniform(g->size()), 0.0, 2.0, 1e-3);
    const InteriorityReport r = interiority_report(t, 0.05);
    if (r.bound_holds && std::isfinite(r.fitted_r) && r.fitted_c > 0.0) {
      ++envelopes;
    }
    worst_c = std::min(worst_c, r.fitted_c);
    worst_r = std::max(worst_r, r.fitted_r);
  }
  c.note("envelope fits: min c " + std::to_string(worst_c) + ", max r " +
         std::to_string(worst_r));
  c.at_least("adversarial_envelopes", envelopes, 5);
}

void mfg(Criterion& c) {
  const GameSpec spec = baseline_spec();
  const SolverOptions o = tight();
  const MFGSolution base = solve_mfg(spec, 0.0, baseline_mu(), o);
  c.at_most("baseline_residual", base.residual(), 1e-6);
  c.at_most("baseline_initial_residual", base.initial_residual, 1e-6);
  ModelParams ext;
  ext.beta = 0.05;
  const GameSpec extended(cycle_graph(4), ext, 1.0);
  const MFGSolution e = solve_mfg(extended, 0.0, baseline_mu(), o);
  c.at_most("extended_residual", e.residual(), 1e-6);
  c.at_most("uniqueness", uniqueness_probe(spec, base, o, 3, 11), 1e-6);
  c.at_most("flow_property", flow_property_check(spec, base, 0.5, o), 1e-6);
  c.at_most("lasry_lions", lasry_lions_probe(spec, base), 0.0);
}

void linearization(Criterion& c) {
  const GameSpec spec = baseline_spec();
  const SimplexPoint mu = baseline_mu();
  const SolverOptions o = tight();
  const MFGSolution base = picard_solve(spec, 0.0, mu, 1.0, o);
  const ShootingOperator op(spec, base);
  c.below("shooting_condition", op.condition(), kMaxShootingCondition);
  const LinearizedSolution zero = op.solve(Vector::Zero(4));
  double z = 0.0;
  for (int k = 0; k < zero.psi.nodes(); ++k) {
    z = std::max({z, zero.psi[k].cwiseAbs().maxCoeff(),
                  zero.eta[k].cwiseAbs().maxCoeff()});
  }
  c.at_most("nu_zero", z, 0.0);
  Vector nu(4);
  nu << 1.0, -0.5, -0.75, 0.25;
  const LinearizedSolution lin = op.solve(nu);
  std::vector<double> gaps;
  for (double h : {1e-3, 1e-4}) {
    const MFGSolution p = picard_solve(
        spec, 0.0, SimplexPoint(mu.values() + h * nu), 1.0, o);
    const MFGSolution m = picard_solve(
        spec, 0.0, SimplexPoint(mu.values() - h * nu), 1.0, o);
    double gap = 0.0;
    for (int k = 0; k < p.phi.nodes(); ++k) {
      const Vector fd = (p.phi[k] - m.phi[k]) / (2 * h);
      gap = std::max(gap, (fd - lin.psi[k]).cwiseAbs().maxCoeff());
    }
    gaps.push_back(gap);
  }
  c.at_most("fd_gap_h1e-3", gaps[0], 1e-5);
  c.at_most("fd_gap_h1e-4", gaps[1], 1e-7);
  // Second order: a tenfold smaller step gives a ~100x smaller gap.
  c.at_least("observed_order", std::log10(gaps[0] / gaps[1]), 1.7);
}

void master(Criterion& c) {
  const GameSpec spec = baseline_spec();
  const SolverOptions o = tight();
  double worst = 0.0;
  int samples = 0;
  for (const SimplexPoint& mu :
       {baseline_mu(), point({0.1, 0.2, 0.3, 0.4})}) {
    for (double t : {0.2, 0.35, 0.5, 0.65, 0.8}) {
      const MasterResidual r = master_residual(spec, t, mu, 2.5e-3, o);
      worst = std::max(worst, r.norm);
      ++samples;
    }
  }
  c.at_least("samples", samples, 10);
  c.below("max_residual", worst, 1e-4);
  std::vector<double> norms;
  for (double ht : {1e-2, 5e-3, 2.5e-3, 1.25e-3}) {
    norms.push_back(master_residual(spec, 0.5, baseline_mu(), ht, o).norm);
  }
  double lo = INFINITY, hi = 0.0;
  for (int k = 1; k < 4; ++k) {
    lo = std::min(lo, norms[k - 1] / norms[k]);
    hi = std::max(hi, norms[k - 1] / norms[k]);
  }
  c.at_least("min_halving_ratio", lo, 3.5);
  c.at_most("max_halving_ratio", hi, 4.5);
  const MFGSolution base = picard_solve(spec, 0.0, baseline_mu(), 1.0, o);
  c.at_most("trajectory_consistency",
            trajectory_consistency(spec, base, {0.25, 0.5, 0.75}, o), 1e-6);
}

void hjb(Criterion& c) {
  const GameSpec spec = baseline_spec();
  const SolverOptions o = tight();
  const IotaBounds ib = iota_bounds(spec);
  const std::vector<std::pair<double, SimplexPoint>> points = {
      {0.0, baseline_mu()},
      {0.0, point({0.1, 0.1, 0.1, 0.7})},
      {0.0, point({0.05, 0.6, 0.05, 0.3})},
      {0.25, baseline_mu()},
      {0.5, point({0.1, 0.2, 0.3, 0.4})},
  };
  double value_gap = 0.0, residual = 0.0;
  bool bounds = true;
  for (const auto& [t, mu] : points) {
    const HJBValue fb = value_by_fb(spec, t, mu, o);
    const HJBValue dm = value_by_direct_min(spec, t, mu, DirectOptions{});
    value_gap = std::max(value_gap, std::abs(dm.value - fb.value) /
                                        (1.0 + std::abs(fb.value)));
    for (double v : {fb.value, dm.value}) {
      bounds = bounds && ib.lower <= v && v <= ib.upper;
    }
    const double s = t > 0.0 ? t : 0.5;
    residual = std::max(
        residual, std::abs(hjb_residual(spec, s, mu, 2.5e-3, o).residual));
  }
  c.at_most("relative_value_gap", value_gap, 1e-4);
  c.holds("iota_bounds", bounds);
  c.below("hjb_residual", residual, 1e-4);
  const double gi = std::max(
      gradient_identity_check(spec, 0.0, baseline_mu(), o).max_gap,
      gradient_identity_check(spec, 0.25, point({0.1, 0.2, 0.3, 0.4}), o)
          .max_gap);
  c.below("gradient_identity", gi, 1e-4);
  const ConvexityReport cv = convexity_probe(spec, 0.0, 20, 52, tight(400));
  c.at_least("chords", static_cast<double>(cv.margins.size()), 20);
  c.above("min_convexity_margin", cv.min_margin, 0.0);
  const SemiconcavityReport sc =
      semiconcavity_probe(spec, 0.0, baseline_mu(), 1e-2, tight(400));
  c.holds("semiconcavity_finite", std::isfinite(sc.ratio));
  c.at_most("semiconcavity_stability",
            std::abs(sc.ratio_half / sc.ratio - 1.0), 0.05);
}

void nash(Criterion& c) {
  const GameSpec spec = baseline_spec();
  const SimplexPoint mu = baseline_mu();
  NashOptions o;
  o.solver.tol = 1e-12;
  o.mc_paths = 100000;
  o.threads = worker_threads();
  const NashReport r = nash_certificate(spec, mu, o);
  if (!r.admissible) {
    c.note("NOT-APPLICABLE: " + std::to_string(r.violations.size()) +
           " rate violations, margin " + std::to_string(r.margin));
    return;
  }
  c.above("rate_margin", r.margin, 0.0);
  c.at_most("equality_gap", r.equality_gap, 1e-5);
  c.note("deviations " + std::to_string(r.deviations.size()));
  c.at_least("min_deviation_gap", r.min_deviation_gap, -1e-8);
  c.at_least("mc_paths", r.mc.n_paths, 100000);
  c.at_most("mc_max_zscore", r.max_mc_zscore, 3.0);

  const EquilibriumControl eq = optimal_control(spec, mu, o.solver);
  const auto psi = propagator(eq.q, 0);
  double rows = 0.0;
  for (const Matrix& m : psi) {
    rows = std::max(rows, (m.rowwise().sum().array() - 1.0).abs().maxCoeff());
  }
  const int mid = eq.q.grid.steps() / 2;
  const double ck =
      (psi.back() - psi[mid] * propagator(eq.q, mid).back()).cwiseAbs().maxCoeff();
  c.at_most("row_stochastic", rows, 1e-10);
  c.at_most("chapman_kolmogorov", ck, 1e-8);

  const MFGSolution& sol = eq.solution;
  std::vector<Vector> fd;
  for (int k = 0; k < sol.grid().nodes(); ++k) {
    fd.push_back(spec.H(sol.rho[k], grad(spec.graph(), sol.phi[k])) -
                 laplacian(spec.graph(), sol.phi[k]));
  }
  const VectorSeries fdot(sol.grid(), fd);
  double z = 0.0, identity = 0.0;
  for (int i = 0; i < 4; ++i) {
    const MartingaleReport m = martingale_probe(eq.q, sol.phi, fdot, i, 20000,
                                                o.seed + 1 + i, o.threads);
    z = std::max(z, std::abs(m.mean) / m.stderr_);
    identity = std::max(identity, m.max_identity_error);
  }
  c.at_most("martingale_zscore", z, 4.0);
  c.at_most("martingale_identity", identity, 1e-8);

  const VectorSeries running = running_cost(spec, sol.rho, eq.v);
  const Vector terminal = spec.g(sol.rho.back());
  const MCEstimate a = cost_J_mc(eq.q, running, terminal, 5000, 99, 1);
  const MCEstimate b = cost_J_mc(eq.q, running, terminal, 5000, 99, o.threads);
  const MCEstimate d = cost_J_mc(eq.q, running, terminal, 5000, 100, 1);
  c.holds("mc_deterministic",
          a.mean == b.mean && a.stderr_ == b.stderr_ && !(a.mean == d.mean));
}

void torus(Criterion& c) {
  const std::vector<TorusPoint> sweep =
      torus_admissibility_sweep({4, 8, 16}, ModelParams{}, 1.0, 0.5, tight());
  std::string margins;
  double increase = INFINITY;
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%sn=%d h=%g margin=%.6g",
                  k == 0 ? "" : ", ", sweep[k].n, sweep[k].mesh,
                  sweep[k].margin);
    margins += buf;
    if (k > 0) increase = std::min(increase, sweep[k].margin - sweep[k - 1].margin);
  }
  c.note(margins);
  c.at_least("sizes", static_cast<double>(sweep.size()), 3);
  c.above("min_margin_increase", increase, 0.0);
}

}  // namespace
}  // namespace graphmfg

int main() {
  using namespace graphmfg;
  bool ok = true;
  ok &= run(Criterion("AC1", "graph-calculus identities", 1.0), graph_identities);
  ok &= run(Criterion("AC2", "Legendre duality", 2.0), duality);
  ok &= run(Criterion("AC3", "continuity equation", 10.0), continuity);
  ok &= run(Criterion("AC4", "MFG solver", 60.0), mfg);
  ok &= run(Criterion("AC5", "linearization", 30.0), linearization);
  ok &= run(Criterion("AC6", "master equation", 120.0), master);
  ok &= run(Criterion("AC7", "HJB", 180.0), hjb);
  ok &= run(Criterion("AC8", "Nash certification", 240.0), nash);
  ok &= run(Criterion("AC9", "torus admissibility sweep", 120.0), torus);
  std::printf("%s\n", ok ? "all acceptance criteria passed"
                         : "some acceptance criteria failed");
  return ok ? 0 : 1;
}
