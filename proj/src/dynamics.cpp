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

#include "graphmfg/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "graphmfg/errors.hpp"

namespace graphmfg {
namespace {

struct Stepper {
  const WeightedGraph& g;
  const FluxSpec& flux;
  int rejected = 0;
  double min_substep = INFINITY;

  // Returns false if an intermediate state leaves the floor.
  bool rhs(double s, const Vector& y, Vector& out) const {
    if (!(y.minCoeff() > kDensityFloor)) return false;
    out = div(g, flux.flux(s, y)).values() + laplacian(g, y);
    return true;
  }

  bool try_step(double s, const Vector& y, double h, Vector& out) const {
    Vector k1, k2, k3, k4;
    if (!rhs(s, y, k1)) return false;
    if (!rhs(s + 0.5 * h, y + 0.5 * h * k1, k2)) return false;
    if (!rhs(s + 0.5 * h, y + 0.5 * h * k2, k3)) return false;
    if (!rhs(s + h, y + h * k3, k4)) return false;
    out = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    return out.minCoeff() > kDensityFloor;
  }

  Vector advance(double s, const Vector& y, double h, int depth) {
    Vector out;
    bool ok = false;
    try {
      ok = try_step(s, y, h, out);
    } catch (const DomainError&) {
      ok = false;  // a stage produced a negative density
    }
    if (ok) {
      min_substep = std::min(min_substep, h);
      return out;
    }
    if (depth >= kMaxHalvings) {
      throw NonPositiveDensity(
          "continuity equation: density floor reached at s = " +
          std::to_string(s) + " after " + std::to_string(kMaxHalvings) +
          " step halvings");
    }
    if (++rejected > kMaxRejectedSteps) {
      // Creeping towards the floor with ever smaller sub-steps.
      throw NonPositiveDensity(
          "continuity equation: density floor approached at s = " +
          std::to_string(s) + " after " + std::to_string(kMaxRejectedSteps) +
          " rejected steps");
    }
    const Vector mid = advance(s, y, 0.5 * h, depth + 1);
    return advance(s + 0.5 * h, mid, 0.5 * h, depth + 1);
  }
};

}  // namespace

DensityTrajectory integrate_continuity(const WeightedGraph& g,
                                       const FluxSpec& flux,
                                       const SimplexPoint& mu0, double t0,
                                       double t1, double dt) {
  check_size(g, mu0, "integrate_continuity");
  if (!(dt > 0.0)) throw DomainError("integrate_continuity: dt must be > 0");
  const int steps =
      std::max(3, static_cast<int>(std::ceil((t1 - t0) / dt - 1e-9)));
  UniformGrid grid(t0, t1, steps);
  Stepper st{g, flux};
  std::vector<Vector> rho;
  rho.reserve(steps + 1);
  rho.push_back(mu0.values());
  for (int k = 0; k < steps; ++k) {
    rho.push_back(st.advance(grid.time(k), rho.back(), grid.dt(), 0));
  }
  DensityTrajectory out;
  out.rho = VectorSeries(grid, std::move(rho));
  out.base_dt = grid.dt();
  out.rejected_steps = st.rejected;
  out.min_substep = st.min_substep;
  return out;
}

double flux_domination_violation(const WeightedGraph& g, const FluxSpec& flux,
                                 double t, int samples, std::uint64_t seed) {
  if (!flux.dominating) throw DomainError("flux has no dominating profile");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> logu(std::log(1e-6), 0.0);
  const int n = g.size();
  double worst = -INFINITY;
  for (int k = 0; k < samples; ++k) {
    Vector mu(n);
    for (int i = 0; i < n; ++i) mu(i) = std::exp(logu(rng));
    mu /= mu.sum();
    const EdgeField a = flux.flux(t, mu);
    for (const Edge& e : g.edges()) {
      const double bound =
          (mu(e.i) + mu(e.j)) * flux.dominating(mu(e.j) / mu(e.i));
      // Relative slack for rounding in the saturating case.
      worst = std::max(worst, std::abs(a(e.i, e.j)) - bound * (1 + 1e-12));
    }
  }
  return worst;
}

InteriorityReport interiority_report(const DensityTrajectory& traj,
                                     double eps) {
  if (!(eps > 0.0)) throw DomainError("interiority_report: eps must be > 0");
  InteriorityReport r;
  r.eps = eps;
  const UniformGrid& grid = traj.rho.grid();
  const double s0 = grid.t0();
  for (int k = 0; k < traj.rho.nodes(); ++k) {
    r.times.push_back(grid.time(k));
    r.min_profile.push_back(traj.rho[k].minCoeff());
  }
  double rate = 0.0;
  for (std::size_t k = 1; k < r.times.size(); ++k) {
    const double s = r.times[k] - s0;
    rate = std::max(rate, -std::log(r.min_profile[k] / eps) / s);
  }
  double c = INFINITY;
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    const double s = r.times[k] - s0;
    c = std::min(c, r.min_profile[k] / (eps * std::exp(-rate * s)));
  }
  r.fitted_r = rate;
  r.fitted_c = c;
  r.bound_holds = std::isfinite(rate) && c > 0.0 && std::isfinite(c);
  return r;
}

SmallnessReport smallness_propagation_probe(const WeightedGraph& g,
                                            const DensityTrajectory& traj,
                                            double delta) {
  SmallnessReport r;
  const int n = g.size();
  int hit = -1;
  for (int k = 0; k < traj.rho.nodes(); ++k) {
    if (traj.rho[k].minCoeff() <= delta) {
      hit = k;
      break;
    }
  }
  if (hit < 0) return r;
  r.reached = true;
  r.t0 = traj.rho.grid().time(hit);
  traj.rho[hit].minCoeff(&r.vertex);
  r.min_before.assign(n, INFINITY);
  for (int k = 0; k <= hit; ++k) {
    for (int i = 0; i < n; ++i) {
      r.min_before[i] = std::min(r.min_before[i], traj.rho[k](i));
    }
  }
  r.distance = g.hop_distances(r.vertex);
  for (int i = 0; i < n; ++i) {
    r.ratio.push_back(r.min_before[i] / delta);
    r.fitted_k = std::max(r.fitted_k, r.ratio.back());
  }
  return r;
}

WaitingTimeReport waiting_time_probe(const DensityTrajectory& traj, double k,
                                     double delta) {
  WaitingTimeReport r;
  const UniformGrid& grid = traj.rho.grid();
  auto first_crossing = [&](double level) -> std::optional<double> {
    double prev = traj.rho[0].minCoeff();
    if (prev <= level) return grid.t0();
    for (int j = 1; j < traj.rho.nodes(); ++j) {
      const double cur = traj.rho[j].minCoeff();
      if (cur <= level) {
        const double frac = (prev - level) / (prev - cur);
        return grid.time(j - 1) + frac * grid.dt();
      }
      prev = cur;
    }
    return std::nullopt;
  };
  r.t0 = first_crossing(delta);
  if (r.t0) {
    r.t1 = first_crossing(delta / (2.0 * k));
    if (r.t1) r.gap = *r.t1 - *r.t0;
  }
  return r;
}

}  // namespace graphmfg
