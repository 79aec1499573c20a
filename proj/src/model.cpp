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

#include "graphmfg/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "graphmfg/errors.hpp"

namespace graphmfg {

EdgeCost EdgeCost::quadratic() { return EdgeCost(); }

EdgeCost EdgeCost::power(double p0) {
  if (!(p0 > 1.0)) throw DomainError("power family needs p0 > 1");
  EdgeCost c;
  c.family_ = Family::kPower;
  c.p0_ = p0;
  c.q_ = p0 / (p0 - 1.0);
  return c;
}

double EdgeCost::l(double s) const {
  if (family_ == Family::kQuadratic) return 0.5 * s * s;
  return std::pow(std::abs(s), p0_) / p0_;
}

double EdgeCost::dl(double s) const {
  if (family_ == Family::kQuadratic) return s;
  return std::copysign(std::pow(std::abs(s), p0_ - 1.0), s);
}

double EdgeCost::h(double p) const {
  if (family_ == Family::kQuadratic) return 0.5 * p * p;
  return std::pow(std::abs(p), q_) / q_;
}

double EdgeCost::dh(double p) const {
  if (family_ == Family::kQuadratic) return p;
  return std::copysign(std::pow(std::abs(p), q_ - 1.0), p);
}

double EdgeCost::d2h(double p) const {
  if (family_ == Family::kQuadratic) return 1.0;
  if (p == 0.0) {
    return q_ > 2.0 ? 0.0 : (q_ == 2.0 ? 1.0 : INFINITY);
  }
  return (q_ - 1.0) * std::pow(std::abs(p), q_ - 2.0);
}

void require_interior(const Vector& mu, const char* what) {
  if (!(mu.minCoeff() > kDerivativeFloor)) {
    throw DomainError(std::string(what) +
                      ": density below the derivative floor 1e-10");
  }
}

GameSpec::GameSpec(WeightedGraph graph, ModelParams params, double horizon)
    : graph_(std::move(graph)),
      params_(params),
      cost_(params.family == Family::kQuadratic ? EdgeCost::quadratic()
                                                : EdgeCost::power(params.p0)),
      horizon_(horizon) {
  if (!(params.cF > 0.0)) throw DomainError("cF must be positive");
  if (!(params.cT >= 0.0)) throw DomainError("cT must be nonnegative");
  if (!(horizon > 0.0)) throw DomainError("horizon T must be positive");
  if (params.beta < 0.0) throw DomainError("beta must be nonnegative");
}

double GameSpec::coupling(const Vector& mu) const {
  return -0.5 * params_.cF * mu.squaredNorm();
}
Vector GameSpec::coupling_grad(const Vector& mu) const {
  return -params_.cF * mu;
}
double GameSpec::terminal(const Vector& mu) const {
  return 0.5 * params_.cT * mu.squaredNorm();
}
Vector GameSpec::terminal_grad(const Vector& mu) const {
  return params_.cT * mu;
}
Matrix GameSpec::terminal_hessian() const {
  return params_.cT * Matrix::Identity(size(), size());
}

Vector GameSpec::H(const Vector& mu, const EdgeField& p) const {
  // h is even, so D_mu Ham(mu, -p) = D_mu Ham(mu, p).
  Vector out = coupling_grad(mu);
  for (const Edge& e : graph_.edges()) {
    const ThetaJet t = theta_jet(mu(e.i), mu(e.j));
    const double hp = cost_.h(p(e.i, e.j));
    out(e.i) += t.d1 * hp;
    out(e.j) += t.d2 * hp;
  }
  return out;
}

EdgeField GameSpec::B(const Vector& mu, const EdgeField& p) const {
  const double scale = 1.0 + params_.beta * mu.squaredNorm();
  Matrix b = Matrix::Zero(size(), size());
  for (const Edge& e : graph_.edges()) {
    const double x = scale * theta(mu(e.i), mu(e.j)) * cost_.dh(p(e.i, e.j));
    b(e.i, e.j) = x;
    b(e.j, e.i) = -x;
  }
  return EdgeField::unchecked(std::move(b));
}

Vector GameSpec::dH_dmu(const Vector& mu, const EdgeField& p,
                        const Vector& eta) const {
  Vector out = -params_.cF * eta;
  for (const Edge& e : graph_.edges()) {
    const ThetaJet t = theta_jet(mu(e.i), mu(e.j));
    const double hp = cost_.h(p(e.i, e.j));
    out(e.i) += (t.d11 * eta(e.i) + t.d12 * eta(e.j)) * hp;
    out(e.j) += (t.d12 * eta(e.i) + t.d22 * eta(e.j)) * hp;
  }
  return out;
}

Vector GameSpec::dH_dp(const Vector& mu, const EdgeField& p,
                       const EdgeField& q) const {
  Vector out = Vector::Zero(size());
  for (const Edge& e : graph_.edges()) {
    const ThetaJet t = theta_jet(mu(e.i), mu(e.j));
    const double x = cost_.dh(p(e.i, e.j)) * q(e.i, e.j);
    out(e.i) += t.d1 * x;
    out(e.j) += t.d2 * x;  // h'(p^{ji}) q^{ji} = h'(p^{ij}) q^{ij}
  }
  return out;
}

EdgeField GameSpec::dB_dmu(const Vector& mu, const EdgeField& p,
                           const Vector& eta) const {
  const double s = mu.squaredNorm();
  const double scale = 1.0 + params_.beta * s;
  const double dscale = 2.0 * params_.beta * mu.dot(eta);
  Matrix b = Matrix::Zero(size(), size());
  for (const Edge& e : graph_.edges()) {
    const ThetaJet t = theta_jet(mu(e.i), mu(e.j));
    const double dh = cost_.dh(p(e.i, e.j));
    const double x = (scale * (t.d1 * eta(e.i) + t.d2 * eta(e.j)) +
                      dscale * t.value) *
                     dh;
    b(e.i, e.j) = x;
    b(e.j, e.i) = -x;
  }
  return EdgeField::unchecked(std::move(b));
}

EdgeField GameSpec::dB_dp(const Vector& mu, const EdgeField& p,
                          const EdgeField& q) const {
  const double scale = 1.0 + params_.beta * mu.squaredNorm();
  Matrix b = Matrix::Zero(size(), size());
  for (const Edge& e : graph_.edges()) {
    const double x = scale * theta(mu(e.i), mu(e.j)) *
                     cost_.d2h(p(e.i, e.j)) * q(e.i, e.j);
    b(e.i, e.j) = x;
    b(e.j, e.i) = -x;
  }
  return EdgeField::unchecked(std::move(b));
}

double GameSpec::structural_c1() const {
  // (B,p) - (H,mu) = Ham(mu,p) (1 + beta|mu|^2) + ... >= cF |mu|^2 >= 0 by the
  // Euler identity; H_i >= -cF mu^i >= -cF; |g_i| <= cT on the simplex.
  return std::max(params_.cF, params_.cT);
}

double GameSpec::coercivity_cl() const {
  // L(mu, m) = sum_{i<j} theta^{1-p0} |m|^{p0}/p0 >= sum |m_e|^{p0}/p0 since
  // theta <= 1 on the simplex; compare the l_{p0} and l_2 norms over E edges.
  const double p0 = cost_.p0();
  const double e = static_cast<double>(graph_.edges().size());
  return std::min(1.0, std::pow(e, 1.0 - 0.5 * p0)) / p0;
}

double hamiltonian(const GameSpec& spec, const Vector& mu, const EdgeField& p) {
  check_size(spec.graph(), mu, "hamiltonian");
  double acc = 0.0;
  for (const Edge& e : spec.graph().edges()) {
    acc += theta(mu(e.i), mu(e.j)) * spec.cost().h(p(e.i, e.j));
  }
  return acc;
}

double lagrangian(const GameSpec& spec, const Vector& mu, const EdgeField& m) {
  check_size(spec.graph(), mu, "lagrangian");
  double acc = 0.0;
  for (const Edge& e : spec.graph().edges()) {
    const double th = theta(mu(e.i), mu(e.j));
    const double b = m(e.i, e.j);
    if (th == 0.0) {
      if (b != 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    acc += th * spec.cost().l(b / th);
  }
  return acc;
}

EdgeField dp_hamiltonian(const GameSpec& spec, const Vector& mu,
                         const EdgeField& p) {
  check_size(spec.graph(), mu, "dp_hamiltonian");
  Matrix out = Matrix::Zero(spec.size(), spec.size());
  for (const Edge& e : spec.graph().edges()) {
    const double x = theta(mu(e.i), mu(e.j)) * spec.cost().dh(p(e.i, e.j));
    out(e.i, e.j) = x;
    out(e.j, e.i) = -x;
  }
  return EdgeField::unchecked(std::move(out));
}

Vector dmu_hamiltonian(const GameSpec& spec, const Vector& mu,
                       const EdgeField& p) {
  check_size(spec.graph(), mu, "dmu_hamiltonian");
  require_interior(mu, "dmu_hamiltonian");
  Vector out = Vector::Zero(spec.size());
  for (const Edge& e : spec.graph().edges()) {
    const ThetaJet t = theta_jet(mu(e.i), mu(e.j));
    const double hp = spec.cost().h(p(e.i, e.j));
    out(e.i) += t.d1 * hp;
    out(e.j) += t.d2 * hp;
  }
  return out;
}

EdgeField dm_lagrangian(const GameSpec& spec, const Vector& mu,
                        const EdgeField& m) {
  check_size(spec.graph(), mu, "dm_lagrangian");
  require_interior(mu, "dm_lagrangian");
  Matrix out = Matrix::Zero(spec.size(), spec.size());
  for (const Edge& e : spec.graph().edges()) {
    const double x =
        spec.cost().dl(m(e.i, e.j) / theta(mu(e.i), mu(e.j)));
    out(e.i, e.j) = x;
    out(e.j, e.i) = -x;
  }
  return EdgeField::unchecked(std::move(out));
}

Vector dmu_lagrangian(const GameSpec& spec, const Vector& mu,
                      const EdgeField& m) {
  check_size(spec.graph(), mu, "dmu_lagrangian");
  require_interior(mu, "dmu_lagrangian");
  Vector out = Vector::Zero(spec.size());
  for (const Edge& e : spec.graph().edges()) {
    const ThetaJet t = theta_jet(mu(e.i), mu(e.j));
    const double x = m(e.i, e.j) / t.value;
    const double f = spec.cost().l(x) - x * spec.cost().dl(x);
    out(e.i) += t.d1 * f;
    out(e.j) += t.d2 * f;
  }
  return out;
}

double bar_lagrangian(const GameSpec& spec, const Vector& mu,
                      const EdgeField& w) {
  check_size(spec.graph(), mu, "bar_lagrangian");
  double acc = 0.0;
  for (const Edge& e : spec.graph().edges()) {
    acc += theta(mu(e.i), mu(e.j)) * spec.cost().l(w(e.i, e.j));
  }
  return acc;
}

Vector dmu_bar_lagrangian(const GameSpec& spec, const Vector& mu,
                          const EdgeField& w) {
  check_size(spec.graph(), mu, "dmu_bar_lagrangian");
  require_interior(mu, "dmu_bar_lagrangian");
  Vector out = Vector::Zero(spec.size());
  for (const Edge& e : spec.graph().edges()) {
    const ThetaJet t = theta_jet(mu(e.i), mu(e.j));
    const double lw = spec.cost().l(w(e.i, e.j));
    out(e.i) += t.d1 * lw;
    out(e.j) += t.d2 * lw;
  }
  return out;
}

Vector running_cost_L(const GameSpec& spec, const Vector& mu,
                      const EdgeField& w) {
  return dmu_bar_lagrangian(spec, mu, w) - spec.coupling_grad(mu);
}

EdgeField unique_momentum_check(const GameSpec& spec, const Vector& mu,
                                const EdgeField& vbar) {
  check_size(spec.graph(), mu, "unique_momentum_check");
  require_interior(mu, "unique_momentum_check");
  Matrix p = Matrix::Zero(spec.size(), spec.size());
  for (const Edge& e : spec.graph().edges()) {
    const double x = spec.cost().dl(vbar(e.i, e.j));
    p(e.i, e.j) = x;
    p(e.j, e.i) = -x;
  }
  EdgeField pf = EdgeField::unchecked(std::move(p));
  const double lhs =
      bar_lagrangian(spec, mu, vbar) + hamiltonian(spec, mu, pf);
  const double rhs = rho_inner(spec.graph(), mu, vbar, pf);
  if (std::abs(lhs - rhs) > 1e-10 * std::max(1.0, std::abs(rhs))) {
    throw DomainError("unique momentum: Fenchel-Young residual " +
                      std::to_string(lhs - rhs));
  }
  return pf;
}

double dmu_H_variational(const GameSpec& spec, int i, const Vector& mu,
                         const EdgeField& p, const EdgeField& w) {
  check_size(spec.graph(), mu, "dmu_H_variational");
  require_interior(mu, "dmu_H_variational");
  const WeightedGraph& g = spec.graph();
  double acc = 0.0;
  for (int l : g.neighbors(i)) {
    const double d1 = theta_jet(mu(i), mu(l)).d1;
    const double vb = w(i, l) + g.sqrt_omega()(i, l) *
                                    (std::log(mu(i)) - std::log(mu(l)));
    acc += d1 * (vb * p(i, l) - spec.cost().l(vb));
  }
  return acc;
}

HBMaps hb_maps(const GameSpec& spec) {
  HBMaps maps;
  maps.H = [&spec](const Vector& mu, const EdgeField& p) {
    return spec.H(mu, p);
  };
  maps.B = [&spec](const Vector& mu, const EdgeField& p) {
    return spec.B(mu, p);
  };
  maps.g = [&spec](const Vector& mu) { return spec.g(mu); };
  // theta(mu^i, mu^j) = (mu^i + mu^j) h_log(mu^j/mu^i); the extended factor
  // is at most 1 + beta on the simplex.
  maps.a = [&spec](double u, const EdgeField& p) {
    double sup_dh = 0.0;
    for (const Edge& e : spec.graph().edges()) {
      sup_dh = std::max(sup_dh, std::abs(spec.cost().dh(p(e.i, e.j))));
    }
    return (1.0 + spec.params().beta) * h_log(u) * sup_dh;
  };
  return maps;
}

MonotonicityReport monotonicity_check(const GameSpec& spec, int samples,
                                      std::uint64_t seed) {
  const WeightedGraph& g = spec.graph();
  const int n = g.size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  auto random_interior = [&]() {
    Vector mu(n);
    for (int i = 0; i < n; ++i) mu(i) = 0.02 + unif(rng);
    return Vector(mu / mu.sum());
  };
  auto random_field = [&](double scale) {
    Matrix m = Matrix::Zero(n, n);
    for (const Edge& e : g.edges()) {
      const double x = scale * gauss(rng);
      m(e.i, e.j) = x;
      m(e.j, e.i) = -x;
    }
    return EdgeField::unchecked(std::move(m));
  };

  MonotonicityReport r;
  r.samples = samples;
  r.min_hamiltonian_gap = INFINITY;
  r.min_differential_gap = INFINITY;
  r.min_integrated_gap = INFINITY;
  r.min_terminal_gap = INFINITY;
  r.empirical_c1 = 0.0;
  for (int k = 0; k < samples; ++k) {
    const Vector rho = random_interior();
    const EdgeField p = random_field(2.0);
    // Alternate the degenerate cases eta = 0 and q = 0 into the sample set.
    Vector eta = (k % 7 == 1) ? Vector::Zero(n) : Vector(project_tangent(
                                                     Vector::NullaryExpr(
                                                         n, [&] {
                                                           return gauss(rng);
                                                         })));
    EdgeField q = (k % 7 == 2) ? EdgeField(n) : random_field(1.0);
    if (eta.norm() == 0.0 && q.max_abs() == 0.0) q = random_field(1.0);

    // Hamiltonian form.
    double lhs = -spec.params().cF * eta.squaredNorm();
    double rhs = 0.0;
    for (const Edge& e : g.edges()) {
      const ThetaJet t = theta_jet(rho(e.i), rho(e.j));
      const double hp = spec.cost().h(p(e.i, e.j));
      lhs += hp * (t.d11 * eta(e.i) * eta(e.i) +
                   2.0 * t.d12 * eta(e.i) * eta(e.j) +
                   t.d22 * eta(e.j) * eta(e.j));
      rhs += t.value * spec.cost().d2h(p(e.i, e.j)) * q(e.i, e.j) *
             q(e.i, e.j);
    }
    r.min_hamiltonian_gap = std::min(r.min_hamiltonian_gap, rhs - lhs);

    // Differential (H, B) form.
    const double dl =
        (spec.dH_dmu(rho, p, eta) + spec.dH_dp(rho, p, q)).dot(eta);
    const double dr =
        edge_inner(spec.dB_dmu(rho, p, eta) + spec.dB_dp(rho, p, q), q);
    r.min_differential_gap = std::min(r.min_differential_gap, dr - dl);

    // Integrated form on a random pair.
    const Vector rho2 = random_interior();
    const EdgeField p2 = random_field(2.0);
    const double il =
        (rho - rho2).dot(spec.H(rho, p) - spec.H(rho2, p2));
    const double ir = edge_inner(p - p2, spec.B(rho, p) - spec.B(rho2, p2));
    r.min_integrated_gap = std::min(r.min_integrated_gap, ir - il);
    r.min_terminal_gap = std::min(
        r.min_terminal_gap, (spec.g(rho) - spec.g(rho2)).dot(rho - rho2));

    const Vector h = spec.H(rho, p);
    r.empirical_c1 = std::max(
        {r.empirical_c1, h.dot(rho) - edge_inner(spec.B(rho, p), p),
         -h.minCoeff(), spec.g(rho).cwiseAbs().maxCoeff()});
  }
  r.passed = r.min_hamiltonian_gap > 0.0 && r.min_differential_gap > 0.0 &&
             r.min_integrated_gap > 0.0 && r.min_terminal_gap >= 0.0;
  return r;
}

}  // namespace graphmfg
