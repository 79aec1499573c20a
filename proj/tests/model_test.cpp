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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "graphmfg/errors.hpp"
#include "graphmfg/model.hpp"

namespace graphmfg {
namespace {

GameSpec make_spec(const WeightedGraph& g, Family family, double p0 = 2.0,
                   double beta = 0.0) {
  ModelParams m;
  m.family = family;
  m.p0 = p0;
  m.beta = beta;
  return GameSpec(g, m, 1.0);
}

Vector random_interior(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Vector mu = Vector::NullaryExpr(n, [&] { return u(rng); });
  return mu / mu.sum();
}

EdgeField random_field(const WeightedGraph& g, std::mt19937_64& rng,
                       double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  EdgeField m(g.size());
  for (const Edge& e : g.edges()) m.set(e.i, e.j, gauss(rng));
  return m;
}

// Central difference of a scalar map along vertex k with relative step 1e-5.
template <class F>
Vector fd_mu(F&& f, const Vector& mu) {
  Vector out(mu.size());
  for (int k = 0; k < mu.size(); ++k) {
    const double h = 1e-5 * mu(k);
    Vector a = mu, b = mu;
    a(k) += h;
    b(k) -= h;
    out(k) = (f(a) - f(b)) / (2 * h);
  }
  return out;
}

double rel_err(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

template <class F>
Matrix fd_edge(F&& f, const WeightedGraph& g, const EdgeField& p) {
  Matrix out = Matrix::Zero(g.size(), g.size());
  for (const Edge& e : g.edges()) {
    // Step relative to |p| so that kinks of |x|^q at 0 stay out of the stencil.
    const double h = 1e-5 * std::abs(p(e.i, e.j));
    EdgeField a = p, b = p;
    a.set(e.i, e.j, p(e.i, e.j) + h);
    b.set(e.i, e.j, p(e.i, e.j) - h);
    const double d = (f(a) - f(b)) / (2 * h);
    out(e.i, e.j) = d;
    out(e.j, e.i) = -d;
  }
  return out;
}

TEST(EdgeCostTest, FenchelYoung) {
  for (double p0 : {1.5, 2.0, 3.0, 4.0}) {
    const EdgeCost c = EdgeCost::power(p0);
    for (double s : {-2.0, -0.3, 0.0, 0.7, 1.9}) {
      const double p = c.dl(s);
      EXPECT_NEAR(c.l(s) + c.h(p), s * p, 1e-13);
      EXPECT_NEAR(c.dh(p), s, 1e-12);
    }
  }
}

TEST(HamiltonianTest, Examples) {
  const GameSpec spec = make_spec(complete_graph(2), Family::kQuadratic);
  const Vector uni = Vector::Constant(2, 0.5);
  EdgeField p(2);
  EXPECT_EQ(hamiltonian(spec, uni, p), 0.0);
  p.set(0, 1, 2.0);
  EXPECT_DOUBLE_EQ(hamiltonian(spec, uni, p), 1.0);
  EXPECT_DOUBLE_EQ(dp_hamiltonian(spec, uni, p)(0, 1), 1.0);
  EXPECT_EQ(dp_hamiltonian(spec, uni, EdgeField(2)).max_abs(), 0.0);
}

TEST(HamiltonianTest, ConjugateByInnerMaximisation) {
  // Brute-force sup over a fine grid of m on the single edge of K2.
  for (Family fam : {Family::kQuadratic, Family::kPower}) {
    const GameSpec spec = make_spec(complete_graph(2), fam, 3.0);
    Vector mu(2);
    mu << 0.3, 0.7;
    EdgeField p(2);
    p.set(0, 1, 1.3);
    double best = -INFINITY;
    for (int k = -40000; k <= 40000; ++k) {
      EdgeField m(2);
      m.set(0, 1, k * 1e-4);
      best = std::max(best, edge_inner(m, p) - lagrangian(spec, mu, m));
    }
    EXPECT_NEAR(best, hamiltonian(spec, mu, p), 1e-7);
  }
}

TEST(LagrangianTest, Examples) {
  const GameSpec spec = make_spec(complete_graph(2), Family::kQuadratic);
  const Vector uni = Vector::Constant(2, 0.5);
  EXPECT_EQ(lagrangian(spec, uni, EdgeField(2)), 0.0);
  EdgeField m(2), p(2);
  m.set(0, 1, 1.0);
  p.set(0, 1, 2.0);
  EXPECT_DOUBLE_EQ(lagrangian(spec, uni, m), 1.0);
  EXPECT_DOUBLE_EQ(lagrangian(spec, uni, m) + hamiltonian(spec, uni, p),
                   edge_inner(m, p));
  // Boundary branches of the perspective function.
  Vector edge(2);
  edge << 1.0, 0.0;
  EXPECT_TRUE(std::isinf(lagrangian(spec, edge, m)));
  EXPECT_EQ(lagrangian(spec, edge, EdgeField(2)), 0.0);
}

TEST(LagrangianTest, JointConvexityQuadratic) {
  const WeightedGraph g = cycle_graph(4);
  const GameSpec spec = make_spec(g, Family::kQuadratic);
  std::mt19937_64 rng(21);
  for (int k = 0; k < 200; ++k) {
    const Vector a = random_interior(4, rng), b = random_interior(4, rng);
    const EdgeField ma = random_field(g, rng), mb = random_field(g, rng);
    const double s = 0.37;
    const double mid =
        lagrangian(spec, s * a + (1 - s) * b, s * ma + (1 - s) * mb);
    EXPECT_LE(mid, s * lagrangian(spec, a, ma) +
                       (1 - s) * lagrangian(spec, b, mb) + 1e-12);
  }
}

class FamilyTest : public ::testing::TestWithParam<double> {};

TEST_P(FamilyTest, DerivativesMatchFiniteDifferences) {
  const double p0 = GetParam();
  const WeightedGraph g = cycle_graph(5, 1.7);
  const GameSpec spec = make_spec(g, p0 == 2.0 ? Family::kQuadratic
                                               : Family::kPower, p0);
  std::mt19937_64 rng(22);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vector mu = random_interior(5, rng);
    const EdgeField p = random_field(g, rng);
    const EdgeField m = random_field(g, rng, 0.3);
    const EdgeField w = random_field(g, rng);
    auto ham = [&](const Vector& x) { return hamiltonian(spec, x, p); };
    auto lag = [&](const Vector& x) { return lagrangian(spec, x, m); };
    auto blag = [&](const Vector& x) {
      return bar_lagrangian(spec, x, w) - spec.coupling(x);
    };
    worst = std::max(worst, rel_err(dmu_hamiltonian(spec, mu, p),
                                    fd_mu(ham, mu)));
    worst = std::max(worst, rel_err(dmu_lagrangian(spec, mu, m),
                                    fd_mu(lag, mu)));
    worst = std::max(worst, rel_err(running_cost_L(spec, mu, w),
                                    fd_mu(blag, mu)));
    auto hp = [&](const EdgeField& x) { return hamiltonian(spec, mu, x); };
    auto lm = [&](const EdgeField& x) { return lagrangian(spec, mu, x); };
    worst = std::max(worst, rel_err(dp_hamiltonian(spec, mu, p).values(),
                                    fd_edge(hp, g, p)));
    worst = std::max(worst, rel_err(dm_lagrangian(spec, mu, m).values(),
                                    fd_edge(lm, g, m)));
  }
  EXPECT_LT(worst, 1e-6) << "p0=" << p0;
}

TEST_P(FamilyTest, LegendreConsistencyAndDuality) {
  const double p0 = GetParam();
  const WeightedGraph g = complete_graph(4);
  const GameSpec spec = make_spec(g, p0 == 2.0 ? Family::kQuadratic
                                               : Family::kPower, p0);
  std::mt19937_64 rng(23);
  for (int k = 0; k < 1000; ++k) {
    const Vector mu = random_interior(4, rng);
    const EdgeField m = random_field(g, rng, 0.5);
    const EdgeField p = dm_lagrangian(spec, mu, m);
    const double fy =
        lagrangian(spec, mu, m) + hamiltonian(spec, mu, p) - edge_inner(m, p);
    EXPECT_NEAR(fy, 0.0, 1e-9);
    const EdgeField w = random_field(g, rng, 0.5);
    const Vector dual = dmu_lagrangian(spec, mu, w) +
                        dmu_hamiltonian(spec, mu, dm_lagrangian(spec, mu, w));
    EXPECT_LT(dual.cwiseAbs().maxCoeff(), 1e-8);
  }
}

INSTANTIATE_TEST_SUITE_P(Exponents, FamilyTest,
                         ::testing::Values(1.5, 2.0, 3.0, 4.0));

TEST(ModelTest, MobilityIdentityQuadratic) {
  const WeightedGraph g = complete_graph(5);
  const GameSpec spec = make_spec(g, Family::kQuadratic);
  std::mt19937_64 rng(24);
  for (int k = 0; k < 1000; ++k) {
    const Vector mu = random_interior(5, rng);
    const EdgeField p = random_field(g, rng);
    const EdgeField d = dp_hamiltonian(spec, mu, p);
    for (const Edge& e : g.edges()) {
      const double rhs = (mu(e.i) + mu(e.j)) * h_log(mu(e.j) / mu(e.i)) *
                         std::abs(p(e.i, e.j));
      EXPECT_NEAR(std::abs(d(e.i, e.j)), rhs, 1e-10);
    }
  }
}

TEST(ModelTest, DerivativesRejectBoundary) {
  const GameSpec spec = make_spec(cycle_graph(4), Family::kQuadratic);
  Vector mu(4);
  mu << 0.5, 0.5 - 1e-11, 1e-11, 0.0;
  EXPECT_THROW(dmu_hamiltonian(spec, mu, EdgeField(4)), DomainError);
  EXPECT_NO_THROW(hamiltonian(spec, mu, EdgeField(4)));
}

TEST(HBMapsTest, QuadraticExamples) {
  const WeightedGraph g = cycle_graph(4);
  const GameSpec spec = make_spec(g, Family::kQuadratic);
  const HBMaps maps = hb_maps(spec);
  std::mt19937_64 rng(25);
  const Vector mu = random_interior(4, rng);
  EXPECT_EQ(maps.B(mu, EdgeField(4)).max_abs(), 0.0);
  EXPECT_LE((maps.H(mu, EdgeField(4)) - spec.coupling_grad(mu))
                .cwiseAbs().maxCoeff(), 0.0);
  // Coercivity (B,p) >= (H,mu) - C1, lower bound on H and the mobility bound.
  const double c1 = spec.structural_c1();
  for (int k = 0; k < 1000; ++k) {
    const Vector x = random_interior(4, rng);
    const EdgeField p = random_field(g, rng, 3.0);
    const EdgeField b = maps.B(x, p);
    EXPECT_GE(edge_inner(b, p), maps.H(x, p).dot(x) - c1);
    EXPECT_GE(maps.H(x, p).minCoeff(), -c1);
    for (const Edge& e : g.edges()) {
      EXPECT_LE(std::abs(b(e.i, e.j)),
                (x(e.i) + x(e.j)) * maps.a(x(e.j) / x(e.i), p) * (1 + 1e-12));
    }
  }
  EXPECT_LE(maps.g(mu).cwiseAbs().maxCoeff(), c1);
}

TEST(HBMapsTest, ExtendedInstanceDerivatives) {
  const WeightedGraph g = cycle_graph(4);
  const GameSpec spec = make_spec(g, Family::kQuadratic, 2.0, 0.05);
  std::mt19937_64 rng(26);
  const Vector mu = random_interior(4, rng);
  const EdgeField p = random_field(g, rng);
  const Vector eta = project_tangent(Vector::NullaryExpr(4, [&] {
    return std::normal_distribution<double>()(rng);
  }));
  const EdgeField q = random_field(g, rng);
  const double h = 1e-6;
  const Matrix fd_b =
      (spec.B(mu + h * eta, p).values() - spec.B(mu - h * eta, p).values()) /
      (2 * h);
  EXPECT_LT((spec.dB_dmu(mu, p, eta).values() - fd_b).cwiseAbs().maxCoeff(),
            1e-8);
  const Vector fd_h = (spec.H(mu + h * eta, p) - spec.H(mu - h * eta, p)) /
                      (2 * h);
  EXPECT_LT((spec.dH_dmu(mu, p, eta) - fd_h).cwiseAbs().maxCoeff(), 1e-8);
  const Matrix fd_bp = (spec.B(mu, p + h * q).values() -
                        spec.B(mu, p - h * q).values()) / (2 * h);
  EXPECT_LT((spec.dB_dp(mu, p, q).values() - fd_bp).cwiseAbs().maxCoeff(),
            1e-8);
  const Vector fd_hp = (spec.H(mu, p + h * q) - spec.H(mu, p - h * q)) /
                       (2 * h);
  EXPECT_LT((spec.dH_dp(mu, p, q) - fd_hp).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(MonotonicityTest, SamplesOnC4) {
  const GameSpec spec = make_spec(cycle_graph(4), Family::kQuadratic);
  const MonotonicityReport r = monotonicity_check(spec, 10000, 7);
  EXPECT_TRUE(r.passed);
  EXPECT_GT(r.min_hamiltonian_gap, 0.0);
  EXPECT_GT(r.min_differential_gap, 0.0);
  EXPECT_GT(r.min_integrated_gap, 0.0);
  EXPECT_GE(r.min_terminal_gap, 0.0);
  EXPECT_LE(r.empirical_c1, spec.structural_c1());
}

TEST(MonotonicityTest, DegenerateDirections) {
  // q = 0: the left side reduces to a negative semidefinite form plus D^2F.
  const GameSpec spec = make_spec(cycle_graph(4), Family::kQuadratic);
  Vector rho(4);
  rho << 0.1, 0.2, 0.3, 0.4;
  const Vector eta = project_tangent(Vector::Unit(4, 0));
  const EdgeField p = grad(spec.graph(), rho);
  const double lhs = (spec.dH_dmu(rho, p, eta)).dot(eta);
  EXPECT_LE(lhs, -spec.params().cF * eta.squaredNorm() + 1e-14);
  // eta = 0: only (q, D_pp q) > 0 remains.
  const EdgeField q = grad(spec.graph(), Vector::Unit(4, 1));
  EXPECT_GT(edge_inner(spec.dB_dp(rho, p, q), q), 0.0);
}

TEST(BarLagrangianTest, Examples) {
  const WeightedGraph k2 = complete_graph(2);
  const GameSpec spec = make_spec(k2, Family::kQuadratic);
  const Vector uni = Vector::Constant(2, 0.5);
  EXPECT_EQ(bar_lagrangian(spec, uni, EdgeField(2)), 0.0);
  EdgeField w(2);
  w.set(0, 1, 2.0);
  EXPECT_DOUBLE_EQ(bar_lagrangian(spec, uni, w), 1.0);
  std::mt19937_64 rng(27);
  const WeightedGraph c5 = cycle_graph(5);
  const GameSpec s5 = make_spec(c5, Family::kPower, 3.0);
  const Vector mu = random_interior(5, rng);
  const EdgeField v = random_field(c5, rng);
  const EdgeField m =
      EdgeField::unchecked(theta_matrix(c5, mu).cwiseProduct(v.values()));
  EXPECT_NEAR(bar_lagrangian(s5, mu, v), lagrangian(s5, mu, m), 1e-14);
}

TEST(RunningCostTest, ZeroVelocityAndSymmetry) {
  const WeightedGraph c6 = cycle_graph(6);
  const GameSpec spec = make_spec(c6, Family::kQuadratic);
  std::mt19937_64 rng(28);
  const Vector mu = random_interior(6, rng);
  EXPECT_LE((running_cost_L(spec, mu, EdgeField(6)) - spec.params().cF * mu)
                .cwiseAbs().maxCoeff(), 1e-15);
  // Rotation i -> i+1 is an automorphism of C6.
  const EdgeField w = random_field(c6, rng);
  Vector mu_r(6);
  EdgeField w_r(6);
  for (int i = 0; i < 6; ++i) mu_r((i + 1) % 6) = mu(i);
  for (const Edge& e : c6.edges()) {
    w_r.set((e.i + 1) % 6, (e.j + 1) % 6, w(e.i, e.j));
  }
  const Vector a = running_cost_L(spec, mu, w);
  const Vector b = running_cost_L(spec, mu_r, w_r);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(b((i + 1) % 6), a(i), 1e-14);
}

TEST(UniqueMomentumTest, Examples) {
  const WeightedGraph c4 = cycle_graph(4);
  std::mt19937_64 rng(29);
  const Vector mu = random_interior(4, rng);
  const GameSpec quad = make_spec(c4, Family::kQuadratic);
  EXPECT_EQ(unique_momentum_check(quad, mu, EdgeField(4)).max_abs(), 0.0);
  const EdgeField vbar = random_field(c4, rng);
  EXPECT_EQ((unique_momentum_check(quad, mu, vbar).values() - vbar.values())
                .cwiseAbs().maxCoeff(), 0.0);
  const GameSpec cubic = make_spec(c4, Family::kPower, 3.0);
  const EdgeField p = unique_momentum_check(cubic, mu, vbar);
  for (const Edge& e : c4.edges()) {
    const double x = vbar(e.i, e.j);
    EXPECT_NEAR(p(e.i, e.j), std::abs(x) * x, 1e-15);
  }
}

TEST(VariationalTest, Examples) {
  const WeightedGraph k2 = complete_graph(2);
  const GameSpec spec = make_spec(k2, Family::kQuadratic);
  const Vector uni = Vector::Constant(2, 0.5);
  // p = 0: the maximiser is vbar = 0 and the value is 0.
  EXPECT_EQ(dmu_H_variational(spec, 0, uni, EdgeField(2), EdgeField(2)), 0.0);
  EdgeField p(2);
  p.set(0, 1, 2.0);
  // At uniform mu, grad log mu = 0, so the optimal control is w = p.
  const double analytic = 0.5 * theta_d1(0.5, 0.5) * 4.0;
  EXPECT_NEAR(dmu_H_variational(spec, 0, uni, p, p), analytic, 1e-15);
  EXPECT_NEAR(dmu_hamiltonian(spec, uni, p)(0), analytic, 1e-15);
}

TEST(VariationalTest, GridSearchMaximumAtZeroDeviation) {
  const WeightedGraph c4 = cycle_graph(4, 2.0);
  for (Family fam : {Family::kQuadratic, Family::kPower}) {
    const GameSpec spec = make_spec(c4, fam, 3.0);
    std::mt19937_64 rng(30);
    const Vector mu = random_interior(4, rng);
    const EdgeField p = random_field(c4, rng);
    // Optimal control v with vbar = h'(p), vbar = v + grad log mu.
    Matrix vb = Matrix::Zero(4, 4);
    for (const Edge& e : c4.edges()) {
      const double x = spec.cost().dh(p(e.i, e.j));
      vb(e.i, e.j) = x;
      vb(e.j, e.i) = -x;
    }
    const EdgeField v =
        EdgeField::unchecked(vb) - grad(c4, mu.array().log().matrix());
    for (int i = 0; i < 4; ++i) {
      const double at0 = dmu_H_variational(spec, i, mu, p, v);
      EXPECT_NEAR(at0, dmu_hamiltonian(spec, mu, p)(i), 1e-12);
      // Deviations on the edges at i: v^{il} += a^l.
      const auto& nb = c4.neighbors(i);
      for (int a = -50; a <= 50; ++a) {
        for (int b = -50; b <= 50; ++b) {
          EdgeField w = v;
          w.set(i, nb[0], v(i, nb[0]) + 0.1 * a);
          w.set(i, nb[1], v(i, nb[1]) + 0.1 * b);
          EXPECT_LE(dmu_H_variational(spec, i, mu, p, w), at0 + 1e-13);
        }
      }
    }
  }
}

}  // namespace
}  // namespace graphmfg
