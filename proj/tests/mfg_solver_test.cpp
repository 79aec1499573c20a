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

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "graphmfg/errors.hpp"
#include "graphmfg/mfg_solver.hpp"

namespace graphmfg {
namespace {

SimplexPoint baseline_mu() {
  Vector mu(4);
  mu << 0.4, 0.3, 0.2, 0.1;
  return SimplexPoint(mu);
}

GameSpec baseline_spec(double beta = 0.0, double horizon = 1.0) {
  ModelParams mp;
  mp.beta = beta;
  return GameSpec(cycle_graph(4), mp, horizon);
}

SolverOptions tight(int steps = 1000) {
  SolverOptions o;
  o.steps = steps;
  o.tol = 1e-13;
  return o;
}

TEST(PicardTest, DecoupledLambdaZeroMatchesEigenSolution) {
  // With lambda = 0 the flux vanishes: rho' = L rho and phi' = -cF rho - L phi
  // with phi(T) = cT rho(T). In the eigenbasis L = V diag(l) V^T both are
  // scalar linear ODEs with closed-form solutions.
  const GameSpec spec = baseline_spec();
  const SimplexPoint mu = baseline_mu();
  SolverOptions o = tight();
  o.damping = 1.0;
  const double t = 0.0, T = 1.0;
  const MFGSolution sol = picard_solve(spec, t, mu, 0.0, o);
  Eigen::SelfAdjointEigenSolver<Matrix> es(spec.graph().laplacian_matrix());
  const Matrix& v = es.eigenvectors();
  const Vector& l = es.eigenvalues();
  const Vector b = v.transpose() * static_cast<const Vector&>(mu);
  const double cf = spec.params().cF, ct = spec.params().cT;
  for (int k = 0; k < sol.phi.nodes(); ++k) {
    const double s = sol.grid().time(k);
    Vector rho_e(4), a(4);
    for (int q = 0; q < 4; ++q) {
      rho_e(q) = std::exp(l(q) * (s - t)) * b(q);
      const double at = ct * b(q) * std::exp(l(q) * (T - t));
      const double integral =
          std::abs(l(q)) < 1e-12
              ? (T - s)
              : (std::exp(l(q) * (2 * T - t)) - std::exp(l(q) * (2 * s - t))) /
                    (2 * l(q));
      a(q) = (at * std::exp(l(q) * T) + cf * b(q) * integral) *
             std::exp(-l(q) * s);
    }
    EXPECT_LE((sol.rho[k] - v * rho_e).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((sol.phi[k] - v * a).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(PicardTest, TerminalLayerLimit) {
  // phi(t) -> g(mu) at rate O(T - t).
  const SimplexPoint mu = baseline_mu();
  double prev = 0.0;
  for (double tau : {0.08, 0.04, 0.02, 0.01}) {
    const GameSpec spec = baseline_spec(0.0, tau);
    const MFGSolution sol = picard_solve(spec, 0.0, mu, 1.0, tight(200));
    const double gap =
        (sol.phi.front() - spec.g(mu)).cwiseAbs().maxCoeff();
    if (prev > 0) EXPECT_NEAR(prev / gap, 2.0, 0.2);
    prev = gap;
  }
}

TEST(PicardTest, BaselineRegression) {
  const GameSpec spec = baseline_spec();
  const MFGSolution sol = picard_solve(spec, 0.0, baseline_mu(), 1.0, tight());
  EXPECT_LT(sol.residual(), 1e-8);
  EXPECT_LE(sol.initial_residual, 1e-12);
  EXPECT_GT(sol.min_density, 0.0);
  Vector phi0(4), rho_t(4);
  phi0 << 0.53121424943658, 0.51899813438776, 0.48073606683430,
      0.46817844969230;
  rho_t << 0.26174373064262, 0.26034077388814, 0.23972806528047,
      0.23818743018877;
  EXPECT_LE((sol.phi.front() - phi0).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE((sol.rho.back() - rho_t).cwiseAbs().maxCoeff(), 1e-9);
  for (int k = 0; k < sol.rho.nodes(); ++k) {
    EXPECT_NEAR(sol.rho[k].sum(), 1.0, 1e-10);
  }
}

TEST(PicardTest, ExtendedInstanceConverges) {
  const GameSpec spec = baseline_spec(0.05);
  ASSERT_TRUE(spec.extended());
  const MFGSolution sol = solve_mfg(spec, 0.0, baseline_mu(), tight());
  EXPECT_LT(sol.residual(), 1e-6);
  const MFGSolution plain =
      solve_mfg(baseline_spec(), 0.0, baseline_mu(), tight());
  EXPECT_GT(max_abs_diff(sol.rho, plain.rho), 1e-6);
}

TEST(PicardTest, RejectsBadArguments) {
  const GameSpec spec = baseline_spec();
  SolverOptions o = tight(100);
  EXPECT_THROW(picard_solve(spec, 0.0, baseline_mu(), 1.5, o), DomainError);
  o.damping = 0.0;
  EXPECT_THROW(picard_solve(spec, 0.0, baseline_mu(), 1.0, o), DomainError);
  EXPECT_THROW(picard_solve(spec, 0.0, SimplexPoint::uniform(3), 1.0,
                            tight(100)),
               DimensionMismatch);
  SolverOptions few = tight(100);
  few.max_iter = 2;
  EXPECT_THROW(picard_solve(spec, 0.0, baseline_mu(), 1.0, few),
               NoConvergence);
}

TEST(HomotopyTest, PathIndependenceAndWarmStart) {
  const GameSpec spec = baseline_spec();
  const SimplexPoint mu = baseline_mu();
  const SolverOptions o = tight();
  const MFGSolution one = homotopy_solve(spec, 0.0, mu, 1, o);
  const MFGSolution direct = picard_solve(spec, 0.0, mu, 1.0, o);
  EXPECT_EQ(max_abs_diff(one.phi, direct.phi), 0.0);
  const MFGSolution five = homotopy_solve(spec, 0.0, mu, 5, o);
  const MFGSolution ten = homotopy_solve(spec, 0.0, mu, 10, o);
  EXPECT_LE(max_abs_diff(five.phi, ten.phi), 1e-8);
  EXPECT_LE(max_abs_diff(five.rho, ten.rho), 1e-8);
  // The lambda = 1 stage warm-started from lambda = 0.9 needs fewer
  // iterations than a cold start.
  const MFGSolution at09 = picard_solve(spec, 0.0, mu, 0.9, o);
  const MFGSolution warm = picard_solve(spec, 0.0, mu, 1.0, o, &at09.phi);
  EXPECT_LT(warm.iterations, direct.iterations);
  EXPECT_LE(max_abs_diff(warm.phi, direct.phi), 1e-11);
}

TEST(LinearizedTest, ZeroAndLinearity) {
  const GameSpec spec = baseline_spec();
  const MFGSolution base = picard_solve(spec, 0.0, baseline_mu(), 1.0,
                                        tight());
  const ShootingOperator op(spec, base);
  EXPECT_LT(op.condition(), kMaxShootingCondition);
  const LinearizedSolution zero = op.solve(Vector::Zero(4));
  for (int k = 0; k < zero.psi.nodes(); ++k) {
    EXPECT_EQ(zero.psi[k].cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(zero.eta[k].cwiseAbs().maxCoeff(), 0.0);
  }
  Vector nu(4);
  nu << 1.0, -0.5, -0.75, 0.25;
  const LinearizedSolution a = op.solve(nu), b = op.solve(2.0 * nu);
  EXPECT_LE(max_abs_diff(b.psi, a.psi) - max_abs_diff(a.psi, zero.psi), 1e-9);
  for (int k = 0; k < a.psi.nodes(); ++k) {
    EXPECT_LE((b.psi[k] - 2.0 * a.psi[k]).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE((b.eta[k] - 2.0 * a.eta[k]).cwiseAbs().maxCoeff(), 1e-9);
  }
  EXPECT_LE(a.terminal_residual, 1e-9);
  EXPECT_LE(a.max_tangent_drift, 1e-12);
  EXPECT_LE((a.eta.front() - nu).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(op.solve(Vector::Ones(3)), DimensionMismatch);
}

TEST(LinearizedTest, CentralDifferenceOracle) {
  const GameSpec spec = baseline_spec();
  const SimplexPoint mu = baseline_mu();
  const SolverOptions o = tight();
  const MFGSolution base = picard_solve(spec, 0.0, mu, 1.0, o);
  Vector nu(4);
  nu << 1.0, -0.5, -0.75, 0.25;
  const LinearizedSolution lin = linearized_solve(spec, base, nu);
  std::vector<double> gaps;
  for (double h : {1e-3, 1e-4}) {
    const Vector mp = static_cast<const Vector&>(mu) + h * nu;
    const Vector mm = static_cast<const Vector&>(mu) - h * nu;
    const MFGSolution p = picard_solve(spec, 0.0, SimplexPoint(mp), 1.0, o);
    const MFGSolution m = picard_solve(spec, 0.0, SimplexPoint(mm), 1.0, o);
    double gap = 0.0;
    for (int k = 0; k < p.phi.nodes(); ++k) {
      const Vector fd = (p.phi[k] - m.phi[k]) / (2 * h);
      gap = std::max(gap, (fd - lin.psi[k]).cwiseAbs().maxCoeff());
    }
    gaps.push_back(gap);
  }
  EXPECT_LT(gaps[0], 1e-5);
  // Observed order: a tenfold step reduction cuts the gap ~100x.
  EXPECT_GT(std::log10(gaps[0] / gaps[1]), 1.7) << gaps[0] << " " << gaps[1];
}

TEST(LinearizedTest, RequiresLambdaOne) {
  const GameSpec spec = baseline_spec();
  SolverOptions o = tight(100);
  o.damping = 1.0;
  const MFGSolution half = picard_solve(spec, 0.0, baseline_mu(), 0.5, o);
  EXPECT_THROW(linearized_solve(spec, half, Vector::Zero(4)), DomainError);
}

TEST(ProbeTest, LasryLionsAndPhiBound) {
  const GameSpec spec = baseline_spec();
  const SimplexPoint mu = baseline_mu();
  SolverOptions o = tight();
  o.damping = 1.0;
  const MFGSolution zero = picard_solve(spec, 0.0, mu, 0.0, o);
  EXPECT_DOUBLE_EQ(lasry_lions_probe(spec, zero),
                   -2.0 * spec.structural_c1());
  EXPECT_EQ(phi_bound_probe(spec, zero, mu.values().minCoeff()), 0.0);
  const MFGSolution base = picard_solve(spec, 0.0, mu, 1.0, tight());
  EXPECT_LE(lasry_lions_probe(spec, base), 0.0);
  EXPECT_LE(phi_bound_probe(spec, base, 0.1), 1.0);
  // Shrinking horizons: the ratio stays bounded.
  for (double tau : {0.5, 0.25, 0.125}) {
    const GameSpec s = baseline_spec(0.0, tau);
    const MFGSolution sol = picard_solve(s, 0.0, mu, 1.0, tight(200));
    EXPECT_LE(phi_bound_probe(s, sol, 0.1), 1.0);
  }
}

TEST(ProbeTest, UniquenessFromRandomGuesses) {
  const GameSpec spec = baseline_spec();
  const MFGSolution base = picard_solve(spec, 0.0, baseline_mu(), 1.0,
                                        tight());
  EXPECT_LE(uniqueness_probe(spec, base, tight(), 3, 11), 1e-6);
}

TEST(FlowPropertyTest, Examples) {
  const GameSpec spec = baseline_spec();
  const SimplexPoint mu = baseline_mu();
  const SolverOptions o = tight();
  EXPECT_EQ(flow_property_check(spec, 0.0, 0.0, mu, o), 0.0);
  const MFGSolution base = picard_solve(spec, 0.0, mu, 1.0, o);
  EXPECT_LE(flow_property_check(spec, base, 0.5, o), 1e-6);
  // Nested splits 0 -> 0.25 -> 0.5 -> 0.75.
  const MFGSolution s1 = picard_solve(
      spec, 0.25, SimplexPoint(base.rho.at(0.25)), 1.0, tight(750));
  EXPECT_LE(flow_property_check(spec, s1, 0.5, tight(750)), 1e-6);
  const MFGSolution s2 = picard_solve(
      spec, 0.5, SimplexPoint(s1.rho.at(0.5)), 1.0, tight(500));
  EXPECT_LE(flow_property_check(spec, s2, 0.75, tight(500)), 1e-6);
  EXPECT_LE((s2.phi.at(0.75) - base.phi.at(0.75)).cwiseAbs().maxCoeff(),
            1e-6);
}

TEST(ResidualTest, RecomputedResidualsMatch) {
  const GameSpec spec = baseline_spec();
  const SimplexPoint mu = baseline_mu();
  MFGSolution sol = picard_solve(spec, 0.0, mu, 1.0, tight());
  const double before = sol.residual();
  evaluate_residuals(spec, mu, sol);
  EXPECT_NEAR(sol.residual(), before, 1e-12);
  sol.phi[500](0) += 1e-3;
  evaluate_residuals(spec, mu, sol);
  EXPECT_GT(sol.phi_defect, 1e-2);
}

}  // namespace
}  // namespace graphmfg
