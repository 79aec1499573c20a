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

#include "graphmfg/nash_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <thread>

#include "graphmfg/errors.hpp"

namespace graphmfg {

namespace {

UniformGrid refined(const UniformGrid& g) {
  return UniformGrid(g.t0(), g.t1(), 2 * g.steps());
}

EdgeField grad_log(const WeightedGraph& g, const Vector& rho) {
  return grad(g, rho.array().log().matrix());
}

// Values of a coarse series at the refined nodes.
VectorSeries refine(const VectorSeries& s) {
  const UniformGrid& g = s.grid();
  std::vector<Vector> out;
  out.reserve(2 * g.steps() + 1);
  for (int k = 0; k < g.steps(); ++k) {
    out.push_back(s[k]);
    out.push_back(s.midpoint(k));
  }
  out.push_back(s.back());
  return VectorSeries(refined(g), std::move(out));
}

// Three-point Gauss-Legendre nodes on [-1, 1].
constexpr double kGaussX = 0.7745966692414834;
constexpr double kGaussW0 = 8.0 / 9.0;
constexpr double kGaussW1 = 5.0 / 9.0;

// Exact integrals of the cubic interpolant of one component of a series,
// via cumulative cell integrals.
class PathIntegral {
 public:
  explicit PathIntegral(const VectorSeries& f) : f_(f) {
    const UniformGrid& g = f.grid();
    const int n = static_cast<int>(f[0].size());
    cum_.assign(g.nodes(), Vector::Zero(n));
    for (int j = 0; j < g.steps(); ++j) {
      Vector cell = Vector::Zero(n);
      for (int x = 0; x < n; ++x) cell(x) = gauss(x, g.time(j), g.time(j + 1));
      cum_[j + 1] = cum_[j] + cell;
    }
  }

  double value(int x, double s) const {
    const auto st = f_.grid().stencil(s);
    double v = 0.0;
    for (int a = 0; a < 4; ++a) v += st.w[a] * f_[st.first + a](x);
    return v;
  }

  double integral(int x, double a, double b) const {
    if (b <= a) return 0.0;
    const int ja = cell(a), jb = cell(b);
    const UniformGrid& g = f_.grid();
    if (ja == jb) return gauss(x, a, b);
    return gauss(x, a, g.time(ja + 1)) + (cum_[jb](x) - cum_[ja + 1](x)) +
           gauss(x, g.time(jb), b);
  }

 private:
  int cell(double s) const {
    const UniformGrid& g = f_.grid();
    const int j = static_cast<int>(std::floor((s - g.t0()) / g.dt()));
    return std::clamp(j, 0, g.steps() - 1);
  }
  double gauss(int x, double a, double b) const {
    const double c = 0.5 * (a + b), r = 0.5 * (b - a);
    return r * (kGaussW0 * value(x, c) +
                kGaussW1 * (value(x, c - r * kGaussX) + value(x, c + r * kGaussX)));
  }

  const VectorSeries& f_;
  std::vector<Vector> cum_;
};

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

void mean_stderr(const std::vector<double>& v, double& mean, double& se) {
  const std::size_t n = v.size();
  mean = pairwise_sum(v.data(), n) / static_cast<double>(n);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
  se = n > 1 ? std::sqrt(pairwise_sum(sq.data(), n) /
                         static_cast<double>(n - 1) / static_cast<double>(n))
             : 0.0;
}

// Runs body(index) for index in [0, count) on `threads` workers; results
// must be written by index so the order of execution is irrelevant.
template <class F>
void parallel_for(int count, int threads, F&& body) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (int i = t; i < count; i += threads) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

void check_series(const RateMatrixPath& q, const VectorSeries& s,
                  const char* what) {
  if (s.grid().steps() != q.q.grid().steps() ||
      s.grid().t0() != q.q.grid().t0() || s.grid().t1() != q.q.grid().t1()) {
    throw DimensionMismatch(std::string(what) +
                            ": series must live on the refined rate grid");
  }
}

double row_rate(const RateMatrixPath& q, const UniformGrid::Stencil& st,
                int x, int j) {
  double v = 0.0;
  for (int a = 0; a < 4; ++a) v += st.w[a] * q.q[st.first + a](x, j);
  return v;
}

}  // namespace

double RateMatrixPath::max_exit_rate() const {
  double m = 0.0;
  for (const Matrix& a : q.values()) m = std::max(m, (-a.diagonal()).maxCoeff());
  return m;
}

RateMatrixPath rate_matrix(const WeightedGraph& g, const VectorSeries& rho_star,
                           const Control& v) {
  const VectorSeries rho = refine(rho_star);
  const UniformGrid& fine = rho.grid();
  const int n = g.size();
  RateMatrixPath out;
  out.grid = rho_star.grid();
  out.min_offdiag = std::numeric_limits<double>::infinity();
  std::vector<Matrix> qs;
  qs.reserve(fine.nodes());
  for (int k = 0; k < fine.nodes(); ++k) {
    const double s = fine.time(k);
    const Vector& r = rho[k];
    check_size(g, r, "rate_matrix");
    require_interior(r, "rate_matrix");
    const EdgeField w = v(s) + grad_log(g, r);
    Matrix q = Matrix::Zero(n, n);
    for (const Edge& e : g.edges()) {
      q(e.i, e.j) = e.omega - e.sqrt_omega * theta_d1(r(e.i), r(e.j)) * w(e.i, e.j);
      q(e.j, e.i) = e.omega - e.sqrt_omega * theta_d1(r(e.j), r(e.i)) * w(e.j, e.i);
      for (const auto& [a, b] : {std::pair{e.i, e.j}, std::pair{e.j, e.i}}) {
        out.min_offdiag = std::min(out.min_offdiag, q(a, b));
        if (q(a, b) < -kAdmissibilitySlack) {
          ++out.violation_count;
          if (out.violations.size() < 100) out.violations.push_back({s, a, b, q(a, b)});
        }
      }
    }
    for (int i = 0; i < n; ++i) q(i, i) = -(q.row(i).sum() - q(i, i));
    qs.push_back(std::move(q));
  }
  out.q = MatrixSeries(fine, std::move(qs));
  return out;
}

std::vector<Matrix> propagator(const RateMatrixPath& q, int start_node) {
  const int steps = q.grid.steps();
  if (start_node < 0 || start_node > steps) {
    throw DomainError("propagator: start node out of range");
  }
  const int n = static_cast<int>(q.q[0].rows());
  const double h = q.grid.dt();
  std::vector<Matrix> psi;
  psi.reserve(steps - start_node + 1);
  psi.push_back(Matrix::Identity(n, n));
  for (int k = start_node; k < steps; ++k) {
    const Matrix& q0 = q.q[2 * k];
    const Matrix& qm = q.q[2 * k + 1];
    const Matrix& q1 = q.q[2 * k + 2];
    const Matrix& y = psi.back();
    const Matrix k1 = y * q0;
    const Matrix k2 = (y + 0.5 * h * k1) * qm;
    const Matrix k3 = (y + 0.5 * h * k2) * qm;
    const Matrix k4 = (y + h * k3) * q1;
    psi.push_back(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  }
  return psi;
}

double consistency_check(const RateMatrixPath& q, const VectorSeries& rho_star) {
  const double h = q.grid.dt();
  Eigen::RowVectorXd r = rho_star[0].transpose();
  double gap = 0.0;
  for (int k = 0; k < q.grid.steps(); ++k) {
    const Matrix& q0 = q.q[2 * k];
    const Matrix& qm = q.q[2 * k + 1];
    const Matrix& q1 = q.q[2 * k + 2];
    const Eigen::RowVectorXd k1 = r * q0;
    const Eigen::RowVectorXd k2 = (r + 0.5 * h * k1) * qm;
    const Eigen::RowVectorXd k3 = (r + 0.5 * h * k2) * qm;
    const Eigen::RowVectorXd k4 = (r + h * k3) * q1;
    r += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    gap = std::max(gap, (r.transpose() - rho_star[k + 1]).cwiseAbs().maxCoeff());
  }
  return gap;
}

EquilibriumControl optimal_control(const GameSpec& spec, const SimplexPoint& mu,
                                   const SolverOptions& opts) {
  if (spec.extended()) {
    throw DomainError(
        "optimal_control: the flux must derive from the Hamiltonian");
  }
  EquilibriumControl eq;
  eq.solution = solve_mfg(spec, 0.0, mu, opts);
  // Shared ownership keeps the controls valid after `eq` is moved.
  auto sol = std::make_shared<const MFGSolution>(eq.solution);
  const EdgeCost cost = spec.cost();
  auto graph = std::make_shared<const WeightedGraph>(spec.graph());
  eq.vbar = [sol, graph, cost](double s) {
    EdgeField p = grad(*graph, sol->phi.at(s));
    EdgeField out(graph->size());
    for (const Edge& e : graph->edges()) out.set(e.i, e.j, cost.dh(-p(e.i, e.j)));
    return out;
  };
  eq.v = [sol, graph, vbar = eq.vbar](double s) {
    return vbar(s) - grad_log(*graph, sol->rho.at(s));
  };
  eq.q = rate_matrix(spec.graph(), eq.solution.rho, eq.v);
  return eq;
}

VectorSeries running_cost(const GameSpec& spec, const VectorSeries& rho_star,
                          const Control& v) {
  const VectorSeries rho = refine(rho_star);
  std::vector<Vector> out;
  out.reserve(rho.nodes());
  for (int k = 0; k < rho.nodes(); ++k) {
    const double s = rho.grid().time(k);
    out.push_back(running_cost_L(spec, rho[k],
                                 v(s) + grad_log(spec.graph(), rho[k])));
  }
  return VectorSeries(rho.grid(), std::move(out));
}

VectorSeries cost_J_ode(const RateMatrixPath& q, const VectorSeries& running,
                        const Vector& terminal) {
  check_series(q, running, "cost_J_ode");
  const int steps = q.grid.steps();
  const double h = q.grid.dt();
  std::vector<Vector> z(steps + 1);
  z[steps] = terminal;
  // z' = -(Q z + l), stepped backward from T.
  for (int k = steps - 1; k >= 0; --k) {
    const int j1 = 2 * k + 2, jm = 2 * k + 1, j0 = 2 * k;
    const Vector& y = z[k + 1];
    const Vector k1 = q.q[j1] * y + running[j1];
    const Vector k2 = q.q[jm] * (y + 0.5 * h * k1) + running[jm];
    const Vector k3 = q.q[jm] * (y + 0.5 * h * k2) + running[jm];
    const Vector k4 = q.q[j0] * (y + h * k3) + running[j0];
    z[k] = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return VectorSeries(q.grid, std::move(z));
}

Vector cost_J(const GameSpec& spec, const VectorSeries& rho_star,
              const Control& v) {
  const RateMatrixPath q = rate_matrix(spec.graph(), rho_star, v);
  return cost_J_ode(q, running_cost(spec, rho_star, v),
                    spec.g(rho_star.back()))[0];
}

int ChainSample::state_at(double s) const {
  const auto it = std::upper_bound(times.begin(), times.end(), s);
  const auto k = std::max<std::ptrdiff_t>(0, (it - times.begin()) - 1);
  return states[k];
}

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ChainSample sample_chain(const RateMatrixPath& q, int start, std::uint64_t seed) {
  const int n = static_cast<int>(q.q[0].rows());
  if (start < 0 || start >= n) throw DomainError("sample_chain: bad start");
  ChainSample path;
  path.seed = seed;
  path.times.push_back(q.grid.t0());
  path.states.push_back(start);
  const double rate = 1.05 * q.max_exit_rate();
  if (rate <= 0.0) return path;
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> wait(rate);
  std::uniform_real_distribution<double> unif(0.0, rate);
  const UniformGrid& fine = q.q.grid();
  double t = q.grid.t0();
  int x = start;
  for (;;) {
    t += wait(rng);
    if (t >= q.grid.t1()) break;
    const auto st = fine.stencil(t);
    double u = unif(rng), acc = 0.0, total = 0.0;
    int next = x;
    for (int j = 0; j < n; ++j) {
      if (j == x) continue;
      const double r = std::max(0.0, row_rate(q, st, x, j));
      total += r;
      if (next == x && u < acc + r) next = j;
      acc += r;
    }
    if (total > rate) {
      throw Error("sample_chain: exit rate exceeds the uniformization rate");
    }
    if (next != x) {
      x = next;
      path.times.push_back(t);
      path.states.push_back(x);
    }
  }
  return path;
}

MCEstimate cost_J_mc(const RateMatrixPath& q, const VectorSeries& running,
                     const Vector& terminal, int n_paths, std::uint64_t seed,
                     int threads) {
  check_series(q, running, "cost_J_mc");
  if (n_paths < 2) throw DomainError("cost_J_mc: need at least two paths");
  const int n = static_cast<int>(terminal.size());
  const PathIntegral integral(running);
  const double t1 = q.grid.t1();
  MCEstimate est;
  est.mean.resize(n);
  est.stderr_.resize(n);
  est.n_paths = n_paths;
  est.rate = 1.05 * q.max_exit_rate();
  std::vector<double> costs(n_paths);
  for (int i = 0; i < n; ++i) {
    parallel_for(n_paths, threads, [&](int p) {
      const auto index = static_cast<std::uint64_t>(i) * n_paths + p;
      const ChainSample path = sample_chain(q, i, path_seed(seed, index));
      double c = 0.0;
      for (std::size_t k = 0; k < path.times.size(); ++k) {
        const double b = k + 1 < path.times.size() ? path.times[k + 1] : t1;
        c += integral.integral(path.states[k], path.times[k], b);
      }
      costs[p] = c + terminal(path.states.back());
    });
    mean_stderr(costs, est.mean(i), est.stderr_(i));
  }
  return est;
}

MartingaleReport martingale_probe(const RateMatrixPath& q,
                                  const VectorSeries& f,
                                  const VectorSeries& fdot, int start,
                                  int n_paths, std::uint64_t seed,
                                  int threads) {
  if (n_paths < 2) throw DomainError("martingale_probe: need two paths");
  const VectorSeries ff = refine(f);
  const VectorSeries fd = refine(fdot);
  check_series(q, ff, "martingale_probe");
  std::vector<Vector> qf;
  qf.reserve(ff.nodes());
  for (int k = 0; k < ff.nodes(); ++k) qf.push_back(q.q[k] * ff[k]);
  const VectorSeries qfs(ff.grid(), std::move(qf));
  const PathIntegral f_at(ff), fdot_int(fd), qf_int(qfs);
  const double t0 = q.grid.t0(), t1 = q.grid.t1();
  std::vector<double> terms(n_paths), errors(n_paths);
  parallel_for(n_paths, threads, [&](int p) {
    const ChainSample path = sample_chain(q, start, path_seed(seed, p));
    double jumps = 0.0, drift = 0.0, generator = 0.0;
    for (std::size_t k = 0; k < path.times.size(); ++k) {
      const double a = path.times[k];
      const double b = k + 1 < path.times.size() ? path.times[k + 1] : t1;
      drift += fdot_int.integral(path.states[k], a, b);
      generator += qf_int.integral(path.states[k], a, b);
      if (k + 1 < path.times.size()) {
        jumps += f_at.value(path.states[k + 1], b) - f_at.value(path.states[k], b);
      }
    }
    const double lhs = f_at.value(path.states.back(), t1) -
                       f_at.value(path.states.front(), t0);
    terms[p] = jumps - generator;
    errors[p] = std::abs(lhs - (drift + generator + terms[p]));
  });
  MartingaleReport rep;
  rep.n_paths = n_paths;
  mean_stderr(terms, rep.mean, rep.stderr_);
  rep.max_identity_error = *std::max_element(errors.begin(), errors.end());
  return rep;
}

EdgeField deviate(const WeightedGraph& g, const EdgeField& v, int i,
                  const Vector& a) {
  if (i < 0 || i >= g.size() || a.size() != g.size()) {
    throw DimensionMismatch("deviate: vertex or parameter size");
  }
  EdgeField out = v;
  for (int l : g.neighbors(i)) out.set(i, l, v(i, l) + a(l));
  return out;
}

bool separable_cost(const GameSpec& spec) {
  // L-bar(mu, w) = sum_{i<j} theta(mu^i, mu^j) l(w^{ij}): the mu^i-derivative
  // only involves edges at i, for both families.
  return !spec.extended();
}

NashReport nash_certificate(const GameSpec& spec, const SimplexPoint& mu,
                            const NashOptions& opts) {
  const WeightedGraph& g = spec.graph();
  const int n = g.size();
  const EquilibriumControl eq = optimal_control(spec, mu, opts.solver);
  NashReport rep;
  rep.admissible = eq.q.admissible();
  rep.margin = eq.q.min_offdiag;
  rep.violations = eq.q.violations;
  rep.separable = separable_cost(spec);
  if (!rep.admissible) return rep;

  const VectorSeries& rho = eq.solution.rho;
  const Vector terminal = spec.g(rho.back());
  rep.consistency_gap = consistency_check(eq.q, rho);
  const VectorSeries running = running_cost(spec, rho, eq.v);
  rep.j_ode = cost_J_ode(eq.q, running, terminal)[0];
  rep.u0 = eq.solution.phi[0];
  rep.equality_gap = (rep.j_ode - rep.u0).cwiseAbs().maxCoeff();

  auto evaluate = [&](const Control& v, bool& admissible) {
    const RateMatrixPath q = rate_matrix(g, rho, v);
    admissible = q.admissible();
    return cost_J_ode(q, running_cost(spec, rho, v), terminal)[0];
  };
  auto add_vertex = [&](int i, const Vector& a, const std::string& kind) {
    DeviationResult d;
    d.vertex = i;
    d.a = a;
    d.kind = kind;
    const Control v = [&, i, a](double s) { return deviate(g, eq.v(s), i, a); };
    const Vector j = evaluate(v, d.admissible);
    d.gap = j(i) - rep.j_ode(i);
    if (!d.admissible) ++rep.skipped;
    rep.deviations.push_back(std::move(d));
  };

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> mag(0.05, 0.5);
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < n; ++l) {
      if (l == i) continue;
      for (double m : opts.magnitudes) {
        Vector a = Vector::Zero(n);
        a(l) = m;
        add_vertex(i, a, "coordinate");
      }
    }
    for (int r = 0; r < opts.random_directions; ++r) {
      Vector a(n);
      for (int l = 0; l < n; ++l) a(l) = l == i ? 0.0 : normal(rng);
      a *= mag(rng) / a.norm();
      add_vertex(i, a, "random");
    }
  }
  if (rep.separable) {
    const double T = spec.horizon();
    for (int r = 0; r < opts.general_perturbations; ++r) {
      EdgeField w(n);
      for (const Edge& e : g.edges()) w.set(e.i, e.j, normal(rng));
      w *= (r % 2 == 0 ? 0.1 : 0.25) / w.max_abs();
      const Control v = [&, w](double s) {
        return eq.v(s) +
               (1.0 + 0.5 * std::sin(2.0 * std::numbers::pi * s / T)) * w;
      };
      bool admissible = false;
      const Vector j = evaluate(v, admissible);
      for (int i = 0; i < n; ++i) {
        DeviationResult d;
        d.vertex = i;
        d.kind = "general";
        d.admissible = admissible;
        d.gap = j(i) - rep.j_ode(i);
        if (!admissible) ++rep.skipped;
        rep.deviations.push_back(std::move(d));
      }
    }
  }
  rep.min_deviation_gap = std::numeric_limits<double>::infinity();
  for (const auto& d : rep.deviations) {
    if (d.admissible) rep.min_deviation_gap = std::min(rep.min_deviation_gap, d.gap);
  }

  // Second-order diagnostic along the first edge at vertex 0.
  {
    const int l = g.neighbors(0).front();
    double gaps[2];
    for (int k = 0; k < 2; ++k) {
      Vector a = Vector::Zero(n);
      a(l) = k == 0 ? 0.1 : 0.05;
      const Control v = [&, a](double s) { return deviate(g, eq.v(s), 0, a); };
      bool admissible = false;
      gaps[k] = evaluate(v, admissible)(0) - rep.j_ode(0);
    }
    rep.quadratic_ratio = gaps[1] / gaps[0];
  }

  if (opts.mc_paths > 0) {
    rep.mc = cost_J_mc(eq.q, running, terminal, opts.mc_paths, opts.seed,
                       opts.threads);
    for (int i = 0; i < n; ++i) {
      rep.max_mc_zscore = std::max(
          rep.max_mc_zscore,
          std::abs(rep.mc.mean(i) - rep.j_ode(i)) / rep.mc.stderr_(i));
    }
  }
  return rep;
}

std::vector<TorusPoint> torus_admissibility_sweep(
    const std::vector<int>& sizes, const ModelParams& params, double horizon,
    double amplitude, const SolverOptions& opts) {
  std::vector<TorusPoint> out;
  for (int n : sizes) {
    const WeightedGraph g = torus_graph(1, n);
    Vector mu(n);
    for (int i = 0; i < n; ++i) {
      mu(i) = 1.0 + amplitude * std::cos(2.0 * std::numbers::pi * i / n);
    }
    mu /= mu.sum();
    SolverOptions o = opts;
    // RK4 stability for the stiff diffusion: dt * 4 omega well below 2.78.
    o.steps = std::max(o.steps, static_cast<int>(std::ceil(4.0 * n * n * horizon)));
    const GameSpec spec(g, params, horizon);
    const EquilibriumControl eq = optimal_control(spec, SimplexPoint(mu), o);
    out.push_back({n, 1.0 / n, eq.q.min_offdiag, eq.q.admissible()});
  }
  return out;
}

}  // namespace graphmfg
