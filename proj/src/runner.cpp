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

#include "graphmfg/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "graphmfg/dynamics.hpp"
#include "graphmfg/errors.hpp"
#include "graphmfg/hjb.hpp"
#include "graphmfg/master_eq.hpp"
#include "graphmfg/nash_sim.hpp"

namespace graphmfg {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

Json to_json(const Vector& v) {
  return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

std::string vertex_columns(const std::string& prefix, int n) {
  std::string s;
  for (int i = 1; i <= n; ++i) s += "," + prefix + "_" + std::to_string(i);
  return s;
}

class Csv {
 public:
  Csv(const fs::path& path, const std::string& header) : out_(path) {
    if (!out_) throw Error("cannot write " + path.string());
    out_ << header << "\n";
  }
  Csv& operator<<(double x) {
    sep();
    out_ << format_double(x);
    return *this;
  }
  Csv& operator<<(const Vector& v) {
    for (int i = 0; i < v.size(); ++i) *this << v(i);
    return *this;
  }
  void end_row() {
    out_ << "\n";
    first_ = true;
  }

 private:
  void sep() {
    if (!first_) out_ << ",";
    first_ = false;
  }
  std::ofstream out_;
  bool first_ = true;
};

// Collects checks, the JSON report and a human-readable log for one suite.
class SuiteContext {
 public:
  SuiteContext(const ExperimentConfig& c, const fs::path& out, std::string name)
      : config(c), spec(c.graph, c.model, c.horizon), out_dir(out) {
    result.name = std::move(name);
    report["suite"] = result.name;
  }

  void check(const std::string& name, double value, const std::string& rel,
             double tol, bool hard = true) {
    Check ck{name, value, rel, tol, hard, false};
    if (rel == "<=") ck.passed = value <= tol;
    else if (rel == ">=") ck.passed = value >= tol;
    else if (rel == "<") ck.passed = value < tol;
    else if (rel == ">") ck.passed = value > tol;
    else if (rel == "finite") ck.passed = std::isfinite(value);
    log << "  " << (ck.passed ? "ok  " : (hard ? "FAIL" : "warn")) << " "
        << name << " = " << format_double(value) << " (" << rel
        << (rel == "finite" ? "" : " " + format_double(tol)) << ")"
        << (hard ? "" : " [soft]") << "\n";
    result.checks.push_back(ck);
  }

  std::string label(std::size_t p) const { return "p" + std::to_string(p + 1); }
  SimplexPoint mu(std::size_t p) const { return SimplexPoint(config.initial[p].mu); }
  double t(std::size_t p) const { return config.initial[p].t; }
  fs::path file(const std::string& name) const { return out_dir / name; }

  const ExperimentConfig& config;
  GameSpec spec;
  fs::path out_dir;
  SuiteResult result;
  Json report;
  std::ostringstream log;
};

void dump_solution(const fs::path& path, const MFGSolution& sol) {
  const int n = static_cast<int>(sol.phi[0].size());
  Csv csv(path, "s" + vertex_columns("phi", n) + vertex_columns("rho", n));
  for (int k = 0; k < sol.phi.nodes(); ++k) {
    csv << sol.grid().time(k) << sol.phi[k] << sol.rho[k];
    csv.end_row();
  }
}

FluxSpec equilibrium_flux(const GameSpec& spec, const MFGSolution& sol) {
  FluxSpec f;
  f.flux = [&spec, &sol](double s, const Vector& rho) {
    return spec.B(rho, grad(spec.graph(), sol.phi.at(s)));
  };
  return f;
}

void suite_interiority(SuiteContext& cx) {
  const auto& c = cx.config;
  Json points = Json::array();
  for (std::size_t p = 0; p < c.initial.size(); ++p) {
    const std::string id = cx.label(p);
    const MFGSolution sol = solve_mfg(cx.spec, cx.t(p), cx.mu(p), c.solver);
    const DensityTrajectory traj =
        integrate_continuity(cx.spec.graph(), equilibrium_flux(cx.spec, sol),
                             cx.mu(p), cx.t(p), c.horizon, sol.grid().dt());
    const InteriorityReport r = interiority_report(traj, cx.mu(p).values().minCoeff());
    double drift = 0.0;
    for (const Vector& v : traj.rho.values()) drift = std::max(drift, std::abs(v.sum() - 1.0));
    cx.check(id + ".mass_drift", drift, "<=", 1e-10);
    cx.check(id + ".min_density", *std::min_element(r.min_profile.begin(), r.min_profile.end()), ">", 0.0);
    cx.check(id + ".fitted_c", r.fitted_c, ">", 0.0);
    cx.check(id + ".fitted_r", r.fitted_r, "finite", 0.0);
    cx.check(id + ".solver_agreement", max_abs_diff(traj.rho, sol.rho), "<=", 1e-8, false);
    points.push_back({{"t", cx.t(p)},
                      {"mu", to_json(cx.mu(p).values())},
                      {"min_profile", r.min_profile},
                      {"fitted_c", r.fitted_c},
                      {"fitted_r", r.fitted_r},
                      {"bound_holds", r.bound_holds},
                      {"rejected_steps", traj.rejected_steps}});
    Csv csv(cx.file("interiority_" + id + ".csv"), "t" + vertex_columns("rho", c.graph.size()));
    for (int k = 0; k < traj.rho.nodes(); ++k) {
      csv << traj.rho.grid().time(k) << traj.rho[k];
      csv.end_row();
    }
  }
  cx.report["points"] = points;
}

void suite_mfg(SuiteContext& cx) {
  const auto& c = cx.config;
  const std::uint64_t seed = c.seed.value_or(1);
  Json points = Json::array();
  for (std::size_t p = 0; p < c.initial.size(); ++p) {
    const std::string id = cx.label(p);
    const MFGSolution sol = solve_mfg(cx.spec, cx.t(p), cx.mu(p), c.solver);
    cx.check(id + ".residual", sol.residual(), "<=", c.tol_mfg);
    cx.check(id + ".initial_residual", sol.initial_residual, "<=", c.tol_mfg);
    // Random starts on the scale of the solution: O(1) potentials can drive
    // the forward equation of a steep Hamiltonian to extinction.
    double osc = 0.0;
    for (const Vector& v : sol.phi.values()) osc = std::max(osc, v.maxCoeff() - v.minCoeff());
    const double uniq =
        uniqueness_probe(cx.spec, sol, c.solver, 3, seed + p, std::max(osc, 1e-3));
    cx.check(id + ".uniqueness", uniq, "<=", 1e-6);
    const double t1 = 0.5 * (cx.t(p) + c.horizon);
    const double flow = flow_property_check(cx.spec, sol, t1, c.solver);
    cx.check(id + ".flow_property", flow, "<=", 1e-6);
    const double ll = lasry_lions_probe(cx.spec, sol);
    cx.check(id + ".lasry_lions", ll, "<=", 0.0, !cx.spec.extended());
    const double bound = phi_bound_probe(cx.spec, sol, sol.min_density);
    cx.check(id + ".phi_bound", bound, "<=", 1.0, false);
    points.push_back({{"t", cx.t(p)},
                      {"mu", to_json(cx.mu(p).values())},
                      {"lambda", sol.lambda},
                      {"iterations", sol.iterations},
                      {"picard_gap", sol.picard_gap},
                      {"terminal_residual", sol.terminal_residual},
                      {"initial_residual", sol.initial_residual},
                      {"phi_defect", sol.phi_defect},
                      {"rho_defect", sol.rho_defect},
                      {"min_density", sol.min_density},
                      {"rejected_steps", sol.rejected_steps},
                      {"uniqueness_gap", uniq},
                      {"flow_property_gap", flow},
                      {"lasry_lions", ll},
                      {"phi_bound", bound},
                      {"phi_t", to_json(sol.phi[0])},
                      {"rho_T", to_json(sol.rho.back())}});
    dump_solution(cx.file("mfg_" + id + ".csv"), sol);
  }
  cx.report["points"] = points;
}

void suite_master(SuiteContext& cx) {
  const auto& c = cx.config;
  const int n = c.graph.size();
  Csv csv(cx.file("master.csv"),
          "t" + vertex_columns("mu", n) + vertex_columns("residual", n) + ",norm");
  Json samples = Json::array();
  // Shooting needs h in C^2; power costs with p0 > 2 fall back to differences.
  const bool smooth = cx.spec.cost().family() != Family::kPower ||
                      cx.spec.cost().q() >= 2.0;
  const DerivativeMethod method =
      smooth ? DerivativeMethod::kShooting : DerivativeMethod::kFiniteDifference;
  cx.report["derivative_method"] = to_string(method);
  for (std::size_t p = 0; p < c.initial.size(); ++p) {
    const std::string id = cx.label(p);
    const MFGSolution sol = solve_mfg(cx.spec, cx.t(p), cx.mu(p), c.solver);
    const double span = c.horizon - cx.t(p);
    // The residual needs 0 < t < T; interior samples follow the equilibrium.
    std::vector<std::pair<double, Vector>> at;
    if (cx.t(p) > 0.0) at.emplace_back(cx.t(p), cx.mu(p).values());
    for (double f : {0.1, 0.25, 0.5, 0.75}) {
      const double s = cx.t(p) + f * span;
      Vector m = sol.rho.at(s);
      m /= m.sum();
      at.emplace_back(s, m);
    }
    for (std::size_t k = 0; k < at.size(); ++k) {
      const MasterResidual r = master_residual(cx.spec, at[k].first,
                                               SimplexPoint(at[k].second), c.h_t, c.solver,
                                               method);
      cx.check(id + ".residual_" + std::to_string(k), r.norm, "<", c.tol_master);
      csv << at[k].first << at[k].second << r.residual << r.norm;
      csv.end_row();
      samples.push_back({{"point", id},
                         {"t", at[k].first},
                         {"mu", to_json(at[k].second)},
                         {"u", to_json(r.sample.u)},
                         {"dt_u", to_json(r.sample.dt_u)},
                         {"residual", to_json(r.residual)},
                         {"norm", r.norm},
                         {"time_scheme", r.time_scheme}});
    }
    const double cons = trajectory_consistency(
        cx.spec, sol, {cx.t(p) + 0.25 * span, cx.t(p) + 0.5 * span, cx.t(p) + 0.75 * span},
        c.solver);
    cx.check(id + ".trajectory_consistency", cons, "<=", 1e-6);
  }
  cx.report["samples"] = samples;
}

void dump_path(const fs::path& path, const WeightedGraph& g, const ActionPath& a) {
  std::string header = "s" + vertex_columns("rho", g.size());
  for (const Edge& e : g.edges()) {
    header += ",m_(" + std::to_string(e.i + 1) + "_" + std::to_string(e.j + 1) + ")";
  }
  Csv csv(path, header);
  for (int k = 0; k < a.grid.nodes(); ++k) {
    csv << a.grid.time(k) << a.rho[k];
    for (const Edge& e : g.edges()) {
      csv << (k < a.grid.steps() ? a.m[k](e.i, e.j) : std::nan(""));
    }
    csv.end_row();
  }
}

void suite_hjb(SuiteContext& cx) {
  const auto& c = cx.config;
  if (cx.spec.extended()) {
    cx.result.status = "skipped";
    cx.report["note"] = "the value function needs a flux derived from the Hamiltonian";
    cx.log << "  skipped: extended instance\n";
    return;
  }
  const IotaBounds iota = iota_bounds(cx.spec);
  cx.report["iota"] = {{"lower", iota.lower}, {"upper", iota.upper}};
  Json points = Json::array();
  DirectOptions dopt;
  dopt.steps = c.direct_steps;
  dopt.grad_tol = c.direct_grad_tol;
  dopt.fb = c.solver;
  for (std::size_t p = 0; p < c.initial.size(); ++p) {
    const std::string id = cx.label(p);
    const HJBValue fb = value_by_fb(cx.spec, cx.t(p), cx.mu(p), c.solver);
    const HJBValue dm = value_by_direct_min(cx.spec, cx.t(p), cx.mu(p), dopt);
    const double gap = std::abs(dm.value - fb.value) / (1.0 + std::abs(fb.value));
    cx.check(id + ".direct_vs_fb", gap, "<=", c.tol_hjb);
    cx.check(id + ".iota_lower", fb.value - iota.lower, ">=", 0.0);
    cx.check(id + ".iota_upper", iota.upper - fb.value, ">=", 0.0);
    const GradientIdentityReport gi =
        gradient_identity_check(cx.spec, cx.t(p), cx.mu(p), c.solver);
    cx.check(id + ".gradient_identity", gi.max_gap, "<", c.tol_hjb);
    // Interior time: (t, mu) itself when t > 0, else the trajectory midpoint.
    double ts = cx.t(p);
    Vector ms = cx.mu(p).values();
    if (ts == 0.0) {
      ts = 0.5 * c.horizon;
      const MFGSolution sol = solve_mfg(cx.spec, 0.0, cx.mu(p), c.solver);
      ms = sol.rho.at(ts);
      ms /= ms.sum();
    }
    const HJBResidual hr = hjb_residual(cx.spec, ts, SimplexPoint(ms), c.h_t, c.solver);
    cx.check(id + ".hjb_residual", std::abs(hr.residual), "<", c.tol_hjb);
    const HolderReport hold = holder_check(cx.spec, dm.path);
    cx.check(id + ".holder_ratio", hold.max_ratio, "<=", 1.0 + 1e-12, false);
    const SemiconcavityReport sc =
        semiconcavity_probe(cx.spec, cx.t(p), cx.mu(p), 1e-2, c.solver);
    cx.check(id + ".semiconcavity_stability",
             std::abs(sc.ratio_half / sc.ratio - 1.0), "<=", 0.1, false);
    points.push_back({{"t", cx.t(p)},
                      {"mu", to_json(cx.mu(p).values())},
                      {"value_fb", fb.value},
                      {"value_direct", dm.value},
                      {"direct_iterations", dm.iterations},
                      {"direct_gradient_norm", dm.gradient_norm},
                      {"gradient_identity", {{"times", gi.times}, {"gaps", gi.gaps}}},
                      {"hjb_residual_t", ts},
                      {"hjb_residual", hr.residual},
                      {"dt_value", hr.dt_value},
                      {"time_scheme", hr.time_scheme},
                      {"holder", {{"exponent", hold.exponent},
                                  {"rho_dot_norm", hold.rho_dot_norm},
                                  {"max_ratio", hold.max_ratio}}},
                      {"semiconcavity", {{"h", sc.h},
                                         {"ratio", sc.ratio},
                                         {"ratio_half", sc.ratio_half}}}});
    dump_path(cx.file("hjb_path_" + id + ".csv"), c.graph, dm.path);
  }
  const ConvexityReport conv = convexity_probe(
      cx.spec, cx.t(0), c.convexity_chords, c.seed.value_or(1), c.solver);
  cx.check("convexity_min_margin", conv.min_margin, ">", 0.0);
  cx.report["convexity"] = {{"t", cx.t(0)}, {"margins", conv.margins},
                            {"min_margin", conv.min_margin}};
  cx.report["points"] = points;
}

Json certificate_json(const NashReport& r) {
  Json v = Json::array();
  for (const auto& x : r.violations) {
    v.push_back({{"t", x.t}, {"i", x.i + 1}, {"j", x.j + 1}, {"q", x.value}});
  }
  Json out = {{"admissible", r.admissible}, {"margin", r.margin}, {"violations", v}};
  if (!r.admissible) {
    out["status"] = "NOT-APPLICABLE";
    return out;
  }
  Json gaps = Json::array();
  for (const auto& d : r.deviations) {
    Json g = {{"vertex", d.vertex + 1}, {"kind", d.kind},
              {"admissible", d.admissible}, {"gap", d.gap}};
    if (d.a.size() > 0) g["a"] = to_json(d.a);
    gaps.push_back(g);
  }
  out["equality_gap"] = r.equality_gap;
  out["j_ode"] = to_json(r.j_ode);
  out["u0"] = to_json(r.u0);
  out["consistency_gap"] = r.consistency_gap;
  out["separable"] = r.separable;
  out["min_deviation_gap"] = r.min_deviation_gap;
  out["skipped"] = r.skipped;
  out["quadratic_ratio"] = r.quadratic_ratio;
  out["deviation_gaps"] = gaps;
  out["mc"] = {{"n_paths", r.mc.n_paths}, {"rate", r.mc.rate},
               {"mean", to_json(r.mc.mean)}, {"stderr", to_json(r.mc.stderr_)},
               {"max_zscore", r.max_mc_zscore}};
  return out;
}

void suite_nash(SuiteContext& cx) {
  const auto& c = cx.config;
  const std::uint64_t seed = c.seed.value();
  const int n = c.graph.size();
  Json points = Json::array();
  int applicable = 0;
  for (std::size_t p = 0; p < c.initial.size(); ++p) {
    const std::string id = cx.label(p);
    if (cx.t(p) != 0.0) {
      cx.log << "  " << id << ": certificate is stated from t = 0, skipped\n";
      continue;
    }
    NashOptions o;
    o.solver = c.solver;
    o.seed = seed;
    o.mc_paths = c.mc_paths;
    o.threads = c.threads;
    const NashReport r = nash_certificate(cx.spec, cx.mu(p), o);
    Json cert = certificate_json(r);
    cert["mu"] = to_json(cx.mu(p).values());
    if (!r.admissible) {
      cx.log << "  " << id << ": NOT-APPLICABLE, " << r.violations.size()
             << " reported violations, margin " << format_double(r.margin) << "\n";
      points.push_back(cert);
      continue;
    }
    ++applicable;
    cx.check(id + ".equality_gap", r.equality_gap, "<=", c.tol_equality);
    cx.check(id + ".min_deviation_gap", r.min_deviation_gap, ">=", -c.tol_gap);
    cx.check(id + ".mc_max_zscore", r.max_mc_zscore, "<=", 3.0);
    cx.check(id + ".consistency_gap", r.consistency_gap, "<=", 1e-6);
    cx.check(id + ".quadratic_ratio_offset", std::abs(r.quadratic_ratio - 0.25),
             "<=", 0.05, false);

    const EquilibriumControl eq = optimal_control(cx.spec, cx.mu(p), c.solver);
    const auto psi = propagator(eq.q, 0);
    double rows = 0.0;
    for (const Matrix& m : psi) {
      rows = std::max(rows, (m.rowwise().sum().array() - 1.0).abs().maxCoeff());
    }
    const int mid = eq.q.grid.steps() / 2;
    const auto psi_mid = propagator(eq.q, mid);
    const double ck = (psi.back() - psi[mid] * psi_mid.back()).cwiseAbs().maxCoeff();
    cx.check(id + ".row_stochastic", rows, "<=", 1e-10);
    cx.check(id + ".chapman_kolmogorov", ck, "<=", 1e-8);

    const auto& sol = eq.solution;
    std::vector<Vector> fd;
    for (int k = 0; k < sol.grid().nodes(); ++k) {
      fd.push_back(cx.spec.H(sol.rho[k], grad(c.graph, sol.phi[k])) -
                   laplacian(c.graph, sol.phi[k]));
    }
    const VectorSeries fdot(sol.grid(), fd);
    const int mpaths = std::max(1000, c.mc_paths / 10);
    Json mart = Json::array();
    for (int i = 0; i < n; ++i) {
      const MartingaleReport m =
          martingale_probe(eq.q, sol.phi, fdot, i, mpaths, seed + 1 + i, c.threads);
      cx.check(id + ".martingale_v" + std::to_string(i + 1),
               std::abs(m.mean) / m.stderr_, "<=", 4.0);
      mart.push_back({{"start", i + 1}, {"mean", m.mean}, {"stderr", m.stderr_},
                      {"max_identity_error", m.max_identity_error},
                      {"n_paths", m.n_paths}});
    }
    cert["martingale"] = mart;
    cert["propagator"] = {{"row_sum_error", rows}, {"chapman_kolmogorov", ck}};
    points.push_back(cert);

    Csv csv(cx.file("nash_paths_" + id + ".csv"), "path,t_jump,vertex");
    for (int k = 0; k < 10; ++k) {
      const ChainSample path = sample_chain(eq.q, 0, path_seed(seed, k));
      for (std::size_t j = 0; j < path.times.size(); ++j) {
        csv << k << path.times[j] << path.states[j] + 1;
        csv.end_row();
      }
    }
  }
  cx.report["certificates"] = points;
  if (c.torus_sweep) {
    const auto sweep = torus_admissibility_sweep(
        c.torus_sweep->k, c.model, c.horizon, c.torus_sweep->amplitude, c.solver);
    Json js = Json::array();
    double increase = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < sweep.size(); ++k) {
      js.push_back({{"n", sweep[k].n}, {"mesh", sweep[k].mesh},
                    {"margin", sweep[k].margin}, {"admissible", sweep[k].admissible}});
      cx.log << "  torus n=" << sweep[k].n << " margin " << format_double(sweep[k].margin) << "\n";
      if (k > 0) increase = std::min(increase, sweep[k].margin - sweep[k - 1].margin);
    }
    if (sweep.size() > 1) cx.check("torus_margin_increase", increase, ">", 0.0);
    cx.report["torus_sweep"] = js;
  }
  if (applicable == 0 && !c.torus_sweep) cx.result.status = "not-applicable";
}

Json checks_json(const SuiteResult& r) {
  Json a = Json::array();
  for (const Check& c : r.checks) {
    a.push_back({{"name", c.name}, {"value", c.value}, {"relation", c.relation},
                 {"tolerance", c.tolerance}, {"hard", c.hard}, {"passed", c.passed}});
  }
  return a;
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

SuiteResult run_suite(const ExperimentConfig& c, const fs::path& out,
                      const std::string& name, std::string& log) {
  const auto start = std::chrono::steady_clock::now();
  SuiteContext cx(c, out, name);
  cx.log << "[" << name << "]\n";
  try {
    if (name == "interiority") suite_interiority(cx);
    else if (name == "mfg") suite_mfg(cx);
    else if (name == "master") suite_master(cx);
    else if (name == "hjb") suite_hjb(cx);
    else if (name == "nash") suite_nash(cx);
  } catch (const std::exception& e) {
    cx.result.error = e.what();
    cx.log << "  error: " << e.what() << "\n";
  }
  SuiteResult& r = cx.result;
  bool failed = !r.error.empty();
  for (const Check& ck : r.checks) failed = failed || (ck.hard && !ck.passed);
  if (failed) r.status = "fail";
  else if (r.status.empty()) r.status = "pass";
  cx.report["status"] = r.status;
  if (!r.error.empty()) cx.report["error"] = r.error;
  cx.report["checks"] = checks_json(r);
  write_json(cx.file(name + ".json"), cx.report);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  cx.log << "  -> " << r.status << "\n";
  log = cx.log.str();
  return r;
}

}  // namespace

bool RunResult::passed() const {
  for (const auto& s : suites) {
    if (!s.passed()) return false;
  }
  return true;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

RunResult run_experiment(const ExperimentConfig& config, const RunOptions& opts,
                         std::ostream& log) {
  std::vector<std::string> suites;
  for (const auto& s : config.suites) {
    if (!opts.suite || *opts.suite == s) suites.push_back(s);
  }
  if (opts.suite && suites.empty()) {
    throw ConfigError("suite \"" + *opts.suite + "\" is not enabled by the config");
  }
  std::string dir = config.output_dir;
  if (const char* env = std::getenv(kOutputEnv); env && *env) dir = env;
  if (opts.out_dir) dir = *opts.out_dir;
  const fs::path out(dir);
  fs::create_directories(out);

  RunResult result;
  result.out_dir = out.string();
  result.suites.resize(suites.size());
  std::vector<std::string> logs(suites.size());
  const auto start = std::chrono::system_clock::now();
  const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(suites.size())));
  std::vector<std::thread> pool;
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < suites.size(); k += jobs) {
        result.suites[k] = run_suite(config, out, suites[k], logs[k]);
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& l : logs) log << l;

  Json summary = {{"name", config.name},
                  {"vertices", config.graph.size()},
                  {"graph", config.graph.description},
                  {"passed", result.passed()}};
  Json js = Json::array();
  Json timing = Json::object();
  for (const auto& s : result.suites) {
    Json e = {{"name", s.name}, {"status", s.status}, {"checks", checks_json(s)}};
    if (!s.error.empty()) e["error"] = s.error;
    js.push_back(e);
    timing[s.name] = s.seconds;
  }
  summary["suites"] = js;
  write_json(out / "summary.json", summary);

  const std::time_t now = std::chrono::system_clock::to_time_t(start);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  write_json(out / "metadata.json",
             {{"started", stamp}, {"config", config.source}, {"jobs", jobs},
              {"seconds", timing}});
  log << (result.passed() ? "PASS" : "FAIL") << "  (" << out.string() << ")\n";
  return result;
}

}  // namespace graphmfg
