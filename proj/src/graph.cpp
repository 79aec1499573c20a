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

#include "graphmfg/graph.hpp"

#include <cmath>
#include <queue>
#include <tuple>

#include "graphmfg/errors.hpp"

namespace graphmfg {

void check_size(const WeightedGraph& g, const Vector& u, const char* what) {
  if (u.size() != g.size()) {
    throw DimensionMismatch(std::string(what) + ": expected length " +
                            std::to_string(g.size()) + ", got " +
                            std::to_string(u.size()));
  }
}

WeightedGraph::WeightedGraph(const Matrix& omega) : omega_(omega) { init(); }

WeightedGraph::WeightedGraph(
    int n, const std::vector<std::tuple<int, int, double>>& edges) {
  if (n < 2) throw DomainError("graph needs at least 2 vertices");
  omega_ = Matrix::Zero(n, n);
  for (const auto& [i, j, w] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw DomainError("edge (" + std::to_string(i + 1) + ", " +
                        std::to_string(j + 1) + ") out of range");
    }
    if (i == j) {
      throw DomainError("self-loop at vertex " + std::to_string(i + 1));
    }
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw DomainError("edge (" + std::to_string(i + 1) + ", " +
                        std::to_string(j + 1) +
                        ") has non-positive weight " + std::to_string(w));
    }
    if (omega_(i, j) != 0.0) {
      throw DomainError("duplicate edge (" + std::to_string(i + 1) + ", " +
                        std::to_string(j + 1) + ")");
    }
    omega_(i, j) = omega_(j, i) = w;
  }
  init();
}

void WeightedGraph::init() {
  n_ = static_cast<int>(omega_.rows());
  if (n_ < 2 || omega_.cols() != n_) {
    throw DomainError("weight matrix must be square with n >= 2");
  }
  for (int i = 0; i < n_; ++i) {
    if (omega_(i, i) != 0.0) throw DomainError("self-loops are not allowed");
    for (int j = 0; j < n_; ++j) {
      if (omega_(i, j) != omega_(j, i)) {
        throw DomainError("weight matrix is not symmetric");
      }
      if (omega_(i, j) < 0.0) throw DomainError("negative weight");
    }
  }
  sqrt_omega_ = omega_.cwiseSqrt();
  edges_.clear();
  neighbors_.assign(n_, {});
  omega_min_ = INFINITY;
  omega_max_ = 0.0;
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      if (omega_(i, j) <= 0.0) continue;
      neighbors_[i].push_back(j);
      if (i < j) {
        edges_.push_back({i, j, omega_(i, j), sqrt_omega_(i, j)});
        omega_min_ = std::min(omega_min_, omega_(i, j));
        omega_max_ = std::max(omega_max_, omega_(i, j));
      }
    }
  }
  const auto dist = hop_distances(0);
  for (int d : dist) {
    if (d < 0) throw DomainError("graph is not connected");
  }
}

Matrix WeightedGraph::laplacian_matrix() const {
  Matrix l = omega_;
  for (int i = 0; i < n_; ++i) l(i, i) = -omega_.row(i).sum();
  return l;
}

std::vector<int> WeightedGraph::hop_distances(int source) const {
  std::vector<int> dist(n_, -1);
  std::queue<int> q;
  dist[source] = 0;
  q.push(source);
  while (!q.empty()) {
    const int i = q.front();
    q.pop();
    for (int j : neighbors_[i]) {
      if (dist[j] < 0) {
        dist[j] = dist[i] + 1;
        q.push(j);
      }
    }
  }
  return dist;
}

std::vector<Edge> WeightedGraph::spanning_tree() const {
  std::vector<Edge> tree;
  std::vector<bool> seen(n_, false);
  std::queue<int> q;
  seen[0] = true;
  q.push(0);
  while (!q.empty()) {
    const int i = q.front();
    q.pop();
    for (int j : neighbors_[i]) {
      if (seen[j]) continue;
      seen[j] = true;
      q.push(j);
      const int a = std::min(i, j), b = std::max(i, j);
      tree.push_back({a, b, omega_(a, b), sqrt_omega_(a, b)});
    }
  }
  return tree;
}

WeightedGraph path_graph(int n, double omega) {
  std::vector<std::tuple<int, int, double>> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1, omega);
  WeightedGraph g(n, e);
  g.description = "path P" + std::to_string(n);
  return g;
}

WeightedGraph cycle_graph(int n, double omega) {
  if (n < 3) throw DomainError("cycle needs n >= 3");
  std::vector<std::tuple<int, int, double>> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n, omega);
  WeightedGraph g(n, e);
  g.description = "cycle C" + std::to_string(n);
  return g;
}

WeightedGraph complete_graph(int n, double omega) {
  std::vector<std::tuple<int, int, double>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j, omega);
  WeightedGraph g(n, e);
  g.description = "complete K" + std::to_string(n);
  return g;
}

WeightedGraph torus_graph(int d, int k) {
  if (d < 1 || k < 2) throw DomainError("torus needs d >= 1 and k >= 2");
  int n = 1;
  for (int a = 0; a < d; ++a) n *= k;
  const double w = static_cast<double>(k) * k;
  Matrix omega = Matrix::Zero(n, n);
  for (int v = 0; v < n; ++v) {
    int stride = 1;
    for (int a = 0; a < d; ++a) {
      const int coord = (v / stride) % k;
      const int up = v + (((coord + 1) % k) - coord) * stride;
      if (up != v) omega(v, up) = omega(up, v) = w;
      stride *= k;
    }
  }
  WeightedGraph g(omega);
  g.description = "torus d=" + std::to_string(d) + " k=" + std::to_string(k);
  return g;
}

EdgeField::EdgeField(const WeightedGraph& g, const Matrix& values)
    : values_(values) {
  const int n = g.size();
  if (values.rows() != n || values.cols() != n) {
    throw DimensionMismatch("edge field shape does not match graph");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      if (values(i, j) != -values(j, i)) {
        throw DomainError("edge field is not skew-symmetric at (" +
                          std::to_string(i + 1) + ", " +
                          std::to_string(j + 1) + ")");
      }
      if (i != j && !g.has_edge(i, j) && values(i, j) != 0.0) {
        throw DomainError("edge field is nonzero off the edge set at (" +
                          std::to_string(i + 1) + ", " +
                          std::to_string(j + 1) + ")");
      }
    }
  }
}

EdgeField EdgeField::unchecked(Matrix values) {
  EdgeField f;
  f.values_ = std::move(values);
  return f;
}

EdgeField& EdgeField::operator+=(const EdgeField& o) {
  values_ += o.values_;
  return *this;
}
EdgeField& EdgeField::operator-=(const EdgeField& o) {
  values_ -= o.values_;
  return *this;
}
EdgeField& EdgeField::operator*=(double a) {
  values_ *= a;
  return *this;
}

TangentVector::TangentVector(Vector v) : v_(std::move(v)) {
  const double scale = std::max(1.0, v_.cwiseAbs().sum());
  if (std::abs(v_.sum()) > 1e-12 * scale) {
    throw DomainError("tangent vector components do not sum to zero (sum = " +
                      std::to_string(v_.sum()) + ")");
  }
}

SimplexPoint::SimplexPoint(Vector mu) : mu_(std::move(mu)) {
  if (mu_.size() < 1) throw DimensionMismatch("empty simplex point");
  if (!(mu_.minCoeff() > 0.0)) {
    throw DomainError("simplex point must be strictly positive");
  }
  if (std::abs(mu_.sum() - 1.0) > 1e-12) {
    throw DomainError("simplex point must sum to 1 (sum = " +
                      std::to_string(mu_.sum()) + ")");
  }
}

SimplexPoint SimplexPoint::uniform(int n) {
  return SimplexPoint(Vector::Constant(n, 1.0 / n));
}

EdgeField grad(const WeightedGraph& g, const Vector& u) {
  check_size(g, u, "grad");
  Matrix m = Matrix::Zero(g.size(), g.size());
  for (const Edge& e : g.edges()) {
    const double x = e.sqrt_omega * (u(e.i) - u(e.j));
    m(e.i, e.j) = x;
    m(e.j, e.i) = -x;
  }
  return EdgeField::unchecked(std::move(m));
}

TangentVector div(const WeightedGraph& g, const EdgeField& m) {
  if (m.size() != g.size()) throw DimensionMismatch("div: shape mismatch");
  Vector d = Vector::Zero(g.size());
  for (const Edge& e : g.edges()) {
    // Contribution sqrt(w) m^{ji} to vertex i and sqrt(w) m^{ij} to j.
    const double x = e.sqrt_omega * m(e.j, e.i);
    d(e.i) += x;
    d(e.j) -= x;
  }
  return TangentVector(std::move(d));
}

Vector laplacian(const WeightedGraph& g, const Vector& u) {
  check_size(g, u, "laplacian");
  Vector d = Vector::Zero(g.size());
  for (const Edge& e : g.edges()) {
    const double x = e.omega * (u(e.j) - u(e.i));
    d(e.i) += x;
    d(e.j) -= x;
  }
  return d;
}

double edge_inner(const EdgeField& m, const EdgeField& m2) {
  if (m.size() != m2.size()) throw DimensionMismatch("edge_inner: shapes");
  return 0.5 * m.values().cwiseProduct(m2.values()).sum();
}

Matrix theta_matrix(const WeightedGraph& g, const Vector& rho) {
  check_size(g, rho, "theta_matrix");
  Matrix t = Matrix::Zero(g.size(), g.size());
  for (const Edge& e : g.edges()) {
    t(e.i, e.j) = t(e.j, e.i) = theta(rho(e.i), rho(e.j));
  }
  return t;
}

double rho_inner(const WeightedGraph& g, const Vector& rho, const EdgeField& v,
                 const EdgeField& v2) {
  check_size(g, rho, "rho_inner");
  double acc = 0.0;
  for (const Edge& e : g.edges()) {
    acc += theta(rho(e.i), rho(e.j)) * v(e.i, e.j) * v2(e.i, e.j);
  }
  return acc;
}

TangentVector rho_div(const WeightedGraph& g, const Vector& rho,
                      const EdgeField& v) {
  check_size(g, rho, "rho_div");
  return div(g, EdgeField::unchecked(
                    theta_matrix(g, rho).cwiseProduct(v.values())));
}

TangentVector project_tangent(const Vector& v) {
  return TangentVector(v.array() - v.mean());
}

Matrix tangent_basis(int n) {
  // Columns of the Householder-completed complement of the constant vector.
  Matrix a = Matrix::Zero(n, n);
  a.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
  for (int k = 1; k < n; ++k) {
    a(k - 1, k) = 1.0;
    a(k, k) = -1.0;
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  return q.rightCols(n - 1);
}

}  // namespace graphmfg
