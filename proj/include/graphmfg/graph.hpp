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

#ifndef GRAPHMFG_GRAPH_HPP_
#define GRAPHMFG_GRAPH_HPP_

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "graphmfg/theta.hpp"

namespace graphmfg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Edge {
  int i;  // i < j
  int j;
  double omega;
  double sqrt_omega;
};

// Connected, undirected, weighted graph without loops or multi-edges.
// Vertices are 0-indexed here; all I/O is 1-indexed.
class WeightedGraph {
 public:
  // Builds from a symmetric weight matrix; omega(i,j) > 0 marks an edge.
  explicit WeightedGraph(const Matrix& omega);
  // Builds from 0-indexed (i, j, omega) triples.
  WeightedGraph(int n, const std::vector<std::tuple<int, int, double>>& edges);

  int size() const { return n_; }
  const Matrix& omega() const { return omega_; }
  const Matrix& sqrt_omega() const { return sqrt_omega_; }
  double omega(int i, int j) const { return omega_(i, j); }
  bool has_edge(int i, int j) const { return i != j && omega_(i, j) > 0.0; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int i) const { return neighbors_[i]; }
  double omega_min() const { return omega_min_; }
  double omega_max() const { return omega_max_; }

  // Matrix L with (L u)^i = sum_j omega_ij (u^j - u^i).
  Matrix laplacian_matrix() const;
  // BFS spanning tree rooted at vertex 0, as a subset of edges().
  std::vector<Edge> spanning_tree() const;
  // Hop distances from `source`.
  std::vector<int> hop_distances(int source) const;

  std::string description;

 private:
  void init();

  int n_ = 0;
  Matrix omega_;
  Matrix sqrt_omega_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> neighbors_;
  double omega_min_ = 0.0;
  double omega_max_ = 0.0;
};

WeightedGraph path_graph(int n, double omega = 1.0);
WeightedGraph cycle_graph(int n, double omega = 1.0);
WeightedGraph complete_graph(int n, double omega = 1.0);
// d-dimensional periodic grid with k points per side, mesh h = 1/k and
// nearest-neighbour weight 1/h^2 = k^2. For k = 2 the wrap-around edge
// coincides with the direct one; it is kept single.
WeightedGraph torus_graph(int d, int k);

// Skew-symmetric array supported on the edges of a graph. Storage is a
// dense n x n matrix; the caller's graph fixes the support.
class EdgeField {
 public:
  EdgeField() = default;
  explicit EdgeField(int n) : values_(Matrix::Zero(n, n)) {}
  // Validates skew-symmetry and support on `g`.
  EdgeField(const WeightedGraph& g, const Matrix& values);
  // No validation; for results built skew by construction.
  static EdgeField unchecked(Matrix values);

  int size() const { return static_cast<int>(values_.rows()); }
  double operator()(int i, int j) const { return values_(i, j); }
  // Sets m^{ij} = x and m^{ji} = -x.
  void set(int i, int j, double x) {
    values_(i, j) = x;
    values_(j, i) = -x;
  }
  const Matrix& values() const { return values_; }

  EdgeField& operator+=(const EdgeField& o);
  EdgeField& operator-=(const EdgeField& o);
  EdgeField& operator*=(double a);
  friend EdgeField operator+(EdgeField a, const EdgeField& b) { return a += b; }
  friend EdgeField operator-(EdgeField a, const EdgeField& b) { return a -= b; }
  friend EdgeField operator*(double s, EdgeField a) { return a *= s; }
  double max_abs() const { return values_.cwiseAbs().maxCoeff(); }

 private:
  Matrix values_;
};

// Element of the tangent space R^n_0 (zero component sum).
class TangentVector {
 public:
  TangentVector() = default;
  // Checks |sum| <= 1e-12 * max(1, |v|_1).
  explicit TangentVector(Vector v);
  const Vector& values() const { return v_; }
  operator const Vector&() const { return v_; }
  int size() const { return static_cast<int>(v_.size()); }
  double operator[](int i) const { return v_(i); }

 private:
  Vector v_;
};

// Strictly positive probability vector.
class SimplexPoint {
 public:
  SimplexPoint() = default;
  // Requires all components > 0 and |sum - 1| <= 1e-12.
  explicit SimplexPoint(Vector mu);
  const Vector& values() const { return mu_; }
  operator const Vector&() const { return mu_; }
  int size() const { return static_cast<int>(mu_.size()); }
  double operator[](int i) const { return mu_(i); }
  bool in_interior(double eps) const { return mu_.minCoeff() > eps; }
  static SimplexPoint uniform(int n);

 private:
  Vector mu_;
};

EdgeField grad(const WeightedGraph& g, const Vector& u);
TangentVector div(const WeightedGraph& g, const EdgeField& m);
Vector laplacian(const WeightedGraph& g, const Vector& u);
// (m, m2) = 1/2 sum over ordered pairs, i.e. the sum over i < j.
double edge_inner(const EdgeField& m, const EdgeField& m2);
// Symmetric matrix theta(rho^i, rho^j) on edges, 0 elsewhere.
Matrix theta_matrix(const WeightedGraph& g, const Vector& rho);
double rho_inner(const WeightedGraph& g, const Vector& rho, const EdgeField& v,
                 const EdgeField& v2);
TangentVector rho_div(const WeightedGraph& g, const Vector& rho,
                      const EdgeField& v);
TangentVector project_tangent(const Vector& v);
// Orthonormal basis of R^n_0 as columns of an n x (n-1) matrix.
Matrix tangent_basis(int n);

void check_size(const WeightedGraph& g, const Vector& u, const char* what);

}  // namespace graphmfg

#endif  // GRAPHMFG_GRAPH_HPP_
