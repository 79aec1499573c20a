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

#ifndef GRAPHMFG_TRAJECTORY_HPP_
#define GRAPHMFG_TRAJECTORY_HPP_

#include <array>
#include <cmath>
#include <vector>

#include "graphmfg/graph.hpp"

namespace graphmfg {

// Uniform grid t0 = s_0 < ... < s_N = t1.
class UniformGrid {
 public:
  UniformGrid() = default;
  UniformGrid(double t0, double t1, int steps);

  double t0() const { return t0_; }
  double t1() const { return t1_; }
  int steps() const { return steps_; }
  int nodes() const { return steps_ + 1; }
  double dt() const { return dt_; }
  double time(int k) const { return k == steps_ ? t1_ : t0_ + k * dt_; }

  // Four-point Lagrange stencil around s: first node index and weights.
  struct Stencil {
    int first;
    std::array<double, 4> w;
  };
  Stencil stencil(double s) const;
  // Weights for the midpoint of [s_k, s_{k+1}].
  Stencil midpoint_stencil(int k) const;

 private:
  double t0_ = 0.0, t1_ = 1.0, dt_ = 1.0;
  int steps_ = 1;
};

// Values at the nodes of a uniform grid; cubic interpolation in between.
// T is an Eigen vector or matrix type.
template <class T>
class GridSeries {
 public:
  GridSeries() = default;
  GridSeries(UniformGrid grid, std::vector<T> values)
      : grid_(grid), values_(std::move(values)) {}

  const UniformGrid& grid() const { return grid_; }
  const std::vector<T>& values() const { return values_; }
  std::vector<T>& values() { return values_; }
  const T& operator[](int k) const { return values_[k]; }
  T& operator[](int k) { return values_[k]; }
  const T& front() const { return values_.front(); }
  const T& back() const { return values_.back(); }
  int nodes() const { return static_cast<int>(values_.size()); }

  T at(double s) const { return apply(grid_.stencil(s)); }
  T midpoint(int k) const { return apply(grid_.midpoint_stencil(k)); }

 private:
  T apply(const UniformGrid::Stencil& st) const {
    T out = st.w[0] * values_[st.first];
    for (int a = 1; a < 4; ++a) out += st.w[a] * values_[st.first + a];
    return out;
  }

  UniformGrid grid_;
  std::vector<T> values_;
};

using VectorSeries = GridSeries<Vector>;
using MatrixSeries = GridSeries<Matrix>;

// Max over nodes of the sup-norm difference.
double max_abs_diff(const VectorSeries& a, const VectorSeries& b);

// Classical RK4 step for y' = f(s, y).
template <class T, class F>
T rk4_step(F&& f, double s, const T& y, double h) {
  const T k1 = f(s, y);
  const T k2 = f(s + 0.5 * h, T(y + (0.5 * h) * k1));
  const T k3 = f(s + 0.5 * h, T(y + (0.5 * h) * k2));
  const T k4 = f(s + h, T(y + h * k3));
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Fourth-order defect of y' = f at every node: the derivative is recovered
// from a five-point finite-difference stencil (one-sided at the ends) and
// compared with f(s_k, y_k). Returns the sup-norm over nodes.
template <class F>
double ode_defect(const VectorSeries& y, F&& f) {
  const UniformGrid& g = y.grid();
  const int n = g.nodes();
  const double h = g.dt();
  // d/ds at offset position r within the 5-node window [k0, k0+4].
  static const double kW[5][5] = {
      {-25.0 / 12, 4.0, -3.0, 4.0 / 3, -1.0 / 4},
      {-1.0 / 4, -5.0 / 6, 3.0 / 2, -1.0 / 2, 1.0 / 12},
      {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12},
      {-1.0 / 12, 1.0 / 2, -3.0 / 2, 5.0 / 6, 1.0 / 4},
      {1.0 / 4, -4.0 / 3, 3.0, -4.0, 25.0 / 12},
  };
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    int k0 = k - 2;
    if (k0 < 0) k0 = 0;
    if (k0 + 4 > n - 1) k0 = n - 5;
    const int r = k - k0;
    Vector d = kW[r][0] * y[k0];
    for (int a = 1; a < 5; ++a) d += kW[r][a] * y[k0 + a];
    d /= h;
    worst = std::max(worst,
                     (d - f(g.time(k), y[k], k)).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace graphmfg

#endif  // GRAPHMFG_TRAJECTORY_HPP_
