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

#include "graphmfg/trajectory.hpp"

#include <algorithm>

#include "graphmfg/errors.hpp"

namespace graphmfg {

UniformGrid::UniformGrid(double t0, double t1, int steps)
    : t0_(t0), t1_(t1), steps_(steps) {
  if (steps < 3) throw DomainError("grid needs at least 3 steps");
  if (!(t1 > t0)) throw DomainError("grid needs t1 > t0");
  dt_ = (t1 - t0) / steps;
}

UniformGrid::Stencil UniformGrid::stencil(double s) const {
  double x = (s - t0_) / dt_;
  int k = static_cast<int>(std::floor(x));
  k = std::clamp(k, 0, steps_ - 1);
  const int first = std::clamp(k - 1, 0, steps_ - 3);
  Stencil st;
  st.first = first;
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b == a) continue;
      w *= (x - (first + b)) / static_cast<double>(a - b);
    }
    st.w[a] = w;
  }
  return st;
}

UniformGrid::Stencil UniformGrid::midpoint_stencil(int k) const {
  Stencil st;
  if (k == 0) {
    st.first = 0;
    st.w = {5.0 / 16, 15.0 / 16, -5.0 / 16, 1.0 / 16};
  } else if (k == steps_ - 1) {
    st.first = steps_ - 3;
    st.w = {1.0 / 16, -5.0 / 16, 15.0 / 16, 5.0 / 16};
  } else {
    st.first = k - 1;
    st.w = {-1.0 / 16, 9.0 / 16, 9.0 / 16, -1.0 / 16};
  }
  return st;
}

double max_abs_diff(const VectorSeries& a, const VectorSeries& b) {
  if (a.nodes() != b.nodes()) throw DimensionMismatch("series lengths differ");
  double worst = 0.0;
  for (int k = 0; k < a.nodes(); ++k) {
    worst = std::max(worst, (a[k] - b[k]).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace graphmfg
