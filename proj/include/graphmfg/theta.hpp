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

#ifndef GRAPHMFG_THETA_HPP_
#define GRAPHMFG_THETA_HPP_

namespace graphmfg {

// Logarithmic mean theta(r, s) = (r - s) / (log r - log s), extended by
// continuity to the diagonal and by 0 when rs = 0.
//
// All quantities are evaluated in the coordinates m = (r + s) / 2 and
// z = (r - s) / (r + s), where theta = m * G(z) with G(z) = z / atanh(z).
// Near the diagonal G is expanded in its (even) power series, which keeps
// full relative precision; the partial derivatives are written in terms of
// G and G' so that r d1 + s d2 = theta and d1(r, s) = d2(s, r) hold to
// rounding.
struct ThetaJet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d11 = 0.0;
  double d12 = 0.0;
  double d22 = 0.0;
};

double theta(double r, double s);
double theta_d1(double r, double s);
double theta_d2(double r, double s);

// Value, gradient and Hessian; requires r, s > 0.
ThetaJet theta_jet(double r, double s);

// h_log(u) = theta(1, u) / (1 + u), the mobility profile; h_log(1) = 1/2.
double h_log(double u);

}  // namespace graphmfg

#endif  // GRAPHMFG_THETA_HPP_
