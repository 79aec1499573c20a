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

#include "graphmfg/theta.hpp"

#include <cmath>
#include <string>

#include "graphmfg/errors.hpp"

namespace graphmfg {
namespace {

// Taylor coefficients of z / atanh(z) in powers of z^2.
constexpr int kTerms = 13;
constexpr double kSeries[kTerms] = {
    1.0,
    -1.0 / 3.0,
    -4.0 / 45.0,
    -44.0 / 945.0,
    -428.0 / 14175.0,
    -10196.0 / 467775.0,
    -10719068.0 / 638512875.0,
    -25865068.0 / 1915538625.0,
    -5472607916.0 / 488462349375.0,
    -0.0095160731945278989,
    -0.0082312065673505012,
    -0.0072244647373939065,
    -0.0064170630313972957,
};

// Beyond this |z| the closed forms lose at most a couple of digits, and the
// truncated series is still accurate to ~1e-16 in G''.
constexpr double kSeriesRadius = 0.2;

struct GJet {
  double g, g1, g2;
};

GJet g_series(double z) {
  const double z2 = z * z;
  double g = 0.0, g1 = 0.0, g2 = 0.0;
  // Horner on c_k z^{2k}, its first and second derivatives.
  for (int k = kTerms - 1; k >= 0; --k) {
    g = g * z2 + kSeries[k];
    if (k >= 1) g1 = g1 * z2 + 2.0 * k * kSeries[k];
    if (k >= 1) g2 = g2 * z2 + 2.0 * k * (2.0 * k - 1.0) * kSeries[k];
  }
  // g1 accumulated sum 2k c_k z^{2k-2}; multiply by z. g2 is already
  // sum 2k(2k-1) c_k z^{2k-2}.
  return {g, g1 * z, g2};
}

// Closed form with atanh(z) = log(r/s)/2 and 1 - z^2 = 4rs/(r+s)^2 taken
// from r, s directly, so that nothing cancels as z -> +-1.
GJet g_direct(double r, double s, double z) {
  const double a = 0.5 * (std::log(r) - std::log(s));
  const double sum = r + s;
  const double a1 = sum * sum / (4.0 * r * s);  // 1 / (1 - z^2)
  const double a2 = 2.0 * z * a1 * a1;
  const double g = z / a;
  const double num = a - z * a1;
  const double g1 = num / (a * a);
  const double g2 = (-z * a2 * a - 2.0 * a1 * num) / (a * a * a);
  return {g, g1, g2};
}

void require_nonnegative(double r, double s) {
  if (!(r >= 0.0) || !(s >= 0.0)) {
    throw DomainError("theta: arguments must be nonnegative, got (" +
                      std::to_string(r) + ", " + std::to_string(s) + ")");
  }
}

void require_positive(double r, double s) {
  if (!(r > 0.0) || !(s > 0.0)) {
    throw DomainError("theta derivatives: arguments must be positive, got (" +
                      std::to_string(r) + ", " + std::to_string(s) + ")");
  }
}

}  // namespace

ThetaJet theta_jet(double r, double s) {
  require_positive(r, s);
  const double sum = r + s;
  const double m = 0.5 * sum;
  const double z = (r - s) / sum;
  const double one_minus = 2.0 * s / sum;
  const double one_plus = 2.0 * r / sum;
  const GJet gj = std::abs(z) < kSeriesRadius ? g_series(z) : g_direct(r, s, z);
  ThetaJet j;
  j.value = m * gj.g;
  j.d1 = 0.5 * (gj.g + one_minus * gj.g1);
  j.d2 = 0.5 * (gj.g - one_plus * gj.g1);
  const double c = gj.g2 / (4.0 * m);
  j.d11 = one_minus * one_minus * c;
  j.d12 = -one_minus * one_plus * c;
  j.d22 = one_plus * one_plus * c;
  return j;
}

double theta(double r, double s) {
  require_nonnegative(r, s);
  if (r == 0.0 || s == 0.0) return 0.0;
  const double sum = r + s;
  const double z = (r - s) / sum;
  if (std::abs(z) < kSeriesRadius) return 0.5 * sum * g_series(z).g;
  return (r - s) / (std::log(r) - std::log(s));
}

double theta_d1(double r, double s) { return theta_jet(r, s).d1; }
double theta_d2(double r, double s) { return theta_jet(r, s).d2; }

double h_log(double u) {
  if (!(u > 0.0)) throw DomainError("h_log: argument must be positive");
  return theta(1.0, u) / (1.0 + u);
}

}  // namespace graphmfg
