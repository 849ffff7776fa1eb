// Copyright 2026 The softsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Forward-mode dual number carrying a batch of directional derivatives.
//
// Every arithmetic operation reproduces plain double arithmetic exactly on
// the primal lane; tangent lanes follow the chain rule. Lane count is a
// runtime property (n <= kDualMaxLanes) so a single instantiation serves
// state Jacobians, parameter Jacobians, and mixed seeds. Tangent entries at
// index >= n are never read.

#ifndef SOFTSIM_DUAL_HPP_
#define SOFTSIM_DUAL_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace softsim {

inline constexpr int kDualMaxLanes = 40;

class Dual {
 public:
  Dual() = default;
  Dual(double value) : v(value), n(0) {}  // NOLINT: implicit by design
  Dual(double value, int lane, int lanes) : v(value), n(lanes) {
    for (int i = 0; i < lanes; ++i) t[i] = 0.0;
    t[lane] = 1.0;
  }

  double v = 0.0;
  int n = 0;
  std::array<double, kDualMaxLanes> t;

  double tangent(int lane) const { return lane < n ? t[lane] : 0.0; }

  Dual& operator+=(const Dual& o);
  Dual& operator-=(const Dual& o);
  Dual& operator*=(const Dual& o);
  Dual& operator/=(const Dual& o);
};

// r = value, r.t = fa*a.t
inline Dual dual_unary(double value, const Dual& a, double fa) {
  Dual r;
  r.v = value;
  r.n = a.n;
  for (int i = 0; i < a.n; ++i) r.t[i] = fa * a.t[i];
  return r;
}

// r = value, r.t = fa*a.t + fb*b.t (absent lanes are zero)
inline Dual dual_binary(double value, const Dual& a, double fa, const Dual& b,
                        double fb) {
  Dual r;
  r.v = value;
  const int lo = std::min(a.n, b.n);
  const int hi = std::max(a.n, b.n);
  r.n = hi;
  for (int i = 0; i < lo; ++i) r.t[i] = fa * a.t[i] + fb * b.t[i];
  for (int i = lo; i < a.n; ++i) r.t[i] = fa * a.t[i];
  for (int i = lo; i < b.n; ++i) r.t[i] = fb * b.t[i];
  return r;
}

inline Dual operator+(const Dual& a, const Dual& b) {
  return dual_binary(a.v + b.v, a, 1.0, b, 1.0);
}
inline Dual operator-(const Dual& a, const Dual& b) {
  return dual_binary(a.v - b.v, a, 1.0, b, -1.0);
}
inline Dual operator*(const Dual& a, const Dual& b) {
  return dual_binary(a.v * b.v, a, b.v, b, a.v);
}
inline Dual operator/(const Dual& a, const Dual& b) {
  const double inv = 1.0 / b.v;
  return dual_binary(a.v * inv, a, inv, b, -a.v * inv * inv);
}

inline Dual operator+(const Dual& a, double b) { return dual_unary(a.v + b, a, 1.0); }
inline Dual operator+(double a, const Dual& b) { return dual_unary(a + b.v, b, 1.0); }
inline Dual operator-(const Dual& a, double b) { return dual_unary(a.v - b, a, 1.0); }
inline Dual operator-(double a, const Dual& b) { return dual_unary(a - b.v, b, -1.0); }
inline Dual operator*(const Dual& a, double b) { return dual_unary(a.v * b, a, b); }
inline Dual operator*(double a, const Dual& b) { return dual_unary(a * b.v, b, a); }
inline Dual operator/(const Dual& a, double b) { return dual_unary(a.v / b, a, 1.0 / b); }
inline Dual operator/(double a, const Dual& b) {
  const double inv = 1.0 / b.v;
  return dual_unary(a * inv, b, -a * inv * inv);
}

inline Dual operator-(const Dual& a) { return dual_unary(-a.v, a, -1.0); }
inline Dual operator+(const Dual& a) { return a; }

inline Dual& Dual::operator+=(const Dual& o) { return *this = *this + o; }
inline Dual& Dual::operator-=(const Dual& o) { return *this = *this - o; }
inline Dual& Dual::operator*=(const Dual& o) { return *this = *this * o; }
inline Dual& Dual::operator/=(const Dual& o) { return *this = *this / o; }

inline bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
inline bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }
inline bool operator<=(const Dual& a, const Dual& b) { return a.v <= b.v; }
inline bool operator>=(const Dual& a, const Dual& b) { return a.v >= b.v; }
inline bool operator==(const Dual& a, const Dual& b) { return a.v == b.v; }
inline bool operator!=(const Dual& a, const Dual& b) { return a.v != b.v; }
inline bool operator<(const Dual& a, double b) { return a.v < b; }
inline bool operator>(const Dual& a, double b) { return a.v > b; }
inline bool operator<=(const Dual& a, double b) { return a.v <= b; }
inline bool operator>=(const Dual& a, double b) { return a.v >= b; }
inline bool operator<(double a, const Dual& b) { return a < b.v; }
inline bool operator>(double a, const Dual& b) { return a > b.v; }
inline bool operator<=(double a, const Dual& b) { return a <= b.v; }
inline bool operator>=(double a, const Dual& b) { return a >= b.v; }

inline Dual sqrt(const Dual& a) {
  const double s = std::sqrt(a.v);
  return dual_unary(s, a, 0.5 / s);
}
inline Dual exp(const Dual& a) {
  const double e = std::exp(a.v);
  return dual_unary(e, a, e);
}
inline Dual log(const Dual& a) { return dual_unary(std::log(a.v), a, 1.0 / a.v); }
inline Dual log1p(const Dual& a) {
  return dual_unary(std::log1p(a.v), a, 1.0 / (1.0 + a.v));
}
inline Dual expm1(const Dual& a) {
  return dual_unary(std::expm1(a.v), a, std::exp(a.v));
}
inline Dual tanh(const Dual& a) {
  const double th = std::tanh(a.v);
  return dual_unary(th, a, 1.0 - th * th);
}
inline Dual sin(const Dual& a) { return dual_unary(std::sin(a.v), a, std::cos(a.v)); }
inline Dual cos(const Dual& a) { return dual_unary(std::cos(a.v), a, -std::sin(a.v)); }
inline Dual fabs(const Dual& a) {
  return dual_unary(std::fabs(a.v), a, a.v >= 0.0 ? 1.0 : -1.0);
}
inline Dual abs(const Dual& a) { return fabs(a); }

// x^e for constant exponent e >= 0; derivative pinned at x = 0 so the
// impedance spline stays evaluable at the spline origin.
inline Dual pow(const Dual& a, double e) {
  const double p = std::pow(a.v, e);
  double slope;
  if (a.v == 0.0) {
    slope = (e == 1.0) ? 1.0 : 0.0;
  } else {
    slope = e * std::pow(a.v, e - 1.0);
  }
  return dual_unary(p, a, slope);
}

// kink selections branch on the primal value; the tangent follows the
// selected branch (one-sided derivative, zero side wins at ties)
inline Dual max(const Dual& a, const Dual& b) { return a.v >= b.v ? a : b; }
inline Dual min(const Dual& a, const Dual& b) { return a.v <= b.v ? a : b; }
inline Dual max(const Dual& a, double b) { return a.v > b ? a : Dual(b); }
inline Dual max(double a, const Dual& b) { return b.v > a ? b : Dual(a); }
inline Dual min(const Dual& a, double b) { return a.v < b ? a : Dual(b); }
inline Dual min(double a, const Dual& b) { return b.v < a ? b : Dual(a); }

inline bool isfinite(const Dual& a) { return std::isfinite(a.v); }

inline double primal(double x) { return x; }
inline double primal(const Dual& x) { return x.v; }

template <typename T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool is_dual = false;
};
template <>
struct ScalarTraits<Dual> {
  static constexpr bool is_dual = true;
};

// Seeds an identity tangent block: out[i] gets lane (lane0 + i) of `lanes`.
inline std::vector<Dual> seed_identity(std::span<const double> values, int lane0,
                                       int lanes) {
  std::vector<Dual> out(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    out[i] = Dual(values[i], lane0 + static_cast<int>(i), lanes);
  }
  return out;
}

inline std::vector<Dual> to_duals(std::span<const double> values) {
  return {values.begin(), values.end()};
}

inline std::vector<double> primals(std::span<const Dual> values) {
  std::vector<double> out(values.size());
  for (size_t i = 0; i < values.size(); ++i) out[i] = values[i].v;
  return out;
}

}  // namespace softsim

#endif  // SOFTSIM_DUAL_HPP_
