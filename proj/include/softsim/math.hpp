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

// Small fixed-size linear algebra templated on the scalar so the same code
// runs on double and on the forward-mode dual number. Quaternions are
// Hamilton convention, (w, x, y, z).

#ifndef SOFTSIM_MATH_HPP_
#define SOFTSIM_MATH_HPP_

#include <array>
#include <cmath>

#include "softsim/dual.hpp"

namespace softsim {

template <typename T>
struct Vec3 {
  T x{}, y{}, z{};

  Vec3() = default;
  Vec3(T x_, T y_, T z_) : x(x_), y(y_), z(z_) {}

  T& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  const T& operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(const T& s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(const T& s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
};

template <typename T>
inline Vec3<T> operator*(const T& s, const Vec3<T>& v) {
  return v * s;
}
template <typename T>
inline Vec3<T> operator*(double s, const Vec3<T>& v)
  requires(!std::is_same_v<T, double>)
{
  return {T(s) * v.x, T(s) * v.y, T(s) * v.z};
}

template <typename T>
inline T dot(const Vec3<T>& a, const Vec3<T>& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

template <typename T>
inline Vec3<T> cross(const Vec3<T>& a, const Vec3<T>& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

template <typename T>
inline T squared_norm(const Vec3<T>& v) {
  return dot(v, v);
}

template <typename T>
inline T norm(const Vec3<T>& v) {
  using std::sqrt;
  return sqrt(dot(v, v));
}

// sqrt(|v|^2 + eps^2) - eps: differentiable surrogate for |v|, exact up to
// O(eps) away from zero and quadratic (smooth) at v = 0
template <typename T>
inline T smooth_norm(const Vec3<T>& v, double eps) {
  using std::sqrt;
  return sqrt(dot(v, v) + eps * eps) - eps;
}

template <typename T>
struct Mat3 {
  // row-major
  std::array<T, 9> m{};

  T& operator()(int r, int c) { return m[3 * r + c]; }
  const T& operator()(int r, int c) const { return m[3 * r + c]; }

  static Mat3 identity() {
    Mat3 out;
    out.m = {T(1), T(0), T(0), T(0), T(1), T(0), T(0), T(0), T(1)};
    return out;
  }

  Vec3<T> operator*(const Vec3<T>& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }

  // transpose(R) * v
  Vec3<T> tmul(const Vec3<T>& v) const {
    return {m[0] * v.x + m[3] * v.y + m[6] * v.z,
            m[1] * v.x + m[4] * v.y + m[7] * v.z,
            m[2] * v.x + m[5] * v.y + m[8] * v.z};
  }
};

template <typename T>
struct Quat {
  T w{}, x{}, y{}, z{};

  Quat() : w(T(1)), x(T(0)), y(T(0)), z(T(0)) {}
  Quat(T w_, T x_, T y_, T z_) : w(w_), x(x_), y(y_), z(z_) {}

  static Quat identity() { return Quat(); }

  Quat operator*(const Quat& o) const {
    return {w * o.w - x * o.x - y * o.y - z * o.z,
            w * o.x + x * o.w + y * o.z - z * o.y,
            w * o.y - x * o.z + y * o.w + z * o.x,
            w * o.z + x * o.y - y * o.x + z * o.w};
  }

  T squared_norm() const { return w * w + x * x + y * y + z * z; }

  Quat normalized() const {
    using std::sqrt;
    const T inv = T(1) / sqrt(squared_norm());
    return {w * inv, x * inv, y * inv, z * inv};
  }

  Mat3<T> to_matrix() const {
    Mat3<T> r;
    const T ww = w * w, xx = x * x, yy = y * y, zz = z * z;
    r.m[0] = ww + xx - yy - zz;
    r.m[1] = T(2) * (x * y - w * z);
    r.m[2] = T(2) * (x * z + w * y);
    r.m[3] = T(2) * (x * y + w * z);
    r.m[4] = ww - xx + yy - zz;
    r.m[5] = T(2) * (y * z - w * x);
    r.m[6] = T(2) * (x * z - w * y);
    r.m[7] = T(2) * (y * z + w * x);
    r.m[8] = ww - xx - yy + zz;
    return r;
  }

  Vec3<T> rotate(const Vec3<T>& v) const { return to_matrix() * v; }
};

// quaternion rate from body-frame angular velocity: qdot = 0.5 * q * (0, w)
template <typename T>
inline Quat<T> quat_rate(const Quat<T>& q, const Vec3<T>& omega_body) {
  const Quat<T> wq(T(0), omega_body.x, omega_body.y, omega_body.z);
  Quat<T> r = q * wq;
  return {r.w * T(0.5), r.x * T(0.5), r.y * T(0.5), r.z * T(0.5)};
}

// axis-angle constructor (double only, used by tests and scenario setup)
inline Quat<double> quat_from_axis_angle(const Vec3<double>& axis, double angle) {
  const double n = std::sqrt(dot(axis, axis));
  if (n == 0.0) return Quat<double>::identity();
  const double h = 0.5 * angle;
  const double s = std::sin(h) / n;
  return {std::cos(h), axis.x * s, axis.y * s, axis.z * s};
}

template <typename T>
inline Vec3<T> to_vec3(const Vec3<double>& v) {
  return {T(v.x), T(v.y), T(v.z)};
}

template <typename T>
inline Quat<T> to_quat(const Quat<double>& q) {
  return {T(q.w), T(q.x), T(q.y), T(q.z)};
}

using Vec3d = Vec3<double>;
using Quatd = Quat<double>;
using Mat3d = Mat3<double>;

// numerically stable sigmoid
template <typename T>
inline T sigmoid(const T& v) {
  using std::exp;
  if (primal(v) >= 0.0) {
    const T e = exp(-v);
    return T(1) / (T(1) + e);
  }
  const T e = exp(v);
  return e / (T(1) + e);
}

// (1/beta) * log(1 + exp(beta*x)), stable for large |beta*x|
template <typename T>
inline T softplus(const T& x, double beta) {
  using std::exp;
  using std::log1p;
  const T bx = x * beta;
  if (primal(bx) > 0.0) {
    return x + log1p(exp(-bx)) / beta;
  }
  return log1p(exp(bx)) / beta;
}

// smooth min(x, 0): -softplus(-x, beta)
template <typename T>
inline T smooth_min_zero(const T& x, double beta) {
  return -softplus(-x, beta);
}

}  // namespace softsim

#endif  // SOFTSIM_MATH_HPP_
