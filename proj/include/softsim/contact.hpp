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

// Penalty contact forces, soft-constraint style: an impedance spline of the
// constraint violation, a spring-damper reference acceleration, a regularizer
// (1-d)/d * A_ii, and a projected Gauss-Seidel solve of the regularized
// nonnegative QP. The CFD variants extend the impedance to positive signed
// distances and soften the spring term with a softplus.

#ifndef SOFTSIM_CONTACT_HPP_
#define SOFTSIM_CONTACT_HPP_

#include <cmath>
#include <span>
#include <vector>

#include "softsim/collision.hpp"
#include "softsim/model.hpp"

namespace softsim {

inline constexpr double kImpedanceMin = 1e-4;
inline constexpr double kImpedanceMax = 1.0 - 1e-4;
inline constexpr int kPgsSweeps = 20;

namespace detail {

// x^p for spline arguments x in [0,1]; exponent may itself carry tangents
template <typename T>
T spline_pow(const T& x, const T& p) {
  using std::exp;
  using std::log;
  if (primal(x) <= 0.0) return T(0.0);
  return exp(p * log(x));
}

// two-piece power spline, 0 -> 0 and 1 -> 1, C0 at the midpoint
template <typename T>
T impedance_spline(const T& x, const T& midpoint, const T& power) {
  if (primal(x) <= primal(midpoint)) {
    return spline_pow(x, power) / spline_pow(midpoint, power - T(1.0));
  }
  return T(1.0) - spline_pow(T(1.0) - x, power) /
                      spline_pow(T(1.0) - midpoint, power - T(1.0));
}

}  // namespace detail

// Impedance d(r) in (0,1). r <= 0 uses the solimp spline of the penetration;
// r > 0 uses the CFD extension (d_0 at r = 0 tapering to d_c at w_c). The
// result is clamped to [1e-4, 1-1e-4] to keep the regularizer finite, and is
// continuous at r = 0 whenever cfd.d_0 equals solimp.d0.
template <typename T>
T impedance(const T& r, const SolImp<T>& solimp, const CfdParamsT<T>* cfd) {
  T d;
  if (primal(r) <= 0.0) {
    const T x = min(-r / solimp.width, T(1.0));
    const T y = detail::impedance_spline(x, solimp.midpoint, solimp.power);
    d = solimp.d0 + y * (solimp.dw - solimp.d0);
  } else {
    // only reachable on CFD passes; vanilla detection excludes r > 0
    const T x = min(r / cfd->w_c, T(1.0));
    const T y = detail::impedance_spline(x, cfd->m_c, cfd->p_c);
    d = cfd->d_0 + y * (cfd->d_c - cfd->d_0);
  }
  return min(max(d, kImpedanceMin), kImpedanceMax);
}

// Spring-damper reference acceleration:
//   aref = -(2/(dw*t_c)) v_n - (d/(dw^2 t_c^2 phi_d^2)) r_eff
// where r_eff = r, or smooth min(r, 0) when softened (CFD passes), keeping a
// small repulsive spring alive at positive distances.
template <typename T>
T reference_acceleration(const T& r, const T& v_n, const SolRef<T>& solref,
                         const T& dw, const T& d, bool softened, double beta) {
  const T r_eff = softened ? smooth_min_zero(r, beta) : r;
  const T tc = solref.time_const;
  const T phi = solref.damping_ratio;
  const T b = T(2.0) / (dw * tc);
  const T k = d / (dw * dw * tc * tc * phi * phi);
  return -b * v_n - k * r_eff;
}

// R = (1 - d)/d * A_ii
template <typename T>
T regularizer(const T& d, const T& A_ii) {
  return (T(1.0) - d) / d * A_ii;
}

// One normal-direction constraint row. Angular jacobian blocks are expressed
// in each body's frame so the diagonal inertia applies directly.
template <typename T>
struct ConstraintRow {
  int body_a = kWorldBody;
  int body_b = kWorldBody;
  Vec3<T> jac_lin_a, jac_ang_a;
  Vec3<T> jac_lin_b, jac_ang_b;
  // M^{-1} J^T blocks, cached for the A matrix and force mapping
  Vec3<T> winv_lin_a, winv_ang_a;
  Vec3<T> winv_lin_b, winv_ang_b;
  T a0{};     // constraint-space unconstrained acceleration
  T aref{};   // reference acceleration
  T A_ii{};   // diagonal inverse inertia in constraint space
  T R{};      // regularizer
  T d{};      // impedance
};

template <typename T>
struct ContactForceResult {
  std::vector<T> normal_forces;
  std::vector<std::array<T, 2>> friction_forces;  // contact-frame components
  std::vector<Wrench<T>> generalized_force;       // per body, J^T f + friction
  double kkt_residual = 0.0;
};

// Per-body unconstrained acceleration (gravity + applied + gyroscopic).
template <typename T>
struct FreeAccel {
  Vec3<T> lin;  // world
  Vec3<T> ang;  // body frame
};

namespace detail {

template <typename T>
Vec3<T> point_velocity(std::span<const T> x, const StateLayout& layout,
                       int body, const Vec3<T>& lever) {
  if (body == kWorldBody) return Vec3<T>(T(0), T(0), T(0));
  const auto& bo = layout.body[body];
  Vec3<T> v = read_vec3(x, bo.linvel);
  if (bo.free) {
    const Quat<T> q = read_quat(x, bo.quat);
    const Vec3<T> w_world = q.to_matrix() * read_vec3(x, bo.angvel);
    v += cross(w_world, lever);
  }
  return v;
}

}  // namespace detail

// Builds normal rows for every contact. a0 omits the jacobian-time-derivative
// term: a0 = J * vdot_free.
template <typename T>
std::vector<ConstraintRow<T>> build_rows(
    const Scene& scene, const SceneParams<T>& params,
    const StateLayout& layout, std::span<const T> x,
    std::span<const ContactPoint<T>> contacts,
    std::span<const FreeAccel<T>> free_accel, bool cfd_mode) {
  std::vector<ConstraintRow<T>> rows;
  rows.reserve(contacts.size());
  for (const ContactPoint<T>& c : contacts) {
    ConstraintRow<T> row;
    row.body_a = c.body_a;
    row.body_b = c.body_b;

    T v_n = T(0.0);
    T a0 = T(0.0);
    T A = T(0.0);

    auto fill_side = [&](int body, double sign, Vec3<T>& jl, Vec3<T>& ja,
                         Vec3<T>& wl, Vec3<T>& wa) {
      jl = {T(0), T(0), T(0)};
      ja = {T(0), T(0), T(0)};
      wl = {T(0), T(0), T(0)};
      wa = {T(0), T(0), T(0)};
      if (body == kWorldBody) return;
      const auto& bo = layout.body[body];
      jl = c.normal * T(sign);
      const BodyParams<T>& bp = params.bodies[body];
      wl = jl / bp.mass;
      if (bo.free) {
        const Quat<T> q = read_quat(x, bo.quat);
        const Vec3<T> lever = c.pos - read_vec3(x, bo.pos);
        ja = q.to_matrix().tmul(cross(lever, c.normal)) * T(sign);
        wa = Vec3<T>(ja.x / bp.inertia_diag.x, ja.y / bp.inertia_diag.y,
                     ja.z / bp.inertia_diag.z);
      }
      v_n += dot(jl, read_vec3(x, bo.linvel));
      a0 += dot(jl, free_accel[body].lin);
      A += dot(jl, wl);
      if (bo.free) {
        v_n += dot(ja, read_vec3(x, bo.angvel));
        a0 += dot(ja, free_accel[body].ang);
        A += dot(ja, wa);
      }
    };

    fill_side(c.body_a, 1.0, row.jac_lin_a, row.jac_ang_a, row.winv_lin_a,
              row.winv_ang_a);
    fill_side(c.body_b, -1.0, row.jac_lin_b, row.jac_ang_b, row.winv_lin_b,
              row.winv_ang_b);

    row.a0 = a0;
    row.A_ii = A;
    row.d = impedance(c.signed_distance, c.params.solimp,
                      params.cfd.enabled ? &params.cfd : nullptr);
    row.aref = reference_acceleration(c.signed_distance, v_n, c.params.solref,
                                      c.params.solimp.dw, row.d, cfd_mode,
                                      primal(params.cfd.softplus_beta));
    row.R = regularizer(row.d, row.A_ii);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace detail {

// A_ij = J_i M^{-1} J_j^T over shared bodies
template <typename T>
T coupling(const ConstraintRow<T>& ri, const ConstraintRow<T>& rj) {
  T a = T(0.0);
  auto add = [&](int bi, const Vec3<T>& jl, const Vec3<T>& ja, int bj,
                 const Vec3<T>& wl, const Vec3<T>& wa) {
    if (bi == kWorldBody || bi != bj) return;
    a += dot(jl, wl) + dot(ja, wa);
  };
  add(ri.body_a, ri.jac_lin_a, ri.jac_ang_a, rj.body_a, rj.winv_lin_a, rj.winv_ang_a);
  add(ri.body_a, ri.jac_lin_a, ri.jac_ang_a, rj.body_b, rj.winv_lin_b, rj.winv_ang_b);
  add(ri.body_b, ri.jac_lin_b, ri.jac_ang_b, rj.body_a, rj.winv_lin_a, rj.winv_ang_a);
  add(ri.body_b, ri.jac_lin_b, ri.jac_ang_b, rj.body_b, rj.winv_lin_b, rj.winv_ang_b);
  return a;
}

}  // namespace detail

// Solves min_{f >= 0} 0.5 f^T (A + diag(R)) f - f^T (aref - a0) by projected
// Gauss-Seidel: fixed sweep count, ascending row order, unrolled for
// differentiation. The max(0,.) projection differentiates one-sidedly. The
// reported KKT residual is max_i |min(f_i, g_i)| with g the QP gradient
// (A+R) f - b; both entries are nonnegative and complementary at the optimum.
template <typename T>
std::vector<T> solve_forces_only(std::span<const ConstraintRow<T>> rows,
                                 double* kkt_residual) {
  const int n = static_cast<int>(rows.size());
  std::vector<T> f(n, T(0.0));
  if (n == 0) {
    if (kkt_residual) *kkt_residual = 0.0;
    return f;
  }

  // dense A + diag(R), b
  std::vector<T> A(static_cast<size_t>(n) * n, T(0.0));
  std::vector<T> b(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i) {
        A[i * n + i] = rows[i].A_ii + rows[i].R;
      } else {
        A[i * n + j] = detail::coupling(rows[i], rows[j]);
      }
    }
    b[i] = rows[i].aref - rows[i].a0;
  }

  for (int sweep = 0; sweep < kPgsSweeps; ++sweep) {
    for (int i = 0; i < n; ++i) {
      T g = -b[i];
      for (int j = 0; j < n; ++j) g += A[i * n + j] * f[j];
      f[i] = max(f[i] - g / A[i * n + i], T(0.0));
    }
  }

  if (kkt_residual) {
    double res = 0.0;
    for (int i = 0; i < n; ++i) {
      T g = -b[i];
      for (int j = 0; j < n; ++j) g += A[i * n + j] * f[j];
      const double fi = primal(f[i]);
      const double gi = primal(g);
      res = std::max(res, std::fabs(std::min(fi, gi)));
    }
    *kkt_residual = res;
  }
  return f;
}

// Regularized friction at solved normal forces:
//   f_t = -mu * f_n * tanh(|v_t| / friction_eps) * v_t_hat
// with the slip norm smoothed as in sphere_sphere; identically zero slip
// produces zero force and stays differentiable.
template <typename T>
Vec3<T> friction_force_world(const ContactPoint<T>& c, const T& f_n,
                             std::span<const T> x, const StateLayout& layout) {
  const Vec3<T> lever_a =
      c.body_a == kWorldBody ? Vec3<T>() : c.pos - read_vec3(x, layout.body[c.body_a].pos);
  const Vec3<T> lever_b =
      c.body_b == kWorldBody ? Vec3<T>() : c.pos - read_vec3(x, layout.body[c.body_b].pos);
  const Vec3<T> v_rel = detail::point_velocity(x, layout, c.body_a, lever_a) -
                        detail::point_velocity(x, layout, c.body_b, lever_b);
  const Vec3<T> v_t = v_rel - c.normal * dot(c.normal, v_rel);
  using std::sqrt;
  using std::tanh;
  const double eps = kSmoothNormEps;
  const T reg = sqrt(dot(v_t, v_t) + eps * eps);
  const T slip = reg - eps;
  const T scale = -c.params.mu * f_n * tanh(slip / c.params.friction_eps) / reg;
  return v_t * scale;
}

// Full contact force computation: normal solve, friction, and accumulation of
// J^T f into per-body wrenches (force world-frame, torque body-frame).
template <typename T>
ContactForceResult<T> solve_forces(const Scene& scene,
                                   const StateLayout& layout,
                                   std::span<const T> x,
                                   std::span<const ContactPoint<T>> contacts,
                                   std::span<const ConstraintRow<T>> rows) {
  ContactForceResult<T> out;
  out.generalized_force.assign(scene.bodies.size(), Wrench<T>{});
  out.normal_forces = solve_forces_only(rows, &out.kkt_residual);
  out.friction_forces.assign(contacts.size(), {T(0.0), T(0.0)});

  for (size_t i = 0; i < contacts.size(); ++i) {
    const ContactPoint<T>& c = contacts[i];
    const ConstraintRow<T>& row = rows[i];
    const T& fn = out.normal_forces[i];

    if (c.body_a != kWorldBody) {
      out.generalized_force[c.body_a].force += row.jac_lin_a * fn;
      out.generalized_force[c.body_a].torque += row.jac_ang_a * fn;
    }
    if (c.body_b != kWorldBody) {
      out.generalized_force[c.body_b].force += row.jac_lin_b * fn;
      out.generalized_force[c.body_b].torque += row.jac_ang_b * fn;
    }

    if (primal(c.params.mu) > 0.0) {
      const Vec3<T> ft = friction_force_world(c, fn, x, layout);
      out.friction_forces[i] = {dot(ft, c.tangent1), dot(ft, c.tangent2)};
      auto apply = [&](int body, double sign) {
        if (body == kWorldBody) return;
        const auto& bo = layout.body[body];
        const Vec3<T> f = ft * T(sign);
        out.generalized_force[body].force += f;
        if (bo.free) {
          const Quat<T> q = read_quat(x, bo.quat);
          const Vec3<T> lever = c.pos - read_vec3(x, bo.pos);
          out.generalized_force[body].torque += q.to_matrix().tmul(cross(lever, f));
        }
      };
      apply(c.body_a, 1.0);
      apply(c.body_b, -1.0);
    }
  }
  return out;
}

}  // namespace softsim

#endif  // SOFTSIM_CONTACT_HPP_
