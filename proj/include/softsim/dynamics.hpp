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

// ODE right-hand side: collision -> contact rows -> force solve -> assembly.
// Linear acceleration in world frame, angular acceleration in body frame via
// Euler's equations (the bias force reduces to the gyroscopic term for free
// bodies). Quaternion rate is 0.5 q (0, omega), orthogonal to q.
//
// The straight-through variant keeps the vanilla value and substitutes the
// CFD dynamics' derivative, evaluated at the same state.

#ifndef SOFTSIM_DYNAMICS_HPP_
#define SOFTSIM_DYNAMICS_HPP_

#include <span>
#include <vector>

#include "softsim/contact.hpp"

namespace softsim {

enum class RhsVariant {
  kVanilla,         // contacts active at r < 0 only
  kCfdForward,      // CFD forces in the forward dynamics (hover demo/oracles)
  kStraightThrough  // vanilla value, CFD derivative
};

struct ContactDiagnostic {
  double signed_distance;
  double normal_force;
};

struct RhsOutput {
  std::vector<double> state_derivative;
  std::vector<ContactDiagnostic> contact_diagnostics;
  double kkt_residual = 0.0;
};

namespace detail {

template <typename T>
void rhs_impl(const Scene& scene, const SceneParams<T>& params,
              const StateLayout& layout, std::span<const T> x,
              std::span<const Wrench<T>> applied, bool cfd_mode,
              std::span<T> dxdt,
              std::vector<ContactDiagnostic>* diagnostics = nullptr,
              double* kkt_residual = nullptr) {
  const size_t nb = scene.bodies.size();

  // unconstrained accelerations
  std::vector<FreeAccel<T>> free_accel(nb);
  for (size_t b = 0; b < nb; ++b) {
    const auto& bo = layout.body[b];
    const BodyParams<T>& bp = params.bodies[b];
    FreeAccel<T>& fa = free_accel[b];
    fa.lin = params.gravity + applied[b].force / bp.mass;
    if (bo.free) {
      const Quat<T> q = read_quat(x, bo.quat);
      const Vec3<T> omega = read_vec3(x, bo.angvel);
      const Vec3<T> I_omega(bp.inertia_diag.x * omega.x,
                            bp.inertia_diag.y * omega.y,
                            bp.inertia_diag.z * omega.z);
      const Vec3<T> torque_body =
          q.to_matrix().tmul(applied[b].torque) - cross(omega, I_omega);
      fa.ang = Vec3<T>(torque_body.x / bp.inertia_diag.x,
                       torque_body.y / bp.inertia_diag.y,
                       torque_body.z / bp.inertia_diag.z);
    } else {
      fa.ang = Vec3<T>(T(0), T(0), T(0));
    }
  }

  const double margin = cfd_mode ? primal(params.cfd.w_c) : 0.0;
  const std::vector<ContactPoint<T>> contacts =
      detect(scene, params, x, layout, margin);
  const std::vector<ConstraintRow<T>> rows =
      build_rows(scene, params, layout, x, std::span<const ContactPoint<T>>(contacts),
                 std::span<const FreeAccel<T>>(free_accel), cfd_mode);
  const ContactForceResult<T> forces = solve_forces(
      scene, layout, x, std::span<const ContactPoint<T>>(contacts),
      std::span<const ConstraintRow<T>>(rows));

  for (size_t b = 0; b < nb; ++b) {
    const auto& bo = layout.body[b];
    const BodyParams<T>& bp = params.bodies[b];
    const Wrench<T>& cf = forces.generalized_force[b];

    // position rate = velocity
    write_vec3(dxdt, bo.pos, read_vec3(x, bo.linvel));
    // linear acceleration
    write_vec3(dxdt, bo.linvel, free_accel[b].lin + cf.force / bp.mass);
    if (bo.free) {
      const Quat<T> q = read_quat(x, bo.quat);
      const Vec3<T> omega = read_vec3(x, bo.angvel);
      write_quat(dxdt, bo.quat, quat_rate(q, omega));
      const Vec3<T> ang_contact(cf.torque.x / bp.inertia_diag.x,
                                cf.torque.y / bp.inertia_diag.y,
                                cf.torque.z / bp.inertia_diag.z);
      write_vec3(dxdt, bo.angvel, free_accel[b].ang + ang_contact);
    }
  }

  if (diagnostics) {
    diagnostics->clear();
    for (size_t i = 0; i < contacts.size(); ++i) {
      diagnostics->push_back({primal(contacts[i].signed_distance),
                              primal(forces.normal_forces[i])});
    }
  }
  if (kkt_residual) *kkt_residual = forces.kkt_residual;
}

}  // namespace detail

// copies the primal lane of dual scene params into a double SceneParams
inline void strip_params(const SceneParams<Dual>& src, SceneParams<double>& dst) {
  auto v3 = [](const Vec3<Dual>& v) { return Vec3d{v.x.v, v.y.v, v.z.v}; };
  auto cp = [&](const ContactParamsT<Dual>& c, ContactParamsT<double>& o) {
    o.solref.time_const = c.solref.time_const.v;
    o.solref.damping_ratio = c.solref.damping_ratio.v;
    o.solimp.d0 = c.solimp.d0.v;
    o.solimp.dw = c.solimp.dw.v;
    o.solimp.width = c.solimp.width.v;
    o.solimp.midpoint = c.solimp.midpoint.v;
    o.solimp.power = c.solimp.power.v;
    o.mu = c.mu.v;
    o.friction_eps = c.friction_eps.v;
  };
  for (size_t b = 0; b < src.bodies.size(); ++b) {
    dst.bodies[b].mass = src.bodies[b].mass.v;
    dst.bodies[b].inertia_diag = v3(src.bodies[b].inertia_diag);
  }
  for (size_t g = 0; g < src.geoms.size(); ++g) {
    dst.geoms[g].plane_normal = v3(src.geoms[g].plane_normal);
    dst.geoms[g].plane_offset = src.geoms[g].plane_offset.v;
    dst.geoms[g].radius = src.geoms[g].radius.v;
    for (size_t c = 0; c < src.geoms[g].corners.size(); ++c) {
      dst.geoms[g].corners[c] = v3(src.geoms[g].corners[c]);
    }
    cp(src.geoms[g].contact, dst.geoms[g].contact);
  }
  dst.gravity = v3(src.gravity);
  cp(src.contact_defaults, dst.contact_defaults);
  dst.cfd.d_c = src.cfd.d_c.v;
  dst.cfd.d_0 = src.cfd.d_0.v;
  dst.cfd.w_c = src.cfd.w_c.v;
  dst.cfd.m_c = src.cfd.m_c.v;
  dst.cfd.p_c = src.cfd.p_c.v;
  dst.cfd.softplus_beta = src.cfd.softplus_beta.v;
}

inline void strip_params(const SceneParams<double>& src, SceneParams<double>& dst) {
  dst = src;
}

// Generic rhs. For T = double the straight-through variant is exactly the
// vanilla code path (same function, bitwise identical forward values); for
// T = Dual it evaluates the CFD dynamics alongside and splices its tangents
// onto the vanilla primal.
template <typename T>
void rhs_flat(const Scene& scene, const SceneParams<T>& params,
              const StateLayout& layout, std::span<const T> x,
              std::span<const Wrench<T>> applied, RhsVariant variant,
              std::span<T> dxdt) {
  const bool cfd = variant == RhsVariant::kCfdForward;
  if constexpr (!ScalarTraits<T>::is_dual) {
    detail::rhs_impl(scene, params, layout, x, applied, cfd, dxdt);
  } else {
    if (variant != RhsVariant::kStraightThrough) {
      detail::rhs_impl(scene, params, layout, x, applied, cfd, dxdt);
      return;
    }
    // derivative of the CFD dynamics at the unaltered state
    detail::rhs_impl(scene, params, layout, x, applied, /*cfd_mode=*/true, dxdt);
    // vanilla primal values, recomputed on the plain double path
    std::vector<double> xp(x.size());
    for (size_t i = 0; i < x.size(); ++i) xp[i] = x[i].v;
    std::vector<Wrench<double>> ap(applied.size());
    for (size_t i = 0; i < applied.size(); ++i) {
      ap[i].force = {applied[i].force.x.v, applied[i].force.y.v, applied[i].force.z.v};
      ap[i].torque = {applied[i].torque.x.v, applied[i].torque.y.v,
                      applied[i].torque.z.v};
    }
    SceneParams<double> pp = to_params<double>(scene);
    // parameter primals may differ from the scene when slots are applied
    strip_params(params, pp);
    std::vector<double> dp(x.size());
    detail::rhs_impl<double>(scene, pp, layout, xp,
                             std::span<const Wrench<double>>(ap),
                             /*cfd_mode=*/false, dp);
    for (size_t i = 0; i < dxdt.size(); ++i) dxdt[i].v = dp[i];
  }
}

// Structured public entry point with contact diagnostics.
inline RhsOutput rhs(const Scene& scene, const SystemState& state,
                     std::span<const Wrenchd> applied, bool cfd_mode) {
  const StateLayout layout = StateLayout::of(scene);
  const SceneParams<double> params = to_params<double>(scene);
  const std::vector<double> x = flatten_state(layout, state);
  RhsOutput out;
  out.state_derivative.assign(layout.dim, 0.0);
  detail::rhs_impl<double>(scene, params, layout, x, applied, cfd_mode,
                           out.state_derivative, &out.contact_diagnostics,
                           &out.kkt_residual);
  return out;
}

}  // namespace softsim

#endif  // SOFTSIM_DYNAMICS_HPP_
