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

// Differentiable narrow phase for the supported pairs: sphere-plane,
// sphere-sphere, corner-set-plane. No broad phase; every pair is checked on
// every query (desk-scale body counts). All returned quantities are smooth
// functions of state wherever r < margin; the sphere-sphere norm is smoothed
// so coincident centers stay differentiable.

#ifndef SOFTSIM_COLLISION_HPP_
#define SOFTSIM_COLLISION_HPP_

#include <cmath>
#include <span>
#include <vector>

#include "softsim/model.hpp"

namespace softsim {

inline constexpr double kSmoothNormEps = 1e-9;  // meters

template <typename T>
struct ContactPoint {
  T signed_distance{};        // negative = penetration
  Vec3<T> normal;             // world frame, points from geom B toward geom A
  Vec3<T> pos;                // world frame contact location
  Vec3<T> tangent1, tangent2; // right-handed: t1 x t2 = normal
  int body_a = kWorldBody;
  int body_b = kWorldBody;
  int geom_a = -1;
  int geom_b = -1;
  ContactParamsT<T> params;   // resolved pair parameters
};

template <typename T>
struct SurfacePoint {
  T r{};
  Vec3<T> normal;
  Vec3<T> pos;
};

// r = n.c - offset - radius; contact sits at the midpoint of the overlap
template <typename T>
SurfacePoint<T> sphere_plane(const Vec3<T>& center, const T& radius,
                             const Vec3<T>& plane_normal, const T& plane_offset) {
  SurfacePoint<T> out;
  out.r = dot(plane_normal, center) - plane_offset - radius;
  out.normal = plane_normal;
  out.pos = center - plane_normal * (radius + out.r * T(0.5));
  return out;
}

// smoothed center distance; well-defined and differentiable at c1 == c2
template <typename T>
SurfacePoint<T> sphere_sphere(const Vec3<T>& c1, const T& r1, const Vec3<T>& c2,
                              const T& r2, double smooth_eps = kSmoothNormEps) {
  using std::sqrt;
  SurfacePoint<T> out;
  const Vec3<T> v = c1 - c2;
  const T reg = sqrt(dot(v, v) + smooth_eps * smooth_eps);
  out.r = reg - smooth_eps - r1 - r2;
  out.normal = v / reg;
  out.pos = c1 - out.normal * (r1 + out.r * T(0.5));
  return out;
}

// one candidate per corner; world corner w = p + R(q) c
template <typename T>
std::vector<SurfacePoint<T>> corners_plane(const Vec3<T>& body_pos,
                                           const Quat<T>& body_quat, bool rotates,
                                           std::span<const Vec3<T>> corners,
                                           const Vec3<T>& plane_normal,
                                           const T& plane_offset) {
  std::vector<SurfacePoint<T>> out;
  out.reserve(corners.size());
  const Mat3<T> rot = body_quat.to_matrix();
  for (const Vec3<T>& c : corners) {
    const Vec3<T> world = rotates ? body_pos + rot * c : body_pos + c;
    SurfacePoint<T> sp;
    sp.r = dot(plane_normal, world) - plane_offset;
    sp.normal = plane_normal;
    sp.pos = world - plane_normal * (sp.r * T(0.5));
    out.push_back(sp);
  }
  return out;
}

// orthonormal tangent basis completing a right-handed frame with n
// (branchless Frisvad construction; tangents need not be smooth in state,
// only r and normal carry that requirement)
template <typename T>
void tangent_basis(const Vec3<T>& n, Vec3<T>& t1, Vec3<T>& t2) {
  const double s = primal(n.z) >= 0.0 ? 1.0 : -1.0;
  const T a = T(-1.0) / (s + n.z);
  const T b = n.x * n.y * a;
  t1 = Vec3<T>(T(1.0) + s * n.x * n.x * a, s * b, -s * n.x);
  t2 = Vec3<T>(b, s + n.y * n.y * a, -n.y);
}

namespace detail {

// pair parameter resolution: geom A override wins, else geom B, else defaults
template <typename T>
const ContactParamsT<T>& resolve_pair_params(const SceneParams<T>& params,
                                             int geom_a, int geom_b) {
  if (params.geoms[geom_a].has_override) return params.geoms[geom_a].contact;
  if (params.geoms[geom_b].has_override) return params.geoms[geom_b].contact;
  return params.contact_defaults;
}

template <typename T>
void emit(std::vector<ContactPoint<T>>& out, const SurfacePoint<T>& sp,
          const Scene& scene, const SceneParams<T>& params, int geom_a,
          int geom_b, double margin) {
  if (!(primal(sp.r) < margin)) return;
  ContactPoint<T> cp;
  cp.signed_distance = sp.r;
  cp.normal = sp.normal;
  cp.pos = sp.pos;
  tangent_basis(sp.normal, cp.tangent1, cp.tangent2);
  cp.geom_a = geom_a;
  cp.geom_b = geom_b;
  cp.body_a = scene.geoms[geom_a].body;
  cp.body_b = scene.geoms[geom_b].body;
  cp.params = resolve_pair_params(params, geom_a, geom_b);
  out.push_back(std::move(cp));
}

}  // namespace detail

// All contact candidates with r < margin, in deterministic (i < j) geom-pair
// order. Margin 0 gives active contacts only; CFD passes use margin = w_c.
// Unsupported shape pairs (plane-plane, sphere-corner, corner-corner) and
// same-body pairs are skipped.
template <typename T>
std::vector<ContactPoint<T>> detect(const Scene& scene,
                                    const SceneParams<T>& params,
                                    std::span<const T> x,
                                    const StateLayout& layout, double margin) {
  std::vector<ContactPoint<T>> out;
  const int ng = static_cast<int>(scene.geoms.size());
  for (int i = 0; i < ng; ++i) {
    for (int j = i + 1; j < ng; ++j) {
      const Geom& gi = scene.geoms[i];
      const Geom& gj = scene.geoms[j];
      if (gi.body == gj.body) continue;

      // orient the pair so A is the moving geom against a plane
      int a = i, b = j;
      if (gj.shape == ShapeKind::kPlane && gi.shape != ShapeKind::kPlane) {
        // keep order: plane as B
      } else if (gi.shape == ShapeKind::kPlane && gj.shape != ShapeKind::kPlane) {
        a = j;
        b = i;
      }
      const Geom& ga = scene.geoms[a];
      const Geom& gb = scene.geoms[b];

      auto body_pos = [&](int body) -> Vec3<T> {
        return read_vec3(x, layout.body[body].pos);
      };
      auto body_quat = [&](int body) -> Quat<T> {
        const auto& bo = layout.body[body];
        return bo.free ? read_quat(x, bo.quat) : Quat<T>::identity();
      };

      if (ga.shape == ShapeKind::kSphere && gb.shape == ShapeKind::kPlane) {
        const SurfacePoint<T> sp = sphere_plane(
            body_pos(ga.body), params.geoms[a].radius,
            params.geoms[b].plane_normal, params.geoms[b].plane_offset);
        detail::emit(out, sp, scene, params, a, b, margin);
      } else if (ga.shape == ShapeKind::kCornerSet &&
                 gb.shape == ShapeKind::kPlane) {
        const bool rotates = scene.bodies[ga.body].kind == BodyKind::kFree;
        const auto pts = corners_plane<T>(
            body_pos(ga.body), body_quat(ga.body), rotates,
            std::span<const Vec3<T>>(params.geoms[a].corners),
            params.geoms[b].plane_normal, params.geoms[b].plane_offset);
        for (const auto& sp : pts) {
          detail::emit(out, sp, scene, params, a, b, margin);
        }
      } else if (ga.shape == ShapeKind::kSphere &&
                 gb.shape == ShapeKind::kSphere) {
        const SurfacePoint<T> sp =
            sphere_sphere(body_pos(ga.body), params.geoms[a].radius,
                          body_pos(gb.body), params.geoms[b].radius);
        detail::emit(out, sp, scene, params, a, b, margin);
      }
      // other combinations unsupported
    }
  }
  return out;
}

}  // namespace softsim

#endif  // SOFTSIM_COLLISION_HPP_
