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

// Scene and state data model.
//
// Scene holds topology plus double-precision numbers and is immutable after
// construction. The numeric slice that dynamics consumes lives in
// SceneParams<T>, which can be instantiated with dual numbers so parameter
// derivatives flow through collision, contact, and assembly unchanged.
//
// Generalized velocity convention: per body [linear velocity (world), angular
// velocity (body frame)]. Point-mass bodies have no orientation state.

#ifndef SOFTSIM_MODEL_HPP_
#define SOFTSIM_MODEL_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "softsim/math.hpp"

namespace softsim {

inline constexpr int kWorldBody = -1;

enum class BodyKind { kPointMass, kFree };

template <typename T>
struct SolRef {
  T time_const{0.02};     // t_c, seconds
  T damping_ratio{1.0};   // phi_d
};

template <typename T>
struct SolImp {
  T d0{0.9};
  T dw{0.95};
  T width{0.001};   // meters
  T midpoint{0.5};
  T power{2.0};
};

template <typename T>
struct ContactParamsT {
  SolRef<T> solref;
  SolImp<T> solimp;
  T mu{1.0};
  T friction_eps{1e-3};  // m/s
};
using ContactParams = ContactParamsT<double>;

template <typename T>
struct CfdParamsT {
  bool enabled = false;
  T d_c{0.0};            // impedance at r = w_c
  T d_0{0.1};            // impedance at r = 0
  T w_c{0.1};            // CFD width, meters
  T m_c{1.0};            // spline midpoint, (0, 1]
  T p_c{4.0};            // spline power
  T softplus_beta{80.0}; // 1/m
};
using CfdParams = CfdParamsT<double>;

enum class ShapeKind { kPlane, kSphere, kCornerSet };

struct Body {
  std::string name;
  double mass = 1.0;
  Vec3d inertia_diag{1.0, 1.0, 1.0};  // body-frame principal inertia
  bool inertia_from_geom = false;     // true if inertia was defaulted
  BodyKind kind = BodyKind::kFree;
};

struct Geom {
  std::string name;
  ShapeKind shape = ShapeKind::kSphere;
  int body = kWorldBody;

  // plane
  Vec3d plane_normal{0.0, 0.0, 1.0};
  double plane_offset = 0.0;
  // sphere
  double radius = 0.1;
  // corner set (body frame)
  std::vector<Vec3d> corners;

  std::optional<ContactParams> contact_override;
};

struct Scene {
  std::vector<Body> bodies;
  std::vector<Geom> geoms;
  Vec3d gravity{0.0, 0.0, -9.81};
  ContactParams contact_defaults;
  CfdParams cfd;
  double outer_dt = 0.002;

  int body_index(const std::string& name) const {
    for (size_t i = 0; i < bodies.size(); ++i) {
      if (bodies[i].name == name) return static_cast<int>(i);
    }
    return -1;
  }
  int geom_index(const std::string& name) const {
    for (size_t i = 0; i < geoms.size(); ++i) {
      if (geoms[i].name == name) return static_cast<int>(i);
    }
    return -1;
  }
};

// Numeric slice of a Scene, templated so parameter tangents propagate.
template <typename T>
struct BodyParams {
  T mass{1.0};
  Vec3<T> inertia_diag{T(1), T(1), T(1)};
};

template <typename T>
struct GeomParams {
  Vec3<T> plane_normal{T(0), T(0), T(1)};
  T plane_offset{0.0};
  T radius{0.1};
  std::vector<Vec3<T>> corners;
  ContactParamsT<T> contact;  // resolved: override if present, else defaults
  bool has_override = false;
};

template <typename T>
struct SceneParams {
  std::vector<BodyParams<T>> bodies;
  std::vector<GeomParams<T>> geoms;
  Vec3<T> gravity{T(0), T(0), T(-9.81)};
  ContactParamsT<T> contact_defaults;
  CfdParamsT<T> cfd;
};

template <typename T>
ContactParamsT<T> to_contact_params(const ContactParams& p) {
  ContactParamsT<T> out;
  out.solref.time_const = T(p.solref.time_const);
  out.solref.damping_ratio = T(p.solref.damping_ratio);
  out.solimp.d0 = T(p.solimp.d0);
  out.solimp.dw = T(p.solimp.dw);
  out.solimp.width = T(p.solimp.width);
  out.solimp.midpoint = T(p.solimp.midpoint);
  out.solimp.power = T(p.solimp.power);
  out.mu = T(p.mu);
  out.friction_eps = T(p.friction_eps);
  return out;
}

template <typename T>
SceneParams<T> to_params(const Scene& scene) {
  SceneParams<T> out;
  out.bodies.reserve(scene.bodies.size());
  for (const Body& b : scene.bodies) {
    BodyParams<T> bp;
    bp.mass = T(b.mass);
    bp.inertia_diag = to_vec3<T>(b.inertia_diag);
    out.bodies.push_back(bp);
  }
  out.geoms.reserve(scene.geoms.size());
  for (const Geom& g : scene.geoms) {
    GeomParams<T> gp;
    gp.plane_normal = to_vec3<T>(g.plane_normal);
    gp.plane_offset = T(g.plane_offset);
    gp.radius = T(g.radius);
    gp.corners.reserve(g.corners.size());
    for (const Vec3d& c : g.corners) gp.corners.push_back(to_vec3<T>(c));
    gp.has_override = g.contact_override.has_value();
    gp.contact = to_contact_params<T>(
        g.contact_override ? *g.contact_override : scene.contact_defaults);
    out.geoms.push_back(std::move(gp));
  }
  out.gravity = to_vec3<T>(scene.gravity);
  out.contact_defaults = to_contact_params<T>(scene.contact_defaults);
  out.cfd.enabled = scene.cfd.enabled;
  out.cfd.d_c = T(scene.cfd.d_c);
  out.cfd.d_0 = T(scene.cfd.d_0);
  out.cfd.w_c = T(scene.cfd.w_c);
  out.cfd.m_c = T(scene.cfd.m_c);
  out.cfd.p_c = T(scene.cfd.p_c);
  out.cfd.softplus_beta = T(scene.cfd.softplus_beta);
  return out;
}

// Structured state at one instant. Vectors span all bodies; orientation and
// angular velocity entries of point-mass bodies stay at identity/zero.
struct SystemState {
  std::vector<Vec3d> positions;
  std::vector<Quatd> orientations;
  std::vector<Vec3d> lin_vel;
  std::vector<Vec3d> ang_vel;  // body frame
  double time = 0.0;

  static SystemState zero(const Scene& scene) {
    SystemState s;
    const size_t n = scene.bodies.size();
    s.positions.assign(n, Vec3d{0, 0, 0});
    s.orientations.assign(n, Quatd::identity());
    s.lin_vel.assign(n, Vec3d{0, 0, 0});
    s.ang_vel.assign(n, Vec3d{0, 0, 0});
    return s;
  }
};

// Flat layout per body: pos(3) [quat(4)] linvel(3) [angvel(3)], free bodies
// carry the bracketed blocks.
struct StateLayout {
  struct BodyOffsets {
    int pos = -1;
    int quat = -1;    // -1 for point masses
    int linvel = -1;
    int angvel = -1;  // -1 for point masses
    bool free = false;
  };
  std::vector<BodyOffsets> body;
  int dim = 0;
  std::vector<int> quat_offsets;  // for renormalization

  static StateLayout of(const Scene& scene) {
    StateLayout l;
    int off = 0;
    for (const Body& b : scene.bodies) {
      BodyOffsets bo;
      bo.free = b.kind == BodyKind::kFree;
      bo.pos = off;
      off += 3;
      if (bo.free) {
        bo.quat = off;
        l.quat_offsets.push_back(off);
        off += 4;
      }
      bo.linvel = off;
      off += 3;
      if (bo.free) {
        bo.angvel = off;
        off += 3;
      }
      l.body.push_back(bo);
    }
    l.dim = off;
    return l;
  }

  // human-readable component name, for non-finite diagnostics
  std::string component_name(int index) const;
};

template <typename T>
inline Vec3<T> read_vec3(std::span<const T> x, int off) {
  return {x[off], x[off + 1], x[off + 2]};
}
template <typename T>
inline void write_vec3(std::span<T> x, int off, const Vec3<T>& v) {
  x[off] = v.x;
  x[off + 1] = v.y;
  x[off + 2] = v.z;
}
template <typename T>
inline Quat<T> read_quat(std::span<const T> x, int off) {
  return {x[off], x[off + 1], x[off + 2], x[off + 3]};
}
template <typename T>
inline void write_quat(std::span<T> x, int off, const Quat<T>& q) {
  x[off] = q.w;
  x[off + 1] = q.x;
  x[off + 2] = q.y;
  x[off + 3] = q.z;
}

inline std::vector<double> flatten_state(const StateLayout& layout,
                                         const SystemState& s) {
  std::vector<double> x(layout.dim, 0.0);
  std::span<double> xs(x);
  for (size_t b = 0; b < layout.body.size(); ++b) {
    const auto& bo = layout.body[b];
    write_vec3(xs, bo.pos, s.positions[b]);
    if (bo.free) write_quat(xs, bo.quat, s.orientations[b]);
    write_vec3(xs, bo.linvel, s.lin_vel[b]);
    if (bo.free) write_vec3(xs, bo.angvel, s.ang_vel[b]);
  }
  return x;
}

inline SystemState unflatten_state(const StateLayout& layout,
                                   std::span<const double> x, double time) {
  SystemState s;
  const size_t n = layout.body.size();
  s.positions.assign(n, Vec3d{0, 0, 0});
  s.orientations.assign(n, Quatd::identity());
  s.lin_vel.assign(n, Vec3d{0, 0, 0});
  s.ang_vel.assign(n, Vec3d{0, 0, 0});
  s.time = time;
  for (size_t b = 0; b < n; ++b) {
    const auto& bo = layout.body[b];
    s.positions[b] = read_vec3(x, bo.pos);
    if (bo.free) s.orientations[b] = read_quat(x, bo.quat);
    s.lin_vel[b] = read_vec3(x, bo.linvel);
    if (bo.free) s.ang_vel[b] = read_vec3(x, bo.angvel);
  }
  return s;
}

inline std::string StateLayout::component_name(int index) const {
  static const char* axis = "xyz";
  static const char* qcomp = "wxyz";
  for (size_t b = 0; b < body.size(); ++b) {
    const auto& bo = body[b];
    const std::string prefix = "body" + std::to_string(b) + ".";
    if (index >= bo.pos && index < bo.pos + 3)
      return prefix + "pos." + axis[index - bo.pos];
    if (bo.free && index >= bo.quat && index < bo.quat + 4)
      return prefix + "quat." + qcomp[index - bo.quat];
    if (index >= bo.linvel && index < bo.linvel + 3)
      return prefix + "lin_vel." + axis[index - bo.linvel];
    if (bo.free && index >= bo.angvel && index < bo.angvel + 3)
      return prefix + "ang_vel." + axis[index - bo.angvel];
  }
  return "component" + std::to_string(index);
}

// Per-body wrench: world-frame force and world-frame torque.
template <typename T>
struct Wrench {
  Vec3<T> force{T(0), T(0), T(0)};
  Vec3<T> torque{T(0), T(0), T(0)};
};
using Wrenchd = Wrench<double>;

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace softsim

#endif  // SOFTSIM_MODEL_HPP_
