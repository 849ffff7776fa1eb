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

// Parameter vectorization: named scene scalars exposed as a flat vector in
// transform space (identity / softplus / softclip), so optimizers work on
// unconstrained values. apply composes only smooth maps and is instantiated
// with duals for parameter Jacobians.

#ifndef SOFTSIM_PARAMS_HPP_
#define SOFTSIM_PARAMS_HPP_

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "softsim/model.hpp"

namespace softsim {

enum class TransformKind { kIdentity, kSoftplus, kSoftclip };

struct ParamTransform {
  TransformKind kind = TransformKind::kIdentity;
  double sharpness = 1.0;  // softplus/softclip slope scale
  double lo = 0.0;         // softclip bounds
  double hi = 1.0;
};

template <typename T>
T transform_forward(const ParamTransform& tr, const T& v) {
  switch (tr.kind) {
    case TransformKind::kIdentity:
      return v;
    case TransformKind::kSoftplus:
      return softplus(v, tr.sharpness);
    case TransformKind::kSoftclip:
      return T(tr.lo) + (tr.hi - tr.lo) * sigmoid(v * tr.sharpness);
  }
  return v;
}

// inverse of transform_forward; throws on domain violations
double transform_inverse(const ParamTransform& tr, double x);

struct ParamSlot {
  std::string name;
  std::string path;  // e.g. "cube.side_length", "contact_defaults.solref[0]"
  ParamTransform transform;
};

struct ParamVector {
  std::vector<double> values;  // transform-space
  std::vector<ParamSlot> layout;

  int dim() const { return static_cast<int>(values.size()); }
};

// Resolved address of one differentiable scene scalar.
struct ResolvedSlot {
  enum class Target {
    kBodyMass,
    kBodyInertia,       // index = axis
    kGeomRadius,
    kGeomSideLength,    // uniform corner-set scale
    kGeomContact,       // field_id into ContactParamsT
    kDefaultsContact,
    kCfdField,
  };
  Target target;
  int entity = -1;  // body or geom index
  int field = -1;   // sub-field id / array index
};

// contact field ids: 0 solref.t_c, 1 solref.phi_d, 2..6 solimp entries, 7 mu,
// 8 friction_eps
ResolvedSlot resolve_slot_path(const Scene& scene, const std::string& path);

// current scene-space value of a resolved slot
double slot_value(const Scene& scene, const ResolvedSlot& slot);

// pack: values[i] = transform^{-1}(current scene value of slot i)
ParamVector pack_params(const Scene& scene, const std::vector<ParamSlot>& slots);

// apply on the full double scene (serialization-grade result)
Scene apply_params(const Scene& scene, const ParamVector& p);

namespace detail {

template <typename T>
void write_slot(const Scene& scene, SceneParams<T>& params,
                const ResolvedSlot& slot, const T& value) {
  using Target = ResolvedSlot::Target;
  switch (slot.target) {
    case Target::kBodyMass:
      params.bodies[slot.entity].mass = value;
      break;
    case Target::kBodyInertia:
      params.bodies[slot.entity].inertia_diag[slot.field] = value;
      break;
    case Target::kGeomRadius:
      params.geoms[slot.entity].radius = value;
      break;
    case Target::kGeomSideLength: {
      // scale all corners uniformly so side_length becomes `value`
      const Geom& g = scene.geoms[slot.entity];
      double side = 0.0;
      for (const Vec3d& c : g.corners) {
        side = std::max({side, std::fabs(c.x), std::fabs(c.y), std::fabs(c.z)});
      }
      side *= 2.0;
      auto& corners = params.geoms[slot.entity].corners;
      for (size_t i = 0; i < corners.size(); ++i) {
        const Vec3d& base = g.corners[i];
        corners[i] = Vec3<T>(value * (base.x / side), value * (base.y / side),
                             value * (base.z / side));
      }
      break;
    }
    case Target::kGeomContact:
    case Target::kDefaultsContact: {
      ContactParamsT<T>* cp = slot.target == Target::kGeomContact
                                  ? &params.geoms[slot.entity].contact
                                  : &params.contact_defaults;
      switch (slot.field) {
        case 0: cp->solref.time_const = value; break;
        case 1: cp->solref.damping_ratio = value; break;
        case 2: cp->solimp.d0 = value; break;
        case 3: cp->solimp.dw = value; break;
        case 4: cp->solimp.width = value; break;
        case 5: cp->solimp.midpoint = value; break;
        case 6: cp->solimp.power = value; break;
        case 7: cp->mu = value; break;
        case 8: cp->friction_eps = value; break;
        default: throw ModelError("bad contact field id");
      }
      // defaults also flow into geoms without overrides
      if (slot.target == Target::kDefaultsContact) {
        for (size_t gi = 0; gi < params.geoms.size(); ++gi) {
          if (!params.geoms[gi].has_override) {
            ContactParamsT<T>& gc = params.geoms[gi].contact;
            switch (slot.field) {
              case 0: gc.solref.time_const = value; break;
              case 1: gc.solref.damping_ratio = value; break;
              case 2: gc.solimp.d0 = value; break;
              case 3: gc.solimp.dw = value; break;
              case 4: gc.solimp.width = value; break;
              case 5: gc.solimp.midpoint = value; break;
              case 6: gc.solimp.power = value; break;
              case 7: gc.mu = value; break;
              case 8: gc.friction_eps = value; break;
              default: break;
            }
          }
        }
      }
      break;
    }
    case Target::kCfdField:
      switch (slot.field) {
        case 0: params.cfd.d_c = value; break;
        case 1: params.cfd.d_0 = value; break;
        case 2: params.cfd.w_c = value; break;
        case 3: params.cfd.m_c = value; break;
        case 4: params.cfd.p_c = value; break;
        case 5: params.cfd.softplus_beta = value; break;
        default: throw ModelError("bad cfd field id");
      }
      break;
  }
}

}  // namespace detail

// Generic apply: scene numbers with slot values (in transform space) written
// through their transforms. T = Dual propagates parameter tangents.
template <typename T>
SceneParams<T> apply_params_generic(const Scene& scene,
                                    const std::vector<ParamSlot>& layout,
                                    std::span<const T> values) {
  if (layout.size() != values.size()) {
    throw ModelError("param layout/value size mismatch");
  }
  SceneParams<T> params = to_params<T>(scene);
  for (size_t i = 0; i < layout.size(); ++i) {
    const ResolvedSlot slot = resolve_slot_path(scene, layout[i].path);
    const T scene_value = transform_forward(layout[i].transform, values[i]);
    detail::write_slot(scene, params, slot, scene_value);
  }
  return params;
}

}  // namespace softsim

#endif  // SOFTSIM_PARAMS_HPP_
