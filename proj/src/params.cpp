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

#include "softsim/params.hpp"

#include <cmath>
#include <stdexcept>

namespace softsim {

namespace {

// parses "name[i]" into (name, i); index -1 when no brackets
std::pair<std::string, int> split_indexed(const std::string& field) {
  const size_t lb = field.find('[');
  if (lb == std::string::npos) return {field, -1};
  const size_t rb = field.find(']', lb);
  if (rb == std::string::npos) {
    throw ModelError("malformed path field: " + field);
  }
  const std::string name = field.substr(0, lb);
  const int index = std::stoi(field.substr(lb + 1, rb - lb - 1));
  return {name, index};
}

int contact_field_id(const std::string& field, int index) {
  if (field == "solref") {
    if (index < 0 || index > 1) throw ModelError("solref index out of range");
    return index;
  }
  if (field == "solimp") {
    if (index < 0 || index > 4) throw ModelError("solimp index out of range");
    return 2 + index;
  }
  if (field == "mu") return 7;
  if (field == "friction_eps") return 8;
  throw ModelError("unknown contact field: " + field);
}

}  // namespace

double transform_inverse(const ParamTransform& tr, double x) {
  switch (tr.kind) {
    case TransformKind::kIdentity:
      return x;
    case TransformKind::kSoftplus: {
      if (x <= 0.0) {
        throw ModelError("softplus transform requires a positive value, got " +
                         std::to_string(x));
      }
      // inverse of log1p(exp(b*v))/b: v = (bx + log(1 - exp(-bx)))/b
      const double bx = tr.sharpness * x;
      return (bx + std::log(-std::expm1(-bx))) / tr.sharpness;
    }
    case TransformKind::kSoftclip: {
      if (x <= tr.lo || x >= tr.hi) {
        throw ModelError("softclip transform requires a value in (" +
                         std::to_string(tr.lo) + ", " + std::to_string(tr.hi) +
                         "), got " + std::to_string(x));
      }
      const double u = (x - tr.lo) / (tr.hi - tr.lo);
      return std::log(u / (1.0 - u)) / tr.sharpness;
    }
  }
  return x;
}

ResolvedSlot resolve_slot_path(const Scene& scene, const std::string& path) {
  const size_t dot = path.find('.');
  if (dot == std::string::npos) {
    throw ModelError("param path needs a '<target>.<field>' form: " + path);
  }
  const std::string target = path.substr(0, dot);
  const std::string rest = path.substr(dot + 1);
  auto [field, index] = split_indexed(rest);

  ResolvedSlot slot;
  if (target == "contact_defaults") {
    slot.target = ResolvedSlot::Target::kDefaultsContact;
    slot.field = contact_field_id(field, index);
    return slot;
  }
  if (target == "cfd") {
    slot.target = ResolvedSlot::Target::kCfdField;
    if (field == "d_c") slot.field = 0;
    else if (field == "d_0") slot.field = 1;
    else if (field == "w_c") slot.field = 2;
    else if (field == "m_c") slot.field = 3;
    else if (field == "p_c") slot.field = 4;
    else if (field == "softplus_beta") slot.field = 5;
    else throw ModelError("unknown cfd field: " + field);
    return slot;
  }

  // "bodies[i]" / "geoms[i]" / entity name (geom first, then body)
  int body = -1;
  int geom = -1;
  auto [tname, tindex] = split_indexed(target);
  if (tname == "bodies" && tindex >= 0) {
    body = tindex;
  } else if (tname == "geoms" && tindex >= 0) {
    geom = tindex;
  } else {
    geom = scene.geom_index(target);
    if (geom < 0) body = scene.body_index(target);
    // names can refer to the body for mass/inertia even when a geom shares it
    if (geom >= 0 && (field == "mass" || field == "inertia")) {
      body = scene.body_index(target);
      if (body >= 0) geom = -1;
    }
  }

  if (body >= 0) {
    if (body >= static_cast<int>(scene.bodies.size())) {
      throw ModelError("body index out of range in path: " + path);
    }
    if (field == "mass") {
      slot.target = ResolvedSlot::Target::kBodyMass;
      slot.entity = body;
      return slot;
    }
    if (field == "inertia") {
      if (index < 0 || index > 2) throw ModelError("inertia index out of range");
      slot.target = ResolvedSlot::Target::kBodyInertia;
      slot.entity = body;
      slot.field = index;
      return slot;
    }
    throw ModelError("unknown body field in path: " + path);
  }
  if (geom >= 0) {
    if (geom >= static_cast<int>(scene.geoms.size())) {
      throw ModelError("geom index out of range in path: " + path);
    }
    const Geom& g = scene.geoms[geom];
    slot.entity = geom;
    if (field == "radius") {
      if (g.shape != ShapeKind::kSphere) {
        throw ModelError("radius slot on non-sphere geom: " + path);
      }
      slot.target = ResolvedSlot::Target::kGeomRadius;
      return slot;
    }
    if (field == "side_length") {
      if (g.shape != ShapeKind::kCornerSet || g.corners.empty()) {
        throw ModelError("side_length slot needs a corner-set geom: " + path);
      }
      slot.target = ResolvedSlot::Target::kGeomSideLength;
      return slot;
    }
    // contact override fields
    if (!g.contact_override) {
      throw ModelError("geom has no contact override for path: " + path);
    }
    slot.target = ResolvedSlot::Target::kGeomContact;
    slot.field = contact_field_id(field, index);
    return slot;
  }
  throw ModelError("unresolvable param path: " + path);
}

double slot_value(const Scene& scene, const ResolvedSlot& slot) {
  using Target = ResolvedSlot::Target;
  switch (slot.target) {
    case Target::kBodyMass:
      return scene.bodies[slot.entity].mass;
    case Target::kBodyInertia:
      return scene.bodies[slot.entity].inertia_diag[slot.field];
    case Target::kGeomRadius:
      return scene.geoms[slot.entity].radius;
    case Target::kGeomSideLength: {
      double side = 0.0;
      for (const Vec3d& c : scene.geoms[slot.entity].corners) {
        side = std::max({side, std::fabs(c.x), std::fabs(c.y), std::fabs(c.z)});
      }
      return 2.0 * side;
    }
    case Target::kGeomContact:
    case Target::kDefaultsContact: {
      const ContactParams& cp = slot.target == Target::kGeomContact
                                    ? *scene.geoms[slot.entity].contact_override
                                    : scene.contact_defaults;
      switch (slot.field) {
        case 0: return cp.solref.time_const;
        case 1: return cp.solref.damping_ratio;
        case 2: return cp.solimp.d0;
        case 3: return cp.solimp.dw;
        case 4: return cp.solimp.width;
        case 5: return cp.solimp.midpoint;
        case 6: return cp.solimp.power;
        case 7: return cp.mu;
        case 8: return cp.friction_eps;
      }
      throw ModelError("bad contact field id");
    }
    case Target::kCfdField:
      switch (slot.field) {
        case 0: return scene.cfd.d_c;
        case 1: return scene.cfd.d_0;
        case 2: return scene.cfd.w_c;
        case 3: return scene.cfd.m_c;
        case 4: return scene.cfd.p_c;
        case 5: return scene.cfd.softplus_beta;
      }
      throw ModelError("bad cfd field id");
  }
  throw ModelError("bad slot target");
}

ParamVector pack_params(const Scene& scene, const std::vector<ParamSlot>& slots) {
  ParamVector p;
  p.layout = slots;
  p.values.reserve(slots.size());
  for (const ParamSlot& s : slots) {
    const ResolvedSlot r = resolve_slot_path(scene, s.path);
    p.values.push_back(transform_inverse(s.transform, slot_value(scene, r)));
  }
  return p;
}

Scene apply_params(const Scene& scene, const ParamVector& p) {
  SceneParams<double> params = apply_params_generic<double>(
      scene, p.layout, std::span<const double>(p.values));
  Scene out = scene;
  for (size_t b = 0; b < out.bodies.size(); ++b) {
    out.bodies[b].mass = params.bodies[b].mass;
    out.bodies[b].inertia_diag = params.bodies[b].inertia_diag;
  }
  for (size_t g = 0; g < out.geoms.size(); ++g) {
    Geom& geom = out.geoms[g];
    geom.plane_normal = params.geoms[g].plane_normal;
    geom.plane_offset = params.geoms[g].plane_offset;
    geom.radius = params.geoms[g].radius;
    geom.corners = params.geoms[g].corners;
    if (geom.contact_override) {
      ContactParams cp;
      const ContactParamsT<double>& src = params.geoms[g].contact;
      cp.solref.time_const = src.solref.time_const;
      cp.solref.damping_ratio = src.solref.damping_ratio;
      cp.solimp.d0 = src.solimp.d0;
      cp.solimp.dw = src.solimp.dw;
      cp.solimp.width = src.solimp.width;
      cp.solimp.midpoint = src.solimp.midpoint;
      cp.solimp.power = src.solimp.power;
      cp.mu = src.mu;
      cp.friction_eps = src.friction_eps;
      geom.contact_override = cp;
    }
  }
  ContactParams& cd = out.contact_defaults;
  cd.solref.time_const = params.contact_defaults.solref.time_const;
  cd.solref.damping_ratio = params.contact_defaults.solref.damping_ratio;
  cd.solimp.d0 = params.contact_defaults.solimp.d0;
  cd.solimp.dw = params.contact_defaults.solimp.dw;
  cd.solimp.width = params.contact_defaults.solimp.width;
  cd.solimp.midpoint = params.contact_defaults.solimp.midpoint;
  cd.solimp.power = params.contact_defaults.solimp.power;
  cd.mu = params.contact_defaults.mu;
  cd.friction_eps = params.contact_defaults.friction_eps;
  out.cfd.d_c = params.cfd.d_c;
  out.cfd.d_0 = params.cfd.d_0;
  out.cfd.w_c = params.cfd.w_c;
  out.cfd.m_c = params.cfd.m_c;
  out.cfd.p_c = params.cfd.p_c;
  out.cfd.softplus_beta = params.cfd.softplus_beta;
  return out;
}

}  // namespace softsim
