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

// 1D toy collision models used for the gradient pathology analysis: a unit
// point mass, a wall at q = 0, no gravity. The penalty toy reuses the contact
// pipeline (impedance, reference acceleration, diagonal regularized solve);
// the ideal-elastic toy reflects the velocity, optionally with a
// time-of-impact step split.

#ifndef SOFTSIM_TOY_HPP_
#define SOFTSIM_TOY_HPP_

#include "softsim/contact.hpp"

namespace softsim {

template <typename T>
struct ToyStateT {
  T q{};  // position, m
  T v{};  // velocity, m/s
};
using ToyState = ToyStateT<double>;

// penalty force at (q, v): active for q < 0, unit mass so J = 1, A = 1
template <typename T>
T toy_penalty_force(const T& q, const T& v, const ContactParamsT<T>& params) {
  if (!(primal(q) < 0.0)) return T(0.0);
  const T d = impedance<T>(q, params.solimp, nullptr);
  const T aref = reference_acceleration(q, v, params.solref, params.solimp.dw, d,
                                        /*softened=*/false, 0.0);
  const T R = regularizer(d, T(1.0));
  return max(aref / (T(1.0) + R), T(0.0));
}

// semi-implicit Euler: v += h f, q += h v
template <typename T>
ToyStateT<T> toy_penalty_step(const ToyStateT<T>& s, double h,
                              const ContactParamsT<T>& params) {
  ToyStateT<T> out;
  out.v = s.v + h * toy_penalty_force(s.q, s.v, params);
  out.q = s.q + h * out.v;
  return out;
}

// Ideal elastic wall, unit restitution. Without TOI the velocity flips at
// step end once the position update crosses the wall downward; with TOI the
// step is split at t* = -q/v and the remainder integrated after reflection,
// which for unit restitution collapses to q <- -(q + h v).
template <typename T>
ToyStateT<T> toy_elastic_step(const ToyStateT<T>& s, double h,
                              bool toi_correction) {
  ToyStateT<T> out;
  const T q_next = s.q + h * s.v;
  const bool crossing = primal(s.q) >= 0.0 && primal(q_next) < 0.0;
  if (!crossing) {
    out.q = q_next;
    out.v = s.v;
    return out;
  }
  if (toi_correction) {
    out.q = -(s.q + h * s.v);
    out.v = -s.v;
  } else {
    out.q = q_next;
    out.v = -s.v;
  }
  return out;
}

enum class ToyModel { kPenalty, kElastic, kElasticToi };

// fixed-step rollout; N steps of size h
template <typename T>
ToyStateT<T> toy_rollout(ToyStateT<T> s, ToyModel model, double h, int steps,
                         const ContactParamsT<T>& params) {
  for (int k = 0; k < steps; ++k) {
    switch (model) {
      case ToyModel::kPenalty:
        s = toy_penalty_step(s, h, params);
        break;
      case ToyModel::kElastic:
        s = toy_elastic_step(s, h, false);
        break;
      case ToyModel::kElasticToi:
        s = toy_elastic_step(s, h, true);
        break;
    }
  }
  return s;
}

// Continuous-time penalty toy as an ODE system for the adaptive reference
// integrator (the tight-tolerance oracle for Fig-4-style sweeps).
template <typename T>
struct ToyPenaltyOde {
  ContactParamsT<T> params;

  int dim() const { return 2; }
  void eval(double /*t*/, std::span<const T> x, std::span<T> dxdt) const {
    dxdt[0] = x[1];
    dxdt[1] = toy_penalty_force(x[0], x[1], params);
  }
  void renormalize(std::span<T>) const {}
  // semi-implicit split: position rate depends only on velocity
  void position_rates(std::span<const T> x, std::span<T> dxdt) const {
    dxdt[0] = x[1];
  }
  std::span<const int> velocity_indices() const {
    static const int idx[] = {1};
    return idx;
  }
  std::span<const int> position_indices() const {
    static const int idx[] = {0};
    return idx;
  }
  std::span<const int> quat_offsets() const { return {}; }
  std::string component_name(int index) const { return index == 0 ? "q" : "v"; }
};

}  // namespace softsim

#endif  // SOFTSIM_TOY_HPP_
