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

// Fixed-step and adaptive embedded Runge-Kutta integration with PID stepsize
// control. The System concept supplies dim(), eval(t, x, dxdt),
// renormalize(x), and the velocity/position split used by semi-implicit
// Euler. Substeps are templated on the scalar so the reverse sweep can
// re-execute an accepted step under dual numbers with the recorded stepsize;
// the controller itself only ever runs on doubles.
//
// Embedded pairs: Bogacki-Shampine 3(2) and Dormand-Prince 5(4).

#ifndef SOFTSIM_INTEGRATE_HPP_
#define SOFTSIM_INTEGRATE_HPP_

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "softsim/dual.hpp"

namespace softsim {

enum class Method { kExplicitEuler, kSemiImplicitEuler, kRk4, kBs32, kRk54 };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::kExplicitEuler: return "explicit-euler";
    case Method::kSemiImplicitEuler: return "semi-implicit-euler";
    case Method::kRk4: return "rk4";
    case Method::kBs32: return "bs32 (Bogacki-Shampine 3(2))";
    case Method::kRk54: return "rk54 (Dormand-Prince 5(4))";
  }
  return "?";
}

inline bool is_adaptive(Method m) {
  return m == Method::kBs32 || m == Method::kRk54;
}

struct PidCoefficients {
  double p = 0.2;
  double i = 0.4;
  double d = 0.0;
};

struct IntegratorConfig {
  Method method = Method::kRk54;
  double rtol = 1e-6;
  double atol = 1e-9;
  PidCoefficients pid;
  double safety = 0.9;
  double h_min = 1e-9;
  double h_max = 0.0;   // 0: outer step duration
  int max_steps = 100000;
  double min_shrink = 0.1;
  double max_grow = 10.0;
  double fixed_h = 0.0; // 0: outer step duration (fixed methods only)

  void validate() const {
    if (rtol <= 0.0 || atol <= 0.0) throw std::invalid_argument("tolerances must be > 0");
    if (safety <= 0.0 || safety >= 1.0) throw std::invalid_argument("safety in (0,1)");
    if (h_min > (h_max > 0.0 ? h_max : h_min)) throw std::invalid_argument("h_min > h_max");
    if (max_steps < 1) throw std::invalid_argument("max_steps >= 1");
  }
};

struct TapeEntry {
  double t;
  double h;  // accepted stepsize to the next node
  std::vector<double> state;
  std::vector<double> deriv;
};

struct StepTape {
  std::vector<TapeEntry> entries;  // nodes at the start of each accepted step
  std::vector<double> final_state;
  std::vector<double> final_deriv;
  double t_begin = 0.0;
  double t_end = 0.0;
  long rejected_count = 0;
  long rhs_eval_count = 0;
  std::string method;
  std::vector<int> quat_offsets;  // renormalization after dense interpolation

  double span_begin() const { return t_begin; }
  double span_end() const { return t_end; }
};

struct StepDiagnostics {
  double min_h = 0.0;
  double max_error_estimate = 0.0;
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, std::shared_ptr<StepTape> partial)
      : std::runtime_error(what), partial_tape(std::move(partial)) {}
  std::shared_ptr<StepTape> partial_tape;
};

namespace rk {

struct Tableau {
  int stages;
  int order_low;          // low order of the embedded pair (error exponent base)
  const double* a;        // stages x stages, row-major, strictly lower
  const double* b;        // high-order weights
  const double* bhat;     // low-order weights (nullptr: no error estimate)
  const double* c;
};

// Bogacki-Shampine 3(2)
inline const Tableau& bs32() {
  static const double a[16] = {
      0, 0, 0, 0,
      1.0 / 2, 0, 0, 0,
      0, 3.0 / 4, 0, 0,
      2.0 / 9, 1.0 / 3, 4.0 / 9, 0};
  static const double b[4] = {2.0 / 9, 1.0 / 3, 4.0 / 9, 0};
  static const double bhat[4] = {7.0 / 24, 1.0 / 4, 1.0 / 3, 1.0 / 8};
  static const double c[4] = {0, 1.0 / 2, 3.0 / 4, 1};
  static const Tableau t{4, 2, a, b, bhat, c};
  return t;
}

// Dormand-Prince 5(4)
inline const Tableau& dopri54() {
  static const double a[49] = {
      0, 0, 0, 0, 0, 0, 0,
      1.0 / 5, 0, 0, 0, 0, 0, 0,
      3.0 / 40, 9.0 / 40, 0, 0, 0, 0, 0,
      44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0, 0,
      19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0, 0,
      9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0, 0,
      35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0};
  static const double b[7] = {35.0 / 384,      0,           500.0 / 1113,
                              125.0 / 192,     -2187.0 / 6784, 11.0 / 84, 0};
  static const double bhat[7] = {5179.0 / 57600,  0,         7571.0 / 16695,
                                 393.0 / 640,     -92097.0 / 339200,
                                 187.0 / 2100,    1.0 / 40};
  static const double c[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1, 1};
  static const Tableau t{7, 4, a, b, bhat, c};
  return t;
}

// classic RK4, fixed-step only
inline const Tableau& rk4() {
  static const double a[16] = {
      0, 0, 0, 0,
      1.0 / 2, 0, 0, 0,
      0, 1.0 / 2, 0, 0,
      0, 0, 1, 0};
  static const double b[4] = {1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6};
  static const double c[4] = {0, 1.0 / 2, 1.0 / 2, 1};
  static const Tableau t{4, 4, a, b, nullptr, c};
  return t;
}

inline const Tableau* tableau_of(Method m) {
  switch (m) {
    case Method::kBs32: return &bs32();
    case Method::kRk54: return &dopri54();
    case Method::kRk4: return &rk4();
    default: return nullptr;
  }
}

inline int order_low_of(Method m) {
  switch (m) {
    case Method::kExplicitEuler:
    case Method::kSemiImplicitEuler: return 1;
    case Method::kRk4: return 4;
    case Method::kBs32: return 2;
    case Method::kRk54: return 4;
  }
  return 1;
}

}  // namespace rk

// One step of the chosen method at fixed h. Stage arithmetic is shared
// between the double forward loop and the dual reverse re-execution, so both
// produce bit-identical primal values. y_low_out, when non-null and the
// method has an embedded pair, receives the raw (un-renormalized) low-order
// combination; y is left renormalized. Returns rhs evaluation count.
template <typename T, class System>
int substep(const System& sys, Method method, double t, double h,
            std::span<const T> y0, std::span<T> y_out,
            std::vector<T>* k1_out = nullptr,
            std::vector<T>* y_low_out = nullptr,
            std::vector<T>* y_high_raw_out = nullptr) {
  const int n = sys.dim();

  if (method == Method::kExplicitEuler || method == Method::kSemiImplicitEuler) {
    std::vector<T> d(n);
    sys.eval(t, y0, std::span<T>(d));
    if (k1_out) *k1_out = d;
    if (method == Method::kExplicitEuler) {
      for (int i = 0; i < n; ++i) y_out[i] = y0[i] + h * d[i];
    } else {
      // velocities first, then position rates from the updated velocities
      std::vector<T> hybrid(y0.begin(), y0.end());
      for (int idx : sys.velocity_indices()) hybrid[idx] = y0[idx] + h * d[idx];
      std::vector<T> pr(n, T(0.0));
      sys.position_rates(std::span<const T>(hybrid), std::span<T>(pr));
      for (int i = 0; i < n; ++i) y_out[i] = hybrid[i];
      for (int idx : sys.position_indices()) y_out[idx] = y0[idx] + h * pr[idx];
    }
    sys.renormalize(y_out);
    return 1;
  }

  const rk::Tableau& tab = *rk::tableau_of(method);
  std::vector<std::vector<T>> k(tab.stages, std::vector<T>(n));
  std::vector<T> ytmp(n);
  for (int s = 0; s < tab.stages; ++s) {
    if (s == 0) {
      sys.eval(t, y0, std::span<T>(k[0]));
      if (k1_out) *k1_out = k[0];
      continue;
    }
    for (int i = 0; i < n; ++i) {
      T acc = T(0.0);
      for (int j = 0; j < s; ++j) {
        const double aij = tab.a[s * tab.stages + j];
        if (aij != 0.0) acc += k[j][i] * aij;
      }
      ytmp[i] = y0[i] + h * acc;
    }
    sys.eval(t + tab.c[s] * h, std::span<const T>(ytmp), std::span<T>(k[s]));
  }
  for (int i = 0; i < n; ++i) {
    T acc = T(0.0);
    for (int s = 0; s < tab.stages; ++s) {
      if (tab.b[s] != 0.0) acc += k[s][i] * tab.b[s];
    }
    y_out[i] = y0[i] + h * acc;
  }
  if (y_high_raw_out) y_high_raw_out->assign(y_out.begin(), y_out.end());
  if (y_low_out && tab.bhat) {
    y_low_out->resize(n);
    for (int i = 0; i < n; ++i) {
      T acc = T(0.0);
      for (int s = 0; s < tab.stages; ++s) {
        if (tab.bhat[s] != 0.0) acc += k[s][i] * tab.bhat[s];
      }
      (*y_low_out)[i] = y0[i] + h * acc;
    }
  }
  sys.renormalize(y_out);
  return tab.stages;
}

// scaled rms error of the raw high/low difference
inline double error_estimate_norm(std::span<const double> y0,
                                  std::span<const double> y_high_raw,
                                  std::span<const double> y_low,
                                  double atol, double rtol) {
  double sum = 0.0;
  const size_t n = y0.size();
  for (size_t i = 0; i < n; ++i) {
    const double sc =
        atol + rtol * std::max(std::fabs(y0[i]), std::fabs(y_high_raw[i]));
    const double e = (y_high_raw[i] - y_low[i]) / sc;
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(n));
}

// Advances one embedded step and reports the scaled error estimate.
template <class System>
int embedded_step(const System& sys, Method method, double t, double h,
                  std::span<const double> y0, std::span<double> y_out,
                  double atol, double rtol, double* error_estimate,
                  std::vector<double>* k1_out = nullptr) {
  std::vector<double> y_low, y_raw;
  const int evals =
      substep<double>(sys, method, t, h, y0, y_out, k1_out, &y_low, &y_raw);
  if (error_estimate) {
    *error_estimate =
        rk::tableau_of(method) && rk::tableau_of(method)->bhat
            ? error_estimate_norm(y0, y_raw, y_low, atol, rtol)
            : 0.0;
  }
  return evals;
}

struct PidDecision {
  bool accept;
  double h_next;
};

// Soderlind digital-filter controller: accept iff err <= 1;
// factor = safety * err^(-b1/k) * err_prev^(-b2/k) * err_prev2^(-b3/k),
// (b1, b2, b3) = (P+I+D, -(P+2D), D), k = order_low + 1. Errors are floored
// at 1e-10 before exponentiation; the growth factor is capped at 1 on
// rejected steps.
inline PidDecision pid_controller(double err_now, double err_prev,
                                  double err_prev2, double h, int order_low,
                                  const IntegratorConfig& cfg, double h_max) {
  const double floor = 1e-10;
  const double e0 = std::max(err_now, floor);
  const double e1 = std::max(err_prev, floor);
  const double e2 = std::max(err_prev2, floor);
  const double k = static_cast<double>(order_low + 1);
  const double b1 = cfg.pid.p + cfg.pid.i + cfg.pid.d;
  const double b2 = -(cfg.pid.p + 2.0 * cfg.pid.d);
  const double b3 = cfg.pid.d;
  double factor = cfg.safety * std::pow(e0, -b1 / k) * std::pow(e1, -b2 / k) *
                  std::pow(e2, -b3 / k);
  factor = std::clamp(factor, cfg.min_shrink, cfg.max_grow);
  const bool accept = err_now <= 1.0;
  if (!accept) factor = std::min(factor, 1.0);
  const double h_next = std::clamp(h * factor, cfg.h_min, h_max);
  return {accept, h_next};
}

// Two-evaluation startup heuristic for the first stepsize.
template <class System>
double initial_stepsize(const System& sys, double t0, std::span<const double> y0,
                        const IntegratorConfig& cfg, double h_max,
                        long* eval_count = nullptr) {
  const int n = sys.dim();
  auto scaled_norm = [&](std::span<const double> v, std::span<const double> ref) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double sc = cfg.atol + cfg.rtol * std::fabs(ref[i]);
      const double e = v[i] / sc;
      sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(n));
  };

  std::vector<double> f0(n);
  sys.eval(t0, y0, std::span<double>(f0));
  if (eval_count) ++*eval_count;
  const double d0 = scaled_norm(y0, y0);
  const double d1 = scaled_norm(f0, y0);

  double h0;
  if (d0 < 1e-5 || d1 < 1e-5) {
    h0 = 1e-6;
  } else {
    h0 = 0.01 * d0 / d1;
  }
  h0 = std::min(h0, h_max);

  std::vector<double> y1(n), f1(n);
  for (int i = 0; i < n; ++i) y1[i] = y0[i] + h0 * f0[i];
  sys.eval(t0 + h0, std::span<const double>(y1), std::span<double>(f1));
  if (eval_count) ++*eval_count;
  for (int i = 0; i < n; ++i) f1[i] = f1[i] - f0[i];
  const double d2 = scaled_norm(f1, y0) / h0;

  if (d1 <= 1e-14 && d2 <= 1e-14) {
    return std::clamp(h_max, cfg.h_min, h_max);
  }
  const double k = static_cast<double>(rk::order_low_of(cfg.method) + 1);
  const double h1 = std::pow(0.01 / std::max(d1, d2), 1.0 / k);
  return std::clamp(std::min(100.0 * h0, h1), cfg.h_min, h_max);
}

// Integrates [t0, t1], recording every accepted step. Deterministic for
// fixed inputs. Throws IntegrationError (carrying the partial tape) if
// max_steps is exhausted or the state goes non-finite.
template <class System>
StepTape integrate_interval(const System& sys, double t0, double t1,
                            std::span<const double> x0,
                            const IntegratorConfig& cfg,
                            std::vector<double>& final_state,
                            StepDiagnostics* diag = nullptr) {
  cfg.validate();
  const int n = sys.dim();
  auto tape = std::make_shared<StepTape>();
  tape->t_begin = t0;
  tape->t_end = t1;
  tape->method = method_name(cfg.method);
  tape->quat_offsets.assign(sys.quat_offsets().begin(), sys.quat_offsets().end());

  std::vector<double> y(x0.begin(), x0.end());
  if (diag) *diag = {t1 - t0, 0.0};

  const double duration = t1 - t0;
  if (duration <= 0.0) {
    tape->final_state = y;
    tape->final_deriv.assign(n, 0.0);
    final_state = y;
    return std::move(*tape);
  }

  auto check_finite = [&](std::span<const double> v, double t) {
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(v[i])) {
        tape->final_state = y;
        tape->final_deriv.assign(n, 0.0);
        throw IntegrationError(
            "non-finite state component " + sys.component_name(i) + " at t=" +
                std::to_string(t),
            tape);
      }
    }
  };

  const double h_max = cfg.h_max > 0.0 ? std::min(cfg.h_max, duration) : duration;

  if (!is_adaptive(cfg.method)) {
    const double h_req = cfg.fixed_h > 0.0 ? cfg.fixed_h : duration;
    const int steps = std::max(1, static_cast<int>(std::llround(duration / h_req)));
    const double h = duration / steps;
    double t = t0;
    std::vector<double> ynext(n), f(n), k1;
    for (int k = 0; k < steps; ++k) {
      tape->rhs_eval_count += substep<double>(sys, cfg.method, t, h,
                                              std::span<const double>(y),
                                              std::span<double>(ynext), &k1);
      tape->entries.push_back({t, h, y, k1});
      y = ynext;
      t = (k + 1 == steps) ? t1 : t0 + (k + 1) * h;
      check_finite(y, t);
      if (diag) diag->min_h = std::min(diag->min_h, h);
    }
    sys.eval(t1, std::span<const double>(y), std::span<double>(f));
    ++tape->rhs_eval_count;
    tape->final_state = y;
    tape->final_deriv = f;
    final_state = y;
    return std::move(*tape);
  }

  // adaptive loop
  const int order_low = rk::order_low_of(cfg.method);
  double h = cfg.fixed_h > 0.0
                 ? std::clamp(cfg.fixed_h, cfg.h_min, h_max)
                 : initial_stepsize(sys, t0, std::span<const double>(y), cfg,
                                    h_max, &tape->rhs_eval_count);
  double t = t0;
  double err_prev = 1.0, err_prev2 = 1.0;
  std::vector<double> ynext(n), f(n), k1;
  int attempts = 0;
  while (t < t1 - 1e-14 * std::max(1.0, std::fabs(t1))) {
    if (++attempts > cfg.max_steps) {
      tape->final_state = y;
      tape->final_deriv.assign(n, 0.0);
      throw IntegrationError(
          "max_steps exceeded at t=" + std::to_string(t) +
              " (ODE too stiff for the configured tolerances)",
          tape);
    }
    const bool last = t + h >= t1 - 1e-14 * std::max(1.0, std::fabs(t1));
    const double h_try = last ? t1 - t : h;

    double err = 0.0;
    tape->rhs_eval_count += embedded_step(sys, cfg.method, t, h_try,
                                          std::span<const double>(y),
                                          std::span<double>(ynext), cfg.atol,
                                          cfg.rtol, &err, &k1);
    if (diag) diag->max_error_estimate = std::max(diag->max_error_estimate, err);

    const PidDecision dec =
        pid_controller(err, err_prev, err_prev2, h_try, order_low, cfg, h_max);
    err_prev2 = err_prev;
    err_prev = std::max(err, 1e-10);

    if (dec.accept) {
      tape->entries.push_back({t, h_try, y, k1});
      y = ynext;
      t = last ? t1 : t + h_try;
      check_finite(y, t);
      if (diag) diag->min_h = std::min(diag->min_h, h_try);
      h = dec.h_next;
    } else {
      ++tape->rejected_count;
      h = std::min(dec.h_next, h_try);
      if (h <= cfg.h_min) h = cfg.h_min;
    }
  }
  sys.eval(t1, std::span<const double>(y), std::span<double>(f));
  ++tape->rhs_eval_count;
  tape->final_state = y;
  tape->final_deriv = f;
  final_state = y;
  return std::move(*tape);
}

// Cubic Hermite interpolation between bracketing tape nodes; exact at nodes.
// Quaternion components are renormalized after interpolation.
inline void dense_eval(const StepTape& tape, double t_query,
                       std::vector<double>& state, std::vector<double>& deriv) {
  const double lo = tape.t_begin, hi = tape.t_end;
  const double tol = 1e-12 * std::max({1.0, std::fabs(lo), std::fabs(hi)});
  if (t_query < lo - tol || t_query > hi + tol) {
    throw std::out_of_range("dense_eval query outside tape span");
  }
  if (tape.entries.empty() || t_query >= hi) {
    state = tape.final_state;
    deriv = tape.final_deriv;
    return;
  }
  // binary search for the segment with entries[k].t <= t_query
  size_t lo_i = 0, hi_i = tape.entries.size();
  while (hi_i - lo_i > 1) {
    const size_t mid = (lo_i + hi_i) / 2;
    if (tape.entries[mid].t <= t_query) {
      lo_i = mid;
    } else {
      hi_i = mid;
    }
  }
  const TapeEntry& e = tape.entries[lo_i];
  const std::vector<double>& y1 =
      lo_i + 1 < tape.entries.size() ? tape.entries[lo_i + 1].state : tape.final_state;
  const std::vector<double>& f1 =
      lo_i + 1 < tape.entries.size() ? tape.entries[lo_i + 1].deriv : tape.final_deriv;

  const double h = e.h;
  const double th = (t_query - e.t) / h;
  const double t2 = th * th, t3 = t2 * th;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + th;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  const double g00 = (6 * t2 - 6 * th) / h;
  const double g10 = (3 * t2 - 4 * th + 1);
  const double g01 = (-6 * t2 + 6 * th) / h;
  const double g11 = (3 * t2 - 2 * th);

  const size_t n = e.state.size();
  state.resize(n);
  deriv.resize(n);
  for (size_t i = 0; i < n; ++i) {
    state[i] = h00 * e.state[i] + h10 * h * e.deriv[i] + h01 * y1[i] +
               h11 * h * f1[i];
    deriv[i] = g00 * e.state[i] + g10 * e.deriv[i] + g01 * y1[i] + g11 * f1[i];
  }
  for (int off : tape.quat_offsets) {
    double norm2 = 0.0;
    for (int i = 0; i < 4; ++i) norm2 += state[off + i] * state[off + i];
    const double inv = 1.0 / std::sqrt(norm2);
    for (int i = 0; i < 4; ++i) state[off + i] *= inv;
  }
}

}  // namespace softsim

#endif  // SOFTSIM_INTEGRATE_HPP_
