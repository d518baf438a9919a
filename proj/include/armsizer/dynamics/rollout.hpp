// Copyright 2026 The armsizer Authors
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

// Fixed-step RK4 integration of the constrained forward dynamics. The
// actuator work q_a_dot^T tau_a is integrated alongside the state so the
// energy balance can be checked without quadrature error of its own.

#pragma once

#include <armsizer/dynamics/constrained.hpp>

#include <functional>

namespace armsizer::dynamics {

/// tau_a(t, q, qd)
using TorqueLaw = std::function<VecX(double, const VecX&, const VecX&)>;

struct RolloutOptions {
  double dt = 1e-4;
  double duration = 1.0;
  Vec3 gravity = kStandardGravity;
  KktOptions kkt{BiasMethod::kAnalytic};
  /// Re-close the loops (positions and velocities) after every step.
  bool project = false;
};

struct Rollout {
  std::vector<double> t;
  std::vector<VecX> q, qd;
  std::vector<double> kinetic, potential;
  std::vector<double> work;  // integral of qd_a^T tau_a from t = 0
  double max_closure_residual = 0.0;

  double energy(std::size_t k) const { return kinetic[k] + potential[k]; }
};

namespace detail {

/// Closure of the actuated velocity on the constraint tangent space.
inline VecX consistent_velocity(const RigidBodyModel& model, const VecX& q, const VecX& qd) {
  if (model.n_p() == 0) return qd;
  const MatX jc = kinematics::closure_jacobian_matrix(model, q);
  VecX out = qd;
  out.tail(model.n_p()) = jc.rightCols(model.n_p()).partialPivLu().solve(VecX(-jc.leftCols(model.n_a()) * qd.head(model.n_a())));
  return out;
}

}  // namespace detail

inline Rollout rollout(const RigidBodyModel& model, const VecX& q0, const VecX& qd0, const TorqueLaw& torque,
                       const RolloutOptions& opt = {}) {
  kinematics::check_dimension(model, q0, "q0");
  kinematics::check_dimension(model, qd0, "qd0");
  require(opt.dt > 0.0 && opt.duration >= 0.0, "rollout needs dt > 0 and duration >= 0");
  const int n = model.n();
  const int na = model.n_a();
  const auto steps = static_cast<int>(std::llround(opt.duration / opt.dt));

  // state x = (q, qd, work)
  auto deriv = [&](double t, const VecX& x) {
    const VecX q = x.head(n);
    const VecX qd = x.segment(n, n);
    const VecX tau = torque(t, q, qd);
    VecX dx(2 * n + 1);
    dx.head(n) = qd;
    dx.segment(n, n) = constrained_forward_dynamics(model, q, qd, tau, opt.gravity, opt.kkt).qdd;
    dx(2 * n) = qd.head(na).dot(tau);
    return dx;
  };

  Rollout out;
  auto record = [&](double t, const VecX& x) {
    const VecX q = x.head(n);
    const VecX qd = x.segment(n, n);
    out.t.push_back(t);
    out.q.push_back(q);
    out.qd.push_back(qd);
    out.kinetic.push_back(kinetic_energy(model, q, qd));
    out.potential.push_back(potential_energy(model, q, opt.gravity));
    out.work.push_back(x(2 * n));
    if (model.m() > 0) {
      out.max_closure_residual =
          std::max(out.max_closure_residual, kinematics::closure_residual(model, q).lpNorm<Eigen::Infinity>());
    }
  };

  VecX x(2 * n + 1);
  x << q0, qd0, 0.0;
  record(0.0, x);
  const double h = opt.dt;
  for (int k = 0; k < steps; ++k) {
    const double t = k * h;
    const VecX k1 = deriv(t, x);
    const VecX k2 = deriv(t + 0.5 * h, x + 0.5 * h * k1);
    const VecX k3 = deriv(t + 0.5 * h, x + 0.5 * h * k2);
    const VecX k4 = deriv(t + h, x + h * k3);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (opt.project && model.n_p() > 0) {
      const VecX q = kinematics::solve_closure(model, x.head(na), VecX(x.segment(na, model.n_p())));
      x.head(n) = q;
      x.segment(n, n) = detail::consistent_velocity(model, q, x.segment(n, n));
    }
    record((k + 1) * h, x);
  }
  return out;
}

}  // namespace armsizer::dynamics
