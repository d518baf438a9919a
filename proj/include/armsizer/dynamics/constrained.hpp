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

#pragma once

#include <armsizer/dynamics/rigid_body.hpp>
#include <armsizer/kinematics/closure.hpp>

#include <Eigen/LU>

namespace armsizer::dynamics {

using kinematics::BiasMethod;

struct KktOptions {
  BiasMethod bias = BiasMethod::kFiniteDifference;
  int refinement_steps = 1;
  /// Reciprocal condition estimate below which the KKT matrix is treated
  /// as rank deficient.
  double min_rcond = 1e-14;
  /// Closure residual required on entry.
  double closure_tolerance = kinematics::kClosureTolerance;
};

/// Actuated torques and closure multipliers that realize a commanded
/// actuated motion on the closed-chain mechanism.
struct ConstrainedIDResult {
  VecX tau_a;
  VecX lambda;
  double kkt_residual = 0.0;
  double bias_norm = 0.0;  // ||h||_inf, scale for kkt_residual
  VecX qd;   // full velocity used (passive block resolved)
  VecX qdd;  // full acceleration solved by the KKT system
};

namespace detail {

inline VecX solve_refined(const MatX& k, const VecX& b, const KktOptions& opt) {
  const Eigen::PartialPivLU<MatX> lu(k);
  const double rcond = lu.rcond();
  if (!(rcond >= opt.min_rcond)) {
    throw SingularConfiguration("KKT matrix is rank deficient (rcond " + std::to_string(rcond) + ")");
  }
  VecX x = lu.solve(b);
  for (int i = 0; i < opt.refinement_steps; ++i) x += lu.solve(VecX(b - k * x));
  return x;
}

struct ClosureTerms {
  MatX jc;
  VecX bias;  // Jc_dot * qd
};

inline ClosureTerms closure_terms(const RigidBodyModel& model, const VecX& q, const VecX& qd,
                                  const KktOptions& opt) {
  if (model.m() == 0) return {MatX::Zero(0, model.n()), VecX::Zero(0)};
  ClosureTerms t;
  t.jc = kinematics::closure_jacobian_matrix(model, q);
  t.bias = opt.bias == BiasMethod::kAnalytic ? kinematics::closure_bias_analytic(model, q, qd)
                                             : kinematics::closure_bias_fd(model, q, qd);
  return t;
}

inline void require_solved(const RigidBodyModel& model, const VecX& q, const KktOptions& opt) {
  if (model.m() == 0) return;
  const double r = kinematics::closure_residual(model, q).lpNorm<Eigen::Infinity>();
  if (r > opt.closure_tolerance) {
    throw InvalidArgument("configuration does not satisfy the closure (residual " + std::to_string(r) + ")");
  }
}

}  // namespace detail

/// Solves, in one square system with unknowns (qdd, tau_a, lambda):
///   M qdd - S^T tau_a - Jc^T lambda = -h
///   S qdd                           = qdd_a
///   Jc qdd                          = -Jc_dot qd
/// where qd is completed from qd_a through the closure.
inline ConstrainedIDResult constrained_inverse_dynamics(const RigidBodyModel& model, const VecX& q,
                                                        const VecX& qd_a, const VecX& qdd_a,
                                                        const Vec3& gravity = kStandardGravity,
                                                        const KktOptions& opt = {}) {
  kinematics::check_dimension(model, q, "q");
  detail::require_solved(model, q, opt);
  const int n = model.n();
  const int na = model.n_a();
  const int m = model.m();
  require(qd_a.size() == na && qdd_a.size() == na, "actuated rates must have one entry per actuated joint");

  ConstrainedIDResult out;
  out.qd = VecX::Zero(n);
  out.qd.head(na) = qd_a;
  if (model.n_p() > 0) {
    const MatX jc = kinematics::closure_jacobian_matrix(model, q);
    const MatX jp = jc.rightCols(model.n_p());
    if (kinematics::condition_number(jp) > 1e12) throw SingularConfiguration("passive closure Jacobian is singular");
    out.qd.tail(model.n_p()) = jp.partialPivLu().solve(VecX(-jc.leftCols(na) * qd_a));
  }

  const MatX mass = mass_matrix(model, q);
  const VecX h = bias_forces(model, q, out.qd, gravity);
  const auto ct = detail::closure_terms(model, q, out.qd, opt);

  const int size = n + na + m;
  MatX k = MatX::Zero(size, size);
  VecX b(size);
  k.topLeftCorner(n, n) = mass;
  k.block(0, n, na, na) = -MatX::Identity(na, na);  // -S^T, S selects the leading block
  k.block(0, n + na, n, m) = -ct.jc.transpose();
  k.block(n, 0, na, na) = MatX::Identity(na, na);
  k.block(n + na, 0, m, n) = ct.jc;
  b.head(n) = -h;
  b.segment(n, na) = qdd_a;
  b.tail(m) = -ct.bias;

  const VecX x = detail::solve_refined(k, b, opt);
  out.qdd = x.head(n);
  out.tau_a = x.segment(n, na);
  out.lambda = x.tail(m);

  VecX r1 = mass * out.qdd - ct.jc.transpose() * out.lambda + h;
  r1.head(na) -= out.tau_a;
  const double r2 = (out.qdd.head(na) - qdd_a).lpNorm<Eigen::Infinity>();
  const double r3 = m > 0 ? (ct.jc * out.qdd + ct.bias).lpNorm<Eigen::Infinity>() : 0.0;
  out.kkt_residual = std::max({r1.lpNorm<Eigen::Infinity>(), r2, r3});
  out.bias_norm = h.lpNorm<Eigen::Infinity>();
  return out;
}

/// Same solution by elimination: passive accelerations from the closure
/// rows, then the square system [S^T Jc^T] [tau_a; lambda] = M qdd + h.
inline ConstrainedIDResult constrained_inverse_dynamics_staged(const RigidBodyModel& model, const VecX& q,
                                                               const VecX& qd_a, const VecX& qdd_a,
                                                               const Vec3& gravity = kStandardGravity,
                                                               const KktOptions& opt = {}) {
  detail::require_solved(model, q, opt);
  const int n = model.n();
  const int na = model.n_a();
  const int m = model.m();
  require(m == model.n_p(), "staged reduction needs a square closure");
  const auto rates = kinematics::resolve_passive_rates(model, q, qd_a, qdd_a, opt.bias);
  const MatX mass = mass_matrix(model, q);
  const VecX h = bias_forces(model, q, rates.qd, gravity);
  MatX a = MatX::Zero(n, na + m);
  a.topLeftCorner(na, na).setIdentity();
  if (m > 0) a.rightCols(m) = kinematics::closure_jacobian_matrix(model, q).transpose();
  const VecX x = detail::solve_refined(a, VecX(mass * rates.qdd + h), opt);
  ConstrainedIDResult out;
  out.qd = rates.qd;
  out.qdd = rates.qdd;
  out.tau_a = x.head(na);
  out.lambda = x.tail(m);
  out.kkt_residual = (a * x - (mass * rates.qdd + h)).lpNorm<Eigen::Infinity>();
  out.bias_norm = h.lpNorm<Eigen::Infinity>();
  return out;
}

struct ForwardDynamicsResult {
  VecX qdd;
  VecX lambda;
};

/// Accelerations of the closed-chain mechanism under actuated torques:
///   [M  Jc^T] [qdd ]   [S^T tau_a - h]
///   [Jc  0  ] [-lam] = [-Jc_dot qd   ]
inline ForwardDynamicsResult constrained_forward_dynamics(const RigidBodyModel& model, const VecX& q,
                                                          const VecX& qd, const VecX& tau_a,
                                                          const Vec3& gravity = kStandardGravity,
                                                          const KktOptions& opt = {}) {
  kinematics::check_dimension(model, q, "q");
  kinematics::check_dimension(model, qd, "qd");
  const int n = model.n();
  const int na = model.n_a();
  const int m = model.m();
  require(tau_a.size() == na, "tau_a must have one entry per actuated joint");
  const MatX mass = mass_matrix(model, q);
  const VecX h = bias_forces(model, q, qd, gravity);
  const auto ct = detail::closure_terms(model, q, qd, opt);
  MatX k = MatX::Zero(n + m, n + m);
  k.topLeftCorner(n, n) = mass;
  k.topRightCorner(n, m) = ct.jc.transpose();
  k.bottomLeftCorner(m, n) = ct.jc;
  VecX b(n + m);
  b.head(n) = -h;
  b.head(na) += tau_a;
  b.tail(m) = -ct.bias;
  const VecX x = detail::solve_refined(k, b, opt);
  return {x.head(n), -x.tail(m)};
}

}  // namespace armsizer::dynamics
