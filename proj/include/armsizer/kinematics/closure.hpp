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

#include <armsizer/kinematics/forward.hpp>

#include <Eigen/LU>
#include <Eigen/SVD>

#include <limits>
#include <optional>

namespace armsizer::kinematics {

inline constexpr double kClosureTolerance = 1e-10;

/// Closure residual phi, its Jacobian Jc = dphi/dq, and the velocity
/// product term Jc_dot * qd.
struct ClosureState {
  VecX phi;
  MatX jc;
  VecX jc_dot_qdot;
};

enum class BiasMethod { kFiniteDifference, kAnalytic };

struct ClosureSolveOptions {
  double tolerance = kClosureTolerance;
  int max_iterations = 50;
  int max_halvings = 20;
  /// Condition number of the passive closure Jacobian above which a
  /// configuration is reported singular (checked at every Newton iterate).
  double singular_condition = 1e12;
  /// Tighter bound applied once converged. Newton converges to a
  /// fold-flat root at ~sqrt(tolerance) distance, where cond only reaches
  /// about 1e5..1e6; regular CR4 poses sit below 1e2.
  double converged_singular_condition = 1e4;
};

namespace detail {

/// Inverse of the SO(3) right Jacobian at rotation vector theta.
inline Mat3 right_jacobian_inverse(const Vec3& theta) {
  const double t = theta.norm();
  const Mat3 k = skew(theta);
  double c;
  if (t < 1e-6) {
    c = 1.0 / 12.0 + t * t / 720.0;
  } else {
    c = 1.0 / (t * t) - (1.0 + std::cos(t)) / (2.0 * t * std::sin(t));
  }
  return Mat3::Identity() + 0.5 * k + c * k * k;
}

inline Vec3 log_so3(const Mat3& r) {
  const Eigen::AngleAxisd aa(r);
  return aa.angle() * aa.axis();
}

inline void require_closures(const RigidBodyModel& model) {
  if (model.closures.empty()) throw InvalidArgument("model '" + model.kind + "' defines no loop closures");
}

}  // namespace detail

inline VecX closure_residual(const RigidBodyModel& model, const TreeState& s) {
  detail::require_closures(model);
  VecX phi(model.m());
  int row = 0;
  for (const auto& c : model.closures) {
    const Transform ta = frame_pose(model, s, c.frame_a);
    const Transform tb = frame_pose(model, s, c.frame_b);
    const Vec3 trans = ta.linear().transpose() * (tb.translation() - ta.translation());
    const Vec3 rot = detail::log_so3(ta.linear().transpose() * tb.linear());
    for (model::Dof d : c.dofs) {
      phi(row++) = model::is_rotational(d) ? rot(model::dof_axis(d)) : trans(model::dof_axis(d));
    }
  }
  return phi;
}

/// Signed gap of every constrained dof, measured in frame_a.
inline VecX closure_residual(const RigidBodyModel& model, const VecX& q) {
  return closure_residual(model, link_poses(model, q));
}

inline MatX closure_jacobian_matrix(const RigidBodyModel& model, const TreeState& s) {
  detail::require_closures(model);
  MatX jc(model.m(), model.n());
  int row = 0;
  for (const auto& c : model.closures) {
    const Transform ta = frame_pose(model, s, c.frame_a);
    const Transform tb = frame_pose(model, s, c.frame_b);
    const Mat6X ja = frame_jacobian(model, s, c.frame_a);
    const Mat6X jb = frame_jacobian(model, s, c.frame_b);
    const Vec3 d = tb.translation() - ta.translation();
    const Mat3 rat = ta.linear().transpose();
    const MatX jt = rat * (jb.topRows<3>() - ja.topRows<3>() + skew(d) * ja.bottomRows<3>());
    const Vec3 theta = detail::log_so3(rat * tb.linear());
    const MatX jr = detail::right_jacobian_inverse(theta) * tb.linear().transpose() *
                    (jb.bottomRows<3>() - ja.bottomRows<3>());
    for (model::Dof dof : c.dofs) {
      const int k = model::dof_axis(dof);
      jc.row(row++) = model::is_rotational(dof) ? jr.row(k) : jt.row(k);
    }
  }
  return jc;
}

inline MatX closure_jacobian_matrix(const RigidBodyModel& model, const VecX& q) {
  return closure_jacobian_matrix(model, link_poses(model, q));
}

/// Jc_dot * qd by a central difference of Jc(q(t)) * qd along q(t) = q + t*qd.
inline VecX closure_bias_fd(const RigidBodyModel& model, const VecX& q, const VecX& qd, double h = 1e-6) {
  check_dimension(model, qd, "qd");
  if (qd.isZero(0.0)) return VecX::Zero(model.m());
  const VecX plus = closure_jacobian_matrix(model, VecX(q + h * qd)) * qd;
  const VecX minus = closure_jacobian_matrix(model, VecX(q - h * qd)) * qd;
  return (plus - minus) / (2.0 * h);
}

/// Jc_dot * qd in closed form for translational dofs; rotational dofs fall
/// back to the finite difference.
inline VecX closure_bias_analytic(const RigidBodyModel& model, const VecX& q, const VecX& qd) {
  detail::require_closures(model);
  const TreeState s = forward_pass(model, q, qd, VecX::Zero(model.n()));
  std::optional<VecX> fd;
  VecX out(model.m());
  int row = 0;
  for (const auto& c : model.closures) {
    const auto [la, pa_local] = resolve_frame_or_throw(model, c.frame_a);
    const auto [lb, pb_local] = resolve_frame_or_throw(model, c.frame_b);
    const LinkState& a = s.links[static_cast<std::size_t>(la)];
    const LinkState& b = s.links[static_cast<std::size_t>(lb)];
    const Transform ta = a.pose * pa_local;
    const Vec3 pa = ta.translation();
    const Vec3 pb = (b.pose * pb_local).translation();
    const Vec3 d = pb - pa;
    const Vec3 dd = point_velocity(b, pb) - point_velocity(a, pa);
    const Vec3 ddd = point_acceleration(b, pb) - point_acceleration(a, pa);
    const Vec3 w = a.omega;
    const Vec3 trans = ta.linear().transpose() *
                       (ddd - a.alpha.cross(d) - 2.0 * w.cross(dd) + w.cross(w.cross(d)));
    for (model::Dof dof : c.dofs) {
      if (model::is_rotational(dof)) {
        if (!fd) fd = closure_bias_fd(model, q, qd);
        out(row) = (*fd)(row);
      } else {
        out(row) = trans(model::dof_axis(dof));
      }
      ++row;
    }
  }
  return out;
}

inline ClosureState closure_state(const RigidBodyModel& model, const VecX& q, const VecX& qd,
                                  BiasMethod method = BiasMethod::kFiniteDifference) {
  const TreeState s = link_poses(model, q);
  ClosureState out;
  out.phi = closure_residual(model, s);
  out.jc = closure_jacobian_matrix(model, s);
  out.jc_dot_qdot = method == BiasMethod::kAnalytic ? closure_bias_analytic(model, q, qd)
                                                    : closure_bias_fd(model, q, qd);
  return out;
}

inline double condition_number(const MatX& a) {
  Eigen::JacobiSVD<MatX> svd(a);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 1.0;
  const double smallest = sv(sv.size() - 1);
  if (smallest <= 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smallest;
}

namespace detail {

inline VecX newton_closure(const RigidBodyModel& model, VecX q, const ClosureSolveOptions& opt) {
  const int n_p = model.n_p();
  VecX phi = closure_residual(model, q);
  for (int iter = 0; iter <= opt.max_iterations; ++iter) {
    const MatX jp = closure_jacobian_matrix(model, q).rightCols(n_p);
    const double cond = condition_number(jp);
    if (cond > opt.singular_condition) {
      throw SingularConfiguration("passive closure Jacobian is singular (condition " +
                                  std::to_string(cond) + ")");
    }
    if (phi.lpNorm<Eigen::Infinity>() <= opt.tolerance) {
      if (cond > opt.converged_singular_condition) {
        throw SingularConfiguration("closure solved at a singular pose (condition " +
                                    std::to_string(cond) + ")");
      }
      return q;
    }
    if (iter == opt.max_iterations) break;
    const VecX step = -jp.partialPivLu().solve(phi);
    const double current = phi.norm();
    double scale = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opt.max_halvings; ++h, scale *= 0.5) {
      VecX trial = q;
      trial.tail(n_p) += scale * step;
      VecX trial_phi = closure_residual(model, trial);
      if (trial_phi.norm() < current) {
        q = std::move(trial);
        phi = std::move(trial_phi);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw ConvergenceError("closure Newton line search stalled", phi.lpNorm<Eigen::Infinity>());
    }
  }
  const double r = phi.lpNorm<Eigen::Infinity>();
  throw ConvergenceError("closure Newton did not converge in " + std::to_string(opt.max_iterations) +
                             " iterations (residual " + std::to_string(r) + ")",
                         r);
}

}  // namespace detail

/// Completes an actuated configuration with passive coordinates that close
/// every loop. Damped Newton over the passive block with backtracking
/// halving, warm-started from `seed`. Without a seed the actuated
/// coordinates are walked from the (assembled) reference pose in steps of
/// at most kContinuationStep so the solution stays on the reference
/// assembly branch.
inline constexpr double kContinuationStep = 0.05;

inline VecX solve_closure(const RigidBodyModel& model, const VecX& q_a,
                          const std::optional<VecX>& seed = std::nullopt,
                          const ClosureSolveOptions& opt = {}) {
  const int n_a = model.n_a();
  const int n_p = model.n_p();
  if (q_a.size() != n_a) throw InvalidArgument("q_a must have one entry per actuated joint");
  VecX q(model.n());
  q.head(n_a) = q_a;
  if (model.closures.empty()) {
    if (n_p > 0) throw InvalidArgument("passive joints without closures");
    return q;
  }
  if (model.m() != n_p) throw InvalidArgument("closure is not square (m != n_p)");
  if (seed) {
    if (seed->size() != n_p) throw InvalidArgument("seed must have one entry per passive joint");
    q.tail(n_p) = *seed;
    return detail::newton_closure(model, q, opt);
  }
  const VecX ref = model.reference_q.head(n_a);
  const double span = (q_a - ref).lpNorm<Eigen::Infinity>();
  const int steps = std::max(1, static_cast<int>(std::ceil(span / kContinuationStep)));
  VecX passive = model.reference_q.tail(n_p);
  for (int k = 1; k <= steps; ++k) {
    q.head(n_a) = ref + (q_a - ref) * (static_cast<double>(k) / steps);
    q.tail(n_p) = passive;
    passive = detail::newton_closure(model, q, opt).tail(n_p);
  }
  q.head(n_a) = q_a;
  q.tail(n_p) = passive;
  return q;
}

struct JointRates {
  VecX qd;
  VecX qdd;
};

/// Fills in passive velocities and accelerations consistent with the
/// closure: Jc qd = 0 and Jc qdd + Jc_dot qd = 0.
inline JointRates resolve_passive_rates(const RigidBodyModel& model, const VecX& q, const VecX& qd_a,
                                        const VecX& qdd_a,
                                        BiasMethod method = BiasMethod::kFiniteDifference) {
  const int n_a = model.n_a();
  const int n_p = model.n_p();
  if (qd_a.size() != n_a || qdd_a.size() != n_a) {
    throw InvalidArgument("actuated rates must have one entry per actuated joint");
  }
  JointRates r{VecX::Zero(model.n()), VecX::Zero(model.n())};
  r.qd.head(n_a) = qd_a;
  r.qdd.head(n_a) = qdd_a;
  if (n_p == 0) return r;
  if (model.m() != n_p) throw InvalidArgument("closure is not square (m != n_p)");
  const MatX jc = closure_jacobian_matrix(model, q);
  const MatX jp = jc.rightCols(n_p);
  const Eigen::FullPivLU<MatX> lu(jp);
  if (!lu.isInvertible() || condition_number(jp) > 1e12) {
    throw SingularConfiguration("passive closure Jacobian is singular");
  }
  r.qd.tail(n_p) = lu.solve(VecX(-jc.leftCols(n_a) * qd_a));
  const VecX bias = method == BiasMethod::kAnalytic ? closure_bias_analytic(model, q, r.qd)
                                                    : closure_bias_fd(model, q, r.qd);
  r.qdd.tail(n_p) = lu.solve(VecX(-jc.leftCols(n_a) * qdd_a - bias));
  return r;
}

/// d(q)/d(q_a) on the constraint manifold: [I; -Jc_p^-1 Jc_a].
inline MatX actuated_tangent(const RigidBodyModel& model, const TreeState& s) {
  const int n_a = model.n_a();
  const int n_p = model.n_p();
  MatX e = MatX::Zero(model.n(), n_a);
  e.topRows(n_a).setIdentity();
  if (n_p == 0) return e;
  const MatX jc = closure_jacobian_matrix(model, s);
  const MatX jp = jc.rightCols(n_p);
  if (condition_number(jp) > 1e12) throw SingularConfiguration("passive closure Jacobian is singular");
  e.bottomRows(n_p) = -jp.partialPivLu().solve(jc.leftCols(n_a));
  return e;
}

}  // namespace armsizer::kinematics
