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

#include <armsizer/kinematics/closure.hpp>

#include <Eigen/Cholesky>

namespace armsizer::kinematics {

/// Which rows of the 6-dof pose error drive the IK step.
struct TaskMask {
  bool position = true;
  bool orientation = true;

  int rows() const { return (position ? 3 : 0) + (orientation ? 3 : 0); }
};

/// CR4 tracks tool position only (J4 yaw is commanded separately); serial
/// arms track the full pose.
inline TaskMask default_task_mask(const RigidBodyModel& model) {
  return model.kind == "cr4" ? TaskMask{true, false} : TaskMask{true, true};
}

inline constexpr double kDefaultDamping = 1e-3;
inline constexpr double kMaxIkStep = 0.2;

/// World-frame pose error (position, then rotation vector) from `current`
/// to `target`, restricted to the mask rows.
inline VecX pose_error(const Transform& current, const Transform& target, const TaskMask& mask) {
  VecX e(mask.rows());
  int row = 0;
  if (mask.position) {
    e.segment<3>(row) = target.translation() - current.translation();
    row += 3;
  }
  if (mask.orientation) {
    e.segment<3>(row) = detail::log_so3(target.linear() * current.linear().transpose());
  }
  return e;
}

/// One damped least-squares step on the actuated coordinates toward
/// `target`, followed by re-closing the loops (warm-started from q). The
/// step is clamped to kMaxIkStep in norm.
inline VecX ik_step(const RigidBodyModel& model, const VecX& q, const Transform& target,
                    const std::string& frame, double damping, const TaskMask& mask) {
  check_dimension(model, q, "q");
  const TreeState s = link_poses(model, q);
  const Transform current = frame_pose(model, s, frame);
  const VecX err = pose_error(current, target, mask);
  if (err.isZero(0.0)) return q;

  const Mat6X full = frame_jacobian(model, s, frame);
  MatX task(mask.rows(), model.n());
  int row = 0;
  if (mask.position) {
    task.middleRows(row, 3) = full.topRows<3>();
    row += 3;
  }
  if (mask.orientation) task.middleRows(row, 3) = full.bottomRows<3>();
  const MatX jac = task * actuated_tangent(model, s);

  const MatX gram = jac * jac.transpose() + damping * damping * MatX::Identity(jac.rows(), jac.rows());
  VecX step = jac.transpose() * gram.ldlt().solve(err);
  const double norm = step.norm();
  if (!std::isfinite(norm)) return q;
  if (norm > kMaxIkStep) step *= kMaxIkStep / norm;

  const VecX q_a = q.head(model.n_a()) + step;
  if (model.n_p() == 0) return q_a;
  return solve_closure(model, q_a, VecX(q.tail(model.n_p())));
}

inline VecX ik_step(const RigidBodyModel& model, const VecX& q, const Transform& target,
                    const std::string& frame, double damping = kDefaultDamping) {
  return ik_step(model, q, target, frame, damping, default_task_mask(model));
}

struct IkResult {
  VecX q;
  double error = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Iterates ik_step until the masked pose error norm drops below
/// `tolerance`, the error stops improving, or `max_iterations` is hit.
inline IkResult solve_ik(const RigidBodyModel& model, const VecX& q0, const Transform& target,
                         const std::string& frame, const TaskMask& mask, double tolerance = 1e-9,
                         int max_iterations = 100, double damping = kDefaultDamping) {
  IkResult r{q0, 0.0, 0, false};
  r.error = pose_error(forward_kinematics(model, q0, frame), target, mask).norm();
  while (r.iterations < max_iterations) {
    if (r.error <= tolerance) {
      r.converged = true;
      return r;
    }
    r.q = ik_step(model, r.q, target, frame, damping, mask);
    ++r.iterations;
    r.error = pose_error(forward_kinematics(model, r.q, frame), target, mask).norm();
  }
  r.converged = r.error <= tolerance;
  return r;
}

}  // namespace armsizer::kinematics
