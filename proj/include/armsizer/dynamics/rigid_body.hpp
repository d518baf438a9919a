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

// Open-tree rigid-body dynamics: recursive Newton-Euler and the composite
// rigid-body mass matrix. Loop closures are ignored at this level.

#pragma once

#include <armsizer/kinematics/forward.hpp>

namespace armsizer::dynamics {

using kinematics::TreeState;
using model::RigidBodyModel;

inline const Vec3 kStandardGravity(0.0, 0.0, -9.81);

/// Generalized forces tau = M(q) qdd + h(q, qd) for the open tree.
inline VecX rnea(const RigidBodyModel& model, const VecX& q, const VecX& qd, const VecX& qdd,
                 const Vec3& gravity = kStandardGravity) {
  const TreeState s = kinematics::forward_pass(model, q, qd, qdd, -gravity);
  const std::size_t nl = model.links.size();
  std::vector<Vec3> force(nl, Vec3::Zero());
  std::vector<Vec3> moment(nl, Vec3::Zero());  // about the link origin
  for (std::size_t k = 1; k < nl; ++k) {
    const auto& in = model.links[k].inertia;
    const auto& l = s.links[k];
    const Mat3 r = l.pose.linear();
    const Vec3 com = l.pose * in.com;
    const Vec3 rho = com - l.pose.translation();
    const Mat3 inertia = r * in.inertia * r.transpose();
    const Vec3 f = in.mass * kinematics::point_acceleration(l, com);
    force[k] = f;
    moment[k] = inertia * l.alpha + l.omega.cross(inertia * l.omega) + rho.cross(f);
  }
  VecX tau = VecX::Zero(model.n());
  for (std::size_t jj = model.joints.size(); jj-- > 0;) {
    const auto c = static_cast<std::size_t>(model.index.joint_child[jj]);
    const auto p = static_cast<std::size_t>(model.index.joint_parent[jj]);
    const int coord = model.index.joint_coord[jj];
    if (coord >= 0) tau(coord) = s.joints[jj].axis.dot(moment[c]);
    const Vec3 r = s.links[c].pose.translation() - s.links[p].pose.translation();
    force[p] += force[c];
    moment[p] += moment[c] + r.cross(force[c]);
  }
  return tau;
}

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

/// Spatial inertia about the world origin, (angular, linear) ordering.
inline Mat6 spatial_inertia_at_origin(double mass, const Vec3& com, const Mat3& inertia_com) {
  const Mat3 c = skew(com);
  Mat6 out;
  out.topLeftCorner<3, 3>() = inertia_com + mass * c * c.transpose();
  out.topRightCorner<3, 3>() = mass * c;
  out.bottomLeftCorner<3, 3>() = mass * c.transpose();
  out.bottomRightCorner<3, 3>() = mass * Mat3::Identity();
  return out;
}

/// Composite rigid-body algorithm in world coordinates.
inline MatX mass_matrix(const RigidBodyModel& model, const VecX& q) {
  const TreeState s = kinematics::link_poses(model, q);
  const std::size_t nl = model.links.size();
  std::vector<Mat6> composite(nl, Mat6::Zero());
  for (std::size_t k = 1; k < nl; ++k) {
    const auto& in = model.links[k].inertia;
    const Mat3 r = s.links[k].pose.linear();
    composite[k] = spatial_inertia_at_origin(in.mass, s.links[k].pose * in.com, r * in.inertia * r.transpose());
  }
  for (std::size_t jj = model.joints.size(); jj-- > 0;) {
    composite[static_cast<std::size_t>(model.index.joint_parent[jj])] +=
        composite[static_cast<std::size_t>(model.index.joint_child[jj])];
  }
  auto motion = [&](std::size_t jj) {
    Vec6 sv;
    sv.head<3>() = s.joints[jj].axis;
    sv.tail<3>() = s.joints[jj].point.cross(s.joints[jj].axis);
    return sv;
  };
  MatX m = MatX::Zero(model.n(), model.n());
  for (std::size_t jj = 0; jj < model.joints.size(); ++jj) {
    const int cj = model.index.joint_coord[jj];
    if (cj < 0) continue;
    const Vec6 f = composite[static_cast<std::size_t>(model.index.joint_child[jj])] * motion(jj);
    // Walk from this joint toward the base; every ancestor coordinate couples.
    for (int link = model.index.joint_child[jj]; link != 0;) {
      const auto ji = static_cast<std::size_t>(model.index.link_joint[static_cast<std::size_t>(link)]);
      const int ci = model.index.joint_coord[ji];
      if (ci >= 0) {
        m(ci, cj) = motion(ji).dot(f);
        m(cj, ci) = m(ci, cj);
      }
      link = model.index.joint_parent[ji];
    }
  }
  return m;
}

/// Mass matrix assembled column by column from rnea(q, 0, e_i) with
/// gravity off. Second route for cross-checking mass_matrix().
inline MatX mass_matrix_rnea(const RigidBodyModel& model, const VecX& q) {
  MatX m(model.n(), model.n());
  const VecX zero = VecX::Zero(model.n());
  for (int i = 0; i < model.n(); ++i) {
    m.col(i) = rnea(model, q, zero, VecX::Unit(model.n(), i), Vec3::Zero());
  }
  return m;
}

/// Coriolis, centrifugal and gravity terms.
inline VecX bias_forces(const RigidBodyModel& model, const VecX& q, const VecX& qd,
                        const Vec3& gravity = kStandardGravity) {
  return rnea(model, q, qd, VecX::Zero(model.n()), gravity);
}

inline VecX gravity_torques(const RigidBodyModel& model, const VecX& q, const Vec3& gravity = kStandardGravity) {
  const VecX zero = VecX::Zero(model.n());
  return rnea(model, q, zero, zero, gravity);
}

struct DynamicsTerms {
  MatX mass;
  VecX bias;
  VecX gravity;
};

inline DynamicsTerms dynamics_terms(const RigidBodyModel& model, const VecX& q, const VecX& qd,
                                    const Vec3& gravity = kStandardGravity) {
  return {mass_matrix(model, q), bias_forces(model, q, qd, gravity), gravity_torques(model, q, gravity)};
}

/// Gravitational potential energy (zero at world z = 0 for -z gravity).
inline double potential_energy(const RigidBodyModel& model, const VecX& q, const Vec3& gravity = kStandardGravity) {
  const TreeState s = kinematics::link_poses(model, q);
  double v = 0.0;
  for (std::size_t k = 1; k < model.links.size(); ++k) {
    const auto& in = model.links[k].inertia;
    v -= in.mass * gravity.dot(s.links[k].pose * in.com);
  }
  return v;
}

inline double kinetic_energy(const RigidBodyModel& model, const VecX& q, const VecX& qd) {
  return 0.5 * qd.dot(mass_matrix(model, q) * qd);
}

}  // namespace armsizer::dynamics
