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

// Point-to-point planning. Every primitive becomes a continuous segment
// q_a(t); a program is sampled on one global dt grid and velocities and
// accelerations are taken as finite differences of the sampled positions.

#pragma once

#include <armsizer/kinematics/ik.hpp>
#include <armsizer/trajectory/profile.hpp>
#include <armsizer/trajectory/program.hpp>

#include <math.h>  // boost 1.74 pchip calls unqualified isnan

#include <boost/math/interpolators/pchip.hpp>
#include <cmath>

#include <functional>
#include <memory>

namespace armsizer::trajectory {

using model::RigidBodyModel;

struct TrajectorySamples {
  double dt = kDefaultDt;
  VecX t;
  MatX q_a;  // k x n_a
  MatX qd_a;
  MatX qdd_a;
  /// First sample index of each primitive, followed by the last sample index.
  std::vector<int> primitive_boundaries;

  int size() const { return static_cast<int>(t.size()); }
  int n_a() const { return static_cast<int>(q_a.cols()); }
  double duration() const { return t.size() > 0 ? t(t.size() - 1) : 0.0; }
};

/// Tool pose tolerance for the MoveL knots (m, rad).
inline constexpr double kMoveLIkTolerance = 1e-9;

/// Continuous actuated-joint motion over [0, duration].
struct Segment {
  MoveKind kind = MoveKind::kMoveJ;
  double duration = 0.0;
  VecX q_from;
  VecX q_to;
  std::function<VecX(double)> position;
};

namespace detail {

inline void check_joint_limits(const RigidBodyModel& model, const VecX& q_a, const std::string& what) {
  for (int k = 0; k < model.n_a(); ++k) {
    const auto& j = model.coordinate_joint(k);
    if (q_a(k) < j.lower - 1e-12 || q_a(k) > j.upper + 1e-12) {
      throw InvalidArgument(what + ": joint " + j.name + " at " + std::to_string(q_a(k)) +
                            " rad is outside [" + std::to_string(j.lower) + ", " + std::to_string(j.upper) + "]");
    }
  }
}

/// Largest acceleration time for which every joint fits in duration T, or
/// a negative value when T is too short.
inline double synchronized_accel_time(double T, const VecX& d, const VecX& vmax, const VecX& amax) {
  double ta = 0.5 * T;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d(i) > 0.0) ta = std::min(ta, T - d(i) / vmax(i));
  }
  if (!(ta > 0.0)) return -1.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d(i) / ((T - ta) * ta) > amax(i) * (1.0 + 1e-12)) return -1.0;
  }
  return ta;
}

inline double tool_heading(const Transform& pose) { return std::atan2(pose(1, 0), pose(0, 0)); }

inline double wrap_angle(double a) { return std::remainder(a, 2.0 * kPi); }

/// Actuated coordinate that spins the tool in place (zero linear Jacobian
/// column at the tool), or -1.
inline int heading_coordinate(const RigidBodyModel& model, const VecX& q, const std::string& frame) {
  const Mat6X jac = kinematics::frame_jacobian(model, q, frame);
  for (int k = model.n_a() - 1; k >= 0; --k) {
    if (jac.block<3, 1>(0, k).norm() < 1e-12 && std::abs(jac(5, k)) > 0.5) return k;
  }
  return -1;
}

/// Turns the in-place tool joint until the tool heading about world z
/// equals `heading`.
inline void hold_heading(const RigidBodyModel& model, VecX& q, double heading, const std::string& frame, int coord) {
  for (int it = 0; it < 20; ++it) {
    const double err = wrap_angle(heading - tool_heading(kinematics::forward_kinematics(model, q, frame)));
    if (std::abs(err) < 1e-13) return;
    VecX qh = q;
    const double h = 1e-7;
    qh(coord) += h;
    const double slope =
        wrap_angle(tool_heading(kinematics::forward_kinematics(model, qh, frame)) -
                   tool_heading(kinematics::forward_kinematics(model, q, frame))) / h;
    if (std::abs(slope) < 1e-3) return;
    q(coord) += err / slope;
  }
}

}  // namespace detail

/// Joint-space move. All joints share one duration and acceleration time;
/// each joint's limits are scaled down as needed so the profiles keep the
/// same trapezoid shape and finish together.
inline Segment plan_movej_segment(const RigidBodyModel& model, const VecX& q_from, const MotionPrimitive& p) {
  const int na = model.n_a();
  validate_primitive(p, na);
  if (p.kind != MoveKind::kMoveJ) throw InvalidArgument("plan_movej needs a MoveJ primitive");
  if (q_from.size() != na) throw InvalidArgument("q_from must have one entry per actuated joint");
  detail::check_joint_limits(model, q_from, "MoveJ start");
  detail::check_joint_limits(model, p.target.joint_target, "MoveJ target");

  Segment seg;
  seg.kind = MoveKind::kMoveJ;
  seg.q_from = q_from;
  seg.q_to = p.target.joint_target;
  const VecX delta = seg.q_to - q_from;
  const VecX d = delta.cwiseAbs();

  double T = 0.0;
  for (int i = 0; i < na; ++i) T = std::max(T, trapezoid_profile(d(i), p.vmax(i), p.amax(i)).duration);
  if (T == 0.0) {
    const VecX q0 = q_from;
    seg.position = [q0](double) { return q0; };
    return seg;
  }
  double ta = detail::synchronized_accel_time(T, d, p.vmax, p.amax);
  if (ta < 0.0) {
    double lo = T;
    double hi = T * 1.5;
    while (detail::synchronized_accel_time(hi, d, p.vmax, p.amax) < 0.0) hi *= 1.5;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (detail::synchronized_accel_time(mid, d, p.vmax, p.amax) < 0.0 ? lo : hi) = mid;
    }
    T = hi;
    ta = detail::synchronized_accel_time(T, d, p.vmax, p.amax);
  }
  auto profiles = std::make_shared<std::vector<TrapezoidProfile>>();
  for (int i = 0; i < na; ++i) profiles->push_back(timed_trapezoid(d(i), T, ta));
  seg.duration = T;
  const VecX q0 = q_from;
  const VecX sign = delta.cwiseSign();
  seg.position = [q0, sign, profiles](double t) {
    VecX q = q0;
    for (Eigen::Index i = 0; i < q.size(); ++i) q(i) += sign(i) * (*profiles)[static_cast<std::size_t>(i)].position(t);
    return q;
  };
  return seg;
}

/// Straight-line tool move. The path is cut into knots at most `sample_ds`
/// apart, each solved by iterated ik_step (warm-started from the previous
/// knot); joint positions are interpolated over arc length with a
/// monotone cubic and timed by a trapezoidal path-speed profile. For
/// position-only tasks the tool heading about world z is held.
inline Segment plan_movel_segment(const RigidBodyModel& model, const VecX& q_from, const MotionPrimitive& p,
                                  double sample_ds = kDefaultSampleDs) {
  const int na = model.n_a();
  validate_primitive(p, na);
  if (p.kind != MoveKind::kMoveL) throw InvalidArgument("plan_movel needs a MoveL primitive");
  if (q_from.size() != na) throw InvalidArgument("q_from must have one entry per actuated joint");
  if (!(sample_ds > 0.0)) throw InvalidArgument("sample_ds must be positive");
  detail::check_joint_limits(model, q_from, "MoveL start");
  const std::string frame = model.tool_frame;
  const kinematics::TaskMask mask = kinematics::default_task_mask(model);

  const VecX q_start = kinematics::solve_closure(model, q_from);
  const Transform start = kinematics::forward_kinematics(model, q_start, frame);
  Transform goal;
  if (p.target.kind == WaypointKind::kJoint) {
    goal = kinematics::forward_kinematics(model, kinematics::solve_closure(model, p.target.joint_target), frame);
  } else if (p.target.relative) {
    goal.linear() = p.target.pose_target.linear() * start.linear();
    goal.translation() = start.translation() + p.target.pose_target.translation();
  } else {
    goal = p.target.pose_target;
  }
  if (!mask.orientation) goal.linear() = start.linear();

  Segment seg;
  seg.kind = MoveKind::kMoveL;
  seg.q_from = q_from;
  const Vec3 p0 = start.translation();
  const Vec3 dp = goal.translation() - p0;
  const double length = dp.norm();
  const Eigen::Quaterniond r0(start.linear());
  const Eigen::Quaterniond r1(goal.linear());
  if (length < 1e-12) {
    if (mask.orientation && r0.angularDistance(r1) > 1e-12) {
      throw InvalidArgument("MoveL needs a translation; use MoveJ to reorient in place");
    }
    seg.q_to = q_from;
    const VecX q0 = q_from;
    seg.position = [q0](double) { return q0; };
    return seg;
  }

  const int knots = std::max(3, static_cast<int>(std::ceil(length / sample_ds - 1e-9)));
  const int heading_coord = mask.orientation ? -1 : detail::heading_coordinate(model, q_start, frame);
  const double heading = detail::tool_heading(start);
  std::vector<double> s(static_cast<std::size_t>(knots + 1));
  std::vector<std::vector<double>> joint(static_cast<std::size_t>(na), std::vector<double>(s.size()));
  VecX q = q_start;
  for (int i = 0; i <= knots; ++i) {
    const double u = static_cast<double>(i) / knots;
    s[static_cast<std::size_t>(i)] = u * length;
    if (i > 0) {
      Transform target = Transform::Identity();
      target.translation() = p0 + u * dp;
      target.linear() = r0.slerp(u, r1).toRotationMatrix();
      const auto ik = kinematics::solve_ik(model, q, target, frame, mask, kMoveLIkTolerance, 200);
      if (!ik.converged) {
        throw ConvergenceError("MoveL: IK failed at path sample " + std::to_string(i) + " of " +
                                   std::to_string(knots) + " (error " + std::to_string(ik.error) + " m)",
                               ik.error);
      }
      q = ik.q;
      if (heading_coord >= 0) detail::hold_heading(model, q, heading, frame, heading_coord);
      detail::check_joint_limits(model, q.head(na), "MoveL sample " + std::to_string(i));
    }
    for (int k = 0; k < na; ++k) joint[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = q(k);
  }
  seg.q_to = q.head(na);

  using Spline = boost::math::interpolators::pchip<std::vector<double>>;
  auto splines = std::make_shared<std::vector<Spline>>();
  for (int k = 0; k < na; ++k) {
    auto& y = joint[static_cast<std::size_t>(k)];
    std::vector<double> x = s;
    splines->emplace_back(std::move(x), std::move(y));
  }
  const auto profile = trapezoid_profile(length, p.vmax(0), p.amax(0));
  seg.duration = profile.duration;
  const VecX q_end = seg.q_to;
  seg.position = [splines, profile, q_end](double t) {
    if (t >= profile.duration) return q_end;
    const double sp = profile.position(t);
    VecX out(static_cast<Eigen::Index>(splines->size()));
    for (std::size_t k = 0; k < splines->size(); ++k) out(static_cast<Eigen::Index>(k)) = (*splines)[k](sp);
    return out;
  };
  return seg;
}

/// Samples consecutive segments on t_k = k dt. The grid is padded with a
/// hold at the final configuration up to the next multiple of dt.
/// Velocities are central differences (zero at both ends); accelerations
/// second differences, one-sided at the ends.
inline TrajectorySamples sample_segments(const std::vector<Segment>& segments, const VecX& start_q, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
  const int na = static_cast<int>(start_q.size());
  std::vector<double> starts;
  double total = 0.0;
  for (const auto& s : segments) {
    starts.push_back(total);
    total += s.duration;
  }
  const int last = static_cast<int>(std::ceil(total / dt - 1e-9));
  const int k = last + 1;
  TrajectorySamples out;
  out.dt = dt;
  out.t.resize(k);
  out.q_a.resize(k, na);
  out.qd_a = MatX::Zero(k, na);
  out.qdd_a = MatX::Zero(k, na);
  std::size_t seg = 0;
  const VecX q_final = segments.empty() ? start_q : segments.back().q_to;
  for (int i = 0; i < k; ++i) {
    const double t = i * dt;
    out.t(i) = t;
    while (seg < segments.size() && t >= starts[seg] + segments[seg].duration) ++seg;
    out.q_a.row(i) = (seg < segments.size() ? segments[seg].position(t - starts[seg]) : q_final).transpose();
  }
  for (std::size_t s = 0; s < segments.size(); ++s) {
    out.primitive_boundaries.push_back(std::min(last, static_cast<int>(std::ceil(starts[s] / dt - 1e-9))));
  }
  out.primitive_boundaries.push_back(last);
  if (k >= 3) {
    for (int i = 1; i + 1 < k; ++i) {
      out.qd_a.row(i) = (out.q_a.row(i + 1) - out.q_a.row(i - 1)) / (2.0 * dt);
      out.qdd_a.row(i) = (out.q_a.row(i + 1) - 2.0 * out.q_a.row(i) + out.q_a.row(i - 1)) / (dt * dt);
    }
    out.qdd_a.row(0) = 2.0 * (out.q_a.row(1) - out.q_a.row(0)) / (dt * dt);
    out.qdd_a.row(k - 1) = 2.0 * (out.q_a.row(k - 2) - out.q_a.row(k - 1)) / (dt * dt);
  }
  return out;
}

/// Throws with the worst offending sample when a sampled actuated speed
/// exceeds the model's joint velocity limit.
inline void check_velocity_limits(const RigidBodyModel& model, const TrajectorySamples& tr) {
  double worst = 0.0;
  int worst_row = -1;
  int worst_joint = -1;
  for (int i = 0; i < tr.size(); ++i) {
    for (int k = 0; k < tr.n_a(); ++k) {
      const double excess = std::abs(tr.qd_a(i, k)) - model.coordinate_joint(k).velocity_limit;
      if (excess > 1e-9 && excess > worst) {
        worst = excess;
        worst_row = i;
        worst_joint = k;
      }
    }
  }
  if (worst_row >= 0) {
    const auto& j = model.coordinate_joint(worst_joint);
    throw InvalidArgument("joint velocity limit exceeded: " + j.name + " reaches " +
                          std::to_string(std::abs(tr.qd_a(worst_row, worst_joint))) + " rad/s (limit " +
                          std::to_string(j.velocity_limit) + ") at t = " + std::to_string(tr.t(worst_row)) + " s");
  }
}

inline TrajectorySamples plan_movej(const RigidBodyModel& model, const VecX& q_from, const MotionPrimitive& p,
                                    double dt = kDefaultDt) {
  const Segment seg = plan_movej_segment(model, q_from, p);
  if (seg.duration == 0.0) return sample_segments({}, q_from, dt);
  return sample_segments({seg}, q_from, dt);
}

inline TrajectorySamples plan_movel(const RigidBodyModel& model, const VecX& q_from, const MotionPrimitive& p,
                                    double sample_ds = kDefaultSampleDs, double dt = kDefaultDt) {
  const Segment seg = plan_movel_segment(model, q_from, p, sample_ds);
  TrajectorySamples out = sample_segments(seg.duration == 0.0 ? std::vector<Segment>{} : std::vector<Segment>{seg},
                                          q_from, dt);
  check_velocity_limits(model, out);
  return out;
}

inline TrajectorySamples compile_program(const RigidBodyModel& model, const VecX& start_q,
                                         const std::vector<MotionPrimitive>& primitives, double dt = kDefaultDt,
                                         double sample_ds = kDefaultSampleDs) {
  Program p{start_q, primitives, dt, sample_ds};
  validate_program(p, model.n_a());
  detail::check_joint_limits(model, start_q, "start_q");
  std::vector<Segment> segments;
  VecX q = start_q;
  for (std::size_t i = 0; i < primitives.size(); ++i) {
    try {
      segments.push_back(primitives[i].kind == MoveKind::kMoveJ ? plan_movej_segment(model, q, primitives[i])
                                                                : plan_movel_segment(model, q, primitives[i], sample_ds));
    } catch (const Error& e) {
      throw InvalidArgument("primitive " + std::to_string(i) + " (" + to_string(primitives[i].kind) + "): " + e.what());
    }
    q = segments.back().q_to;
  }
  TrajectorySamples out = sample_segments(segments, start_q, dt);
  check_velocity_limits(model, out);
  return out;
}

inline TrajectorySamples compile_program(const RigidBodyModel& model, const Program& program) {
  return compile_program(model, program.start_q, program.primitives, program.dt, program.sample_ds);
}

}  // namespace armsizer::trajectory
