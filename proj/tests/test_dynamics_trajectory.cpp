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

#include "support.hpp"

#include <armsizer/dynamics/export.hpp>
#include <armsizer/dynamics/rollout.hpp>
#include <armsizer/trajectory/export.hpp>

#include <gtest/gtest.h>

using namespace armsizer;
using namespace armsizer::testing;
using trajectory::fixtures::kJointAccel;
using trajectory::fixtures::kJointSpeed;

namespace {

// Point-ish bob on a y-axis hinge: COM at (r, 0, 0), inertia about COM.
model::RigidBodyModel pendulum(double mass, double r, double i_com) {
  model::RigidBodyModel m;
  m.links = {model::Link{"base", {}},
             model::Link{"bob", {mass, Vec3(r, 0, 0), Vec3(i_com, i_com, i_com).asDiagonal()}}};
  model::JointSpec j;
  j.name = "hinge";
  j.axis = Vec3::UnitY();
  j.parent_link = "base";
  j.child_link = "bob";
  m.joints = {j};
  m.frames = {model::FrameSpec{"tip", "bob", Transform::Identity()}};
  m.tool_frame = "tip";
  m.finalize();
  m.reference_q = VecX::Zero(1);
  return m;
}

const trajectory::TrajectorySamples& benchmark_trajectory() {
  static const auto tr = trajectory::compile_program(benchmark_model(), trajectory::fixtures::palletizing_program());
  return tr;
}

VecX row(const MatX& m, int i) { return m.row(i).transpose(); }

}  // namespace

// ---------------------------------------------------------------- profiles

TEST(Trapezoid, CruisingProfile) {
  const auto p = trajectory::trapezoid_profile(1.0, 1.0, 2.0);
  EXPECT_FALSE(p.triangular());
  EXPECT_DOUBLE_EQ(p.t_accel, 0.5);
  EXPECT_DOUBLE_EQ(p.t_cruise, 0.5);
  EXPECT_DOUBLE_EQ(p.duration, 1.5);
  EXPECT_DOUBLE_EQ(p.position(p.duration), 1.0);
  EXPECT_DOUBLE_EQ(p.velocity(0.75), 1.0);
  EXPECT_DOUBLE_EQ(p.acceleration_at(0.25), 2.0);
  EXPECT_DOUBLE_EQ(p.acceleration_at(1.25), -2.0);
}

TEST(Trapezoid, TriangularProfile) {
  const auto p = trajectory::trapezoid_profile(0.25, 1.0, 1.0);
  EXPECT_TRUE(p.triangular());
  EXPECT_DOUBLE_EQ(p.t_accel, 0.5);
  EXPECT_DOUBLE_EQ(p.peak_velocity, 0.5);
  EXPECT_DOUBLE_EQ(p.duration, 1.0);
  EXPECT_NEAR(p.position(0.5), 0.125, 1e-15);
}

TEST(Trapezoid, ZeroDistanceAndInvalidLimits) {
  const auto p = trajectory::trapezoid_profile(0.0, 1.0, 1.0);
  EXPECT_EQ(p.duration, 0.0);
  EXPECT_EQ(p.position(1.0), 0.0);
  EXPECT_THROW(trajectory::trapezoid_profile(-1.0, 1.0, 1.0), InvalidArgument);
  EXPECT_THROW(trajectory::trapezoid_profile(1.0, 0.0, 1.0), InvalidArgument);
  EXPECT_THROW(trajectory::trapezoid_profile(1.0, 1.0, -1.0), InvalidArgument);
}

TEST(Trapezoid, TimedProfileHitsDistanceAndDuration) {
  const auto p = trajectory::timed_trapezoid(1.0, 2.0, 0.5);
  EXPECT_DOUBLE_EQ(p.duration, 2.0);
  EXPECT_NEAR(p.peak_velocity, 1.0 / 1.5, 1e-15);
  EXPECT_NEAR(p.position(2.0), 1.0, 1e-15);
  EXPECT_THROW(trajectory::timed_trapezoid(1.0, 2.0, 1.5), InvalidArgument);
  EXPECT_THROW(trajectory::timed_trapezoid(1.0, 0.0, 0.5), InvalidArgument);
}

TEST(Trapezoid, PositionIsIntegralOfVelocity) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  for (int k = 0; k < 20; ++k) {
    const auto p = trajectory::trapezoid_profile(u(rng), u(rng), u(rng));
    const int n = 20000;
    const double h = p.duration / n;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += h * p.velocity((i + 0.5) * h);
    EXPECT_NEAR(s, p.distance, 1e-6 * std::max(1.0, p.distance));
    EXPECT_LE(p.peak_velocity, p.distance > 0 ? p.peak_velocity : 0.0);
    // continuity at the phase boundaries
    for (double tb : {p.t_accel, p.t_accel + p.t_cruise}) {
      EXPECT_NEAR(p.position(tb - 1e-9), p.position(tb + 1e-9), 1e-8);
    }
  }
}

// ---------------------------------------------------------------- planner

TEST(MoveJ, JointsStartAndStopTogether) {
  const auto m = benchmark_model();
  const VecX from = trajectory::fixtures::cr4_home();
  const VecX to = trajectory::fixtures::cr4_above_place();
  const auto p = trajectory::move_j(to, VecX::Constant(4, kJointSpeed), VecX::Constant(4, kJointAccel));
  const auto tr = trajectory::plan_movej(m, from, p);
  const VecX delta = to - from;
  // Normalized progress is identical for every moving joint.
  for (int i = 0; i < tr.size(); ++i) {
    std::optional<double> s;
    for (int k = 0; k < 4; ++k) {
      if (std::abs(delta(k)) < 1e-12) {
        EXPECT_EQ(tr.q_a(i, k), from(k));
        continue;
      }
      const double sk = (tr.q_a(i, k) - from(k)) / delta(k);
      if (s) EXPECT_NEAR(sk, *s, 1e-12);
      s = sk;
    }
  }
  EXPECT_LE((row(tr.q_a, tr.size() - 1) - to).lpNorm<Eigen::Infinity>(), 1e-12);
  EXPECT_TRUE(row(tr.qd_a, 0).isZero(0.0));
  EXPECT_TRUE(row(tr.qd_a, tr.size() - 1).isZero(0.0));
  EXPECT_LE(tr.qd_a.cwiseAbs().maxCoeff(), kJointSpeed + 1e-9);
  EXPECT_LE(tr.qdd_a.cwiseAbs().maxCoeff(), kJointAccel + 1e-9);
}

TEST(MoveJ, ZeroMotionYieldsSingleSample) {
  const auto m = benchmark_model();
  const VecX q = trajectory::fixtures::cr4_home();
  const auto tr = trajectory::plan_movej(m, q, trajectory::move_j(q, VecX::Ones(4), VecX::Ones(4)));
  ASSERT_GE(tr.size(), 1);
  EXPECT_TRUE(tr.qd_a.isZero(0.0));
  EXPECT_EQ(row(tr.q_a, 0), q);
}

TEST(MoveJ, RejectsTargetsOutsideLimits) {
  const auto m = benchmark_model();
  VecX to = trajectory::fixtures::cr4_home();
  to(1) = 2.0;
  EXPECT_THROW(trajectory::plan_movej(m, trajectory::fixtures::cr4_home(),
                                      trajectory::move_j(to, VecX::Ones(4), VecX::Ones(4))),
               InvalidArgument);
}

TEST(MoveL, ToolStaysOnStraightLine) {
  const auto m = benchmark_model();
  const VecX from = trajectory::fixtures::cr4_above_pick();
  const auto p = trajectory::move_l(trajectory::Waypoint::offset(Vec3(0, 0, -0.3)), 0.5, 2.0);
  const auto tr = trajectory::plan_movel(m, from, p);
  const Vec3 a = kinematics::forward_kinematics(m, kinematics::solve_closure(m, from), "tool").translation();
  const Vec3 b = a + Vec3(0, 0, -0.3);
  double worst = 0.0;
  std::optional<VecX> seed;
  for (int i = 0; i < tr.size(); ++i) {
    const VecX q = kinematics::solve_closure(m, row(tr.q_a, i), seed);
    seed = q.tail(2);
    const Vec3 x = kinematics::forward_kinematics(m, q, "tool").translation();
    const double u = std::clamp((x - a).dot(b - a) / (b - a).squaredNorm(), 0.0, 1.0);
    worst = std::max(worst, (x - (a + u * (b - a))).norm());
  }
  EXPECT_LE(worst, 1e-4);
  const VecX q_end = kinematics::solve_closure(m, row(tr.q_a, tr.size() - 1));
  EXPECT_LE((kinematics::forward_kinematics(m, q_end, "tool").translation() - b).norm(), 1e-6);
}

TEST(MoveL, ZeroOffsetIsEmptySegment) {
  const auto m = benchmark_model();
  const VecX from = trajectory::fixtures::cr4_above_pick();
  const auto tr = trajectory::plan_movel(m, from, trajectory::move_l(trajectory::Waypoint::offset(Vec3::Zero()), 0.5, 2.0));
  ASSERT_GE(tr.size(), 1);
  EXPECT_TRUE(tr.qd_a.isZero(0.0));
  EXPECT_EQ(tr.duration(), 0.0);
}

TEST(Program, ValidationErrors) {
  const auto m = benchmark_model();
  auto p = trajectory::fixtures::palletizing_program();
  p.primitives.clear();
  EXPECT_THROW(trajectory::compile_program(m, p), InvalidArgument);
  p = trajectory::fixtures::palletizing_program();
  p.primitives[0].vmax(2) = 0.0;
  EXPECT_THROW(trajectory::compile_program(m, p), InvalidArgument);
  p = trajectory::fixtures::palletizing_program();
  p.start_q = VecX::Zero(3);
  EXPECT_THROW(trajectory::compile_program(m, p), InvalidArgument);
}

TEST(Program, JsonRoundTrip) {
  const auto p = trajectory::fixtures::palletizing_program();
  const auto doc = trajectory::program_to_json(p);
  EXPECT_EQ(trajectory::program_to_json(trajectory::program_from_json(nlohmann::json::parse(doc.dump()))), doc);
  const auto bundled = nlohmann::json::parse(service::read_text_file(data_dir() / "palletizing_program.json"));
  EXPECT_EQ(trajectory::program_to_json(trajectory::program_from_json(bundled)), doc);
}

TEST(PalletizingCycle, ClosesAndRespectsLimits) {
  const auto m = benchmark_model();
  const auto& tr = benchmark_trajectory();
  EXPECT_LE((row(tr.q_a, tr.size() - 1) - trajectory::fixtures::cr4_home()).lpNorm<Eigen::Infinity>(), 1e-9);
  EXPECT_NEAR(tr.duration(), (tr.size() - 1) * tr.dt, 1e-12);
  EXPECT_EQ(tr.primitive_boundaries.size(), 8u);
  EXPECT_TRUE(std::is_sorted(tr.primitive_boundaries.begin(), tr.primitive_boundaries.end()));
  for (int k = 0; k < 4; ++k) {
    EXPECT_LE(tr.qd_a.col(k).cwiseAbs().maxCoeff(), m.coordinate_joint(k).velocity_limit + 1e-9);
  }
  EXPECT_NO_THROW(trajectory::check_velocity_limits(m, tr));
}

TEST(PalletizingCycle, PeakJointSpeedIsTheCommandedLimit) {
  const auto& tr = benchmark_trajectory();
  EXPECT_NEAR(tr.qd_a.col(0).cwiseAbs().maxCoeff(), kJointSpeed, 1e-9);
  EXPECT_EQ(tr.qd_a.col(3).cwiseAbs().maxCoeff(), 0.0);
}

TEST(PalletizingCycle, PositionsIntegrateVelocities) {
  const auto& tr = benchmark_trajectory();
  // trapezoid rule over the whole cycle
  for (int k = 0; k < 4; ++k) {
    double q = tr.q_a(0, k);
    double worst = 0.0;
    for (int i = 1; i < tr.size(); ++i) {
      q += 0.5 * (tr.t(i) - tr.t(i - 1)) * (tr.qd_a(i, k) + tr.qd_a(i - 1, k));
      worst = std::max(worst, std::abs(q - tr.q_a(i, k)));
    }
    EXPECT_LE(worst, 5e-3) << k;
  }
}

TEST(PalletizingCycle, VelocityLimitViolationIsReported) {
  auto m = benchmark_model();
  m.joints[static_cast<std::size_t>(*m.find_joint("J1"))].velocity_limit = 0.5;
  EXPECT_THROW(trajectory::compile_program(m, trajectory::fixtures::palletizing_program()), InvalidArgument);
}

TEST(TrajectoryCsv, RoundTripIsExact) {
  const auto m = benchmark_model();
  const auto& tr = benchmark_trajectory();
  const std::string text = trajectory::trajectory_to_csv(tr);
  const auto sidecar = trajectory::trajectory_sidecar(m, tr, trajectory::fixtures::palletizing_program());
  const auto back = trajectory::trajectory_from_csv(text, &sidecar);
  EXPECT_EQ(back.t, tr.t);
  EXPECT_EQ(back.q_a, tr.q_a);
  EXPECT_EQ(back.qd_a, tr.qd_a);
  EXPECT_EQ(back.qdd_a, tr.qdd_a);
  EXPECT_EQ(back.dt, tr.dt);
  EXPECT_EQ(back.primitive_boundaries, tr.primitive_boundaries);
  EXPECT_EQ(trajectory::trajectory_to_csv(back), text);
  EXPECT_THROW(trajectory::trajectory_from_csv("t,a\n0,1\n"), InvalidArgument);
}

// ---------------------------------------------------------------- rigid body

TEST(RigidBody, PendulumMatchesClosedForm) {
  const double mass = 2.0, r = 0.7, ic = 0.03, g = 9.81;
  const auto m = pendulum(mass, r, ic);
  for (double q : {-1.0, 0.0, 0.4, 2.5}) {
    const VecX qv = (VecX(1) << q).finished();
    const double qdd = 1.3;
    const double inertia = mass * r * r + ic;
    // COM height is -r sin q
    const double expected = inertia * qdd - mass * g * r * std::cos(q);
    EXPECT_NEAR(dynamics::rnea(m, qv, VecX::Constant(1, 0.8), VecX::Constant(1, qdd))(0), expected, 1e-12);
    EXPECT_NEAR(dynamics::mass_matrix(m, qv)(0, 0), inertia, 1e-14);
    EXPECT_NEAR(dynamics::potential_energy(m, qv), -mass * g * r * std::sin(q), 1e-12);
    EXPECT_NEAR(dynamics::kinetic_energy(m, qv, VecX::Constant(1, 0.8)), 0.5 * inertia * 0.64, 1e-14);
  }
}

TEST(RigidBody, RneaIsAffineInAcceleration) {
  for (const auto& m : {benchmark_model(), model::build_cr6(1.3, model::ScalingLaw::geometric())}) {
    std::mt19937 rng(4);
    for (int k = 0; k < 10; ++k) {
      const VecX q = random_vector(rng, m.n(), 1.0);
      const VecX qd = random_vector(rng, m.n(), 1.0);
      const VecX qdd = random_vector(rng, m.n(), 2.0);
      const VecX lhs = dynamics::rnea(m, q, qd, qdd) - dynamics::mass_matrix(m, q) * qdd;
      const VecX rhs = dynamics::rnea(m, q, qd, VecX::Zero(m.n()));
      EXPECT_LE((lhs - rhs).lpNorm<Eigen::Infinity>(), 1e-10 * (1.0 + rhs.lpNorm<Eigen::Infinity>()));
    }
  }
}

TEST(RigidBody, MassMatrixSymmetricPositiveDefiniteAndConsistent) {
  for (const auto& m : {benchmark_model(), model::build_cr6(1.0, model::ScalingLaw::geometric())}) {
    std::mt19937 rng(6);
    for (int k = 0; k < 10; ++k) {
      const VecX q = random_vector(rng, m.n(), 2.0);
      const MatX mm = dynamics::mass_matrix(m, q);
      EXPECT_LE((mm - mm.transpose()).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_GT(Eigen::SelfAdjointEigenSolver<MatX>(mm).eigenvalues().minCoeff(), 0.0);
      EXPECT_LE((mm - dynamics::mass_matrix_rnea(m, q)).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(RigidBody, KineticEnergyIsQuadraticForm) {
  const auto m = benchmark_model();
  std::mt19937 rng(8);
  const VecX q = random_vector(rng, m.n(), 1.0);
  const VecX qd = random_vector(rng, m.n(), 1.0);
  EXPECT_NEAR(dynamics::kinetic_energy(m, q, qd), 0.5 * qd.dot(dynamics::mass_matrix(m, q) * qd), 1e-10);
}

TEST(RigidBody, GravityTorquesAreThePotentialGradient) {
  const auto m = model::build_cr6(1.0, model::ScalingLaw::geometric());
  std::mt19937 rng(10);
  const VecX q = random_vector(rng, m.n(), 1.5);
  const VecX g = dynamics::gravity_torques(m, q);
  for (int i = 0; i < m.n(); ++i) {
    VecX p = q, n = q;
    p(i) += 1e-6;
    n(i) -= 1e-6;
    EXPECT_NEAR(g(i), (dynamics::potential_energy(m, p) - dynamics::potential_energy(m, n)) / 2e-6, 1e-6);
  }
}

// ---------------------------------------------------------------- constrained

TEST(Constrained, SerialArmReducesToRnea) {
  const auto m = model::build_cr6(1.0, model::ScalingLaw::geometric());
  std::mt19937 rng(12);
  for (int k = 0; k < 5; ++k) {
    const VecX q = random_vector(rng, 6, 1.5);
    const VecX qd = random_vector(rng, 6, 1.0);
    const VecX qdd = random_vector(rng, 6, 2.0);
    const auto r = dynamics::constrained_inverse_dynamics(m, q, qd, qdd);
    EXPECT_EQ(r.lambda.size(), 0);
    EXPECT_LE((r.tau_a - dynamics::rnea(m, q, qd, qdd)).lpNorm<Eigen::Infinity>(), 1e-9);
  }
}

TEST(Constrained, StagedAndKktFormulationsAgree) {
  const auto m = benchmark_model();
  std::mt19937 rng(14);
  for (int k = 0; k < 20; ++k) {
    const VecX q = kinematics::solve_closure(m, random_cr4_qa(rng));
    const VecX qd = random_vector(rng, 4, 1.0);
    const VecX qdd = random_vector(rng, 4, 3.0);
    const dynamics::KktOptions opt{kinematics::BiasMethod::kAnalytic};
    const auto a = dynamics::constrained_inverse_dynamics(m, q, qd, qdd, dynamics::kStandardGravity, opt);
    const auto b = dynamics::constrained_inverse_dynamics_staged(m, q, qd, qdd, dynamics::kStandardGravity, opt);
    EXPECT_LE((a.tau_a - b.tau_a).lpNorm<Eigen::Infinity>(), 1e-9);
    EXPECT_LE((a.lambda - b.lambda).lpNorm<Eigen::Infinity>(), 1e-8);
    EXPECT_LE(a.kkt_residual / (1.0 + a.bias_norm), 1e-10);
  }
}

TEST(Constrained, StaticLoadsReverseWithGravity) {
  const auto m = benchmark_model();
  const VecX q = kinematics::solve_closure(m, (VecX(4) << 0.3, 0.5, 0.1, 0.2).finished());
  const VecX z = VecX::Zero(4);
  const auto up = dynamics::constrained_inverse_dynamics(m, q, z, z, dynamics::kStandardGravity);
  const auto down = dynamics::constrained_inverse_dynamics(m, q, z, z, -dynamics::kStandardGravity);
  EXPECT_LE((up.tau_a + down.tau_a).lpNorm<Eigen::Infinity>(), 1e-9);
  EXPECT_LE((up.lambda + down.lambda).lpNorm<Eigen::Infinity>(), 1e-9);
  EXPECT_GT(up.lambda.norm(), 0.0);
  const auto none = dynamics::constrained_inverse_dynamics(m, q, z, z, Vec3::Zero());
  EXPECT_LE(none.tau_a.lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(Constrained, StaticTorquesAreReducedPotentialGradient) {
  const auto m = benchmark_model();
  std::mt19937 rng(16);
  for (int k = 0; k < 5; ++k) {
    const VecX q_a = random_cr4_qa(rng);
    const VecX tau = dynamics::constrained_inverse_dynamics(m, kinematics::solve_closure(m, q_a), VecX::Zero(4),
                                                            VecX::Zero(4)).tau_a;
    EXPECT_LE((tau - potential_gradient_fd(m, q_a, dynamics::kStandardGravity, 1e-4)).lpNorm<Eigen::Infinity>(), 1e-4);
  }
}

TEST(Constrained, ForwardInvertsInverse) {
  const auto m = benchmark_model();
  std::mt19937 rng(18);
  for (int k = 0; k < 10; ++k) {
    const VecX q = kinematics::solve_closure(m, random_cr4_qa(rng));
    const VecX qdd_a = random_vector(rng, 4, 3.0);
    const auto id = dynamics::constrained_inverse_dynamics(m, q, random_vector(rng, 4, 1.0), qdd_a);
    const auto fd = dynamics::constrained_forward_dynamics(m, q, id.qd, id.tau_a);
    EXPECT_LE((fd.qdd.head(4) - qdd_a).lpNorm<Eigen::Infinity>(), 1e-8);
    EXPECT_LE((fd.lambda - id.lambda).lpNorm<Eigen::Infinity>(), 1e-6);
  }
}

TEST(Constrained, ForwardAtRestWithoutLoadsIsStill) {
  const auto m = benchmark_model();
  const VecX q = kinematics::solve_closure(m, (VecX(4) << 0.1, 0.2, 0.3, 0.4).finished());
  const auto fd = dynamics::constrained_forward_dynamics(m, q, VecX::Zero(6), VecX::Zero(4), Vec3::Zero());
  EXPECT_LE(fd.qdd.lpNorm<Eigen::Infinity>(), 1e-12);
  EXPECT_LE(fd.lambda.lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(Constrained, RejectsOpenLoopConfiguration) {
  const auto m = benchmark_model();
  VecX q = kinematics::solve_closure(m, VecX::Zero(4));
  q(4) += 0.1;
  EXPECT_THROW(dynamics::constrained_inverse_dynamics(m, q, VecX::Zero(4), VecX::Zero(4)), InvalidArgument);
}

// ---------------------------------------------------------------- rollout

TEST(Rollout, ClosureDriftAndEnergyBalance) {
  const auto m = benchmark_model();
  const VecX q0 = kinematics::solve_closure(m, (VecX(4) << 0.2, 0.3, 0.1, 0.0).finished());
  const VecX hold = dynamics::constrained_inverse_dynamics(m, q0, VecX::Zero(4), VecX::Zero(4)).tau_a;
  const dynamics::TorqueLaw law = [&](double t, const VecX&, const VecX&) {
    VecX tau = 0.9 * hold;
    tau(0) += 5.0 * std::sin(6.0 * t);
    return tau;
  };
  dynamics::RolloutOptions opt;
  opt.dt = 1e-3;
  opt.duration = 0.3;
  const auto free = dynamics::rollout(m, q0, VecX::Zero(6), law, opt);
  EXPECT_LE(free.max_closure_residual, 1e-6);
  double worst = 0.0;
  for (std::size_t k = 0; k < free.t.size(); ++k) {
    worst = std::max(worst, std::abs(free.energy(k) - free.energy(0) - free.work[k]));
  }
  EXPECT_LE(worst, 1e-6);

  opt.project = true;
  const auto proj = dynamics::rollout(m, q0, VecX::Zero(6), law, opt);
  EXPECT_LE(proj.max_closure_residual, 1e-10);
  EXPECT_LE((proj.q.back() - free.q.back()).lpNorm<Eigen::Infinity>(), 1e-6);
}

TEST(Rollout, ConsistentVelocityLiesInTangentSpace) {
  const auto m = benchmark_model();
  std::mt19937 rng(20);
  const VecX q = kinematics::solve_closure(m, random_cr4_qa(rng));
  const VecX qd = dynamics::detail::consistent_velocity(m, q, random_vector(rng, 6, 1.0));
  EXPECT_LE((kinematics::closure_jacobian_matrix(m, q) * qd).lpNorm<Eigen::Infinity>(), 1e-12);
}

// ---------------------------------------------------------------- DEMO surrogate

TEST(SerialSurrogate, PreservesTotalMass) {
  const auto m = benchmark_model();
  const auto s = dynamics::lump_serial_model(m);
  EXPECT_EQ(s.kind, dynamics::kSerialKind);
  EXPECT_TRUE(s.closures.empty());
  EXPECT_NEAR(s.total_mass(), m.total_mass(), 1e-12);
  EXPECT_THROW(dynamics::lump_serial_model(model::build_cr6(1.0, model::ScalingLaw::geometric())), InvalidArgument);
}

TEST(SerialSurrogate, StaticTorquesMatchClosedChain) {
  const auto m = benchmark_model();
  const auto s = dynamics::lump_serial_model(m);
  std::mt19937 rng(22);
  for (int k = 0; k < 10; ++k) {
    const VecX q_a = random_cr4_qa(rng);
    const VecX z = VecX::Zero(4);
    const VecX pro = dynamics::constrained_inverse_dynamics(m, kinematics::solve_closure(m, q_a), z, z).tau_a;
    const VecX demo = dynamics::demo_inverse_dynamics(s, q_a, z, z);
    EXPECT_LE((pro - demo).lpNorm<Eigen::Infinity>(), 1e-6 * (1.0 + pro.lpNorm<Eigen::Infinity>()));
  }
}

TEST(SerialSurrogate, ZeroStateWithoutGravityIsZero) {
  const auto s = dynamics::lump_serial_model(benchmark_model());
  const VecX z = VecX::Zero(4);
  EXPECT_TRUE(dynamics::demo_inverse_dynamics(s, z, z, z, Vec3::Zero()).isZero(0.0));
}

TEST(SerialSurrogate, CoordinateMapsAreAdjoint) {
  std::mt19937 rng(24);
  const VecX dq = random_vector(rng, 4, 1.0);
  const VecX tau = random_vector(rng, 4, 1.0);
  // virtual work is invariant
  EXPECT_NEAR(dynamics::to_serial_coordinates(dq).dot(tau), dq.dot(dynamics::from_serial_torques(tau)), 1e-14);
}

// ---------------------------------------------------------------- profiles

TEST(TorqueProfiles, WorkerCountDoesNotChangeResults) {
  const auto m = benchmark_model();
  const auto& tr = benchmark_trajectory();
  dynamics::ProfileOptions one, four;
  four.workers = 4;
  dynamics::ProfileDiagnostics diag;
  const auto a = dynamics::pro_profile(m, tr, one, &diag);
  const auto b = dynamics::pro_profile(m, tr, four);
  EXPECT_EQ(a.tau, b.tau);
  EXPECT_LE(diag.max_closure_residual, 1e-9);
  EXPECT_LE(diag.max_relative_kkt_residual, 1e-9);
}

TEST(TorqueProfiles, CsvRoundTripIsExact) {
  const auto m = benchmark_model();
  const auto& tr = benchmark_trajectory();
  const auto demo = dynamics::demo_profile(dynamics::lump_serial_model(m), tr);
  const std::string text = dynamics::torque_to_csv(demo);
  const auto back = dynamics::torque_from_csv(text, dynamics::TorquePath::kDemo);
  EXPECT_EQ(back.t, demo.t);
  EXPECT_EQ(back.tau, demo.tau);
  EXPECT_EQ(dynamics::torque_to_csv(back), text);
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,tau1,tau2,tau3,tau4");
  EXPECT_THROW(dynamics::torque_from_csv("t,x\n0,1\n"), InvalidArgument);
}
