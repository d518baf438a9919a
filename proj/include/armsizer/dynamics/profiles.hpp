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

// Torque profiles along a sampled trajectory.

#pragma once

#include <armsizer/dynamics/constrained.hpp>
#include <armsizer/dynamics/serial_approximation.hpp>
#include <armsizer/trajectory/planner.hpp>

#include <optional>
#include <thread>

namespace armsizer::dynamics {

using trajectory::TrajectorySamples;

enum class TorquePath { kDemo, kPro };

inline const char* to_string(TorquePath p) { return p == TorquePath::kDemo ? "DEMO" : "PRO"; }

struct TorqueProfile {
  VecX t;
  MatX tau;  // k x n_a, joint side
  TorquePath path = TorquePath::kPro;
  std::optional<MatX> motor_side;

  int size() const { return static_cast<int>(t.size()); }
  int n_a() const { return static_cast<int>(tau.cols()); }
};

struct ProfileOptions {
  Vec3 gravity = kStandardGravity;
  KktOptions kkt;
  /// Worker threads for the per-sample inverse dynamics; results do not
  /// depend on this value.
  int workers = 1;
};

struct ProfileDiagnostics {
  double max_kkt_residual = 0.0;
  /// max over samples of kkt_residual / (1 + ||h||_inf)
  double max_relative_kkt_residual = 0.0;
  double max_closure_residual = 0.0;
};

/// Full configurations along the trajectory; each closure solve is warm
/// started from the previous sample.
inline std::vector<VecX> solve_configurations(const RigidBodyModel& model, const TrajectorySamples& tr) {
  require(tr.n_a() == model.n_a(), "trajectory joint count does not match the model");
  std::vector<VecX> q(static_cast<std::size_t>(tr.size()));
  std::optional<VecX> seed;
  for (int i = 0; i < tr.size(); ++i) {
    try {
      q[static_cast<std::size_t>(i)] = kinematics::solve_closure(model, VecX(tr.q_a.row(i).transpose()), seed);
    } catch (const Error& e) {
      throw ConvergenceError("closure failed at sample " + std::to_string(i) + " (t = " + std::to_string(tr.t(i)) +
                                 " s): " + e.what(),
                             0.0);
    }
    if (model.n_p() > 0) seed = q[static_cast<std::size_t>(i)].tail(model.n_p());
  }
  return q;
}

namespace detail {

template <typename Fn>
void parallel_for(int count, int workers, Fn&& fn) {
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < count; i += workers) fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace detail

/// Constraint-consistent (KKT) torque profile.
inline TorqueProfile pro_profile(const RigidBodyModel& model, const TrajectorySamples& tr, const ProfileOptions& opt = {},
                                 ProfileDiagnostics* diag = nullptr) {
  const auto q = solve_configurations(model, tr);
  TorqueProfile out{tr.t, MatX::Zero(tr.size(), model.n_a()), TorquePath::kPro, std::nullopt};
  std::vector<double> res(static_cast<std::size_t>(tr.size())), rel(res.size()), phi(res.size());
  detail::parallel_for(tr.size(), opt.workers, [&](int i) {
    const auto k = static_cast<std::size_t>(i);
    const auto r = constrained_inverse_dynamics(model, q[k], VecX(tr.qd_a.row(i).transpose()),
                                                VecX(tr.qdd_a.row(i).transpose()), opt.gravity, opt.kkt);
    out.tau.row(i) = r.tau_a.transpose();
    res[k] = r.kkt_residual;
    rel[k] = r.kkt_residual / (1.0 + r.bias_norm);
    phi[k] = model.m() > 0 ? kinematics::closure_residual(model, q[k]).lpNorm<Eigen::Infinity>() : 0.0;
  });
  if (diag) {
    *diag = {};
    for (std::size_t k = 0; k < res.size(); ++k) {
      diag->max_kkt_residual = std::max(diag->max_kkt_residual, res[k]);
      diag->max_relative_kkt_residual = std::max(diag->max_relative_kkt_residual, rel[k]);
      diag->max_closure_residual = std::max(diag->max_closure_residual, phi[k]);
    }
  }
  return out;
}

/// Serial-surrogate torque profile (plain RNEA, mapped to actuated joints).
inline TorqueProfile demo_profile(const RigidBodyModel& serial, const TrajectorySamples& tr,
                                  const Vec3& gravity = kStandardGravity) {
  TorqueProfile out{tr.t, MatX::Zero(tr.size(), tr.n_a()), TorquePath::kDemo, std::nullopt};
  for (int i = 0; i < tr.size(); ++i) {
    out.tau.row(i) = demo_inverse_dynamics(serial, VecX(tr.q_a.row(i).transpose()), VecX(tr.qd_a.row(i).transpose()),
                                           VecX(tr.qdd_a.row(i).transpose()), gravity)
                         .transpose();
  }
  return out;
}

}  // namespace armsizer::dynamics
