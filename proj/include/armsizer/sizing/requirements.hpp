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

// Joint-to-motor torque mapping and peak/RMS requirement extraction.

#pragma once

#include <armsizer/dynamics/profiles.hpp>
#include <armsizer/model/scenario.hpp>
#include <armsizer/sizing/catalog.hpp>

namespace armsizer::sizing {

using model::FrictionParams;
using model::RigidBodyModel;
using trajectory::TrajectorySamples;

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// Motor-side torque for one sample. Efficiency divides the load while the
/// joint is driving (tau * qd >= 0) and multiplies it while backdriven.
inline double motor_side_torque(double tau_joint, double qd, double qdd, const Gearbox& gearbox, const Motor& motor,
                                const FrictionParams& friction = {}) {
  const double n = gearbox.ratio;
  const double w = n * qd;
  const double eta = tau_joint * qd >= 0.0 ? gearbox.efficiency : 1.0 / gearbox.efficiency;
  return tau_joint / (n * eta) + motor.rotor_inertia * n * qdd + friction.viscous * w + friction.coulomb * sgn(w);
}

struct JointRequirements {
  double peak_torque = 0.0;  // N*m
  double rms_torque = 0.0;   // N*m
  double peak_speed = 0.0;   // rad/s

  double peak_speed_rpm() const { return radps_to_rpm(peak_speed); }
};

/// sqrt((1/T) * integral x^2 dt), trapezoidal rule on the given samples.
inline double trapezoid_rms(const VecX& t, const VecX& x) {
  require(t.size() == x.size(), "time and value vectors differ in length");
  require(t.size() > 0, "empty trace");
  if (t.size() == 1) return std::abs(x(0));
  const double span = t(t.size() - 1) - t(0);
  require(span > 0.0, "trace time span must be positive");
  double acc = 0.0;
  for (Eigen::Index i = 1; i < t.size(); ++i) {
    acc += 0.5 * (x(i - 1) * x(i - 1) + x(i) * x(i)) * (t(i) - t(i - 1));
  }
  return std::sqrt(acc / span);
}

inline void check_aligned(const dynamics::TorqueProfile& profile, const TrajectorySamples& tr) {
  if (profile.size() == 0 || tr.size() == 0) throw InvalidArgument("empty profile");
  require(profile.size() == tr.size() && profile.n_a() == tr.n_a(), "profile and trajectory are not aligned");
  require((profile.t - tr.t).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, tr.duration()),
          "profile and trajectory time bases differ");
}

inline std::vector<JointRequirements> extract_requirements(const dynamics::TorqueProfile& profile,
                                                           const TrajectorySamples& tr) {
  check_aligned(profile, tr);
  std::vector<JointRequirements> out(static_cast<std::size_t>(profile.n_a()));
  for (int j = 0; j < profile.n_a(); ++j) {
    auto& r = out[static_cast<std::size_t>(j)];
    const VecX tau = profile.tau.col(j);
    r.peak_torque = tau.cwiseAbs().maxCoeff();
    r.rms_torque = std::min(trapezoid_rms(profile.t, tau), r.peak_torque);
    r.peak_speed = tr.qd_a.col(j).cwiseAbs().maxCoeff();
  }
  return out;
}

/// Everything the selection needs for one joint: requirements plus the
/// aligned traces used for the pointwise motor-side checks.
struct JointDemand {
  std::string joint;
  JointRequirements req;
  VecX t, tau, qd, qdd;
  FrictionParams friction;
  double rotor_reflection = 0.0;  // kg*m^2, joint side

  bool has_traces() const { return t.size() > 0; }
};

/// Motor-side trace of one demand for a given pair.
inline VecX motor_side_trace(const JointDemand& d, const Gearbox& g, const Motor& m) {
  VecX out(d.t.size());
  for (Eigen::Index i = 0; i < d.t.size(); ++i) {
    out(i) = motor_side_torque(d.tau(i) + d.rotor_reflection * d.qdd(i), d.qd(i), d.qdd(i), g, m, d.friction);
  }
  return out;
}

inline std::vector<JointDemand> make_demands(const RigidBodyModel& model, const dynamics::TorqueProfile& profile,
                                             const TrajectorySamples& tr, const model::ScenarioConfig& scenario) {
  const auto req = extract_requirements(profile, tr);
  const auto n = static_cast<std::size_t>(profile.n_a());
  require(scenario.friction.empty() || scenario.friction.size() == n, "friction needs one entry per actuated joint");
  require(scenario.rotor_reflection.empty() || scenario.rotor_reflection.size() == n,
          "rotor_reflection needs one entry per actuated joint");
  std::vector<JointDemand> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    auto& d = out[j];
    const int col = static_cast<int>(j);
    d.joint = model.coordinate_joint(col).name;
    d.req = req[j];
    d.t = profile.t;
    d.tau = profile.tau.col(col);
    d.qd = tr.qd_a.col(col);
    d.qdd = tr.qdd_a.col(col);
    if (!scenario.friction.empty()) d.friction = scenario.friction[j];
    if (!scenario.rotor_reflection.empty()) d.rotor_reflection = scenario.rotor_reflection[j];
  }
  return out;
}

}  // namespace armsizer::sizing
