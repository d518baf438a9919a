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

// Two-round motor/gearbox selection.
//
// A pair is feasible for a joint when
//   sf_t * peak|tau|    <= gearbox peak output,  sf_t * max|tau_m| <= motor peak,
//   sf_t * rms(tau)     <= gearbox rated output, sf_t * rms(tau_m) <= motor rated,
//   sf_s * peak_rpm * N <= motor rated speed and gearbox max input speed,
// with tau_m the pointwise motor-side trace. Without traces tau_m falls
// back to tau / (N * eta). Margins are 1 - required / capacity, so a pair
// is feasible iff every margin is >= 0.

#pragma once

#include <armsizer/sizing/requirements.hpp>

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>
#include <optional>
#include <tuple>

namespace armsizer::sizing {

struct SizingConfig {
  double sf_torque = 1.5;
  double sf_speed = 1.2;
  int max_round2_iterations = 5;
};

inline void validate_config(const SizingConfig& c) {
  require(c.sf_torque >= 1.0 && std::isfinite(c.sf_torque), "sf_torque must be >= 1");
  require(c.sf_speed >= 1.0 && std::isfinite(c.sf_speed), "sf_speed must be >= 1");
  require(c.max_round2_iterations >= 1, "max_round2_iterations must be >= 1");
}

enum class Check { kPeakGearbox, kPeakMotor, kRmsGearbox, kRmsMotor, kSpeedMotor, kSpeedGearbox };
inline constexpr int kCheckCount = 6;

inline const char* to_string(Check c) {
  switch (c) {
    case Check::kPeakGearbox: return "peak torque (gearbox peak output)";
    case Check::kPeakMotor: return "peak torque (motor peak torque)";
    case Check::kRmsGearbox: return "rms torque (gearbox rated output)";
    case Check::kRmsMotor: return "rms torque (motor rated torque)";
    case Check::kSpeedMotor: return "speed (motor rated speed)";
    case Check::kSpeedGearbox: return "speed (gearbox max input speed)";
  }
  return "?";
}

struct PairEvaluation {
  std::array<double, kCheckCount> margin{};

  double peak_margin() const { return std::min(margin[0], margin[1]); }
  double rms_margin() const { return std::min(margin[2], margin[3]); }
  double speed_margin() const { return std::min(margin[4], margin[5]); }
  double worst() const { return *std::min_element(margin.begin(), margin.end()); }
  Check binding() const {
    return static_cast<Check>(std::min_element(margin.begin(), margin.end()) - margin.begin());
  }
  bool feasible() const { return worst() >= 0.0; }
};

namespace detail {

inline double margin(double required, double capacity) { return required <= 0.0 ? 1.0 : 1.0 - required / capacity; }

}  // namespace detail

inline PairEvaluation evaluate_pair(const JointDemand& d, const Motor& m, const Gearbox& g, const SizingConfig& cfg) {
  double motor_peak = 0.0, motor_rms = 0.0;
  if (d.has_traces()) {
    const VecX tm = motor_side_trace(d, g, m);
    motor_peak = tm.cwiseAbs().maxCoeff();
    motor_rms = trapezoid_rms(d.t, tm);
  } else {
    motor_peak = d.req.peak_torque / (g.ratio * g.efficiency);
    motor_rms = d.req.rms_torque / (g.ratio * g.efficiency);
  }
  const double input_rpm = cfg.sf_speed * d.req.peak_speed_rpm() * g.ratio;
  PairEvaluation e;
  e.margin[0] = detail::margin(cfg.sf_torque * d.req.peak_torque, g.peak_output_torque);
  e.margin[1] = detail::margin(cfg.sf_torque * motor_peak, m.peak_torque);
  e.margin[2] = detail::margin(cfg.sf_torque * d.req.rms_torque, g.rated_output_torque);
  e.margin[3] = detail::margin(cfg.sf_torque * motor_rms, m.rated_torque);
  e.margin[4] = detail::margin(input_rpm, m.rated_speed);
  e.margin[5] = detail::margin(input_rpm, g.max_input_speed);
  return e;
}

struct JointSelection {
  std::string joint;
  std::string motor;    // empty when infeasible
  std::string gearbox;  // empty when infeasible
  double torque_peak_margin = 0.0;
  double torque_rms_margin = 0.0;
  double speed_margin = 0.0;
  bool feasible = false;
  bool changed = false;  // round 2: differs from the round-1 pair
  std::string binding_constraint;  // infeasible joints only
  std::string message;
};

struct Selection {
  int round = 1;
  bool feasible = false;
  int iterations = 0;  // round 2: re-simulations run until the fixed point
  std::vector<JointSelection> joints;
  std::vector<JointRequirements> requirements;  // the requirements the selection was checked against

  const JointSelection& joint(const std::string& name) const {
    for (const auto& j : joints) {
      if (j.joint == name) return j;
    }
    throw NotFound("no selection for joint '" + name + "'");
  }
  std::vector<std::string> infeasible_joints() const {
    std::vector<std::string> out;
    for (const auto& j : joints) {
      if (!j.feasible) out.push_back(j.joint);
    }
    return out;
  }
};

/// Best pair for one joint, or an infeasible entry naming the binding
/// constraint of the closest pair.
inline JointSelection select_joint(const JointDemand& d, const ActuatorCatalog& catalog, const SizingConfig& cfg) {
  JointSelection out;
  out.joint = d.joint;
  using Key = std::tuple<double, double, double>;
  std::optional<Key> best_key;
  double closest = -std::numeric_limits<double>::infinity();
  Check closest_check = Check::kPeakGearbox;
  std::string closest_pair;
  std::array<int, kCheckCount> violations{};
  for (const auto& m : catalog.motors) {
    for (const auto& g : catalog.gearboxes) {
      const auto e = evaluate_pair(d, m, g, cfg);
      for (int c = 0; c < kCheckCount; ++c) violations[static_cast<std::size_t>(c)] += e.margin[static_cast<std::size_t>(c)] < 0.0;
      if (!e.feasible()) {
        if (e.worst() > closest) {
          closest = e.worst();
          closest_check = e.binding();
          closest_pair = m.name + " + " + g.name;
        }
        continue;
      }
      const Key key{m.rated_power, m.mass + g.mass, g.ratio};
      if (best_key && !(key < *best_key)) continue;
      best_key = key;
      out.motor = m.name;
      out.gearbox = g.name;
      out.torque_peak_margin = e.peak_margin();
      out.torque_rms_margin = e.rms_margin();
      out.speed_margin = e.speed_margin();
      out.feasible = true;
    }
  }
  if (!out.feasible) {
    out.binding_constraint = to_string(closest_check);
    out.message = "no feasible motor/gearbox pair for " + d.joint + "; binding constraint: " + out.binding_constraint +
                  " (closest pair " + closest_pair + ", margin " + std::to_string(closest) + "; violated by " +
                  std::to_string(violations[static_cast<std::size_t>(closest_check)]) + " of " +
                  std::to_string(catalog.motors.size() * catalog.gearboxes.size()) + " pairs)";
  }
  return out;
}

inline Selection select_round1(const std::vector<JointDemand>& demands, const ActuatorCatalog& catalog,
                               const SizingConfig& cfg = {}) {
  validate_config(cfg);
  if (catalog.motors.empty() || catalog.gearboxes.empty()) throw InvalidArgument("catalog is empty");
  Selection s;
  s.round = 1;
  s.feasible = true;
  for (const auto& d : demands) {
    s.joints.push_back(select_joint(d, catalog, cfg));
    s.requirements.push_back(d.req);
    s.feasible = s.feasible && s.joints.back().feasible;
  }
  return s;
}

/// Requirements-only overload (closed-form motor-side check).
inline Selection select_round1(const std::vector<JointRequirements>& req, const ActuatorCatalog& catalog,
                               const SizingConfig& cfg = {}) {
  std::vector<JointDemand> demands(req.size());
  for (std::size_t j = 0; j < req.size(); ++j) {
    demands[j].joint = "J" + std::to_string(j + 1);
    demands[j].req = req[j];
  }
  return select_round1(demands, catalog, cfg);
}

/// Actuator mass (motor + gearbox) per joint of a feasible selection.
inline std::vector<double> actuator_masses(const Selection& s, const ActuatorCatalog& catalog) {
  std::vector<double> out;
  for (const auto& j : s.joints) {
    require(j.feasible, "selection for " + j.joint + " is not feasible");
    out.push_back(catalog.motor(j.motor).mass + catalog.gearbox(j.gearbox).mass);
  }
  return out;
}

struct Round2Inputs {
  const RigidBodyModel& model;
  const TrajectorySamples& trajectory;
  const model::ScenarioConfig& scenario;
  dynamics::ProfileOptions profile_options = {};
};

/// Static gravity-torque increment from the actuator point masses at the
/// first sample of the cycle. Used only to order the re-checks.
inline VecX static_mass_increment(const RigidBodyModel& model, const RigidBodyModel& loaded,
                                  const TrajectorySamples& tr, const Vec3& gravity) {
  const VecX q = kinematics::solve_closure(model, VecX(tr.q_a.row(0).transpose()));
  const VecX zero = VecX::Zero(model.n_a());
  const auto a = dynamics::constrained_inverse_dynamics(model, q, zero, zero, gravity);
  const auto b = dynamics::constrained_inverse_dynamics(loaded, q, zero, zero, gravity);
  return (b.tau_a - a.tau_a).cwiseAbs();
}

/// Mass-aware revalidation: load the model with the selected actuators,
/// re-run the constrained inverse dynamics, recheck every pair and reselect
/// the joints that fail, until nothing changes.
inline Selection validate_round2(const Selection& round1, const Round2Inputs& in, const ActuatorCatalog& catalog,
                                 const SizingConfig& cfg = {}) {
  validate_config(cfg);
  require(round1.feasible, "round-2 validation needs a feasible round-1 selection");
  require(static_cast<int>(round1.joints.size()) == in.model.n_a(), "selection does not match the model");
  Selection cur = round1;
  cur.round = 2;
  for (auto& j : cur.joints) j.changed = false;
  for (int it = 1; it <= cfg.max_round2_iterations; ++it) {
    const auto masses = actuator_masses(cur, catalog);
    const auto loaded = model::attach_actuator_masses(in.model, masses);
    const auto profile = dynamics::pro_profile(loaded, in.trajectory, in.profile_options);
    const auto demands = make_demands(loaded, profile, in.trajectory, in.scenario);
    const VecX inc = static_mass_increment(in.model, loaded, in.trajectory, in.profile_options.gravity);
    std::vector<int> order(demands.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return inc(a) > inc(b); });

    bool any_change = false;
    cur.requirements.clear();
    for (const auto& d : demands) cur.requirements.push_back(d.req);
    for (int k : order) {
      auto& js = cur.joints[static_cast<std::size_t>(k)];
      const auto& d = demands[static_cast<std::size_t>(k)];
      const auto e = evaluate_pair(d, catalog.motor(js.motor), catalog.gearbox(js.gearbox), cfg);
      if (e.feasible()) {
        js.torque_peak_margin = e.peak_margin();
        js.torque_rms_margin = e.rms_margin();
        js.speed_margin = e.speed_margin();
        continue;
      }
      auto next = select_joint(d, catalog, cfg);
      if (!next.feasible) {
        next.message += " after actuator mass loading";
        cur.joints[static_cast<std::size_t>(k)] = next;
        cur.feasible = false;
        cur.iterations = it;
        return cur;
      }
      js = next;
      any_change = true;
    }
    if (!any_change) {
      cur.iterations = it;
      for (std::size_t k = 0; k < cur.joints.size(); ++k) {
        cur.joints[k].changed =
            cur.joints[k].motor != round1.joints[k].motor || cur.joints[k].gearbox != round1.joints[k].gearbox;
      }
      cur.feasible = true;
      return cur;
    }
  }
  throw ConvergenceError("round-2 selection reached no fixed point within " +
                             std::to_string(cfg.max_round2_iterations) + " iterations",
                         0.0);
}

inline nlohmann::json requirements_to_json(const std::vector<JointRequirements>& req,
                                           const std::vector<std::string>& joints) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t j = 0; j < req.size(); ++j) {
    out.push_back({{"joint", j < joints.size() ? joints[j] : "J" + std::to_string(j + 1)},
                   {"peak_torque_Nm", req[j].peak_torque},
                   {"rms_torque_Nm", req[j].rms_torque},
                   {"peak_speed_radps", req[j].peak_speed},
                   {"peak_speed_rpm", req[j].peak_speed_rpm()}});
  }
  return out;
}

inline nlohmann::json selection_to_json(const Selection& s) {
  nlohmann::json joints = nlohmann::json::array();
  std::vector<std::string> names;
  for (const auto& j : s.joints) {
    names.push_back(j.joint);
    nlohmann::json e{{"joint", j.joint},
                     {"motor", j.motor},
                     {"gearbox", j.gearbox},
                     {"feasible", j.feasible},
                     {"margins",
                      {{"torque_peak", j.torque_peak_margin},
                       {"torque_rms", j.torque_rms_margin},
                       {"speed", j.speed_margin}}}};
    if (s.round == 2) e["changed"] = j.changed;
    if (!j.feasible) {
      e["binding_constraint"] = j.binding_constraint;
      e["message"] = j.message;
    }
    joints.push_back(std::move(e));
  }
  nlohmann::json out{{"round", s.round},
                     {"feasible", s.feasible},
                     {"joints", joints},
                     {"requirements", requirements_to_json(s.requirements, names)}};
  if (s.round == 2) out["iterations"] = s.iterations;
  return out;
}

}  // namespace armsizer::sizing
