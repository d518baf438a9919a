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

// Acceptance gate. One line per criterion:
//   PASS|FAIL  <criterion>  <measured>  (<bound>)  <seconds>
// Exit status is the number of failed criteria.

#include "support.hpp"

#include <armsizer/dynamics/rollout.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

using namespace armsizer;
using namespace armsizer::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

template <typename Fn>
void criterion(const std::string& name, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s  %-28s %s  [%.2f s]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c, d);
  return buf;
}

// Shared benchmark run; computed once, used by several criteria.
const service::PipelineResult& benchmark_run() {
  static const service::PipelineResult r = service::run_pipeline(benchmark_inputs());
  return r;
}

}  // namespace

int main() {
  criterion("reach_scaling", [] {
    const double r1 = model::reach(model::build_cr4(1.0, model::ScalingLaw::calibrated()));
    const double r16 = model::reach(model::build_cr4(1.6, model::ScalingLaw::calibrated()));
    const bool ok = std::abs(r1 - 0.945) <= 1e-3 && std::abs(r16 - 1.512) <= 1e-3;
    return Outcome{ok, fmt("reach(1.0)=%.6f m reach(1.6)=%.6f m (target 0.945/1.512 +-1e-3)", r1, r16)};
  });

  criterion("rpm_conversion", [] {
    const double a = radps_to_rpm(1.200);
    const double b = radps_to_rpm(1.066);
    const bool ok = std::abs(a - 11.459) <= 0.002 && std::abs(b - 10.180) <= 0.001;
    return Outcome{ok, fmt("1.200 rad/s=%.4f rpm (11.459+-0.002) 1.066 rad/s=%.4f rpm (10.180+-0.001)", a, b)};
  });

  criterion("scaling_factors_s1.6", [] {
    const auto ref = model::cr4_reference();
    const auto scaled = model::apply_scaling(ref, 1.6, model::ScalingLaw::calibrated());
    const double mass_oracle = std::pow(1.6, 1.7);
    const double inertia_oracle = std::pow(1.6, 3.7);
    double worst = 0.0;
    for (std::size_t i = 1; i < ref.links.size(); ++i) {
      const auto& a = ref.links[i].inertia;
      const auto& b = scaled.links[i].inertia;
      worst = std::max(worst, std::abs(b.mass / a.mass - mass_oracle) / mass_oracle);
      for (int r = 0; r < 3; ++r) {
        if (a.inertia(r, r) == 0.0) continue;
        worst = std::max(worst, std::abs(b.inertia(r, r) / a.inertia(r, r) - inertia_oracle) / inertia_oracle);
      }
    }
    return Outcome{worst <= 1e-12, fmt("max relative deviation %.3e from 1.6^1.7 / 1.6^3.7 (<=1e-12)", worst)};
  });

  criterion("kkt_roundtrip_residual", [] {
    const auto m = benchmark_model();
    std::mt19937 rng(7);
    double worst_roundtrip = 0.0;
    for (int k = 0; k < 100; ++k) {
      const VecX q = kinematics::solve_closure(m, random_cr4_qa(rng));
      const VecX qd_a = random_vector(rng, 4, 1.0);
      const VecX qdd_a = random_vector(rng, 4, 2.0);
      const auto id = dynamics::constrained_inverse_dynamics(m, q, qd_a, qdd_a);
      const auto fd = dynamics::constrained_forward_dynamics(m, q, id.qd, id.tau_a);
      worst_roundtrip = std::max(worst_roundtrip, (fd.qdd.head(4) - qdd_a).lpNorm<Eigen::Infinity>() /
                                                      qdd_a.lpNorm<Eigen::Infinity>());
    }
    const double cycle = benchmark_run().diagnostics.max_relative_kkt_residual;
    const bool ok = worst_roundtrip <= 1e-8 && cycle <= 1e-9 && benchmark_run().pro.has_value();
    return Outcome{ok, fmt("ID/FD roundtrip %.3e (<=1e-8); cycle max residual/(1+|h|) %.3e (<=1e-9)",
                           worst_roundtrip, cycle)};
  });

  criterion("statics_oracle", [] {
    const auto m = benchmark_model();
    const Vec3 g = dynamics::kStandardGravity;
    std::mt19937 rng(11);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const VecX q_a = random_cr4_qa(rng);
      const VecX q = kinematics::solve_closure(m, q_a);
      const VecX tau = dynamics::constrained_inverse_dynamics(m, q, VecX::Zero(4), VecX::Zero(4), g).tau_a;
      worst = std::max(worst, (tau - potential_gradient_fd(m, q_a, g)).lpNorm<Eigen::Infinity>());
    }
    return Outcome{worst <= 1e-5, fmt("max |tau - dV/dq_a| over 20 poses %.3e N*m (<=1e-5)", worst)};
  });

  criterion("energy_balance", [] {
    const auto m = benchmark_model();
    const VecX q0 = kinematics::solve_closure(m, (VecX(4) << 0.2, 0.3, 0.1, 0.0).finished());
    const VecX hold = dynamics::constrained_inverse_dynamics(m, q0, VecX::Zero(4), VecX::Zero(4)).tau_a;
    const VecX qd0 = dynamics::detail::consistent_velocity(m, q0, (VecX(6) << 0.3, -0.2, 0.25, 0.5, 0, 0).finished());
    auto law = [&](double t, const VecX&, const VecX&) {
      VecX tau = hold;
      tau(0) += 5.0 * std::sin(2.0 * kPi * t);
      tau(1) += 20.0 * std::sin(3.0 * t);
      tau(2) -= 15.0 * std::cos(2.0 * t);
      return tau;
    };
    const auto r = dynamics::rollout(m, q0, qd0, law, {});
    double err = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < r.t.size(); ++k) {
      const double de = r.energy(k) - r.energy(0);
      err = std::max(err, std::abs(de - r.work[k]));
      scale = std::max({scale, std::abs(de), std::abs(r.work[k])});
    }
    const double rel = err / scale;
    return Outcome{rel <= 1e-6, fmt("1 s RK4 dt=1e-4: max|dE - W| / max|W| = %.3e (<=1e-6), closure drift %.2e",
                                    rel, r.max_closure_residual)};
  });

  criterion("jacobian_closure_fd", [] {
    const auto m = benchmark_model();
    std::mt19937 rng(13);
    const double h = 1e-6;
    double worst_frame = 0.0, worst_closure = 0.0;
    for (int k = 0; k < 20; ++k) {
      const VecX q = kinematics::solve_closure(m, random_cr4_qa(rng));
      for (const std::string frame : {"tool", "forearm_pin", "coupler_tip"}) {
        const Mat6X jac = kinematics::frame_jacobian(m, q, frame);
        const Transform t0 = kinematics::forward_kinematics(m, q, frame);
        for (int i = 0; i < m.n(); ++i) {
          VecX p = q, n = q;
          p(i) += h;
          n(i) -= h;
          const Transform tp = kinematics::forward_kinematics(m, p, frame);
          const Transform tn = kinematics::forward_kinematics(m, n, frame);
          const Vec3 lin = (tp.translation() - tn.translation()) / (2 * h);
          const Mat3 dr = (tp.linear() - tn.linear()) / (2 * h) * t0.linear().transpose();
          const Vec3 ang(dr(2, 1), dr(0, 2), dr(1, 0));
          worst_frame = std::max(worst_frame, (jac.block<3, 1>(0, i) - lin).lpNorm<Eigen::Infinity>());
          worst_frame = std::max(worst_frame, (jac.block<3, 1>(3, i) - ang).lpNorm<Eigen::Infinity>());
        }
      }
      const MatX jc = kinematics::closure_jacobian_matrix(m, q);
      for (int i = 0; i < m.n(); ++i) {
        VecX p = q, n = q;
        p(i) += h;
        n(i) -= h;
        const VecX col = (kinematics::closure_residual(m, p) - kinematics::closure_residual(m, n)) / (2 * h);
        worst_closure = std::max(worst_closure, (jc.col(i) - col).lpNorm<Eigen::Infinity>());
      }
    }
    const bool ok = worst_frame <= 1e-5 && worst_closure <= 1e-6;
    return Outcome{ok, fmt("frame Jacobian %.3e (<=1e-5), closure Jacobian %.3e (<=1e-6)", worst_frame, worst_closure)};
  });

  criterion("demo_pro_pattern", [] {
    const auto& r = benchmark_run();
    if (!r.metrics) return Outcome{false, "no metrics: " + r.error};
    const auto& j = r.metrics->joints;
    double min_corr = 1.0;
    for (const auto& x : j) min_corr = std::min(min_corr, x.correlation.value_or(1.0));
    const auto m = benchmark_model();
    const auto serial = dynamics::lump_serial_model(m);
    std::mt19937 rng(17);
    double static_gap = 0.0;
    for (int k = 0; k < 20; ++k) {
      const VecX q_a = random_cr4_qa(rng);
      const VecX pro = dynamics::constrained_inverse_dynamics(m, kinematics::solve_closure(m, q_a), VecX::Zero(4),
                                                              VecX::Zero(4)).tau_a;
      const VecX demo = dynamics::demo_inverse_dynamics(serial, q_a, VecX::Zero(4), VecX::Zero(4));
      static_gap = std::max(static_gap, (pro - demo).lpNorm<Eigen::Infinity>());
    }
    const bool ordered = j[1].rmse >= j[0].rmse && j[2].rmse >= j[0].rmse;
    const bool ok = min_corr >= 0.95 && static_gap <= 1e-6 && ordered;
    std::ostringstream s;
    s << fmt("min corr %.4f (>=0.95); static gap %.2e (<=1e-6); ", min_corr, static_gap)
      << fmt("RMSE J1 %.3f J2 %.3f J3 %.3f (J2,J3 >= J1)", j[0].rmse, j[1].rmse, j[2].rmse);
    return Outcome{ok, s.str()};
  });

  criterion("two_round_pattern", [] {
    const auto& r = benchmark_run();
    if (!r.round1 || !r.round2) return Outcome{false, "sizing incomplete: " + r.error};
    const auto cat = bundled_catalog();
    const auto& r1 = *r.round1;
    const auto& r2 = *r.round2;
    bool ok = r1.feasible && r1.joints.size() == 4 && r2.feasible && r2.iterations <= 2;
    for (std::size_t k = 1; k < 4; ++k) {
      ok = ok && !r2.joints[k].changed && r2.joints[k].motor == r1.joints[k].motor &&
           r2.joints[k].gearbox == r1.joints[k].gearbox;
    }
    const double n1 = cat.gearbox(r1.joints[0].gearbox).ratio;
    const double n2 = cat.gearbox(r2.joints[0].gearbox).ratio;
    ok = ok && r2.joints[0].changed && n1 == 50.0 && n2 == 100.0;
    std::ostringstream s;
    s << "J1 " << r1.joints[0].motor << "+" << r1.joints[0].gearbox << " -> " << r2.joints[0].motor << "+"
      << r2.joints[0].gearbox << "; J2-J4 unchanged=" << (ok ? "yes" : "check") << "; iterations " << r2.iterations
      << " (<=2)";
    return Outcome{ok, s.str()};
  });

  criterion("requirement_properties", [] {
    const auto& r = benchmark_run();
    if (!r.round1 || !r.demo) return Outcome{false, "no requirements: " + r.error};
    bool rms_ok = true;
    for (const auto* p : {&*r.pro, &*r.demo}) {
      for (const auto& q : sizing::extract_requirements(*p, *r.trajectory)) rms_ok = rms_ok && q.rms_torque <= q.peak_torque;
    }
    const double j4_speed = r.round1->requirements[3].peak_speed;
    std::vector<double> peaks;
    for (double s : {1.0, 1.3, 1.6}) {
      auto sc = model::benchmark_scenario();
      sc.scale = s;
      const auto m = model::build_scenario_model(model::RobotKind::kCR4, sc);
      const auto tr = trajectory::compile_program(m, trajectory::fixtures::palletizing_program());
      peaks.push_back(sizing::extract_requirements(dynamics::pro_profile(m, tr), tr)[1].peak_torque);
    }
    const bool inc = peaks[0] < peaks[1] && peaks[1] < peaks[2];
    const bool ok = rms_ok && j4_speed == 0.0 && inc;
    std::ostringstream s;
    s << "rms<=peak " << (rms_ok ? "yes" : "no") << fmt("; J4 peak speed %.1e rad/s (=0)", j4_speed)
      << fmt("; peak J2 %.2f < %.2f < %.2f N*m", peaks[0], peaks[1], peaks[2]);
    return Outcome{ok, s.str()};
  });

  criterion("determinism", [] {
    const auto& a = benchmark_run();
    auto in = benchmark_inputs();
    in.workers = 2;
    const auto b = service::run_pipeline(in);
    bool same = a.artifacts.size() == b.artifacts.size() && a.artifacts.size() == service::artifact_files().size();
    std::string diff;
    for (const auto& [kind, text] : a.artifacts) {
      const auto it = b.artifacts.find(kind);
      if (it == b.artifacts.end() || it->second != text) {
        same = false;
        diff += kind + " ";
      }
    }
    return Outcome{same, same ? fmt("%.0f artifacts byte-identical across two runs (1 vs 2 workers)",
                                    static_cast<double>(a.artifacts.size()))
                              : "differs: " + diff};
  });

  std::printf("%d criteria failed\n", failures);
  return failures;
}
