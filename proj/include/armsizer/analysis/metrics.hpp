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

// DEMO vs PRO agreement metrics. All statistics are population statistics
// over the full trace; error = demo - pro.

#pragma once

#include <armsizer/csv.hpp>
#include <armsizer/dynamics/profiles.hpp>

#include <nlohmann/json.hpp>

#include <optional>
#include <vector>

namespace armsizer::analysis {

using dynamics::TorqueProfile;

struct JointMetrics {
  std::string joint;
  std::optional<double> correlation;  // empty when either trace is flat
  double rmse = 0.0;                  // N*m
  double bias = 0.0;                  // N*m, mean(demo - pro)
};

struct ComparisonMetrics {
  std::string side = "joint";  // "joint" or "motor"
  std::vector<JointMetrics> joints;
};

namespace detail {

inline bool flat(const VecX& centered, const VecX& x) {
  const double scale = 1.0 + x.cwiseAbs().maxCoeff();
  return centered.cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

}  // namespace detail

inline JointMetrics compare_traces(const VecX& demo, const VecX& pro, std::string joint = {}) {
  require(demo.size() == pro.size(), "traces differ in length");
  require(demo.size() > 0, "empty traces");
  const double n = static_cast<double>(demo.size());
  JointMetrics m;
  m.joint = std::move(joint);
  const VecX err = demo - pro;
  m.bias = err.sum() / n;
  m.rmse = std::sqrt(err.squaredNorm() / n);
  const VecX dc = demo.array() - demo.mean();
  const VecX pc = pro.array() - pro.mean();
  if (!detail::flat(dc, demo) && !detail::flat(pc, pro)) {
    const double r = dc.dot(pc) / std::sqrt(dc.squaredNorm() * pc.squaredNorm());
    m.correlation = std::clamp(r, -1.0, 1.0);
  }
  return m;
}

inline std::vector<std::string> default_joint_names(int n) { return csv::numbered("J", n); }

/// Per-joint metrics on matrices of traces (samples x joints).
inline ComparisonMetrics compare_matrices(const MatX& demo, const MatX& pro, const std::vector<std::string>& joints = {},
                                          const std::string& side = "joint") {
  require(demo.rows() == pro.rows() && demo.cols() == pro.cols(), "trace matrices differ in shape");
  const auto names = joints.empty() ? default_joint_names(static_cast<int>(demo.cols())) : joints;
  require(static_cast<Eigen::Index>(names.size()) == demo.cols(), "one joint name per column expected");
  ComparisonMetrics out;
  out.side = side;
  for (Eigen::Index j = 0; j < demo.cols(); ++j) {
    out.joints.push_back(compare_traces(demo.col(j), pro.col(j), names[static_cast<std::size_t>(j)]));
  }
  return out;
}

inline ComparisonMetrics compare_profiles(const TorqueProfile& demo, const TorqueProfile& pro,
                                          const std::vector<std::string>& joints = {}) {
  require(demo.size() == pro.size() && demo.n_a() == pro.n_a(), "profiles have different grids");
  require(demo.size() > 0, "empty profiles");
  const double tol = 1e-9 * std::max(1.0, pro.t.cwiseAbs().maxCoeff());
  if ((demo.t - pro.t).cwiseAbs().maxCoeff() > tol) throw InvalidArgument("profiles have different time bases");
  return compare_matrices(demo.tau, pro.tau, joints, "joint");
}

struct GateThresholds {
  double min_correlation = 0.99;
  double max_rmse = 5.0;  // N*m
};

struct GateResult {
  std::string joint;
  bool pass = false;
  std::vector<std::string> reasons;  // empty on a clean pass
};

/// A joint passes when correlation >= min and rmse <= max. Flat traces
/// (undefined correlation) are judged on rmse alone.
inline std::vector<GateResult> agreement_gate(const ComparisonMetrics& metrics, const GateThresholds& th = {}) {
  std::vector<GateResult> out;
  for (const auto& m : metrics.joints) {
    GateResult g;
    g.joint = m.joint;
    if (!m.correlation) {
      g.reasons.push_back("correlation undefined (flat trace); judged on rmse only");
    } else if (*m.correlation < th.min_correlation) {
      g.reasons.push_back("correlation " + csv::format_number(*m.correlation) + " < " +
                          csv::format_number(th.min_correlation));
    }
    const bool corr_ok = !m.correlation || *m.correlation >= th.min_correlation;
    if (m.rmse > th.max_rmse) {
      g.reasons.push_back("rmse " + csv::format_number(m.rmse) + " N*m > " + csv::format_number(th.max_rmse));
    }
    g.pass = corr_ok && m.rmse <= th.max_rmse;
    out.push_back(std::move(g));
  }
  return out;
}

inline constexpr const char* kUndefined = "undefined";

/// `joint,correlation,rmse_Nm,bias_Nm`; a flat-trace correlation is
/// written as "undefined".
inline std::string metrics_to_csv(const ComparisonMetrics& m) {
  std::string out = "joint,correlation,rmse_Nm,bias_Nm\n";
  for (const auto& j : m.joints) {
    out += j.joint + "," + (j.correlation ? csv::format_number(*j.correlation) : std::string(kUndefined)) + "," +
           csv::format_number(j.rmse) + "," + csv::format_number(j.bias) + "\n";
  }
  return out;
}

inline ComparisonMetrics metrics_from_csv(const std::string& text, const std::string& side = "joint") {
  std::istringstream in(text);
  std::string line;
  ComparisonMetrics m;
  m.side = side;
  int line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = csv::split_line(line);
    const std::string where = "metrics line " + std::to_string(line_no);
    if (!header) {
      if (cells != std::vector<std::string>{"joint", "correlation", "rmse_Nm", "bias_Nm"}) {
        throw InvalidArgument(where + ": unexpected header");
      }
      header = true;
      continue;
    }
    if (cells.size() != 4) throw InvalidArgument(where + ": expected 4 fields");
    JointMetrics j;
    j.joint = cells[0];
    if (cells[1] != kUndefined) j.correlation = csv::parse_number(cells[1], where);
    j.rmse = csv::parse_number(cells[2], where);
    j.bias = csv::parse_number(cells[3], where);
    m.joints.push_back(std::move(j));
  }
  if (!header) throw InvalidArgument("metrics: missing header");
  return m;
}

inline nlohmann::json metrics_to_json(const ComparisonMetrics& m) {
  nlohmann::json joints = nlohmann::json::array();
  for (const auto& j : m.joints) {
    joints.push_back({{"joint", j.joint},
                      {"correlation", j.correlation ? nlohmann::json(*j.correlation) : nlohmann::json(nullptr)},
                      {"correlation_defined", j.correlation.has_value()},
                      {"rmse_Nm", j.rmse},
                      {"bias_Nm", j.bias}});
  }
  return {{"side", m.side}, {"joints", joints}};
}

inline nlohmann::json gate_to_json(const std::vector<GateResult>& gate) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& g : gate) out.push_back({{"joint", g.joint}, {"pass", g.pass}, {"reasons", g.reasons}});
  return out;
}

/// Per-joint time/torque pairs for plotting:
/// {"t": [...], "joints": [{"joint": "J1", "demo": [...], "pro": [...]}, ...]}.
inline nlohmann::json plot_data(const TorqueProfile& demo, const TorqueProfile& pro,
                                const std::vector<std::string>& joints = {}) {
  require(demo.size() == pro.size() && demo.n_a() == pro.n_a(), "profiles have different grids");
  const auto names = joints.empty() ? default_joint_names(pro.n_a()) : joints;
  auto column = [](const MatX& m, int j) { return std::vector<double>(m.col(j).data(), m.col(j).data() + m.rows()); };
  nlohmann::json out;
  out["t"] = std::vector<double>(pro.t.data(), pro.t.data() + pro.t.size());
  out["joints"] = nlohmann::json::array();
  for (int j = 0; j < pro.n_a(); ++j) {
    out["joints"].push_back(
        {{"joint", names[static_cast<std::size_t>(j)]}, {"demo", column(demo.tau, j)}, {"pro", column(pro.tau, j)}});
  }
  return out;
}

}  // namespace armsizer::analysis
