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

// Shared fixtures and independent oracles for the test binaries.

#pragma once

#include <armsizer/dynamics/profiles.hpp>
#include <armsizer/model/scenario.hpp>
#include <armsizer/service/pipeline.hpp>
#include <armsizer/trajectory/fixtures.hpp>

#include <random>

#ifndef ARMSIZER_DATA_DIR
#define ARMSIZER_DATA_DIR "data"
#endif

namespace armsizer::testing {

inline std::filesystem::path data_dir() { return ARMSIZER_DATA_DIR; }

inline sizing::ActuatorCatalog bundled_catalog() {
  return sizing::load_catalog(nlohmann::json::parse(service::read_text_file(data_dir() / "catalog.json")));
}

inline model::RigidBodyModel benchmark_model() {
  return model::build_scenario_model(model::RobotKind::kCR4, model::benchmark_scenario());
}

inline service::PipelineInputs benchmark_inputs() {
  service::PipelineInputs in;
  in.program = trajectory::fixtures::palletizing_program();
  in.catalog = bundled_catalog();
  return in;
}

/// Actuated CR4 coordinates well inside the limits and away from the
/// parallelogram fold (|q3 - q2| stays below 0.9 rad).
inline VecX random_cr4_qa(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VecX q(4);
  q(0) = 2.0 * u(rng);
  q(1) = 0.25 + 0.6 * u(rng);
  q(2) = std::clamp(q(1) + 0.8 * u(rng), -1.1, 1.1);
  q(3) = 2.0 * u(rng);
  return q;
}

inline VecX random_vector(std::mt19937& rng, int n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  VecX v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

/// Potential energy as a function of the actuated coordinates only, with
/// the loops closed from the reference branch.
inline double potential_of_qa(const model::RigidBodyModel& m, const VecX& q_a, const Vec3& g) {
  return dynamics::potential_energy(m, kinematics::solve_closure(m, q_a), g);
}

/// Central-difference gradient of potential_of_qa.
inline VecX potential_gradient_fd(const model::RigidBodyModel& m, const VecX& q_a, const Vec3& g, double h = 1e-6) {
  VecX grad(q_a.size());
  for (Eigen::Index i = 0; i < q_a.size(); ++i) {
    VecX p = q_a, n = q_a;
    p(i) += h;
    n(i) -= h;
    grad(i) = (potential_of_qa(m, p, g) - potential_of_qa(m, n, g)) / (2.0 * h);
  }
  return grad;
}

/// Population Pearson correlation computed directly from the definition.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace armsizer::testing
