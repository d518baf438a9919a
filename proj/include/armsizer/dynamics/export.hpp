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

// Torque CSV: `t,tau1..tau{n_a}`.

#pragma once

#include <armsizer/csv.hpp>
#include <armsizer/dynamics/profiles.hpp>

namespace armsizer::dynamics {

inline std::string torque_to_csv(const TorqueProfile& p) {
  std::vector<std::string> h{"t"};
  for (auto& c : csv::numbered("tau", p.n_a())) h.push_back(std::move(c));
  MatX v(p.size(), 1 + p.n_a());
  v << p.t, p.tau;
  return csv::write_table(h, v);
}

inline TorqueProfile torque_from_csv(const std::string& text, TorquePath path = TorquePath::kPro) {
  const auto table = csv::read_table(text, "torque csv");
  const int n = static_cast<int>(table.header.size()) - 1;
  require(n >= 1, "torque csv: expected t and at least one torque column");
  std::vector<std::string> expected{"t"};
  for (auto& c : csv::numbered("tau", n)) expected.push_back(std::move(c));
  if (table.header != expected) throw InvalidArgument("torque csv: unexpected header");
  require(table.values.rows() > 0, "torque csv: no samples");
  return TorqueProfile{table.values.col(0), table.values.rightCols(n), path, std::nullopt};
}

}  // namespace armsizer::dynamics
