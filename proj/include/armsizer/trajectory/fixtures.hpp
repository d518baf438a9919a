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

// Bundled CR4 pick-and-place cycle:
// home -> above-pick -> pick -> above-pick -> above-place -> place ->
// above-place -> home. Joint moves between the stations, vertical
// straight-line approach and retreat. J4 is never commanded, so the tool
// keeps a fixed orientation.

#pragma once

#include <armsizer/trajectory/program.hpp>

namespace armsizer::trajectory::fixtures {

inline constexpr double kJointSpeed = 1.2;   // rad/s
inline constexpr double kJointAccel = 2.5;   // rad/s^2
inline constexpr double kLinearSpeed = 0.5;  // m/s
inline constexpr double kLinearAccel = 2.0;  // m/s^2
inline constexpr double kApproach = 0.3;     // m

inline VecX cr4_home() { return (VecX(4) << 0.0, -0.3, 0.0, 0.0).finished(); }
inline VecX cr4_above_pick() { return (VecX(4) << -0.6, 0.9, 0.3, 0.0).finished(); }
inline VecX cr4_above_place() { return (VecX(4) << 0.9, 0.9, 0.3, 0.0).finished(); }

inline Program palletizing_program() {
  const VecX vmax = VecX::Constant(4, kJointSpeed);
  const VecX amax = VecX::Constant(4, kJointAccel);
  const Vec3 down(0.0, 0.0, -kApproach);
  Program p;
  p.start_q = cr4_home();
  p.primitives = {
      move_j(cr4_above_pick(), vmax, amax),
      move_l(Waypoint::offset(down), kLinearSpeed, kLinearAccel),
      move_l(Waypoint::offset(-down), kLinearSpeed, kLinearAccel),
      move_j(cr4_above_place(), vmax, amax),
      move_l(Waypoint::offset(down), kLinearSpeed, kLinearAccel),
      move_l(Waypoint::offset(-down), kLinearSpeed, kLinearAccel),
      move_j(cr4_home(), vmax, amax),
  };
  return p;
}

}  // namespace armsizer::trajectory::fixtures
