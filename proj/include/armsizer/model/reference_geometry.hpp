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

// Unit-scale (s = 1) reference dimensions and mass properties for the
// bundled CR4 palletizer and CR6 arm. All lengths in m, masses in kg.
// Links are uniform solid cylinders.

#pragma once

namespace armsizer::model::geometry {

namespace cr4 {

// Shoulder-to-tool stretched reach is upper_arm + forearm = 0.945 m.
inline constexpr double kColumnHeight = 0.35;
inline constexpr double kUpperArm = 0.47;
inline constexpr double kForearm = 0.475;
inline constexpr double kOffsetLink = 0.12;  // crank and forearm rear extension
inline constexpr double kWristDrop = 0.10;

inline constexpr double kTurretMass = 25.0;
inline constexpr double kUpperArmMass = 12.0;
inline constexpr double kForearmMass = 10.0;
inline constexpr double kCrankMass = 2.0;
inline constexpr double kCouplerMass = 3.0;
inline constexpr double kWristMass = 4.5;

inline constexpr double kTurretRadius = 0.08;
inline constexpr double kUpperArmRadius = 0.04;
inline constexpr double kForearmRadius = 0.035;
inline constexpr double kCrankRadius = 0.03;
inline constexpr double kCouplerRadius = 0.02;
inline constexpr double kWristRadius = 0.05;

inline constexpr double kJ1Limit = 3.0;
inline constexpr double kJ2Lower = -0.8;
inline constexpr double kJ2Upper = 1.4;
inline constexpr double kJ3Lower = -1.2;
inline constexpr double kJ3Upper = 1.2;
inline constexpr double kJ4Limit = 3.0;
inline constexpr double kPassiveLimit = 2.6;

inline constexpr double kJ1VelocityLimit = 2.5;
inline constexpr double kJ2VelocityLimit = 2.0;
inline constexpr double kJ3VelocityLimit = 2.0;
inline constexpr double kJ4VelocityLimit = 4.0;
inline constexpr double kPassiveVelocityLimit = 10.0;

}  // namespace cr4

namespace cr6 {

inline constexpr double kColumnHeight = 0.40;
inline constexpr double kUpperArm = 0.45;
inline constexpr double kForearmInner = 0.20;
inline constexpr double kForearmOuter = 0.22;
inline constexpr double kWristOffset = 0.08;
inline constexpr double kFlange = 0.05;

inline constexpr double kMasses[6] = {20.0, 10.0, 6.0, 3.0, 2.0, 0.5};
inline constexpr double kRadius = 0.04;
inline constexpr double kLimit = 3.0;
inline constexpr double kVelocityLimits[6] = {2.5, 2.5, 3.0, 4.0, 4.0, 5.0};

}  // namespace cr6

}  // namespace armsizer::model::geometry
