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

#pragma once

#include <armsizer/common.hpp>

#include <cmath>

namespace armsizer::trajectory {

/// Scalar bang-cruise-bang profile from 0 to `distance`.
struct TrapezoidProfile {
  double distance = 0.0;
  double peak_velocity = 0.0;
  double acceleration = 0.0;
  double t_accel = 0.0;
  double t_cruise = 0.0;
  double duration = 0.0;

  bool triangular() const { return t_cruise <= 0.0; }

  double position(double t) const {
    if (duration <= 0.0 || t <= 0.0) return 0.0;
    if (t >= duration) return distance;
    if (t < t_accel) return 0.5 * acceleration * t * t;
    if (t <= t_accel + t_cruise) return 0.5 * acceleration * t_accel * t_accel + peak_velocity * (t - t_accel);
    const double r = duration - t;
    return distance - 0.5 * acceleration * r * r;
  }

  double velocity(double t) const {
    if (duration <= 0.0 || t <= 0.0 || t >= duration) return 0.0;
    if (t < t_accel) return acceleration * t;
    if (t <= t_accel + t_cruise) return peak_velocity;
    return acceleration * (duration - t);
  }

  double acceleration_at(double t) const {
    if (duration <= 0.0 || t < 0.0 || t > duration) return 0.0;
    if (t < t_accel) return acceleration;
    if (t <= t_accel + t_cruise) return 0.0;
    return -acceleration;
  }
};

/// Fastest profile covering `distance` under the given limits.
inline TrapezoidProfile trapezoid_profile(double distance, double vmax, double amax) {
  if (!(distance >= 0.0)) throw InvalidArgument("trapezoid distance must be non-negative");
  if (!(vmax > 0.0) || !(amax > 0.0)) throw InvalidArgument("trapezoid limits must be positive");
  TrapezoidProfile p;
  p.distance = distance;
  if (distance == 0.0) return p;
  p.acceleration = amax;
  if (distance <= vmax * vmax / amax) {
    p.t_accel = std::sqrt(distance / amax);
    p.peak_velocity = amax * p.t_accel;
    p.t_cruise = 0.0;
  } else {
    p.t_accel = vmax / amax;
    p.peak_velocity = vmax;
    p.t_cruise = distance / vmax - p.t_accel;
  }
  p.duration = 2.0 * p.t_accel + p.t_cruise;
  return p;
}

/// Profile with prescribed duration and acceleration time; velocity and
/// acceleration follow from the distance. Requires 0 < t_accel <= T/2.
inline TrapezoidProfile timed_trapezoid(double distance, double duration, double t_accel) {
  if (!(distance >= 0.0)) throw InvalidArgument("trapezoid distance must be non-negative");
  TrapezoidProfile p;
  p.distance = distance;
  if (distance == 0.0) return p;
  if (!(duration > 0.0) || !(t_accel > 0.0) || t_accel > 0.5 * duration * (1.0 + 1e-12)) {
    throw InvalidArgument("timed trapezoid needs 0 < t_accel <= duration / 2");
  }
  p.t_accel = std::min(t_accel, 0.5 * duration);
  p.t_cruise = duration - 2.0 * p.t_accel;
  p.duration = duration;
  p.peak_velocity = distance / (duration - p.t_accel);
  p.acceleration = p.peak_velocity / p.t_accel;
  return p;
}

}  // namespace armsizer::trajectory
