#pragma once

// Adaptive integration of the rose field in two parameterizations:
//  - integrate_theta: dr/dtheta = -H(r, theta), the primary engine. Its orbits
//    reach the origin at a finite angle.
//  - integrate_time: the smooth Cartesian field in physical time. Progress
//    stalls near the origin because theta' = e^(-1/r^2) underflows below
//    r ~ 0.0366.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rose_dyn/analytic_orbits.hpp"
#include "rose_dyn/vector_field.hpp"

namespace rose_dyn {

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double h_init = 1e-3;
  double h_min = 1e-14;
  double h_max = 0.1;
  double event_r_tol = 1e-12;
  std::int64_t max_steps = 10'000'000;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

enum class Parameterization { Angle, Time };

enum class TerminalKind { RangeEnd, OriginEvent, StepFailure, MaxSteps };

struct Terminal {
  TerminalKind kind = TerminalKind::RangeEnd;
  double param = 0.0;
};

struct OrbitSample {
  double param = 0.0;  // theta or t
  PolarState<double> state;  // theta is unwrapped (continuous along the orbit)
  double F = 0.0;
};

/// Samples are ordered along the integration direction, so param increases
/// for forward runs and decreases for backward angle runs.
struct Orbit {
  std::vector<OrbitSample> samples;
  Parameterization parameterization = Parameterization::Angle;
  Terminal terminal;
};

/// Integrates from ic.theta0 to theta_end (either direction). Every accepted
/// step is recorded; steps are shortened to land exactly on each angle in
/// `stops` that lies inside the range. Crossing event_r_tol from above ends
/// the run with an OriginEvent sample whose r is in [0, event_r_tol].
/// When origin events are possible the run also lands on every petal boundary
/// next to a petal larger than event_r_tol, where r = F < 0 for a homoclinic
/// orbit, so its dip through the origin cannot be stepped over.
/// Spiral orbits (F0 > 0) never reach the origin, so their runs have no
/// origin events; past a few revolutions their r near theta = pi is below
/// double resolution and may carry rounding of either sign.
Orbit integrate_theta(const InitialCondition& ic, Angle theta_end, const IntegratorConfig& cfg,
                      std::span<const double> stops = {});

/// Same right-hand side with `steps` equal fifth-order steps and no control.
Orbit integrate_theta_fixed(const InitialCondition& ic, Angle theta_end, int steps);

Orbit integrate_time(const CartesianState<double>& start, double t_end,
                     const IntegratorConfig& cfg);

struct TimeReconstruction {
  /// Physical time of each sample relative to the first; empty where
  /// e^(1/r^2) leaves the double range.
  std::vector<std::optional<double>> times;
  bool overflowed = false;
};

/// Physical time along an angle-parameterized orbit, t = int e^(1/r^2) dtheta,
/// integrated over a cubic Hermite model of r between samples.
TimeReconstruction reconstruct_time(const Orbit& orbit);

}  // namespace rose_dyn
