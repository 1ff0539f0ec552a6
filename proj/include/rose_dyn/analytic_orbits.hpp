#pragma once

// Closed-form orbits of the de-regularized system. With theta as the
// parameter the level function obeys dF/dtheta = -F, so every orbit is
//
//   r(theta) = rho(theta) + F0 e^(-(theta - theta0)).
//
// The regularization only rescales time, hence these curves are also the
// orbits of the smooth field.

#include <optional>
#include <string_view>
#include <utility>
#include <variant>

#include "rose_dyn/angle.hpp"
#include "rose_dyn/rose_geometry.hpp"

namespace rose_dyn {

struct InitialCondition {
  double r0 = 0.0;
  Angle theta0;
  double F0 = 0.0;  // F(r0, theta0)

  /// Throws std::domain_error for r0 < 0 or non-finite input.
  static InitialCondition from_polar(double r0, Angle theta0);
};

inline constexpr double kOnRoseTolerance = 1e-14;

namespace orbit_class {

struct Equilibrium {};

struct OnRose {
  /// Empty on the accumulation ray theta = pi, which belongs to no petal.
  std::optional<PetalLocation> petal;
};

struct HomoclinicInterior {
  std::int64_t petal = 0;
  Angle theta_minus;
  Angle theta_plus;
};

struct SpiralOntoRose {};

}  // namespace orbit_class

using OrbitClass = std::variant<orbit_class::Equilibrium, orbit_class::OnRose,
                                orbit_class::HomoclinicInterior,
                                orbit_class::SpiralOntoRose>;

std::string_view class_name(const OrbitClass& c);

double closed_form_r(Angle theta, const InitialCondition& ic);

/// Trichotomy of the forward orbit through ic, plus the equilibrium itself.
OrbitClass classify(const InitialCondition& ic);

/// Nearest roots of closed_form_r on either side of theta0 for an orbit
/// inside a petal. Requires F0 < 0 and r0 > 0; throws std::domain_error
/// otherwise.
std::pair<Angle, Angle> homoclinic_span(const InitialCondition& ic);

}  // namespace rose_dyn
