#include "rose_dyn/analytic_orbits.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rose_dyn {

namespace {

constexpr double kScanStep = std::numbers::pi / 64.0;
constexpr double kRootTolerance = 1e-14;

template <typename... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <typename... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Walks from `from` toward `limit` (a petal boundary) in scan-sized strides
// until the closed form turns non-positive, then bisects the bracket.
double scan_for_root(const InitialCondition& ic, double from, double limit) {
  const double direction = limit > from ? 1.0 : -1.0;
  double a = from;
  while (direction * (limit - a) > 0.0) {
    double b = a + direction * kScanStep;
    if (direction * (b - limit) > 0.0) {
      b = limit;
    }
    if (closed_form_r(Angle(b), ic) <= 0.0) {
      // closed_form_r(a) > 0 >= closed_form_r(b)
      for (int i = 0; i < 200 && std::abs(b - a) > kRootTolerance; ++i) {
        const double mid = 0.5 * (a + b);
        if (closed_form_r(Angle(mid), ic) > 0.0) {
          a = mid;
        } else {
          b = mid;
        }
      }
      return 0.5 * (a + b);
    }
    a = b;
  }
  // rho vanishes at the exact boundary, but at its rounded angle it can still
  // exceed |F0| e^(-dtheta) for deep petals. The root then lies within an
  // ulp of the boundary.
  return limit;
}

}  // namespace

InitialCondition InitialCondition::from_polar(double r0, Angle theta0) {
  if (!std::isfinite(r0) || !std::isfinite(theta0.value)) {
    throw std::domain_error("initial condition must be finite");
  }
  if (r0 < 0.0) {
    throw std::domain_error("initial condition: negative radius");
  }
  return InitialCondition{r0, theta0, rose_level(r0, theta0)};
}

std::string_view class_name(const OrbitClass& c) {
  return std::visit(
      Overloaded{
          [](const orbit_class::Equilibrium&) { return std::string_view("Equilibrium"); },
          [](const orbit_class::OnRose&) { return std::string_view("OnRose"); },
          [](const orbit_class::HomoclinicInterior&) {
            return std::string_view("HomoclinicInterior");
          },
          [](const orbit_class::SpiralOntoRose&) { return std::string_view("SpiralOntoRose"); },
      },
      c);
}

double closed_form_r(Angle theta, const InitialCondition& ic) {
  return rho(theta) + ic.F0 * std::exp(-(theta.value - ic.theta0.value));
}

OrbitClass classify(const InitialCondition& ic) {
  if (ic.r0 == 0.0) {
    return orbit_class::Equilibrium{};
  }
  if (std::abs(ic.F0) <= kOnRoseTolerance) {
    const Angle principal = ic.theta0.principal();
    orbit_class::OnRose on_rose;
    if (std::abs(principal.value) < std::numbers::pi) {
      on_rose.petal = petal_index(principal);
    }
    return on_rose;
  }
  if (ic.F0 < 0.0) {
    const auto [lo, hi] = homoclinic_span(ic);
    const auto loc = petal_index(ic.theta0.principal());
    return orbit_class::HomoclinicInterior{loc.index, lo, hi};
  }
  return orbit_class::SpiralOntoRose{};
}

std::pair<Angle, Angle> homoclinic_span(const InitialCondition& ic) {
  if (!(ic.F0 < 0.0) || !(ic.r0 > 0.0)) {
    throw std::domain_error("homoclinic_span: requires F0 < 0 and r0 > 0");
  }
  const Angle principal = ic.theta0.principal();
  const double shift = ic.theta0.value - principal.value;
  // F0 < 0 forces rho(theta0) > 0, so theta0 is strictly inside a petal.
  const PetalLocation loc = petal_index(principal);
  const auto [lo, hi] = petal_bounds(static_cast<int>(loc.index));

  const InitialCondition local{ic.r0, principal, ic.F0};
  const double forward = scan_for_root(local, principal.value, hi.value);
  const double backward = scan_for_root(local, principal.value, lo.value);
  return {Angle(backward + shift), Angle(forward + shift)};
}

}  // namespace rose_dyn
