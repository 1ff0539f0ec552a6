#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rose_dyn/analytic_orbits.hpp"
#include "rose_dyn/vector_field.hpp"

using namespace rose_dyn;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kPi = std::numbers::pi;

// A start point strictly inside petal n at a fraction of the local radius.
InitialCondition inside_petal(int n, double where, double depth) {
  const auto [lo, hi] = petal_bounds(n);
  const double theta = lo.value + where * (hi.value - lo.value);
  return InitialCondition::from_polar(depth * rho(Angle(theta)), Angle(theta));
}

}  // namespace

TEST_CASE("initial conditions carry the rose level", "[analytic_orbits]") {
  const auto ic = InitialCondition::from_polar(1.0, Angle(kPi / 2));
  CHECK_THAT(ic.F0, WithinRel(1.0 - frozen::rho_half_pi, 1e-15));
  CHECK(ic.r0 == 1.0);
  CHECK_THROWS_AS(InitialCondition::from_polar(-0.1, Angle(0.0)), std::domain_error);
  CHECK_THROWS_AS(InitialCondition::from_polar(std::numeric_limits<double>::infinity(), Angle(0.0)),
                  std::domain_error);
  CHECK_THROWS_AS(
      InitialCondition::from_polar(0.1, Angle(std::numeric_limits<double>::quiet_NaN())),
      std::domain_error);
}

TEST_CASE("classification examples", "[analytic_orbits]") {
  CHECK(class_name(classify(InitialCondition::from_polar(0.0, Angle(1.0)))) == "Equilibrium");
  CHECK(class_name(classify(InitialCondition::from_polar(1.0, Angle(0.0)))) == "SpiralOntoRose");

  const auto on = classify(InitialCondition::from_polar(rho(Angle(1.0)), Angle(1.0)));
  REQUIRE(std::holds_alternative<orbit_class::OnRose>(on));
  REQUIRE(std::get<orbit_class::OnRose>(on).petal.has_value());
  CHECK(*std::get<orbit_class::OnRose>(on).petal == PetalLocation{0, false});

  const auto boundary = classify(InitialCondition::from_polar(1e-16, Angle(0.0)));
  REQUIRE(std::holds_alternative<orbit_class::OnRose>(boundary));
  CHECK(*std::get<orbit_class::OnRose>(boundary).petal == PetalLocation{0, true});

  const auto ray = classify(InitialCondition::from_polar(1e-15, Angle(kPi)));
  REQUIRE(std::holds_alternative<orbit_class::OnRose>(ray));
  CHECK_FALSE(std::get<orbit_class::OnRose>(ray).petal.has_value());

  const auto h = classify(InitialCondition::from_polar(0.5 * rho(Angle(kPi / 2)), Angle(kPi / 2)));
  REQUIRE(std::holds_alternative<orbit_class::HomoclinicInterior>(h));
  const auto& loop = std::get<orbit_class::HomoclinicInterior>(h);
  CHECK(loop.petal == 0);
  CHECK_THAT(loop.theta_minus.value, WithinAbs(frozen::homoclinic_theta_minus, 1e-12));
  CHECK_THAT(loop.theta_plus.value, WithinAbs(frozen::homoclinic_theta_plus, 1e-12));
}

TEST_CASE("every start point gets exactly the tag its level dictates",
          "[analytic_orbits][property]") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> radius(0.0, 1.5);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  for (int i = 0; i < 3000; ++i) {
    const auto ic = InitialCondition::from_polar(radius(rng), Angle(angle(rng)));
    const auto c = classify(ic);
    INFO("r0 = " << ic.r0 << ", theta0 = " << ic.theta0.value);
    if (ic.r0 == 0.0) {
      CHECK(std::holds_alternative<orbit_class::Equilibrium>(c));
    } else if (std::abs(ic.F0) <= kOnRoseTolerance) {
      CHECK(std::holds_alternative<orbit_class::OnRose>(c));
    } else if (ic.F0 < 0.0) {
      REQUIRE(std::holds_alternative<orbit_class::HomoclinicInterior>(c));
      const auto& h = std::get<orbit_class::HomoclinicInterior>(c);
      CHECK(h.theta_minus.value < ic.theta0.value);
      CHECK(ic.theta0.value < h.theta_plus.value);
      CHECK(h.petal == petal_index(ic.theta0).index);
    } else {
      CHECK(std::holds_alternative<orbit_class::SpiralOntoRose>(c));
    }
  }
}

TEST_CASE("closed form obeys the decay law and the direction field",
          "[analytic_orbits][property]") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> radius(0.0, 1.0);
  std::uniform_real_distribution<double> angle(-2.4, 2.4);
  std::uniform_real_distribution<double> offset(-0.5, 3.0);
  for (int i = 0; i < 500; ++i) {
    const auto ic = InitialCondition::from_polar(radius(rng), Angle(angle(rng)));
    const double t = ic.theta0.value + offset(rng);
    const double r = closed_form_r(Angle(t), ic);
    CHECK_THAT(r - rho(Angle(t)), WithinAbs(ic.F0 * std::exp(-(t - ic.theta0.value)), 1e-15));

    const auto r_of = [&](oracle::real th) {
      return oracle::closed_form_r(th, ic.theta0.value, ic.F0);
    };
    const double slope = static_cast<double>(oracle::derivative(r_of, t, 1e-3L));
    // dr/dtheta = -(r - rho - rho'), valid for the closed form at any sign of r.
    const double expected = -(r - rho_plus_rho_prime(Angle(t)));
    INFO("theta = " << t);
    CHECK_THAT(slope, WithinAbs(expected, 1e-9));
  }
  const auto ic = InitialCondition::from_polar(0.4, Angle(1.0));
  CHECK(closed_form_r(Angle(1.0), ic) == 0.4);
}

TEST_CASE("homoclinic roots agree with a long double bisection oracle",
          "[analytic_orbits][property]") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> where(0.15, 0.85);
  std::uniform_real_distribution<double> depth(0.05, 0.95);
  for (int n : {-3, -2, -1, 0, 1, 2}) {
    const auto [lo, hi] = petal_bounds(n);
    int checked = 0;
    for (int i = 0; i < 100; ++i) {
      const auto ic = inside_petal(n, where(rng), depth(rng));
      // Subnormal radii keep only a few significant bits, so the double
      // closed form cannot match the long double one there.
      if (!(ic.F0 < 0.0) || !(ic.r0 > 1e4 * std::numeric_limits<double>::min())) {
        continue;
      }
      ++checked;
      const auto [minus, plus] = homoclinic_span(ic);
      INFO("petal " << n << ", theta0 = " << ic.theta0.value);
      CHECK(lo.value <= minus.value);
      CHECK(minus.value < ic.theta0.value);
      CHECK(ic.theta0.value < plus.value);
      CHECK(plus.value <= hi.value);

      const auto r_of = [&](oracle::real th) {
        return oracle::closed_form_r(th, ic.theta0.value, ic.F0);
      };
      // Sign changes found by stepping outward from theta0.
      auto outward_root = [&](double limit) {
        const double step = (limit - ic.theta0.value) / 4096.0;
        double a = ic.theta0.value;
        for (int k = 1; k <= 4096; ++k) {
          const double b = k == 4096 ? limit : ic.theta0.value + k * step;
          if (r_of(b) <= 0) {
            return static_cast<double>(oracle::bisect(r_of, a, b));
          }
          a = b;
        }
        return limit;
      };
      CHECK_THAT(plus.value, WithinAbs(outward_root(hi.value), 1e-12));
      CHECK_THAT(minus.value, WithinAbs(outward_root(lo.value), 1e-12));
    }
    CHECK(checked >= 10);
  }
}

TEST_CASE("homoclinic span follows the lifted angle", "[analytic_orbits]") {
  const double r0 = 0.5 * frozen::rho_half_pi;
  const auto base = homoclinic_span(InitialCondition::from_polar(r0, Angle(kPi / 2)));
  const auto lifted =
      homoclinic_span(InitialCondition::from_polar(r0, Angle(kPi / 2 + 4 * kPi)));
  CHECK_THAT(lifted.first.value - 4 * kPi, WithinAbs(base.first.value, 1e-12));
  CHECK_THAT(lifted.second.value - 4 * kPi, WithinAbs(base.second.value, 1e-12));
  CHECK_THROWS_AS(homoclinic_span(InitialCondition::from_polar(1.0, Angle(1.0))),
                  std::domain_error);
  CHECK_THROWS_AS(homoclinic_span(InitialCondition::from_polar(0.0, Angle(1.0))),
                  std::domain_error);
}
