#pragma once

// The rose profile rho(theta) = e^(-1/(1+cos theta)^2) sin^2(tan(theta/2)),
// the level function F(r, theta) = r - rho(theta) whose zero set is the rose,
// and the combinatorics and measure of its petals.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rose_dyn/angle.hpp"
#include "rose_dyn/numeric.hpp"

namespace rose_dyn {

namespace detail {

template <typename Scalar>
struct RoseTrig {
  bool flat = true;         // envelope below the smallest positive magnitude
  Scalar log_envelope{0};   // -1/(1+cos theta)^2
  Scalar c{0};              // 1 + cos theta
  Scalar half_tan{0};       // tan(theta/2) = sin theta / (1 + cos theta)
  Scalar sin_theta{0};
};

template <typename Scalar>
RoseTrig<Scalar> rose_trig(const Scalar& theta) {
  using std::cos;
  using std::sin;
  RoseTrig<Scalar> t;
  const Scalar half_cos = cos(theta / Scalar(2));
  t.c = Scalar(2) * half_cos * half_cos;
  if (t.c == Scalar(0)) {
    return t;
  }
  const Scalar inv_c2 = Scalar(1) / (t.c * t.c);
  if (!(-inv_c2 >= log_smallest_positive<Scalar>())) {
    return t;
  }
  t.flat = false;
  t.log_envelope = -inv_c2;
  t.sin_theta = sin(theta);
  t.half_tan = t.sin_theta / t.c;
  return t;
}

// Bracket of rho' without the envelope:
// -2 sin^2(u) sin(theta)/c^3 + sin(2u)/c.
template <typename Scalar>
Scalar rho_prime_bracket(const RoseTrig<Scalar>& t, const Scalar& s) {
  using std::sin;
  return Scalar(-2) * s * s * t.sin_theta / (t.c * t.c * t.c) +
         sin(Scalar(2) * t.half_tan) / t.c;
}

}  // namespace detail

/// rho(theta) in [0, 1), extended by zero on theta = pi + 2k pi.
template <typename Scalar>
Scalar rho(const BasicAngle<Scalar>& theta) {
  using std::sin;
  const auto t = detail::rose_trig(theta.value);
  if (t.flat) {
    return Scalar(0);
  }
  const Scalar s = sin(t.half_tan);
  return exp_times(t.log_envelope, Scalar(s * s));
}

/// d rho / d theta; flat (exactly zero) wherever rho is flushed.
template <typename Scalar>
Scalar rho_prime(const BasicAngle<Scalar>& theta) {
  using std::sin;
  const auto t = detail::rose_trig(theta.value);
  if (t.flat) {
    return Scalar(0);
  }
  const Scalar s = sin(t.half_tan);
  return exp_times(t.log_envelope, detail::rho_prime_bracket(t, s));
}

/// rho + rho' under a single envelope. This is the polar form of the
/// Cartesian G term.
template <typename Scalar>
Scalar rho_plus_rho_prime(const BasicAngle<Scalar>& theta) {
  using std::sin;
  const auto t = detail::rose_trig(theta.value);
  if (t.flat) {
    return Scalar(0);
  }
  const Scalar s = sin(t.half_tan);
  return exp_times(t.log_envelope,
                   Scalar(s * s + detail::rho_prime_bracket(t, s)));
}

/// Level function F(r, theta) = r - rho(theta). The rose is F = 0,
/// petal interiors are F < 0.
template <typename Scalar>
Scalar rose_level(const Scalar& r, const BasicAngle<Scalar>& theta) {
  if (r < Scalar(0)) {
    throw std::domain_error("rose_level: negative radius");
  }
  return r - rho(theta);
}

// ---------------------------------------------------------------------------
// Petals. Petal n spans theta in (2 atan(n pi), 2 atan((n+1) pi)); petal -n-1
// is the mirror image of petal n.

std::pair<Angle, Angle> petal_bounds(int n);

/// Result of locating an angle among the petals. When on_boundary is set,
/// index is the k with tan(theta/2) = k pi, the endpoint shared by petals
/// k-1 and k.
struct PetalLocation {
  std::int64_t index = 0;
  bool on_boundary = false;

  friend bool operator==(const PetalLocation&, const PetalLocation&) = default;
};

inline constexpr double kPetalBoundaryTolerance = 1e-12;

/// Throws std::domain_error for |theta| >= pi (the accumulation ray) and for
/// non-finite input.
PetalLocation petal_index(Angle theta);

/// Petal area kept in log form: areas past the first two petals are far below
/// the double range (area of petal 2 is about 1e-370), yet every one of them
/// is strictly positive.
struct PetalArea {
  double log_value = 0.0;
  /// Absolute error estimate of the quadrature, in area units. Underflows to
  /// zero together with the area.
  double abs_error = 0.0;

  double value() const { return std::exp(log_value); }

  friend bool operator<(const PetalArea& a, const PetalArea& b) {
    return a.log_value < b.log_value;
  }
};

/// Half the integral of rho^2 over the petal's angular span, computed by
/// adaptive Gauss-Kronrod quadrature. The absolute error bound quad_tol is
/// honored; in addition the scaled integral is resolved to 1e-12 relative
/// so that log_value is meaningful for petals below the double range.
/// Throws QuadratureError when refinement does not converge.
PetalArea petal_area(int n, double quad_tol);

/// Largest profile value on petal n, in log form.
double petal_log_max_radius(int n);

struct PetalDescriptor {
  int index = 0;
  Angle theta_lo;
  Angle theta_hi;
  double max_radius = 0.0;      // 0 when below the double range
  double log_max_radius = 0.0;
  PetalArea area;
};

PetalDescriptor petal_descriptor(int n, double quad_tol);

struct RoseSample {
  Angle theta;
  double r = 0.0;  // rho(theta), so F(r, theta) == 0 exactly
  Vec2<double> xy;
};

/// Samples of petal n, uniform in theta, endpoints included.
std::vector<RoseSample> petal_samples(int n, int pts_per_petal);

/// Ordered samples of petals -n_petals .. n_petals; shared endpoints at the
/// origin appear once.
std::vector<RoseSample> rose_samples(int n_petals, int pts_per_petal);

std::vector<Vec2<double>> rose_polyline(int n_petals, int pts_per_petal);

}  // namespace rose_dyn
