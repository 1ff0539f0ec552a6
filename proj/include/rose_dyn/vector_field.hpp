#pragma once

// The regularized planar field in polar and Cartesian charts.
//
//   polar:      r' = -psi(r) H(r, theta),   theta' = psi(r)
//   Cartesian:  x' = -psi(r) (y + x - (x/r) G(x, y))
//               y' = -psi(r) (y - x - (y/r) G(x, y))
//
// with psi(r) = e^(-1/r^2), H = r - rho - rho' and G = rho + rho' written in
// Cartesian variables. Every exponential-times-rational product goes through
// exp_times so the flat limits evaluate to exact zeros instead of 0*inf.

#include <cmath>
#include <stdexcept>

#include "rose_dyn/angle.hpp"
#include "rose_dyn/numeric.hpp"
#include "rose_dyn/rose_geometry.hpp"

namespace rose_dyn {

template <typename Scalar>
struct PolarState {
  Scalar r{0};
  BasicAngle<Scalar> theta;
};

template <typename Scalar>
using CartesianState = Vec2<Scalar>;

enum class Chart { Polar, Cartesian };

template <typename Scalar>
struct FieldVector {
  Vec2<Scalar> value = Vec2<Scalar>::Zero();
  Chart chart = Chart::Cartesian;

  const Scalar& first() const { return value[0]; }
  const Scalar& second() const { return value[1]; }
};

template <typename Scalar>
CartesianState<Scalar> to_cartesian(const PolarState<Scalar>& s) {
  using std::cos;
  using std::sin;
  return CartesianState<Scalar>(s.r * cos(s.theta.value), s.r * sin(s.theta.value));
}

template <typename Scalar>
PolarState<Scalar> to_polar(const CartesianState<Scalar>& s) {
  using std::atan2;
  using std::hypot;
  return PolarState<Scalar>{hypot(s[0], s[1]), BasicAngle<Scalar>(atan2(s[1], s[0]))};
}

/// psi(r) = e^(-1/r^2), exactly zero at r = 0 and below the underflow radius
/// (about 0.0366 for double).
template <typename Scalar>
Scalar psi(const Scalar& r) {
  using std::exp;
  if (r < Scalar(0)) {
    throw std::domain_error("psi: negative radius");
  }
  if (r == Scalar(0)) {
    return Scalar(0);
  }
  const Scalar inv = Scalar(1) / (r * r);
  if (!(-inv >= log_smallest_positive<Scalar>())) {
    return Scalar(0);
  }
  return exp(-inv);
}

/// H(r, theta) = r - rho(theta) - rho'(theta); equals r on the flat rays.
template <typename Scalar>
Scalar field_h(const Scalar& r, const BasicAngle<Scalar>& theta) {
  if (r < Scalar(0)) {
    throw std::domain_error("field_h: negative radius");
  }
  return r - rho_plus_rho_prime(theta);
}

template <typename Scalar>
FieldVector<Scalar> polar_field(const PolarState<Scalar>& s) {
  const Scalar p = psi(s.r);
  FieldVector<Scalar> v;
  v.chart = Chart::Polar;
  if (p == Scalar(0)) {
    return v;
  }
  v.value = Vec2<Scalar>(-p * field_h(s.r, s.theta), p);
  return v;
}

/// G(x, y): rho + rho' in Cartesian variables. Zero on the closed negative
/// x-axis (origin included) and wherever the envelope underflows.
template <typename Scalar>
Scalar field_g(const CartesianState<Scalar>& s) {
  using std::hypot;
  using std::sin;
  const Scalar& x = s[0];
  const Scalar& y = s[1];
  if (y == Scalar(0) && !(x > Scalar(0))) {
    return Scalar(0);
  }
  const Scalar r = hypot(x, y);
  // r + x = r (1 + cos theta); for x < 0 use y^2/(r - x) to avoid cancellation.
  const Scalar r_plus_x = x >= Scalar(0) ? Scalar(r + x) : Scalar(y * y / (r - x));
  if (r_plus_x == Scalar(0)) {
    return Scalar(0);
  }
  const Scalar q = r / r_plus_x;  // 1/(1 + cos theta)
  const Scalar log_envelope = -q * q;
  if (!(log_envelope >= log_smallest_positive<Scalar>())) {
    return Scalar(0);
  }
  const Scalar half_tan = y / r_plus_x;
  const Scalar s1 = sin(half_tan);
  const Scalar s2 = s1 * s1;
  // 2 y r^2 sin^2 / (r+x)^3 written as 2 sin^2 (y/r) q^3.
  const Scalar bracket =
      s2 - Scalar(2) * s2 * (y / r) * q * q * q + q * sin(Scalar(2) * half_tan);
  return exp_times(log_envelope, bracket);
}

template <typename Scalar>
FieldVector<Scalar> cartesian_field(const CartesianState<Scalar>& s) {
  using std::hypot;
  FieldVector<Scalar> v;
  v.chart = Chart::Cartesian;
  const Scalar r = hypot(s[0], s[1]);
  const Scalar p = psi(r);
  if (p == Scalar(0)) {
    return v;
  }
  const Scalar g_over_r = field_g(s) / r;
  const Scalar& x = s[0];
  const Scalar& y = s[1];
  v.value = Vec2<Scalar>(-p * (y + x - x * g_over_r), -p * (y - x - y * g_over_r));
  return v;
}

/// Polar field components (r', theta') at s expressed as (x', y').
template <typename Scalar>
FieldVector<Scalar> to_cartesian(const FieldVector<Scalar>& v, const PolarState<Scalar>& s) {
  using std::cos;
  using std::sin;
  if (v.chart == Chart::Cartesian) {
    return v;
  }
  const Scalar c = cos(s.theta.value);
  const Scalar sn = sin(s.theta.value);
  const Scalar r_dot = v.first();
  const Scalar r_theta_dot = s.r * v.second();
  FieldVector<Scalar> out;
  out.chart = Chart::Cartesian;
  out.value = Vec2<Scalar>(r_dot * c - r_theta_dot * sn, r_dot * sn + r_theta_dot * c);
  return out;
}

/// Slope dr/dtheta = -H(r, theta) of the de-regularized system, whose orbits
/// coincide with those of the regularized one away from the origin.
template <typename Scalar>
Scalar direction_field(const Scalar& r, const BasicAngle<Scalar>& theta) {
  return -field_h(r, theta);
}

}  // namespace rose_dyn
