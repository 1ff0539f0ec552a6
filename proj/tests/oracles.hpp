#pragma once

// Reference computations that share no code with the library: direct long
// double formulas, finite differences, sampling and plain bracketing.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>

namespace oracle {

using real = long double;

inline constexpr real kPi = std::numbers::pi_v<real>;

/// rho(theta) = e^{-1/(1+cos theta)^2} sin^2(tan(theta/2)), straight from the
/// formula. Long double keeps the envelope alive far past the double flush.
inline real rho(real theta) {
  const real c = 1.0L + std::cos(theta);
  if (c == 0.0L) {
    return 0.0L;
  }
  const real s = std::sin(std::tan(theta / 2.0L));
  return std::exp(-1.0L / (c * c)) * s * s;
}

/// Product rule on rho = E S with E' = -2 sin(theta) E / c^3 and
/// S' = sin(2 tan(theta/2)) sec^2(theta/2) / 2.
inline real rho_prime(real theta) {
  const real c = 1.0L + std::cos(theta);
  if (c == 0.0L) {
    return 0.0L;
  }
  const real e = std::exp(-1.0L / (c * c));
  const real u = std::tan(theta / 2.0L);
  const real su = std::sin(u);
  const real sec_half = 1.0L / std::cos(theta / 2.0L);
  const real de = -2.0L * std::sin(theta) / (c * c * c) * e;
  const real ds = 0.5L * std::sin(2.0L * u) * sec_half * sec_half;
  return de * su * su + e * ds;
}

/// Richardson-extrapolated central difference.
inline real derivative(const std::function<real(real)>& f, real x, real h = 1e-4L) {
  auto central = [&](real step) { return (f(x + step) - f(x - step)) / (2.0L * step); };
  return (4.0L * central(h / 2.0L) - central(h)) / 3.0L;
}

/// Relative condition number of rho at theta: |theta| |d log rho / d theta|.
inline real rho_condition(real theta) {
  const real c = 1.0L + std::cos(theta);
  const real u = std::tan(theta / 2.0L);
  const real dlog = -2.0L * std::sin(theta) / (c * c * c) + (1.0L + u * u) / std::tan(u);
  return std::abs(theta * dlog);
}

inline real closed_form_F(real F0, real dtheta) { return F0 * std::exp(-dtheta); }

inline real closed_form_r(real theta, real theta0, real F0) {
  return rho(theta) + closed_form_F(F0, theta - theta0);
}

/// psi(r) = e^{-1/r^2}.
inline real psi(real r) { return r == 0.0L ? 0.0L : std::exp(-1.0L / (r * r)); }

/// The Cartesian field from its polar form (r', theta') = psi (-(r - rho - rho'), 1).
inline void cartesian_field(real x, real y, real& fx, real& fy) {
  const real r = std::hypot(x, y);
  if (r == 0.0L) {
    fx = fy = 0.0L;
    return;
  }
  const real theta = std::atan2(y, x);
  const real p = psi(r);
  const real rdot = -p * (r - rho(theta) - rho_prime(theta));
  const real thdot = p;
  fx = rdot * x / r - y * thdot;
  fy = rdot * y / r + x * thdot;
}

/// Root of f on [a, b] by bisection; f(a) and f(b) must differ in sign.
inline real bisect(const std::function<real(real)>& f, real a, real b, int iters = 200) {
  real fa = f(a);
  for (int i = 0; i < iters; ++i) {
    const real m = 0.5L * (a + b);
    if (m == a || m == b) {
      break;
    }
    const real fm = f(m);
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5L * (a + b);
}

/// Maximizer of a unimodal f on [a, b] by golden-section search.
inline real golden_max(const std::function<real(real)>& f, real a, real b, int iters = 200) {
  const real g = (std::sqrt(5.0L) - 1.0L) / 2.0L;
  real c = b - g * (b - a);
  real d = a + g * (b - a);
  real fc = f(c);
  real fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5L * (a + b);
}

struct MonteCarloEstimate {
  real value = 0.0L;
  real sigma = 0.0L;
};

/// Area of {(r, theta): lo < theta < hi, r < rho(theta)} by hit counting in
/// the sector of radius r_max. Points are drawn uniformly by area.
inline MonteCarloEstimate petal_area_mc(real lo, real hi, real r_max, std::uint64_t samples,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<real> unit(0.0L, 1.0L);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const real theta = lo + (hi - lo) * unit(rng);
    const real r = r_max * std::sqrt(unit(rng));
    if (r < rho(theta)) {
      ++hits;
    }
  }
  const real sector = 0.5L * (hi - lo) * r_max * r_max;
  const real p = static_cast<real>(hits) / static_cast<real>(samples);
  return {sector * p, sector * std::sqrt(p * (1.0L - p) / static_cast<real>(samples))};
}

}  // namespace oracle

// Values computed once with 50-digit arithmetic and frozen here.
namespace frozen {

inline constexpr double rho_half_pi = 0.26048565342283430642693494428761;
inline constexpr double rho_one = 0.17708124298671701678761107423657;
inline constexpr double rho_prime_one = 0.29660697763300577262672159703794;
inline constexpr double rho_prime_half_pi = -0.18645947760640636443181906259146;

inline constexpr double boundary_1 = 2.5252545113578233668886441672114;  // 2 atan(pi)
inline constexpr double boundary_2 = 2.8259302730134755181274258997139;  // 2 atan(2 pi)
inline constexpr double boundary_3 = 2.9301770608288178551087939728889;  // 2 atan(3 pi)

inline constexpr double area_0 = 0.027381148349173535732729969638034;
inline constexpr double log_area_0 = -3.5979005188335706581;
inline constexpr double area_1 = 2.6149598167572702467429334927346e-35;
inline constexpr double log_area_1 = -79.629229523833592116;
inline constexpr double log_area_2 = -850.94971985187110522;
inline constexpr double log_area_3 = -4072.8897177867083874;

inline constexpr double apex_theta_0 = 1.4586873181686910520858691270995;
inline constexpr double apex_rho_0 = 0.27054844394323672556019754008501;
inline constexpr double apex_theta_1 = 2.5353374710807273649;
inline constexpr double log_apex_rho_1 = -37.263722765721436206;
inline constexpr double log_apex_rho_2 = -421.32027330676116221;
inline constexpr double log_apex_rho_3 = -2031.2942097723565241;

// Start point (rho(pi/2)/2, pi/2): a homoclinic loop inside petal 0.
inline constexpr double homoclinic_F0 = -0.13024282671141715321;
inline constexpr double homoclinic_theta_plus = 1.9306048837467278392580917444128;
inline constexpr double homoclinic_theta_minus = 1.1046704544736595021624182699694;

inline constexpr double rho_half_pi_plus_spiral = 0.2606723976960051053083779655811;  // + 0.1 e^{-2 pi}

inline constexpr double cli_F0 = 0.099515031493420666455660582964668;  // 0.36 - rho(1.5708)
inline constexpr double cli_final_F = 2.2600869433901351912e-15;       // cli_F0 e^{-10 pi}

inline constexpr double g_at_02_01 = 0.21763749820914505301658939394539;  // rho + rho' at atan2(0.1, 0.2)

}  // namespace frozen
