#include "rose_dyn/rose_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rose_dyn/quadrature.hpp"

namespace rose_dyn {

namespace {

constexpr double kPi = std::numbers::pi;

// Petal -n-1 mirrors petal n.
int canonical_petal(int n) { return n < 0 ? -n - 1 : n; }

// Root of a strictly decreasing function on (lo, hi) that runs from +inf to
// -inf, by bisection to adjacent doubles.
template <typename F>
double decreasing_root(F&& f, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break;
    }
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// On petal m >= 0 write u = tan(theta/2) = m pi + d with d in (0, pi). Then
// 1 + cos theta = 2/(1+u^2), sin^2(tan(theta/2)) = sin^2 d, and
//   log rho = -(1+u^2)^2/4 + 2 log sin d,
//   area    = int_0^pi exp(-(1+u^2)^2/2) sin^4 d / (1+u^2) dd.
// Working in d keeps sin accurate for petals packed against theta = pi.
struct PetalCoordinates {
  double base;  // m pi
  double u(double d) const { return base + d; }
};

}  // namespace

std::pair<Angle, Angle> petal_bounds(int n) {
  const double lo = 2.0 * std::atan(static_cast<double>(n) * kPi);
  const double hi = 2.0 * std::atan(static_cast<double>(n + 1) * kPi);
  return {Angle(lo), Angle(hi)};
}

PetalLocation petal_index(Angle theta) {
  if (!std::isfinite(theta.value) || !(std::abs(theta.value) < kPi)) {
    throw std::domain_error("petal_index: angle must lie in (-pi, pi)");
  }
  const double t = std::tan(0.5 * theta.value) / kPi;
  const double nearest = std::nearbyint(t);
  if (std::abs(t - nearest) <= kPetalBoundaryTolerance) {
    return {static_cast<std::int64_t>(nearest), true};
  }
  return {static_cast<std::int64_t>(std::floor(t)), false};
}

double petal_log_max_radius(int n) {
  const PetalCoordinates pc{canonical_petal(n) * kPi};
  auto slope = [&](double d) {
    const double u = pc.u(d);
    return -u * (1.0 + u * u) + 2.0 * std::cos(d) / std::sin(d);
  };
  const double d = decreasing_root(slope, 0.0, kPi);
  const double u = pc.u(d);
  const double a = 1.0 + u * u;
  return -0.25 * a * a + 2.0 * std::log(std::sin(d));
}

PetalArea petal_area(int n, double quad_tol) {
  if (!(quad_tol > 0.0)) {
    throw std::invalid_argument("petal_area: quad_tol must be positive");
  }
  const PetalCoordinates pc{canonical_petal(n) * kPi};

  auto slope = [&](double d) {
    const double u = pc.u(d);
    const double a = 1.0 + u * u;
    return -2.0 * u * a + 4.0 * std::cos(d) / std::sin(d) - 2.0 * u / a;
  };
  const double d_peak = decreasing_root(slope, 0.0, kPi);
  const double u_peak = pc.u(d_peak);
  const double a_peak = 1.0 + u_peak * u_peak;
  const double sin_peak = std::sin(d_peak);
  const double log_peak =
      -0.5 * a_peak * a_peak + 4.0 * std::log(sin_peak) - std::log(a_peak);

  // exp(g(d) - g(d_peak)) with the polynomial difference factored so that it
  // keeps full relative accuracy for large u.
  auto scaled = [&](double d) {
    const double s = std::sin(d);
    if (s <= 0.0) {
      return 0.0;
    }
    const double u = pc.u(d);
    const double du2 = (d - d_peak) * (u + u_peak);  // u^2 - u_peak^2
    const double delta = -0.5 * du2 * (2.0 + u * u + u_peak * u_peak) +
                         4.0 * std::log(s / sin_peak) - std::log1p(du2 / a_peak);
    return std::exp(delta);
  };

  const double u2 = u_peak * u_peak;
  const double curvature = 2.0 * (1.0 + 3.0 * u2) + 4.0 / (sin_peak * sin_peak) +
                           2.0 * (1.0 - u2) / (a_peak * a_peak);
  const double width = 1.0 / std::sqrt(curvature);
  std::vector<double> breakpoints{0.0, kPi, d_peak};
  for (int k = 0; k <= 12; ++k) {
    const double offset = width * std::ldexp(1.0, k);
    for (double p : {d_peak - offset, d_peak + offset}) {
      if (p > 0.0 && p < kPi) {
        breakpoints.push_back(p);
      }
    }
  }
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

  QuadratureOptions opts;
  opts.abs_tol = 0.0;
  opts.rel_tol = 1e-12;
  QuadratureResult q = integrate_adaptive(scaled, breakpoints, opts);
  double abs_error = q.abs_error * std::exp(log_peak);
  if (abs_error > quad_tol) {
    opts.abs_tol = quad_tol * std::exp(-log_peak);
    opts.rel_tol = 0.0;
    q = integrate_adaptive(scaled, breakpoints, opts);
    abs_error = q.abs_error * std::exp(log_peak);
  }
  if (!(q.value > 0.0)) {
    throw QuadratureError("petal_area: non-positive scaled integral for petal " +
                          std::to_string(n));
  }
  return PetalArea{log_peak + std::log(q.value), abs_error};
}

PetalDescriptor petal_descriptor(int n, double quad_tol) {
  PetalDescriptor d;
  d.index = n;
  std::tie(d.theta_lo, d.theta_hi) = petal_bounds(n);
  d.log_max_radius = petal_log_max_radius(n);
  d.max_radius = std::exp(d.log_max_radius);
  d.area = petal_area(n, quad_tol);
  return d;
}

std::vector<RoseSample> petal_samples(int n, int pts_per_petal) {
  if (pts_per_petal < 2) {
    throw std::invalid_argument("petal_samples: need at least two points per petal");
  }
  const auto [lo, hi] = petal_bounds(n);
  std::vector<RoseSample> out;
  out.reserve(static_cast<std::size_t>(pts_per_petal));
  for (int j = 0; j < pts_per_petal; ++j) {
    double theta = lo.value + (hi.value - lo.value) * j / (pts_per_petal - 1);
    if (j == pts_per_petal - 1) {
      theta = hi.value;
    }
    RoseSample s;
    s.theta = Angle(theta);
    s.r = rho(s.theta);
    s.xy = Vec2<double>(s.r * std::cos(theta), s.r * std::sin(theta));
    out.push_back(s);
  }
  return out;
}

std::vector<RoseSample> rose_samples(int n_petals, int pts_per_petal) {
  if (n_petals < 1) {
    throw std::invalid_argument("rose_samples: need at least one petal");
  }
  std::vector<RoseSample> out;
  for (int k = -n_petals; k <= n_petals; ++k) {
    auto petal = petal_samples(k, pts_per_petal);
    auto first = petal.begin();
    if (!out.empty()) {
      ++first;
    }
    out.insert(out.end(), first, petal.end());
  }
  return out;
}

std::vector<Vec2<double>> rose_polyline(int n_petals, int pts_per_petal) {
  const auto samples = rose_samples(n_petals, pts_per_petal);
  std::vector<Vec2<double>> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    out.push_back(s.xy);
  }
  return out;
}

}  // namespace rose_dyn
