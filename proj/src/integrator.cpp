#include "rose_dyn/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "rose_dyn/dormand_prince.hpp"
#include "rose_dyn/quadrature.hpp"

namespace rose_dyn {

namespace {

// dr/dtheta = -(r - rho - rho'). Defined for every r so that trial stages
// overshooting the origin stay evaluable.
double angle_slope(double theta, double r) {
  return -(r - rho_plus_rho_prime(Angle(theta)));
}

OrbitSample angle_sample(double theta, double r) {
  return OrbitSample{theta, PolarState<double>{r, Angle(theta)}, r - rho(Angle(theta))};
}

// Lifted petal boundaries strictly between a and b. On a boundary rho = 0,
// so an orbit with F < 0 has r = F < 0 there: its dip below zero always
// contains the boundary, however narrow the dip. Boundaries whose adjacent
// petals all lie within event_r_tol of the origin are skipped; every sample
// there already counts as reaching it.
std::vector<double> boundary_stops(double a, double b, double event_r_tol) {
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  const double log_tol = std::log(event_r_tol);
  std::vector<double> base;
  for (int n = 0; n == 0 || petal_log_max_radius(n - 1) > log_tol; ++n) {
    const double t = petal_bounds(n).first.value;
    base.push_back(t);
    if (n > 0) {
      base.push_back(-t);
    }
  }
  std::vector<double> out;
  const double two_pi = 2.0 * std::numbers::pi;
  for (double k = std::floor((lo - std::numbers::pi) / two_pi);
       k <= std::ceil((hi + std::numbers::pi) / two_pi); k += 1.0) {
    for (double t : base) {
      const double lifted = t + two_pi * k;
      if (lifted > lo && lifted < hi) {
        out.push_back(lifted);
      }
    }
  }
  return out;
}

}  // namespace

void IntegratorConfig::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(rel_tol) || !positive(abs_tol) || !positive(event_r_tol)) {
    throw std::invalid_argument("integrator tolerances must be positive and finite");
  }
  if (!positive(h_min) || !positive(h_init) || !positive(h_max)) {
    throw std::invalid_argument("integrator step bounds must be positive and finite");
  }
  if (!(h_min <= h_init && h_init <= h_max)) {
    throw std::invalid_argument("integrator step bounds must satisfy h_min <= h_init <= h_max");
  }
  if (max_steps < 1) {
    throw std::invalid_argument("integrator max_steps must be at least 1");
  }
}

Orbit integrate_theta(const InitialCondition& ic, Angle theta_end, const IntegratorConfig& cfg,
                      std::span<const double> stops) {
  cfg.validate();
  const double theta0 = ic.theta0.value;
  if (!std::isfinite(theta_end.value) || theta_end.value == theta0) {
    throw std::invalid_argument("integrate_theta: theta_end must differ from theta0");
  }
  const double dir = theta_end.value > theta0 ? 1.0 : -1.0;
  // A spiral keeps r >= F0 e^(-|theta - theta0|) > 0, so reaching the origin
  // can only be rounding in r once that bound drops below an ulp of rho.
  const bool origin_events = !(ic.F0 > 0.0);

  std::vector<double> candidates(stops.begin(), stops.end());
  if (origin_events) {
    const auto b = boundary_stops(theta0, theta_end.value, cfg.event_r_tol);
    candidates.insert(candidates.end(), b.begin(), b.end());
  }
  std::vector<double> targets;
  for (double s : candidates) {
    if (dir * (s - theta0) > 0.0 && dir * (theta_end.value - s) > 0.0) {
      targets.push_back(s);
    }
  }
  std::sort(targets.begin(), targets.end(),
            [dir](double a, double b) { return dir * a < dir * b; });
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  targets.push_back(theta_end.value);
  std::size_t next_target = 0;

  Orbit orbit;
  orbit.parameterization = Parameterization::Angle;
  double theta = theta0;
  double r = ic.r0;
  orbit.samples.push_back(angle_sample(theta, r));
  if (origin_events && r <= cfg.event_r_tol) {
    orbit.terminal = {TerminalKind::OriginEvent, theta};
    return orbit;
  }

  double h = dir * std::min(cfg.h_init, cfg.h_max);
  double k1 = angle_slope(theta, r);
  std::int64_t steps = 0;
  while (true) {
    if (steps >= cfg.max_steps) {
      orbit.terminal = {TerminalKind::MaxSteps, theta};
      return orbit;
    }
    const double target = targets[next_target];
    const bool landing = dir * (theta + h - target) >= 0.0;
    const double h_try = landing ? target - theta : h;

    const auto step = dormand_prince_step<double>(angle_slope, theta, r, k1, h_try);
    const double err = error_norm(step.error, r, step.y, cfg.abs_tol, cfg.rel_tol);
    if (err <= 1.0 && std::isfinite(step.y)) {
      if (origin_events && step.y < cfg.event_r_tol) {
        // Shrink the step until the end point sits in [0, event_r_tol].
        double lo = 0.0;
        double hi = h_try;
        double r_hi = step.y;
        for (int i = 0; i < 200 && r_hi < 0.0; ++i) {
          const double mid = 0.5 * (lo + hi);
          if (mid == lo || mid == hi) {
            break;
          }
          const double r_mid = dormand_prince_step<double>(angle_slope, theta, r, k1, mid).y;
          if (r_mid < cfg.event_r_tol) {
            hi = mid;
            r_hi = r_mid;
          } else {
            lo = mid;
          }
        }
        orbit.samples.push_back(angle_sample(theta + hi, r_hi));
        orbit.terminal = {TerminalKind::OriginEvent, theta + hi};
        return orbit;
      }
      theta = landing ? target : theta + h_try;
      r = step.y;
      k1 = step.k_last;
      ++steps;
      orbit.samples.push_back(angle_sample(theta, r));
      if (landing) {
        if (++next_target == targets.size()) {
          orbit.terminal = {TerminalKind::RangeEnd, theta};
          return orbit;
        }
      }
      h = h_try * step_factor(err);
    } else {
      if (std::abs(h_try) <= cfg.h_min) {
        orbit.terminal = {TerminalKind::StepFailure, theta};
        return orbit;
      }
      h = h_try * std::min(1.0, step_factor(std::isfinite(err) ? err : 1e10));
    }
    h = dir * std::clamp(std::abs(h), cfg.h_min, cfg.h_max);
  }
}

Orbit integrate_theta_fixed(const InitialCondition& ic, Angle theta_end, int steps) {
  if (steps < 1) {
    throw std::invalid_argument("integrate_theta_fixed: steps must be positive");
  }
  const double theta0 = ic.theta0.value;
  const double h = (theta_end.value - theta0) / steps;
  Orbit orbit;
  orbit.parameterization = Parameterization::Angle;
  double r = ic.r0;
  double k1 = angle_slope(theta0, r);
  orbit.samples.push_back(angle_sample(theta0, r));
  for (int i = 0; i < steps; ++i) {
    const double theta = theta0 + i * h;
    const auto step = dormand_prince_step<double>(angle_slope, theta, r, k1, h);
    r = step.y;
    k1 = step.k_last;
    const double next = i + 1 == steps ? theta_end.value : theta0 + (i + 1) * h;
    orbit.samples.push_back(angle_sample(next, r));
  }
  orbit.terminal = {TerminalKind::RangeEnd, theta_end.value};
  return orbit;
}

Orbit integrate_time(const CartesianState<double>& start, double t_end,
                     const IntegratorConfig& cfg) {
  cfg.validate();
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw std::invalid_argument("integrate_time: t_end must be positive and finite");
  }
  if (!start.allFinite()) {
    throw std::invalid_argument("integrate_time: start must be finite");
  }
  using V = Vec2<double>;
  auto rhs = [](double, const V& y) -> V { return cartesian_field(y).value; };

  Orbit orbit;
  orbit.parameterization = Parameterization::Time;
  double theta_unwrapped = std::atan2(start[1], start[0]);
  auto record = [&](double t, const V& y) {
    const double r = std::hypot(y[0], y[1]);
    if (r > 0.0) {
      const double raw = std::atan2(y[1], y[0]);
      theta_unwrapped += std::remainder(raw - theta_unwrapped, 2.0 * std::numbers::pi);
    }
    const Angle theta(theta_unwrapped);
    orbit.samples.push_back(OrbitSample{t, PolarState<double>{r, theta}, r - rho(theta)});
    return r;
  };

  double t = 0.0;
  V y = start;
  const double r_start = record(t, y);
  if (r_start == 0.0) {
    // The origin is an equilibrium: the orbit is constant.
    record(t_end, y);
    orbit.terminal = {TerminalKind::RangeEnd, t_end};
    return orbit;
  }
  if (r_start <= cfg.event_r_tol) {
    orbit.terminal = {TerminalKind::OriginEvent, t};
    return orbit;
  }

  double h = std::min(cfg.h_init, cfg.h_max);
  V k1 = rhs(t, y);
  std::int64_t steps = 0;
  while (t < t_end) {
    if (steps >= cfg.max_steps) {
      orbit.terminal = {TerminalKind::MaxSteps, t};
      return orbit;
    }
    const bool landing = t + h >= t_end;
    const double h_try = landing ? t_end - t : h;
    const auto step = dormand_prince_step<V>(rhs, t, y, k1, h_try);
    const double err = error_norm(step.error, y, step.y, cfg.abs_tol, cfg.rel_tol);
    if (err <= 1.0 && step.y.allFinite()) {
      t = landing ? t_end : t + h_try;
      y = step.y;
      k1 = step.k_last;
      ++steps;
      if (record(t, y) < cfg.event_r_tol) {
        orbit.terminal = {TerminalKind::OriginEvent, t};
        return orbit;
      }
      h = h_try * step_factor(err);
    } else {
      if (h_try <= cfg.h_min) {
        orbit.terminal = {TerminalKind::StepFailure, t};
        return orbit;
      }
      h = h_try * std::min(1.0, step_factor(std::isfinite(err) ? err : 1e10));
    }
    h = std::clamp(h, cfg.h_min, cfg.h_max);
  }
  orbit.terminal = {TerminalKind::RangeEnd, t_end};
  return orbit;
}

TimeReconstruction reconstruct_time(const Orbit& orbit) {
  if (orbit.parameterization != Parameterization::Angle) {
    throw std::invalid_argument("reconstruct_time: orbit must be angle-parameterized");
  }
  TimeReconstruction out;
  out.times.resize(orbit.samples.size());
  if (orbit.samples.empty()) {
    return out;
  }
  // e^(1/r^2) is finite only for 1/r^2 below log(max double) ~ 709.78.
  const double max_exponent = log_largest<double>();
  auto representable = [&](double r) { return r > 0.0 && 1.0 / (r * r) < max_exponent; };

  double t = 0.0;
  if (!representable(orbit.samples.front().state.r)) {
    out.overflowed = true;
    return out;
  }
  out.times[0] = t;
  for (std::size_t k = 0; k + 1 < orbit.samples.size(); ++k) {
    const auto& a = orbit.samples[k];
    const auto& b = orbit.samples[k + 1];
    if (!representable(b.state.r)) {
      out.overflowed = true;
      return out;
    }
    const double theta_a = a.state.theta.value;
    const double span = b.state.theta.value - theta_a;
    const double ra = a.state.r;
    const double rb = b.state.r;
    const double ma = span * angle_slope(theta_a, ra);
    const double mb = span * angle_slope(b.state.theta.value, rb);
    auto integrand = [&](double s) {
      const double s2 = s * s;
      const double s3 = s2 * s;
      const double r = (2 * s3 - 3 * s2 + 1) * ra + (s3 - 2 * s2 + s) * ma +
                       (-2 * s3 + 3 * s2) * rb + (s3 - s2) * mb;
      return std::exp(1.0 / (r * r));
    };
    QuadratureOptions opts;
    opts.abs_tol = 0.0;
    opts.rel_tol = 1e-10;
    try {
      t += span * integrate_adaptive(integrand, 0.0, 1.0, opts).value;
    } catch (const QuadratureError&) {
      out.overflowed = true;
      return out;
    }
    if (!std::isfinite(t)) {
      out.overflowed = true;
      return out;
    }
    out.times[k + 1] = t;
  }
  return out;
}

}  // namespace rose_dyn
