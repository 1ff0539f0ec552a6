#include "rose_dyn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>

namespace rose_dyn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double revolution_sup(const Orbit& orbit) {
  double sup = 0.0;
  for (const auto& s : orbit.samples) {
    sup = std::max(sup, std::abs(s.F));
  }
  return sup;
}

double point_segment_distance(const Vec2<double>& p, const Vec2<double>& a,
                              const Vec2<double>& b) {
  const Vec2<double> ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

}  // namespace

double distance_to_rose(const PolarState<double>& s) { return std::abs(rose_level(s.r, s.theta)); }

double distance_to_polyline(const Vec2<double>& p, std::span<const Vec2<double>> polyline) {
  if (polyline.empty()) {
    return std::numeric_limits<double>::infinity();
  }
  if (polyline.size() == 1) {
    return (p - polyline.front()).norm();
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    best = std::min(best, point_segment_distance(p, polyline[i], polyline[i + 1]));
  }
  return best;
}

// ---------------------------------------------------------------------------

OmegaEstimate assess_omega(std::span<const Orbit> revolutions, double epsilon,
                           int n_petals_tracked, const OmegaOptions& options) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("assess_omega: epsilon must be positive");
  }
  OmegaEstimate est;
  est.epsilon = epsilon;
  bool reached = false;
  for (const auto& rev : revolutions) {
    est.revolution_sups.push_back(revolution_sup(rev));
  }
  for (std::size_t k = 0; k < est.revolution_sups.size(); ++k) {
    if (est.revolution_sups[k] < epsilon) {
      reached = true;
      est.revolutions_used = static_cast<int>(k);
      est.achieved_sup = est.revolution_sups[k];
      break;
    }
  }
  if (!reached) {
    est.revolutions_used = static_cast<int>(est.revolution_sups.size());
    est.achieved_sup = est.revolution_sups.empty() ? std::numeric_limits<double>::infinity()
                                                   : est.revolution_sups.back();
  }

  bool all_close = true;
  const double log_unresolvable = std::log(kUnresolvableRadius);
  for (int n = -n_petals_tracked; n <= n_petals_tracked; ++n) {
    if (petal_log_max_radius(n) < log_unresolvable) {
      est.unresolvable_petals.push_back(n);
      continue;
    }
    const auto [lo, hi] = petal_bounds(n);
    std::vector<Vec2<double>> polyline;
    for (const auto& s : petal_samples(n, options.polyline_points)) {
      polyline.push_back(s.xy);
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& rev : revolutions) {
      for (const auto& s : rev.samples) {
        const double theta = s.state.theta.principal().value;
        if (theta < lo.value || theta > hi.value) {
          continue;
        }
        best = std::min(best, distance_to_polyline(to_cartesian(s.state), polyline));
      }
    }
    est.per_petal_closest_approach[n] = best;
    all_close = all_close && best <= epsilon;
  }
  est.converged = reached && all_close;
  return est;
}

OmegaEstimate omega_estimate(const InitialCondition& ic, double epsilon, int n_petals_tracked,
                             const IntegratorConfig& cfg, const OmegaOptions& options) {
  if (!(ic.F0 > 0.0)) {
    throw std::invalid_argument("omega_estimate: requires F0 > 0");
  }
  if (!(epsilon > 0.0) || n_petals_tracked < 0 || options.max_revolutions < 1) {
    throw std::invalid_argument("omega_estimate: invalid epsilon, petal count or revolution cap");
  }
  // Keep several samples inside every tracked petal.
  IntegratorConfig local = cfg;
  const double log_unresolvable = std::log(kUnresolvableRadius);
  for (int n = -n_petals_tracked; n <= n_petals_tracked; ++n) {
    if (petal_log_max_radius(n) >= log_unresolvable) {
      const auto [lo, hi] = petal_bounds(n);
      local.h_max = std::min(local.h_max, 0.25 * (hi.value - lo.value));
    }
  }
  local.h_init = std::min(local.h_init, local.h_max);
  local.h_min = std::min(local.h_min, local.h_init);

  std::vector<Orbit> revolutions;
  InitialCondition start = ic;
  for (int k = 0; k < options.max_revolutions; ++k) {
    Orbit rev = integrate_theta(start, Angle(start.theta0.value + kTwoPi), local);
    const bool complete = rev.terminal.kind == TerminalKind::RangeEnd;
    const double sup = revolution_sup(rev);
    const OrbitSample last = rev.samples.back();
    revolutions.push_back(std::move(rev));
    if (!complete) {
      throw std::runtime_error("omega_estimate: integration stopped before completing revolution " +
                               std::to_string(k));
    }
    if (sup < epsilon) {
      break;
    }
    if (!(last.F > 0.0)) {
      // The gap has sunk below the resolution of r; more turns add nothing.
      break;
    }
    start = InitialCondition{last.state.r, last.state.theta, last.F};
  }
  return assess_omega(revolutions, epsilon, n_petals_tracked, options);
}

// ---------------------------------------------------------------------------

int petal_by_rank(int k) {
  if (k < 0) {
    throw std::invalid_argument("petal_by_rank: negative rank");
  }
  return k % 2 == 0 ? k / 2 : -(k + 1) / 2;
}

AreaBucketReport petal_area_buckets(int n_petals, double domain_area, double quad_tol) {
  if (n_petals < 1 || !(domain_area > 0.0) || !(quad_tol > 0.0)) {
    throw std::invalid_argument("petal_area_buckets: invalid arguments");
  }
  AreaBucketReport report;
  report.domain_area = domain_area;
  const double log_domain = std::log(domain_area);
  // 2^53: beyond this floor(D/area) is no longer an exact double integer.
  const double log_exact_limit = 53.0 * std::numbers::ln2;

  std::map<std::pair<std::uint64_t, double>, AreaBucket> buckets;
  for (int k = 0; k < n_petals; ++k) {
    const int n = petal_by_rank(k);
    const PetalArea area = petal_area(n, quad_tol);
    report.petal_areas[n] = area;
    report.area_sum += area.value();

    const double log_ratio = log_domain - area.log_value;
    if (log_ratio < 0.0) {
      throw MeasureBoundViolation("petal " + std::to_string(n) + " exceeds the domain area");
    }
    AreaBucket key;
    if (log_ratio < log_exact_limit) {
      const double a = area.value();
      double band = std::floor(domain_area / a);
      if (band < 1.0) {
        band = 1.0;
      }
      // Settle rounding at the band edges: D/(band+1) < a <= D/band.
      while (band > 1.0 && a > domain_area / band) {
        band -= 1.0;
      }
      while (a <= domain_area / (band + 1.0)) {
        band += 1.0;
      }
      key.index = static_cast<std::uint64_t>(band);
      key.log_index = std::log(band);
    } else {
      key.log_index = log_ratio;
    }
    const auto map_key = std::make_pair(key.index.value_or(0), key.index ? 0.0 : key.log_index);
    auto [it, inserted] = buckets.try_emplace(map_key, key);
    it->second.petals.push_back(n);
  }

  if (report.area_sum > domain_area) {
    throw MeasureBoundViolation("petal areas sum to " + std::to_string(report.area_sum) +
                                ", more than the domain area");
  }
  for (auto& [unused, bucket] : buckets) {
    if (bucket.index && bucket.petals.size() > *bucket.index) {
      throw MeasureBoundViolation("band " + std::to_string(*bucket.index) + " holds " +
                                  std::to_string(bucket.petals.size()) + " petals");
    }
    report.buckets.push_back(std::move(bucket));
  }
  std::sort(report.buckets.begin(), report.buckets.end(),
            [](const AreaBucket& a, const AreaBucket& b) { return a.log_index < b.log_index; });
  return report;
}

// ---------------------------------------------------------------------------

double flat_ratio_log(double x, double y, int power) {
  const double r = std::hypot(x, y);
  if (r == 0.0) {
    return -std::numeric_limits<double>::infinity();
  }
  // log(r + x), using r + x = y^2/(r - x) on the left half-plane.
  double log_r_plus_x;
  if (x >= 0.0) {
    log_r_plus_x = std::log(r + x);
  } else {
    if (y == 0.0) {
      return -std::numeric_limits<double>::infinity();
    }
    log_r_plus_x = 2.0 * std::log(std::abs(y)) - std::log(r - x);
  }
  const double log_q = std::log(r) - log_r_plus_x;
  const double q2 = std::exp(2.0 * log_q);
  return -1.0 / (r * r) - q2 - power * log_r_plus_x;
}

SmoothnessReport smoothness_audit(double x0, int order, std::span<const double> h_values) {
  using Quad = boost::multiprecision::cpp_bin_float_quad;
  if (!std::isfinite(x0) || x0 > 0.0) {
    throw std::invalid_argument("smoothness_audit: x0 must be finite and <= 0");
  }
  if (order < 0 || order > 3) {
    throw std::invalid_argument("smoothness_audit: order must be 0, 1, 2 or 3");
  }
  if (h_values.empty()) {
    throw std::invalid_argument("smoothness_audit: no step sizes");
  }
  for (std::size_t i = 0; i < h_values.size(); ++i) {
    if (!(h_values[i] > 0.0) || (i > 0 && !(h_values[i] < h_values[i - 1]))) {
      throw std::invalid_argument("smoothness_audit: step sizes must be positive and decreasing");
    }
  }

  const Quad x(x0);
  auto field = [&](const Quad& y) -> Vec2<Quad> {
    const Vec2<Quad> v = cartesian_field<Quad>(Vec2<Quad>(x, y)).value;
    if (!isfinite(v[0]) || !isfinite(v[1])) {
      throw std::runtime_error("smoothness_audit: non-finite field value at x = " +
                               std::to_string(x0) + ", y = " + y.str());
    }
    return v;
  };
  auto stencil = [&](const Quad& h) -> Vec2<Quad> {
    switch (order) {
      case 0:
        return (field(h) + field(-h)) / Quad(2);
      case 1:
        return (field(h) - field(-h)) / (Quad(2) * h);
      case 2:
        return (field(h) - Quad(2) * field(Quad(0)) + field(-h)) / (h * h);
      default:
        return (field(Quad(2) * h) - Quad(2) * field(h) + Quad(2) * field(-h) -
                field(Quad(-2) * h)) /
               (Quad(2) * h * h * h);
    }
  };

  SmoothnessReport report;
  report.probe_point = Vec2<double>(x0, 0.0);
  report.order = order;
  report.h_values.assign(h_values.begin(), h_values.end());

  std::vector<Vec2<Quad>> estimates;
  for (double h : h_values) {
    estimates.push_back(stencil(Quad(h)));
    report.difference_estimates.push_back(estimates.back().cast<double>());
  }
  std::vector<Vec2<Quad>> gaps;
  for (std::size_t k = 0; k + 1 < estimates.size(); ++k) {
    gaps.push_back((estimates[k + 1] - estimates[k]).cwiseAbs());
    report.successive_gaps.push_back(gaps.back().cast<double>());
  }
  // Gap k compares h_k and h_{k+1}; only gaps with h_k <= 1e-2 count.
  report.cauchy = true;
  for (std::size_t k = 0; k + 1 < gaps.size(); ++k) {
    if (h_values[k] > 1e-2) {
      continue;
    }
    for (int c = 0; c < 2; ++c) {
      const Quad& a = gaps[k][c];
      const Quad& b = gaps[k + 1][c];
      const bool shrinks = b < a || (a == Quad(0) && b == Quad(0));
      report.cauchy = report.cauchy && shrinks;
    }
  }
  if (estimates.size() >= 2) {
    const std::size_t n = estimates.size() - 1;
    const Quad ratio = Quad(h_values[n - 1]) / Quad(h_values[n]);
    const Vec2<Quad> limit =
        estimates[n] + (estimates[n] - estimates[n - 1]) / (ratio * ratio - Quad(1));
    report.converged_limit = limit.cast<double>();
  } else {
    report.converged_limit = report.difference_estimates.front();
  }

  for (int power = 1; power <= 3; ++power) {
    FlatRatioProbe probe;
    probe.power = power;
    probe.offsets = report.h_values;
    probe.monotone_decreasing = true;
    for (double y : probe.offsets) {
      const double value = flat_ratio_log(x0, y, power) / std::numbers::ln10;
      if (std::isnan(value)) {
        throw std::runtime_error("smoothness_audit: ratio is NaN");
      }
      if (!probe.log10_values.empty() && !(value < probe.log10_values.back())) {
        probe.monotone_decreasing = false;
      }
      probe.log10_values.push_back(value);
    }
    report.ratio_probes.push_back(std::move(probe));
  }
  return report;
}

}  // namespace rose_dyn
