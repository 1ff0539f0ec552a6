#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rose_dyn/analytic_orbits.hpp"
#include "rose_dyn/integrator.hpp"
#include "rose_dyn/rose_geometry.hpp"
#include "rose_dyn/vector_field.hpp"

namespace rose_dyn {

// ---------------------------------------------------------------------------
// Distance to the rose

/// Radial gap |F(r, theta)|; exact along the ray since dF/dr = 1.
double distance_to_rose(const PolarState<double>& s);

double distance_to_polyline(const Vec2<double>& p, std::span<const Vec2<double>> polyline);

// ---------------------------------------------------------------------------
// omega-limit estimation

/// Petals whose largest radius is below this are indistinguishable from the
/// origin in double precision and are not tracked.
inline constexpr double kUnresolvableRadius = 1e-300;

struct OmegaOptions {
  int max_revolutions = 64;
  int polyline_points = 2048;
};

struct OmegaEstimate {
  bool converged = false;
  double epsilon = 0.0;
  /// Revolutions completed before the first revolution whose sup |F| is
  /// below epsilon (or the number integrated when that never happened).
  int revolutions_used = 0;
  double achieved_sup = 0.0;  // sup |F| over that revolution
  std::vector<double> revolution_sups;
  std::map<int, double> per_petal_closest_approach;
  std::vector<int> unresolvable_petals;
};

/// Integrates revolution by revolution from ic (F0 > 0) until the sup of |F|
/// over one revolution drops below epsilon or options.max_revolutions is hit,
/// then measures the closest Euclidean approach of the orbit to each petal
/// |n| <= n_petals_tracked.
OmegaEstimate omega_estimate(const InitialCondition& ic, double epsilon, int n_petals_tracked,
                             const IntegratorConfig& cfg, const OmegaOptions& options = {});

/// The convergence verdict for already-integrated revolutions; omega_estimate
/// is this applied to the orbit it integrates.
OmegaEstimate assess_omega(std::span<const Orbit> revolutions, double epsilon,
                           int n_petals_tracked, const OmegaOptions& options = {});

// ---------------------------------------------------------------------------
// Measure bucketing

class MeasureBoundViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Band (D/(n+1), D/n]. `index` holds n when it fits in 53 bits; log_index is
/// log n (or log(D/area) once n is beyond any integer type).
struct AreaBucket {
  double log_index = 0.0;
  std::optional<std::uint64_t> index;
  std::vector<int> petals;
};

struct AreaBucketReport {
  double domain_area = 0.0;
  double area_sum = 0.0;
  std::map<int, PetalArea> petal_areas;
  std::vector<AreaBucket> buckets;  // ascending log_index
};

/// Petal taken k-th in order of decreasing area: 0, -1, 1, -2, 2, ...
int petal_by_rank(int k);

/// Buckets the areas of the first n_petals petals (by rank) into the bands.
/// Throws MeasureBoundViolation if the areas exceed domain_area or a band
/// holds more than n petals.
AreaBucketReport petal_area_buckets(int n_petals, double domain_area, double quad_tol);

// ---------------------------------------------------------------------------
// Smoothness audit across the negative x-axis

struct FlatRatioProbe {
  int power = 0;
  std::vector<double> offsets;       // y values approaching the axis
  std::vector<double> log10_values;  // log10 of the ratio at each offset
  bool monotone_decreasing = false;
};

struct SmoothnessReport {
  Vec2<double> probe_point = Vec2<double>::Zero();
  int order = 0;
  std::vector<double> h_values;
  /// Raw central-difference estimates of d^order/dy^order of (x', y').
  std::vector<Vec2<double>> difference_estimates;
  /// |estimate(h_{k+1}) - estimate(h_k)| per component.
  std::vector<Vec2<double>> successive_gaps;
  /// Gaps shrink (or stay at exactly zero) for every h <= 1e-2.
  bool cauchy = false;
  /// Richardson extrapolation of the last two estimates.
  Vec2<double> converged_limit = Vec2<double>::Zero();
  std::vector<FlatRatioProbe> ratio_probes;
};

/// Natural log of e^(-1/r^2) e^(-(r/(r+x))^2) / (r+x)^power at (x, y).
double flat_ratio_log(double x, double y, int power);

/// Central differences of order 0..3 in y of both Cartesian field components
/// at (x0, 0), x0 <= 0. The field is evaluated in quad precision so that the
/// high-order stencils are not swamped by rounding. Non-finite values throw.
SmoothnessReport smoothness_audit(double x0, int order, std::span<const double> h_values);

}  // namespace rose_dyn
