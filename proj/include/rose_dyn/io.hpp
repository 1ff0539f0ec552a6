#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rose_dyn/analysis.hpp"
#include "rose_dyn/analytic_orbits.hpp"
#include "rose_dyn/integrator.hpp"

namespace rose_dyn {

inline constexpr int kJsonSchemaVersion = 1;

/// Shortest decimal that parses back to exactly the same double.
std::string format_real(double value);

/// CSV with header `param,r,theta,x,y,F`, one row per sample, `\n` endings.
/// Throws std::ios_base::failure when the sink fails.
void write_orbit_csv(const Orbit& orbit, std::ostream& sink);

/// Inverse of write_orbit_csv; x and y are recomputed from r and theta.
/// Throws std::runtime_error on malformed input.
Orbit read_orbit_csv(std::istream& source, Parameterization parameterization);

struct PortraitSpec {
  std::vector<InitialCondition> ics;
  double revolutions = 3.0;
  int n_petals = 3;
  int width_px = 800;
  int height_px = 800;
  std::string background = "#ffffff";
  std::string rose_color = "#b03a2e";
  std::string orbit_color = "#1f4e79";
  double rose_stroke_px = 1.5;
  double orbit_stroke_px = 1.0;

  void validate() const;
};

/// SVG 1.1 document with the rose and each orbit as a path. The viewBox is
/// centered on the origin and covers the unit disk and every plotted point.
void write_portrait_svg(const PortraitSpec& spec, std::span<const Orbit> orbits,
                        std::span<const Vec2<double>> rose, std::ostream& sink);

std::string_view terminal_name(TerminalKind kind);

nlohmann::json orbit_to_json(const Orbit& orbit);
nlohmann::json classification_to_json(const InitialCondition& ic, const OrbitClass& c);
nlohmann::json omega_to_json(const OmegaEstimate& est);
nlohmann::json area_report_to_json(const AreaBucketReport& report);
nlohmann::json smoothness_to_json(const SmoothnessReport& report);

}  // namespace rose_dyn
