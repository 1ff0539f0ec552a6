#include "rose_dyn/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace rose_dyn {

namespace {

std::string format_fixed(double value, int precision) {
  if (value == 0.0) {
    value = 0.0;  // drop the sign of -0
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, precision);
  return std::string(buf, res.ptr);
}

double parse_real(std::string_view field) {
  double value = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw std::runtime_error("malformed number in CSV: '" + std::string(field) + "'");
  }
  return value;
}

void check_sink(const std::ostream& sink) {
  if (!sink) {
    throw std::ios_base::failure("write to output sink failed");
  }
}

void write_path(std::ostream& sink, std::span<const Vec2<double>> points, const std::string& color,
                double stroke) {
  if (points.empty()) {
    return;
  }
  sink << "<path fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
       << format_fixed(stroke, 6) << "\" stroke-linejoin=\"round\" d=\"";
  for (std::size_t i = 0; i < points.size(); ++i) {
    sink << (i == 0 ? "M" : " L") << format_fixed(points[i][0], 6) << ' '
         << format_fixed(-points[i][1], 6);
  }
  sink << "\"/>\n";
}

}  // namespace

std::string format_real(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_orbit_csv(const Orbit& orbit, std::ostream& sink) {
  sink << "param,r,theta,x,y,F\n";
  for (const auto& s : orbit.samples) {
    const Vec2<double> xy = to_cartesian(s.state);
    sink << format_real(s.param) << ',' << format_real(s.state.r) << ','
         << format_real(s.state.theta.value) << ',' << format_real(xy[0]) << ','
         << format_real(xy[1]) << ',' << format_real(s.F) << '\n';
  }
  check_sink(sink);
}

Orbit read_orbit_csv(std::istream& source, Parameterization parameterization) {
  Orbit orbit;
  orbit.parameterization = parameterization;
  std::string line;
  if (!std::getline(source, line) || line != "param,r,theta,x,y,F") {
    throw std::runtime_error("orbit CSV: missing or unexpected header");
  }
  while (std::getline(source, line)) {
    if (line.empty()) {
      continue;
    }
    std::vector<double> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(parse_real(std::string_view(line).substr(
          start, comma == std::string::npos ? std::string::npos : comma - start)));
      if (comma == std::string::npos) {
        break;
      }
      start = comma + 1;
    }
    if (fields.size() != 6) {
      throw std::runtime_error("orbit CSV: expected 6 columns, got " +
                               std::to_string(fields.size()));
    }
    orbit.samples.push_back(
        OrbitSample{fields[0], PolarState<double>{fields[1], Angle(fields[2])}, fields[5]});
  }
  if (!orbit.samples.empty()) {
    orbit.terminal = {TerminalKind::RangeEnd, orbit.samples.back().param};
  }
  return orbit;
}

void PortraitSpec::validate() const {
  if (width_px <= 0 || height_px <= 0) {
    throw std::invalid_argument("portrait dimensions must be positive");
  }
  if (!(revolutions > 0.0) || !std::isfinite(revolutions)) {
    throw std::invalid_argument("portrait revolutions must be positive");
  }
  if (n_petals < 1) {
    throw std::invalid_argument("portrait needs at least one petal");
  }
  if (!(rose_stroke_px > 0.0) || !(orbit_stroke_px > 0.0)) {
    throw std::invalid_argument("portrait stroke widths must be positive");
  }
}

void write_portrait_svg(const PortraitSpec& spec, std::span<const Orbit> orbits,
                        std::span<const Vec2<double>> rose, std::ostream& sink) {
  spec.validate();
  std::vector<std::vector<Vec2<double>>> paths;
  double extent = 1.0;
  for (const auto& p : rose) {
    extent = std::max(extent, p.norm());
  }
  for (const auto& orbit : orbits) {
    auto& path = paths.emplace_back();
    for (const auto& s : orbit.samples) {
      path.push_back(to_cartesian(s.state));
      extent = std::max(extent, std::abs(s.state.r));
    }
  }
  extent *= 1.05;
  const double side = 2.0 * extent;
  // Stroke widths are given in pixels of the shorter canvas side.
  const double units_per_px = side / std::min(spec.width_px, spec.height_px);

  sink << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << spec.width_px
       << "\" height=\"" << spec.height_px << "\" viewBox=\"" << format_fixed(-extent, 6) << ' '
       << format_fixed(-extent, 6) << ' ' << format_fixed(side, 6) << ' '
       << format_fixed(side, 6) << "\">\n";
  sink << "<rect x=\"" << format_fixed(-extent, 6) << "\" y=\"" << format_fixed(-extent, 6)
       << "\" width=\"" << format_fixed(side, 6) << "\" height=\"" << format_fixed(side, 6)
       << "\" fill=\"" << spec.background << "\"/>\n";
  write_path(sink, rose, spec.rose_color, spec.rose_stroke_px * units_per_px);
  for (const auto& path : paths) {
    write_path(sink, path, spec.orbit_color, spec.orbit_stroke_px * units_per_px);
  }
  sink << "</svg>\n";
  check_sink(sink);
}

std::string_view terminal_name(TerminalKind kind) {
  switch (kind) {
    case TerminalKind::RangeEnd:
      return "RangeEnd";
    case TerminalKind::OriginEvent:
      return "OriginEvent";
    case TerminalKind::StepFailure:
      return "StepFailure";
    case TerminalKind::MaxSteps:
      return "MaxSteps";
  }
  return "Unknown";
}

nlohmann::json orbit_to_json(const Orbit& orbit) {
  nlohmann::json j;
  j["schema"] = kJsonSchemaVersion;
  j["parameterization"] = orbit.parameterization == Parameterization::Angle ? "angle" : "time";
  j["terminal"] = {{"kind", terminal_name(orbit.terminal.kind)},
                   {"param", orbit.terminal.param}};
  j["columns"] = {"param", "r", "theta", "x", "y", "F"};
  auto& rows = j["samples"] = nlohmann::json::array();
  for (const auto& s : orbit.samples) {
    const Vec2<double> xy = to_cartesian(s.state);
    rows.push_back({s.param, s.state.r, s.state.theta.value, xy[0], xy[1], s.F});
  }
  return j;
}

nlohmann::json classification_to_json(const InitialCondition& ic, const OrbitClass& c) {
  nlohmann::json j;
  j["schema"] = kJsonSchemaVersion;
  j["class"] = class_name(c);
  j["F0"] = ic.F0;
  j["r0"] = ic.r0;
  j["theta0"] = ic.theta0.value;
  if (const auto* on = std::get_if<orbit_class::OnRose>(&c)) {
    if (on->petal) {
      j["petal"] = on->petal->index;
      j["petal_boundary"] = on->petal->on_boundary;
    } else {
      j["petal"] = nullptr;
    }
  } else if (const auto* h = std::get_if<orbit_class::HomoclinicInterior>(&c)) {
    j["petal"] = h->petal;
    j["theta_minus"] = h->theta_minus.value;
    j["theta_plus"] = h->theta_plus.value;
  }
  return j;
}

nlohmann::json omega_to_json(const OmegaEstimate& est) {
  nlohmann::json j;
  j["schema"] = kJsonSchemaVersion;
  j["converged"] = est.converged;
  j["epsilon"] = est.epsilon;
  j["revolutions_used"] = est.revolutions_used;
  j["achieved_sup"] = est.achieved_sup;
  j["revolution_sups"] = est.revolution_sups;
  auto& petals = j["per_petal_closest_approach"] = nlohmann::json::object();
  for (const auto& [n, d] : est.per_petal_closest_approach) {
    petals[std::to_string(n)] = d;
  }
  j["unresolvable_petals"] = est.unresolvable_petals;
  return j;
}

nlohmann::json area_report_to_json(const AreaBucketReport& report) {
  nlohmann::json j;
  j["schema"] = kJsonSchemaVersion;
  j["domain_area"] = report.domain_area;
  j["area_sum"] = report.area_sum;
  auto& areas = j["petal_areas"] = nlohmann::json::object();
  for (const auto& [n, a] : report.petal_areas) {
    areas[std::to_string(n)] = {{"area", a.value()}, {"log_area", a.log_value},
                                {"abs_error", a.abs_error}};
  }
  auto& buckets = j["buckets"] = nlohmann::json::array();
  for (const auto& b : report.buckets) {
    nlohmann::json entry;
    if (b.index) {
      entry["n"] = *b.index;
    } else {
      entry["n"] = nullptr;
    }
    entry["log_n"] = b.log_index;
    entry["count"] = b.petals.size();
    entry["petals"] = b.petals;
    buckets.push_back(std::move(entry));
  }
  return j;
}

nlohmann::json smoothness_to_json(const SmoothnessReport& report) {
  auto pair = [](const Vec2<double>& v) { return nlohmann::json::array({v[0], v[1]}); };
  nlohmann::json j;
  j["schema"] = kJsonSchemaVersion;
  j["probe_point"] = pair(report.probe_point);
  j["order"] = report.order;
  j["h_values"] = report.h_values;
  auto& est = j["difference_estimates"] = nlohmann::json::array();
  for (const auto& v : report.difference_estimates) {
    est.push_back(pair(v));
  }
  auto& gaps = j["successive_gaps"] = nlohmann::json::array();
  for (const auto& v : report.successive_gaps) {
    gaps.push_back(pair(v));
  }
  j["cauchy"] = report.cauchy;
  j["converged_limit"] = pair(report.converged_limit);
  auto& probes = j["ratio_probes"] = nlohmann::json::array();
  for (const auto& p : report.ratio_probes) {
    probes.push_back({{"power", p.power},
                      {"offsets", p.offsets},
                      {"log10_values", p.log10_values},
                      {"monotone_decreasing", p.monotone_decreasing}});
  }
  return j;
}

}  // namespace rose_dyn
