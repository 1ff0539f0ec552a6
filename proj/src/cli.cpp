#include "rose_dyn/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "rose_dyn/analysis.hpp"
#include "rose_dyn/analytic_orbits.hpp"
#include "rose_dyn/integrator.hpp"
#include "rose_dyn/io.hpp"
#include "rose_dyn/quadrature.hpp"
#include "rose_dyn/rose_geometry.hpp"
#include "rose_dyn/vector_field.hpp"

namespace rose_dyn::cli {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised after the output has been written when the result itself signals
// a failed computation (non-converged estimate, aborted integration).
class ComputationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double finite(const std::string& name, double v) {
  if (!std::isfinite(v)) {
    throw UsageError("--" + name + " must be finite");
  }
  return v;
}

double positive(const std::string& name, double v) {
  if (!std::isfinite(v) || !(v > 0.0)) {
    throw UsageError("--" + name + " must be positive and finite");
  }
  return v;
}

struct StateFlags {
  std::optional<double> r;
  std::optional<double> theta;
  std::optional<double> theta_deg;
  std::optional<double> x;
  std::optional<double> y;

  void attach(CLI::App* app) {
    app->add_option("--r", r, "Radius of the start point (polar input)");
    app->add_option("--theta", theta, "Angle in radians (polar input)");
    app->add_option("--theta-deg", theta_deg, "Angle in degrees, converted to radians");
    app->add_option("--x", x, "Cartesian abscissa");
    app->add_option("--y", y, "Cartesian ordinate");
  }

  PolarState<double> resolve() const {
    const bool polar = r || theta || theta_deg;
    const bool cart = x || y;
    if (polar && cart) {
      throw UsageError("give either --r/--theta or --x/--y, not both");
    }
    if (cart) {
      if (!x || !y) {
        throw UsageError("both --x and --y are required");
      }
      const Vec2<double> p(finite("x", *x), finite("y", *y));
      return to_polar(p);
    }
    if (!r) {
      throw UsageError("a start point is required (--r with --theta, or --x with --y)");
    }
    if (theta && theta_deg) {
      throw UsageError("give either --theta or --theta-deg, not both");
    }
    if (!theta && !theta_deg) {
      throw UsageError("--theta or --theta-deg is required with --r");
    }
    if (finite("r", *r) < 0.0) {
      throw UsageError("--r must be non-negative");
    }
    const double t =
        theta ? finite("theta", *theta) : finite("theta-deg", *theta_deg) * std::numbers::pi / 180.0;
    return PolarState<double>{*r, Angle(t)};
  }

  InitialCondition initial_condition() const {
    const auto s = resolve();
    return InitialCondition::from_polar(s.r, s.theta);
  }
};

struct ToleranceFlags {
  IntegratorConfig cfg;

  void attach(CLI::App* app) {
    app->add_option("--rel-tol", cfg.rel_tol, "Relative tolerance")->capture_default_str();
    app->add_option("--abs-tol", cfg.abs_tol, "Absolute tolerance")->capture_default_str();
    app->add_option("--h-init", cfg.h_init, "Initial step")->capture_default_str();
    app->add_option("--h-min", cfg.h_min, "Smallest step")->capture_default_str();
    app->add_option("--h-max", cfg.h_max, "Largest step")->capture_default_str();
    app->add_option("--event-r-tol", cfg.event_r_tol, "Origin event radius")
        ->capture_default_str();
    app->add_option("--max-steps", cfg.max_steps, "Step budget")->capture_default_str();
  }

  IntegratorConfig resolve() const {
    IntegratorConfig out = cfg;
    positive("rel-tol", out.rel_tol);
    positive("abs-tol", out.abs_tol);
    positive("h-init", out.h_init);
    positive("h-min", out.h_min);
    positive("h-max", out.h_max);
    positive("event-r-tol", out.event_r_tol);
    if (out.max_steps < 1) {
      throw UsageError("--max-steps must be at least 1");
    }
    try {
      out.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    return out;
  }

};

void require_clean_terminal(const Orbit& orbit) {
  if (orbit.terminal.kind == TerminalKind::StepFailure ||
      orbit.terminal.kind == TerminalKind::MaxSteps) {
    throw ComputationFailure("integration aborted with " +
                             std::string(terminal_name(orbit.terminal.kind)) + " at param " +
                             format_real(orbit.terminal.param));
  }
}

// The orbit drawn for one start point: spirals run forward, homoclinic loops
// are traced in both directions to their origin events, and points on the
// rose follow it forward.
Orbit portrait_orbit(const InitialCondition& ic, double revolutions, const ToleranceFlags& tol) {
  const auto cls = classify(ic);
  if (std::holds_alternative<orbit_class::Equilibrium>(cls)) {
    Orbit orbit;
    orbit.samples.push_back(OrbitSample{ic.theta0.value, PolarState<double>{0.0, ic.theta0}, 0.0});
    return orbit;
  }
  const double span = kTwoPi * revolutions;
  const double t0 = ic.theta0.value;
  if (!std::holds_alternative<orbit_class::HomoclinicInterior>(cls)) {
    Orbit orbit = integrate_theta(ic, Angle(t0 + span), tol.resolve());
    require_clean_terminal(orbit);
    return orbit;
  }
  const auto cfg = tol.resolve();
  Orbit backward = integrate_theta(ic, Angle(t0 - kTwoPi), cfg);
  Orbit forward = integrate_theta(ic, Angle(t0 + kTwoPi), cfg);
  require_clean_terminal(backward);
  require_clean_terminal(forward);
  Orbit orbit;
  orbit.terminal = forward.terminal;
  orbit.samples.assign(backward.samples.rbegin(), backward.samples.rend());
  orbit.samples.insert(orbit.samples.end(), forward.samples.begin() + 1, forward.samples.end());
  return orbit;
}

std::vector<Orbit> portrait_orbits(const PortraitSpec& spec, const ToleranceFlags& tol) {
  std::vector<Orbit> orbits(spec.ics.size());
  std::vector<std::exception_ptr> errors(spec.ics.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < spec.ics.size(); i = next++) {
      try {
        orbits[i] = portrait_orbit(spec.ics[i], spec.revolutions, tol);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_workers =
      std::min<std::size_t>(batch_threads(), std::max<std::size_t>(spec.ics.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto& t : pool) {
    t.join();
  }
  // Report the first failure in input order so diagnostics are deterministic.
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
  return orbits;
}

InitialCondition parse_ic(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw UsageError("--ic expects r,theta but got '" + text + "'");
  }
  double r = 0.0;
  double theta = 0.0;
  try {
    std::size_t used = 0;
    const std::string rs = text.substr(0, comma);
    const std::string ts = text.substr(comma + 1);
    r = std::stod(rs, &used);
    if (used != rs.size()) {
      throw std::invalid_argument(rs);
    }
    theta = std::stod(ts, &used);
    if (used != ts.size()) {
      throw std::invalid_argument(ts);
    }
  } catch (const std::logic_error&) {
    throw UsageError("--ic expects r,theta but got '" + text + "'");
  }
  if (!std::isfinite(r) || !std::isfinite(theta) || r < 0.0) {
    throw UsageError("--ic needs finite values with r >= 0, got '" + text + "'");
  }
  return InitialCondition::from_polar(r, Angle(theta));
}

}  // namespace

unsigned batch_threads() {
  if (const char* env = std::getenv("ROSE_DYN_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) {
      return static_cast<unsigned>(v);
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Orbits, petals and diagnostics of the rose vector field", "rose-dyn"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every verb");

  StateFlags state;
  ToleranceFlags tol;

  // field-eval
  std::string chart = "cartesian";
  auto* field_eval = app.add_subcommand("field-eval", "Evaluate the vector field at a point");
  state.attach(field_eval);
  field_eval->add_option("--chart", chart, "Output components: cartesian or polar")
      ->check(CLI::IsMember({"cartesian", "polar"}))
      ->capture_default_str();

  // orbit
  std::optional<double> revolutions;
  std::optional<double> theta_end;
  std::optional<double> t_end;
  bool backward = false;
  std::string orbit_format = "csv";
  auto* orbit_cmd = app.add_subcommand("orbit", "Integrate one orbit");
  state.attach(orbit_cmd);
  tol.attach(orbit_cmd);
  orbit_cmd->add_option("--revolutions", revolutions, "Angular span in turns (default 1)");
  orbit_cmd->add_option("--theta-end", theta_end, "Final unwrapped angle");
  orbit_cmd->add_option("--t-end", t_end, "Integrate in physical time up to this time");
  orbit_cmd->add_flag("--backward", backward, "Run --revolutions in decreasing angle");
  orbit_cmd->add_option("--format", orbit_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  // classify
  auto* classify_cmd = app.add_subcommand("classify", "Classify the orbit through a point");
  state.attach(classify_cmd);

  // rose
  int rose_petals = 3;
  int rose_points = 256;
  std::string rose_format = "csv";
  auto* rose_cmd = app.add_subcommand("rose", "Sample the rose curve");
  rose_cmd->add_option("--petals", rose_petals, "Petals -n..n")->capture_default_str();
  rose_cmd->add_option("--points", rose_points, "Points per petal")->capture_default_str();
  rose_cmd->add_option("--format", rose_format, "csv or svg")
      ->check(CLI::IsMember({"csv", "svg"}))
      ->capture_default_str();

  // petal-areas
  int area_petals = 51;
  double domain_area = std::numbers::pi;
  double quad_tol = 1e-12;
  auto* areas_cmd = app.add_subcommand("petal-areas", "Petal areas and their measure bands");
  areas_cmd->add_option("--petals", area_petals, "Number of petals, largest first")
      ->capture_default_str();
  areas_cmd->add_option("--domain-area", domain_area, "Area bound D")->capture_default_str();
  areas_cmd->add_option("--quad-tol", quad_tol, "Absolute quadrature tolerance")
      ->capture_default_str();

  // omega
  double epsilon = 1e-6;
  int track = 10;
  OmegaOptions omega_opts;
  auto* omega_cmd = app.add_subcommand("omega", "Estimate the omega-limit of a spiral orbit");
  state.attach(omega_cmd);
  tol.attach(omega_cmd);
  omega_cmd->add_option("--epsilon", epsilon, "Target sup |F| over one turn")
      ->capture_default_str();
  omega_cmd->add_option("--track", track, "Track petals |n| <= this")->capture_default_str();
  omega_cmd->add_option("--max-revolutions", omega_opts.max_revolutions, "Revolution cap")
      ->capture_default_str();
  omega_cmd->add_option("--polyline-points", omega_opts.polyline_points, "Points per petal")
      ->capture_default_str();

  // smoothness
  double x0 = -0.5;
  int order = 1;
  std::vector<double> h_values{1e-2, 1e-3, 1e-4, 1e-5};
  auto* smooth_cmd = app.add_subcommand("smoothness", "Finite-difference audit across y = 0");
  smooth_cmd->add_option("--x0", x0, "Probe abscissa (<= 0)")->capture_default_str();
  smooth_cmd->add_option("--order", order, "Derivative order 0..3")->capture_default_str();
  smooth_cmd->add_option("--steps", h_values, "Decreasing step sizes")->delimiter(',');

  // portrait
  std::vector<std::string> ic_texts;
  PortraitSpec portrait;
  int portrait_points = 512;
  std::string out_path;
  auto* portrait_cmd = app.add_subcommand("portrait", "Render a phase portrait as SVG");
  tol.attach(portrait_cmd);
  portrait_cmd->add_option("--ic", ic_texts, "Start point r,theta (repeatable)");
  portrait_cmd->add_option("--revolutions", portrait.revolutions, "Turns for spiral orbits")
      ->capture_default_str();
  portrait_cmd->add_option("--petals", portrait.n_petals, "Rose petals -n..n")
      ->capture_default_str();
  portrait_cmd->add_option("--points", portrait_points, "Rose points per petal")
      ->capture_default_str();
  portrait_cmd->add_option("--width", portrait.width_px, "Canvas width")->capture_default_str();
  portrait_cmd->add_option("--height", portrait.height_px, "Canvas height")->capture_default_str();
  portrait_cmd->add_option("--rose-color", portrait.rose_color, "Rose stroke color");
  portrait_cmd->add_option("--orbit-color", portrait.orbit_color, "Orbit stroke color");
  portrait_cmd->add_option("--rose-stroke", portrait.rose_stroke_px, "Rose stroke width (px)");
  portrait_cmd->add_option("--orbit-stroke", portrait.orbit_stroke_px, "Orbit stroke width (px)");
  portrait_cmd->add_option("--out", out_path, "Write the SVG here instead of stdout");

  try {
    // CLI11 consumes arguments from the back.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*field_eval) {
      const auto s = state.resolve();
      FieldVector<double> v;
      if (chart == "polar") {
        v = polar_field(s);
      } else if (state.x) {
        // Cartesian input goes straight to the Cartesian field.
        v = cartesian_field(Vec2<double>(*state.x, *state.y));
      } else {
        v = cartesian_field(to_cartesian(s));
      }
      out << format_real(v.first()) << ' ' << format_real(v.second()) << '\n';
    } else if (*orbit_cmd) {
      const auto ic = state.initial_condition();
      Orbit orbit;
      if (t_end) {
        if (revolutions || theta_end || backward) {
          throw UsageError("--t-end cannot be combined with angle ranges");
        }
        positive("t-end", *t_end);
        orbit = integrate_time(to_cartesian(PolarState<double>{ic.r0, ic.theta0}), *t_end,
                               tol.resolve());
      } else {
        if (revolutions && theta_end) {
          throw UsageError("give either --revolutions or --theta-end, not both");
        }
        double end = 0.0;
        if (theta_end) {
          if (backward) {
            throw UsageError("--backward applies to --revolutions only");
          }
          end = finite("theta-end", *theta_end);
        } else {
          const double turns = positive("revolutions", revolutions.value_or(1.0));
          end = ic.theta0.value + (backward ? -1.0 : 1.0) * kTwoPi * turns;
        }
        if (end == ic.theta0.value) {
          throw UsageError("--theta-end must differ from the start angle");
        }
        orbit = integrate_theta(ic, Angle(end), tol.resolve());
      }
      if (orbit_format == "json") {
        out << orbit_to_json(orbit).dump(2) << '\n';
      } else {
        write_orbit_csv(orbit, out);
      }
      require_clean_terminal(orbit);
    } else if (*classify_cmd) {
      const auto ic = state.initial_condition();
      out << classification_to_json(ic, classify(ic)).dump(2) << '\n';
    } else if (*rose_cmd) {
      if (rose_petals < 1) {
        throw UsageError("--petals must be at least 1");
      }
      if (rose_points < 2) {
        throw UsageError("--points must be at least 2");
      }
      if (rose_format == "svg") {
        PortraitSpec spec;
        spec.n_petals = rose_petals;
        const auto rose = rose_polyline(rose_petals, rose_points);
        write_portrait_svg(spec, {}, rose, out);
      } else {
        out << "theta,r,x,y\n";
        for (const auto& s : rose_samples(rose_petals, rose_points)) {
          out << format_real(s.theta.value) << ',' << format_real(s.r) << ','
              << format_real(s.xy[0]) << ',' << format_real(s.xy[1]) << '\n';
        }
      }
    } else if (*areas_cmd) {
      if (area_petals < 1) {
        throw UsageError("--petals must be at least 1");
      }
      positive("domain-area", domain_area);
      positive("quad-tol", quad_tol);
      out << area_report_to_json(petal_area_buckets(area_petals, domain_area, quad_tol)).dump(2)
          << '\n';
    } else if (*omega_cmd) {
      const auto ic = state.initial_condition();
      positive("epsilon", epsilon);
      if (track < 0) {
        throw UsageError("--track must be non-negative");
      }
      if (omega_opts.max_revolutions < 1 || omega_opts.polyline_points < 2) {
        throw UsageError("--max-revolutions must be >= 1 and --polyline-points >= 2");
      }
      if (!(ic.F0 > 0.0)) {
        throw UsageError("omega needs a start point outside the rose (F0 > 0)");
      }
      const auto cfg = tol.resolve();
      const auto est = omega_estimate(ic, epsilon, track, cfg, omega_opts);
      out << omega_to_json(est).dump(2) << '\n';
      if (!est.converged) {
        throw ComputationFailure("omega estimate did not converge");
      }
    } else if (*smooth_cmd) {
      if (!std::isfinite(x0) || x0 > 0.0) {
        throw UsageError("--x0 must be finite and <= 0");
      }
      if (order < 0 || order > 3) {
        throw UsageError("--order must be 0, 1, 2 or 3");
      }
      for (std::size_t i = 0; i < h_values.size(); ++i) {
        positive("steps", h_values[i]);
        if (i > 0 && !(h_values[i] < h_values[i - 1])) {
          throw UsageError("--steps values must be strictly decreasing");
        }
      }
      if (h_values.empty()) {
        throw UsageError("--steps needs at least one step");
      }
      out << smoothness_to_json(smoothness_audit(x0, order, h_values)).dump(2) << '\n';
    } else if (*portrait_cmd) {
      tol.resolve();
      if (ic_texts.empty()) {
        portrait.ics.push_back(InitialCondition::from_polar(1.0, Angle(0.0)));
        portrait.ics.push_back(InitialCondition::from_polar(
            0.5 * rho(Angle(std::numbers::pi / 2)), Angle(std::numbers::pi / 2)));
      }
      for (const auto& text : ic_texts) {
        portrait.ics.push_back(parse_ic(text));
      }
      if (portrait_points < 2) {
        throw UsageError("--points must be at least 2");
      }
      try {
        portrait.validate();
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      const auto orbits = portrait_orbits(portrait, tol);
      const auto rose = rose_polyline(portrait.n_petals, portrait_points);
      if (out_path.empty()) {
        write_portrait_svg(portrait, orbits, rose, out);
      } else {
        std::ofstream file(out_path, std::ios::binary);
        if (!file) {
          throw std::runtime_error("cannot open " + out_path + " for writing");
        }
        write_portrait_svg(portrait, orbits, rose, file);
      }
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitComputation;
  }
  return kExitOk;
}

}  // namespace rose_dyn::cli
