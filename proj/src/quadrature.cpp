#include "rose_dyn/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>

namespace rose_dyn {

namespace {

// Kronrod nodes on [-1, 1] (non-negative half) and weights; every other node
// belongs to the embedded 7-point Gauss rule.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  int depth;

  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                    int depth) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = kKronrodWeights[7] * fc;
  double gauss = kGaussWeights[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kNodes[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * sum;
    if (j % 2 == 1) {
      gauss += kGaussWeights[j / 2] * sum;
    }
  }
  kronrod *= half;
  gauss *= half;
  if (!std::isfinite(kronrod)) {
    throw QuadratureError("integrand is not finite on [" + std::to_string(a) +
                          ", " + std::to_string(b) + "]");
  }
  return Panel{a, b, kronrod, std::abs(kronrod - gauss), depth};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    const std::vector<double>& breakpoints,
                                    const QuadratureOptions& options) {
  if (breakpoints.size() < 2 ||
      !std::is_sorted(breakpoints.begin(), breakpoints.end())) {
    throw std::invalid_argument("integrate_adaptive: breakpoints must be sorted");
  }
  std::priority_queue<Panel> panels;
  double value = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i + 1] == breakpoints[i]) {
      continue;
    }
    Panel p = gauss_kronrod(f, breakpoints[i], breakpoints[i + 1], 0);
    value += p.value;
    error += p.error;
    panels.push(p);
  }
  auto target = [&] { return std::max(options.abs_tol, options.rel_tol * std::abs(value)); };
  while (!panels.empty() && error > target()) {
    if (static_cast<int>(panels.size()) >= options.max_intervals) {
      throw QuadratureError("quadrature did not converge: interval budget exhausted (error " +
                            std::to_string(error) + ")");
    }
    const Panel worst = panels.top();
    if (worst.depth >= options.max_depth) {
      throw QuadratureError("quadrature did not converge: refinement depth exceeded (error " +
                            std::to_string(error) + ")");
    }
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Panel left = gauss_kronrod(f, worst.a, mid, worst.depth + 1);
    const Panel right = gauss_kronrod(f, mid, worst.b, worst.depth + 1);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }
  // Recompute the sums to shed the drift from incremental updates.
  QuadratureResult result;
  result.intervals = static_cast<int>(panels.size());
  while (!panels.empty()) {
    result.value += panels.top().value;
    result.abs_error += panels.top().error;
    panels.pop();
  }
  return result;
}

}  // namespace rose_dyn
