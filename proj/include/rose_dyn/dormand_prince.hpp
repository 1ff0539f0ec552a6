#pragma once

// One step of the Dormand-Prince 5(4) embedded pair. State may be a scalar or
// any Eigen vector expression type; the step propagates the fifth-order
// solution and reports the fourth/fifth-order difference as the error.

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

namespace rose_dyn {

template <typename State>
struct DormandPrinceStep {
  State y;       // fifth-order solution at t + h
  State k_last;  // f(t + h, y), reusable as the next first stage
  State error;   // h * sum (b5 - b4) k_i
};

template <typename State, typename Rhs>
DormandPrinceStep<State> dormand_prince_step(const Rhs& f, double t, const State& y,
                                             const State& k1, double h) {
  constexpr double a21 = 1.0 / 5.0;
  constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                   a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                   a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                   b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                   e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

  const State k2 = f(t + h / 5.0, State(y + h * (a21 * k1)));
  const State k3 = f(t + 3.0 * h / 10.0, State(y + h * (a31 * k1 + a32 * k2)));
  const State k4 = f(t + 4.0 * h / 5.0, State(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
  const State k5 = f(t + 8.0 * h / 9.0,
                     State(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
  const State k6 = f(t + h, State(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 +
                                           a65 * k5)));
  DormandPrinceStep<State> out;
  out.y = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  out.k_last = f(t + h, out.y);
  out.error = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * out.k_last);
  return out;
}

/// Mixed error norm max_i |e_i| / (abs_tol + rel_tol * max(|y_i|, |y_new_i|)).
inline double error_norm(double error, double y, double y_new, double abs_tol,
                         double rel_tol) {
  return std::abs(error) / (abs_tol + rel_tol * std::max(std::abs(y), std::abs(y_new)));
}

template <typename Derived>
double error_norm(const Eigen::MatrixBase<Derived>& error, const Eigen::MatrixBase<Derived>& y,
                  const Eigen::MatrixBase<Derived>& y_new, double abs_tol, double rel_tol) {
  const auto scale =
      (abs_tol + rel_tol * y.cwiseAbs().cwiseMax(y_new.cwiseAbs()).array()).eval();
  return (error.cwiseAbs().array() / scale).maxCoeff();
}

/// Step-size factor 0.9 err^(-1/5) clipped to [0.2, 5].
inline double step_factor(double err) {
  if (err == 0.0) {
    return 5.0;
  }
  return std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
}

}  // namespace rose_dyn
