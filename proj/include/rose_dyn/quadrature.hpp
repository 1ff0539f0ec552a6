#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rose_dyn {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  int intervals = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 0.0;
  int max_depth = 60;
  int max_intervals = 4000;
};

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature over the given
/// breakpoints (sorted, at least two). The interval with the largest error
/// estimate is bisected until the summed estimate is within
/// max(abs_tol, rel_tol * |value|). Exceeding max_depth or max_intervals
/// throws QuadratureError.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    const std::vector<double>& breakpoints,
                                    const QuadratureOptions& options = {});

inline QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                           double a, double b,
                                           const QuadratureOptions& options = {}) {
  return integrate_adaptive(f, std::vector<double>{a, b}, options);
}

}  // namespace rose_dyn
