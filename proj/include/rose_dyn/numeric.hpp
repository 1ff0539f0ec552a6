#pragma once

// Log-space helpers for products of a flat exponential envelope e^(-a) with
// a bounded or rational factor. The envelope is what makes the field smooth
// and non-analytic; it is also what drives every evaluation into underflow
// near the origin and the negative x-axis.

#include <cmath>
#include <limits>

#include <Eigen/Core>

namespace rose_dyn {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

/// Natural log of the smallest positive value representable by Scalar
/// (subnormals included when the type has them). For double this is
/// about -744.44.
template <typename Scalar>
Scalar log_smallest_positive() {
  using std::log;
  using Limits = std::numeric_limits<Scalar>;
  if constexpr (Limits::has_denorm == std::denorm_present) {
    return log(Limits::denorm_min());
  } else {
    return log((Limits::min)());
  }
}

template <typename Scalar>
Scalar log_smallest_normal() {
  using std::log;
  return log((std::numeric_limits<Scalar>::min)());
}

template <typename Scalar>
Scalar log_largest() {
  using std::log;
  return log((std::numeric_limits<Scalar>::max)());
}

/// Returns e^(log_envelope) * factor. When the envelope would leave the
/// normal range the product is assembled in log space; a log-magnitude below
/// the smallest positive magnitude yields exactly zero.
template <typename Scalar>
Scalar exp_times(const Scalar& log_envelope, const Scalar& factor) {
  using std::abs;
  using std::exp;
  using std::log;
  if (factor == Scalar(0)) {
    return Scalar(0);
  }
  if (log_envelope > log_smallest_normal<Scalar>() + Scalar(64)) {
    return exp(log_envelope) * factor;
  }
  const Scalar log_magnitude = log_envelope + log(abs(factor));
  if (!(log_magnitude >= log_smallest_positive<Scalar>())) {
    return Scalar(0);
  }
  const Scalar magnitude = exp(log_magnitude);
  return factor < Scalar(0) ? Scalar(-magnitude) : magnitude;
}

template <typename Scalar>
Scalar pi() {
  using std::acos;
  return acos(Scalar(-1));
}

}  // namespace rose_dyn
