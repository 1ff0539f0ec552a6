#pragma once

#include <cmath>
#include <compare>

#include "rose_dyn/numeric.hpp"

namespace rose_dyn {

/// Polar angle in radians. Values outside (-pi, pi] are legal; reduction to
/// the principal branch only happens through principal().
template <typename Scalar>
struct BasicAngle {
  Scalar value{0};

  constexpr BasicAngle() = default;
  constexpr explicit BasicAngle(Scalar radians) : value(radians) {}

  /// Representative in (-pi, pi].
  BasicAngle principal() const {
    using std::remainder;
    const Scalar two_pi = Scalar(2) * pi<Scalar>();
    Scalar reduced = remainder(value, two_pi);
    if (reduced <= -pi<Scalar>()) {
      reduced += two_pi;
    }
    return BasicAngle(reduced);
  }

  friend auto operator<=>(const BasicAngle&, const BasicAngle&) = default;
};

using Angle = BasicAngle<double>;

}  // namespace rose_dyn
