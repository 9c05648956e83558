#pragma once

#include "spray/vec2.hpp"

namespace spray {

// Singular 2d Biot-Savart kernel
//
//   H(x) = (1/2pi) x_perp / |x|^2,   x_perp = (-x2, x1).
//
// Throws std::domain_error at x = 0.
Vec2 biot_savart(Vec2 x);

// Algebraic blob regularization of the Biot-Savart kernel,
//
//   H_delta(x) = (1/2pi) x_perp / (|x|^2 + delta^2),
//   G_delta(x) = (1/4pi) log(|x|^2 + delta^2),
//
// with H_delta = perp-gradient of G_delta and H_delta(0) = 0.
class BlobKernel {
 public:
  // delta > 0, finite; otherwise std::invalid_argument
  explicit BlobKernel(double delta);

  double delta() const { return delta_; }

  Vec2 velocity(Vec2 x) const {
    double s = x.norm2() + delta2_;
    return {-x.y * inv_two_pi / s, x.x * inv_two_pi / s};
  }

  double stream(Vec2 x) const;

  // sup |H_delta| = 1/(4 pi delta), attained on the circle |x| = delta
  double sup_bound() const;

  // global Lipschitz constant bound 9/(16 pi delta^2); the Jacobian operator
  // norm is at most (1/2pi)(3|x|^2 + delta^2)/(|x|^2 + delta^2)^2, which
  // peaks at |x|^2 = delta^2/3
  double lip_bound() const;

 private:
  double delta_;
  double delta2_;
  static constexpr double inv_two_pi = 1.0 / (2.0 * pi);
};

}  // namespace spray
