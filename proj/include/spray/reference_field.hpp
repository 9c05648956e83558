#pragma once

#include <functional>
#include <string>

#include "spray/vec2.hpp"

namespace spray {

// Closed-form reference velocity field together with the derived quantities
// the energy estimates need.  material is the steady convective derivative
// (v . grad) v; sym_grad_sup bounds the symmetric gradient in the spectral
// norm; velocity_sup and total_curl are infinity when unbounded.
struct ReferenceField {
  std::string name;
  std::function<Vec2(Vec2)> velocity;
  std::function<Vec2(Vec2)> material;
  std::function<double(Vec2)> curl;
  double sym_grad_sup = 0.0;
  double velocity_sup = 0.0;
  double total_curl = 0.0;

  // v(x) = omega x^perp: solid rotation at angular velocity omega
  static ReferenceField rigid_rotation(double omega);
  // v = a H_sigma: single smoothed vortex of circulation a and core sigma
  static ReferenceField blob_vortex(double a, double sigma);
  static ReferenceField constant(Vec2 c);
  static ReferenceField zero();
};

}  // namespace spray
