#include "spray/reference_field.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "spray/kernels.hpp"

namespace spray {

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
}

ReferenceField ReferenceField::rigid_rotation(double omega) {
  if (!std::isfinite(omega)) throw std::invalid_argument("rigid_rotation: omega must be finite");
  ReferenceField f;
  f.name = "rigid_rotation";
  f.velocity = [omega](Vec2 x) { return omega * x.perp(); };
  f.material = [omega](Vec2 x) { return (-omega * omega) * x; };
  f.curl = [omega](Vec2) { return 2.0 * omega; };
  f.sym_grad_sup = 0.0;
  f.velocity_sup = omega == 0.0 ? 0.0 : inf;
  f.total_curl = omega == 0.0 ? 0.0 : inf;
  return f;
}

ReferenceField ReferenceField::blob_vortex(double a, double sigma) {
  if (!std::isfinite(a)) throw std::invalid_argument("blob_vortex: circulation must be finite");
  if (!(std::isfinite(sigma) && sigma > 0.0))
    throw std::invalid_argument("blob_vortex: core width must be positive");
  ReferenceField f;
  f.name = "blob_vortex";
  const double s2 = sigma * sigma;
  f.velocity = [a, s2](Vec2 x) {
    const double g = 1.0 / (2.0 * pi * (x.norm2() + s2));
    return (a * g) * x.perp();
  };
  // v = a g(r^2) x^perp gives (v . grad) v = -a^2 g^2 x
  f.material = [a, s2](Vec2 x) {
    const double g = 1.0 / (2.0 * pi * (x.norm2() + s2));
    return (-a * a * g * g) * x;
  };
  f.curl = [a, s2](Vec2 x) {
    const double d = x.norm2() + s2;
    return a * s2 / (pi * d * d);
  };
  f.sym_grad_sup = std::fabs(a) / (8.0 * pi * s2);
  f.velocity_sup = std::fabs(a) / (4.0 * pi * sigma);
  f.total_curl = a;
  return f;
}

ReferenceField ReferenceField::constant(Vec2 c) {
  if (!finite(c)) throw std::invalid_argument("constant field: velocity must be finite");
  ReferenceField f;
  f.name = "constant";
  f.velocity = [c](Vec2) { return c; };
  f.material = [](Vec2) { return Vec2{0.0, 0.0}; };
  f.curl = [](Vec2) { return 0.0; };
  f.sym_grad_sup = 0.0;
  f.velocity_sup = c.norm();
  f.total_curl = 0.0;
  return f;
}

ReferenceField ReferenceField::zero() {
  ReferenceField f = constant(Vec2{0.0, 0.0});
  f.name = "zero";
  return f;
}

}  // namespace spray
