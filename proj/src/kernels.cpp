#include "spray/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace spray {

Vec2 biot_savart(Vec2 x) {
  double r2 = x.norm2();
  if (r2 == 0.0) throw std::domain_error("biot_savart: evaluation at the singularity x = 0");
  double f = 1.0 / (2.0 * pi * r2);
  return {-x.y * f, x.x * f};
}

BlobKernel::BlobKernel(double delta) : delta_(delta), delta2_(delta * delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("BlobKernel: delta must be positive and finite");
}

double BlobKernel::stream(Vec2 x) const {
  return std::log(x.norm2() + delta2_) / (4.0 * pi);
}

double BlobKernel::sup_bound() const { return 1.0 / (4.0 * pi * delta_); }

double BlobKernel::lip_bound() const { return 9.0 / (16.0 * pi * delta2_); }

}  // namespace spray
