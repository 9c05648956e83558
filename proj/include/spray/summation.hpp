#pragma once

#include <cstddef>

namespace spray {

// Kahan compensated accumulator for long sums of doubles.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }

  double value() const { return sum; }
};

template <typename It, typename F>
double kahan_sum(It first, It last, F&& f) {
  KahanSum acc;
  for (; first != last; ++first) acc.add(f(*first));
  return acc.value();
}

}  // namespace spray
