#include "pgnnff/tracking.hpp"

#include <cmath>

#include "pgnnff/types.hpp"

namespace pgnnff {

double mae(std::span<const double> e) {
  if (e.empty()) throw NumericalError("mae: empty error sequence");
  double acc = 0.0;
  for (double v : e) acc += std::abs(v);
  return acc / static_cast<double>(e.size());
}

}  // namespace pgnnff
