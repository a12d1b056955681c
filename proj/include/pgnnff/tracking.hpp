#pragma once

#include <span>
#include <string>
#include <vector>

namespace pgnnff {

/// Mean absolute error over a reference horizon. Throws on empty input.
double mae(std::span<const double> e);

/// Per-sample tracking error e(t) = r(t) - y(t) of one executed experiment.
struct TrackingResult {
  std::vector<double> e;  // meters
  double mae = 0.0;
  std::string reference_id;
  std::string model_id;
};

}  // namespace pgnnff
