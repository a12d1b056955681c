#pragma once

#include <functional>
#include <string>

#include "pgnnff/types.hpp"

namespace pgnnff {

enum class BasisKind { Clm, Custom };

/// Physical basis map T_phy: regressor -> known-physics features.
///
/// The CLM kind produces [d2y, dy, sign(dy), y] from phi = [y(t), y(t-1),
/// y(t-2)] using backward-Euler differences; it requires n_a=0, n_b=2, n_c=0.
/// Custom kinds dispatch to a registered pure function tagged with its
/// required RegressorSpec, so LIP and PGNN share one dispatch path.
struct BasisMap {
  BasisKind kind = BasisKind::Clm;
  int n_out = 4;
  double ts = 1e-4;
  std::string name = "clm";
  RegressorSpec required;
  std::function<Vec(const Vec& phi, double ts)> fn;  // set for Custom

  static BasisMap clm(double ts);
};

/// Backward Euler differentiation: (y_t - y_tm1) / ts.
double delta(double y_t, double y_tm1, double ts);

/// sign with sign(0) = 0, keeping the basis odd in velocity.
double signum(double v);

Vec eval_basis(const BasisMap& map, const Regressor& phi);
Vec eval_basis(const BasisMap& map, const Vec& phi);

/// Registry for custom basis maps (string key -> map factory).
void register_basis(const std::string& key, int n_out,
                    const RegressorSpec& required,
                    std::function<Vec(const Vec&, double)> fn);
BasisMap make_basis(const std::string& key, double ts);

}  // namespace pgnnff
