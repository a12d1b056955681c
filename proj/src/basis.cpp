#include "pgnnff/basis.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace pgnnff {

double delta(double y_t, double y_tm1, double ts) { return (y_t - y_tm1) / ts; }

double signum(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

BasisMap BasisMap::clm(double ts) {
  BasisMap m;
  m.kind = BasisKind::Clm;
  m.n_out = 4;
  m.ts = ts;
  m.name = "clm";
  m.required = RegressorSpec{0, 2, 0, ts};
  return m;
}

static Vec eval_clm(const Vec& phi, double ts) {
  // phi = [y(t), y(t-1), y(t-2)]
  const double dy = delta(phi[0], phi[1], ts);
  const double d2y = (phi[0] - 2.0 * phi[1] + phi[2]) / (ts * ts);
  Vec out(4);
  out << d2y, dy, signum(dy), phi[0];
  return out;
}

Vec eval_basis(const BasisMap& map, const Vec& phi) {
  if (phi.size() != map.required.length())
    throw NumericalError("eval_basis: regressor length " +
                         std::to_string(phi.size()) + " does not match basis '" +
                         map.name + "'");
  if (map.kind == BasisKind::Clm) return eval_clm(phi, map.ts);
  Vec out = map.fn(phi, map.ts);
  if (out.size() != map.n_out)
    throw NumericalError("eval_basis: custom map '" + map.name +
                         "' returned wrong dimension");
  return out;
}

Vec eval_basis(const BasisMap& map, const Regressor& phi) {
  return eval_basis(map, phi.phi);
}

namespace {

struct BasisEntry {
  int n_out;
  RegressorSpec required;
  std::function<Vec(const Vec&, double)> fn;
};

std::map<std::string, BasisEntry>& registry() {
  static std::map<std::string, BasisEntry> r;
  return r;
}

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

void register_basis(const std::string& key, int n_out,
                    const RegressorSpec& required,
                    std::function<Vec(const Vec&, double)> fn) {
  std::lock_guard<std::mutex> lock(registry_mutex());
  registry()[key] = BasisEntry{n_out, required, std::move(fn)};
}

BasisMap make_basis(const std::string& key, double ts) {
  if (key == "clm") return BasisMap::clm(ts);
  std::lock_guard<std::mutex> lock(registry_mutex());
  auto it = registry().find(key);
  if (it == registry().end())
    throw ConfigError("unknown basis kind: '" + key + "'");
  BasisMap m;
  m.kind = BasisKind::Custom;
  m.n_out = it->second.n_out;
  m.ts = ts;
  m.name = key;
  m.required = it->second.required;
  m.required.ts = ts;
  m.fn = it->second.fn;
  return m;
}

}  // namespace pgnnff
