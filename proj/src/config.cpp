#include "pgnnff/config.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "pgnnff/io.hpp"

namespace pgnnff {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& source, std::size_t lineno,
                       const std::string& msg) {
  throw ConfigError(source + ":" + std::to_string(lineno) + ": " + msg);
}

TomlValue parse_scalar(const std::string& raw, const std::string& source,
                       std::size_t lineno) {
  TomlValue v;
  if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
    v.type = TomlValue::Type::String;
    v.str = raw.substr(1, raw.size() - 2);
    return v;
  }
  if (raw == "true" || raw == "false") {
    v.type = TomlValue::Type::Boolean;
    v.boolean = (raw == "true");
    return v;
  }
  v.type = TomlValue::Type::Number;
  const char* first = raw.data();
  const char* last = raw.data() + raw.size();
  auto res = std::from_chars(first, last, v.num);
  if (res.ec != std::errc{} || res.ptr != last)
    fail(source, lineno, "cannot parse value '" + raw + "'");
  return v;
}

TomlValue parse_value(const std::string& raw, const std::string& source,
                      std::size_t lineno) {
  if (!raw.empty() && raw.front() == '[') {
    if (raw.back() != ']') fail(source, lineno, "unterminated array");
    TomlValue v;
    v.type = TomlValue::Type::Array;
    std::string body = raw.substr(1, raw.size() - 2);
    std::size_t pos = 0;
    while (pos <= body.size()) {
      std::size_t comma = body.find(',', pos);
      if (comma == std::string::npos) comma = body.size();
      const std::string item = trim(body.substr(pos, comma - pos));
      if (!item.empty()) v.array.push_back(parse_scalar(item, source, lineno));
      pos = comma + 1;
    }
    return v;
  }
  return parse_scalar(raw, source, lineno);
}

// Strips a trailing comment that is not inside a string.
std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

}  // namespace

std::map<std::string, TomlValue> parse_toml(const std::string& text,
                                            const std::string& source) {
  std::map<std::string, TomlValue> out;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(source, lineno, "unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(source, lineno, "empty section name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(source, lineno, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail(source, lineno, "empty key");
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) fail(source, lineno, "empty value for key '" + key + "'");
    const std::string full = section.empty() ? key : section + "." + key;
    if (out.count(full)) fail(source, lineno, "duplicate key '" + full + "'");
    out[full] = parse_value(value, source, lineno);
  }
  return out;
}

namespace {

class Reader {
 public:
  Reader(std::map<std::string, TomlValue> table, std::string source)
      : table_(std::move(table)), source_(std::move(source)) {}

  bool has(const std::string& key) const { return table_.count(key) > 0; }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return expect(key, TomlValue::Type::Number).num;
  }
  long integer(const std::string& key, long fallback) {
    if (!has(key)) return fallback;
    const double v = expect(key, TomlValue::Type::Number).num;
    if (v != std::floor(v))
      throw ConfigError(source_ + ": " + key + " must be an integer");
    return static_cast<long>(v);
  }
  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    return expect(key, TomlValue::Type::Boolean).boolean;
  }
  std::string str(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    return expect(key, TomlValue::Type::String).str;
  }
  std::vector<double> numbers(const std::string& key,
                              std::vector<double> fallback) {
    if (!has(key)) return fallback;
    const TomlValue& v = expect(key, TomlValue::Type::Array);
    std::vector<double> out;
    for (const auto& item : v.array) {
      if (item.type != TomlValue::Type::Number)
        throw ConfigError(source_ + ": " + key + " must be a number array");
      out.push_back(item.num);
    }
    return out;
  }
  std::vector<std::string> strings(const std::string& key,
                                   std::vector<std::string> fallback) {
    if (!has(key)) return fallback;
    const TomlValue& v = expect(key, TomlValue::Type::Array);
    std::vector<std::string> out;
    for (const auto& item : v.array) {
      if (item.type != TomlValue::Type::String)
        throw ConfigError(source_ + ": " + key + " must be a string array");
      out.push_back(item.str);
    }
    return out;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : table_)
      if (!used_.count(key))
        throw ConfigError(source_ + ": unknown key '" + key + "'");
  }

 private:
  const TomlValue& expect(const std::string& key, TomlValue::Type type) {
    used_.insert(key);
    const TomlValue& v = table_.at(key);
    if (v.type != type)
      throw ConfigError(source_ + ": wrong type for key '" + key + "'");
    return v;
  }

  std::map<std::string, TomlValue> table_;
  std::string source_;
  mutable std::set<std::string> used_;
};

}  // namespace

ExperimentConfig ExperimentConfig::from_toml_text(const std::string& text,
                                                  const std::string& source) {
  Reader r(parse_toml(text, source), source);
  ExperimentConfig c;

  c.root_seed = static_cast<std::uint64_t>(r.integer("root_seed", 1));
  c.out_dir = r.str("out_dir", "");
  c.threads = static_cast<int>(r.integer("threads", 1));
  if (c.threads < 1) throw ConfigError(source + ": threads must be >= 1");

  c.plant.m = r.number("plant.m", 18.8);
  c.plant.fv = r.number("plant.fv", 172.0);
  c.plant.fc = r.number("plant.fc", 7.21);
  c.plant.fk = r.number("plant.fk", 1.36e-8);
  c.plant.ts = r.number("plant.ts", 1e-4);
  if (!(c.plant.ts > 0.0))
    throw ConfigError(source + ": plant.ts must be > 0");
  c.plant.encoder_resolution = r.number("plant.encoder_resolution", 0.5e-5);
  c.plant.dither_sigma = r.number("plant.dither_sigma", 50.0);
  c.plant.seed = c.root_seed;

  const std::string g_kind = r.str("plant.g", "sin_tanh");
  if (g_kind == "none") {
    c.plant.g = GSpec::none();
  } else if (g_kind == "sin_tanh") {
    c.plant.g = GSpec::sin_tanh(
        r.number("plant.g_a", 5.0), r.number("plant.g_p", 0.025),
        r.number("plant.g_b", 2.0), r.number("plant.g_v0", 0.01));
  } else if (g_kind == "tanh_net") {
    c.g_seed = static_cast<std::uint64_t>(r.integer("plant.g_seed", 7));
    c.g_neurons = static_cast<int>(r.integer("plant.g_neurons", 16));
    c.g_scale = r.number("plant.g_scale", 1.5);
    c.plant.g = GSpec::tanh_net(c.g_seed, c.g_neurons, 0.1, 0.05, c.g_scale);
  } else {
    throw ConfigError(source + ": plant.g must be none|sin_tanh|tanh_net");
  }

  c.plant.controller = PidGains::for_mass(c.plant.m);
  c.plant.controller.kp = r.number("controller.kp", c.plant.controller.kp);
  c.plant.controller.ki = r.number("controller.ki", c.plant.controller.ki);
  c.plant.controller.kd = r.number("controller.kd", c.plant.controller.kd);
  c.plant.controller.integrator_limit =
      r.number("controller.integrator_limit", 1000.0);
  c.plant.controller.deriv_tau = r.number("controller.deriv_tau", 7.96e-4);
  c.plant.validate();

  c.spec.n_a = static_cast<int>(r.integer("regressor.n_a", 0));
  c.spec.n_b = static_cast<int>(r.integer("regressor.n_b", 2));
  c.spec.n_c = static_cast<int>(r.integer("regressor.n_c", 0));
  c.spec.ts = c.plant.ts;
  c.spec.validate();
  c.basis = r.str("regressor.basis", "clm");

  c.data_reference = r.str("data.reference", "r1");
  c.data_strokes = static_cast<int>(r.integer("data.strokes", 4));
  c.data_dwell = r.number("data.dwell", 0.2);
  c.data_dither = r.boolean("data.dither", true);
  c.data_encoder_resolution = r.number("data.encoder_resolution", 0.0);
  if (c.data_strokes < 1)
    throw ConfigError(source + ": data.strokes must be >= 1");

  c.train_lambda = r.number("train.lambda", 0.01);
  if (c.train_lambda < 0.0)
    throw ConfigError(source + ": train.lambda must be >= 0");
  c.training.mode =
      train_mode_from_string(r.str("train.mode", "regularized"));
  c.training.hidden_widths = {static_cast<int>(r.integer("train.nl", 16))};
  c.training.optimizer.max_iterations = r.integer("train.iterations", 5000);
  c.training.optimizer.step_size = r.number("train.step_size", 1e-3);
  c.training.optimizer.step_decay = r.number("train.step_decay", 1.0);
  c.training.optimizer.tolerance = r.number("train.tolerance", 0.0);
  c.training.seed = c.root_seed;
  c.training.pinn_lambda = r.number("train.pinn_lambda", 0.1);
  c.training.init_scale = r.number("train.init_scale", 1.0);
  c.training.max_rows = r.integer("train.max_rows", 20000);

  c.table_modes = r.strings("reproduce.modes",
                            {"regularized", "unregularized", "sequential",
                             "pinn_baseline"});
  for (const auto& m : c.table_modes) train_mode_from_string(m);
  const auto nl = r.numbers("reproduce.nl", {16, 8});
  c.table_nl.clear();
  for (double v : nl) c.table_nl.push_back(static_cast<int>(v));
  c.table_seeds = static_cast<int>(r.integer("reproduce.seeds", 3));
  if (c.table_seeds < 1)
    throw ConfigError(source + ": reproduce.seeds must be >= 1");
  c.sweep_lambdas = r.numbers("sweep.lambdas", {0.0, 1e-4, 1e-2, 1.0});
  c.sweep_seeds = static_cast<int>(r.integer("sweep.seeds", 1));
  if (c.sweep_seeds < 1)
    throw ConfigError(source + ": sweep.seeds must be >= 1");

  r.reject_unknown();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  return from_toml_text(read_text_file(path), path.string());
}

PlantConfig ExperimentConfig::data_plant() const {
  PlantConfig p = plant;
  p.encoder_resolution = data_encoder_resolution;
  return p;
}

std::string ExperimentConfig::echo_toml() const {
  std::ostringstream out;
  auto num = [](double v) { return format_double(v); };
  out << "root_seed = " << root_seed << "\n";
  out << "out_dir = \"" << out_dir << "\"\n";
  out << "threads = " << threads << "\n\n";

  out << "[plant]\n";
  out << "m = " << num(plant.m) << "\n";
  out << "fv = " << num(plant.fv) << "\n";
  out << "fc = " << num(plant.fc) << "\n";
  out << "fk = " << num(plant.fk) << "\n";
  out << "ts = " << num(plant.ts) << "\n";
  out << "encoder_resolution = " << num(plant.encoder_resolution) << "\n";
  out << "dither_sigma = " << num(plant.dither_sigma) << "\n";
  switch (plant.g.kind) {
    case GSpec::Kind::None:
      out << "g = \"none\"\n";
      break;
    case GSpec::Kind::SinTanh:
      out << "g = \"sin_tanh\"\n";
      out << "g_a = " << num(plant.g.a) << "\n";
      out << "g_p = " << num(plant.g.p) << "\n";
      out << "g_b = " << num(plant.g.b) << "\n";
      out << "g_v0 = " << num(plant.g.v0) << "\n";
      break;
    case GSpec::Kind::TanhNet:
      out << "g = \"tanh_net\"\n";
      out << "g_seed = " << g_seed << "\n";
      out << "g_neurons = " << g_neurons << "\n";
      out << "g_scale = " << num(g_scale) << "\n";
      break;
  }
  out << "\n[controller]\n";
  out << "kp = " << num(plant.controller.kp) << "\n";
  out << "ki = " << num(plant.controller.ki) << "\n";
  out << "kd = " << num(plant.controller.kd) << "\n";
  out << "integrator_limit = " << num(plant.controller.integrator_limit)
      << "\n";
  out << "deriv_tau = " << num(plant.controller.deriv_tau) << "\n";

  out << "\n[regressor]\n";
  out << "n_a = " << spec.n_a << "\n";
  out << "n_b = " << spec.n_b << "\n";
  out << "n_c = " << spec.n_c << "\n";
  out << "basis = \"" << basis << "\"\n";

  out << "\n[data]\n";
  out << "reference = \"" << data_reference << "\"\n";
  out << "strokes = " << data_strokes << "\n";
  out << "dwell = " << num(data_dwell) << "\n";
  out << "dither = " << (data_dither ? "true" : "false") << "\n";
  out << "encoder_resolution = " << num(data_encoder_resolution) << "\n";

  out << "\n[train]\n";
  out << "lambda = " << num(train_lambda) << "\n";
  out << "mode = \"" << to_string(training.mode) << "\"\n";
  out << "nl = " << training.hidden_widths.front() << "\n";
  out << "iterations = " << training.optimizer.max_iterations << "\n";
  out << "step_size = " << num(training.optimizer.step_size) << "\n";
  out << "step_decay = " << num(training.optimizer.step_decay) << "\n";
  out << "tolerance = " << num(training.optimizer.tolerance) << "\n";
  out << "pinn_lambda = " << num(training.pinn_lambda) << "\n";
  out << "init_scale = " << num(training.init_scale) << "\n";
  out << "max_rows = " << training.max_rows << "\n";

  out << "\n[reproduce]\n";
  out << "modes = [";
  for (std::size_t i = 0; i < table_modes.size(); ++i)
    out << (i ? ", " : "") << "\"" << table_modes[i] << "\"";
  out << "]\n";
  out << "nl = [";
  for (std::size_t i = 0; i < table_nl.size(); ++i)
    out << (i ? ", " : "") << table_nl[i];
  out << "]\n";
  out << "seeds = " << table_seeds << "\n";

  out << "\n[sweep]\n";
  out << "lambdas = [";
  for (std::size_t i = 0; i < sweep_lambdas.size(); ++i)
    out << (i ? ", " : "") << num(sweep_lambdas[i]);
  out << "]\n";
  out << "seeds = " << sweep_seeds << "\n";
  return out.str();
}

}  // namespace pgnnff
