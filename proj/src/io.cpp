#include "pgnnff/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace pgnnff {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

double parse_field(const std::string& line, std::size_t from, std::size_t to,
                   const fs::path& path, std::size_t lineno) {
  double v = 0.0;
  const char* first = line.data() + from;
  const char* last = line.data() + to;
  while (first < last && *first == ' ') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{})
    throw IoError(path.string() + ":" + std::to_string(lineno) +
                  ": cannot parse number '" + line.substr(from, to - from) +
                  "'");
  return v;
}

/// Parses a CSV with the given header into per-column doubles.
std::vector<std::vector<double>> read_csv(const fs::path& path,
                                          const std::string& header) {
  const std::string text = read_text_file(path);
  const std::size_t n_cols =
      1 + static_cast<std::size_t>(
              std::count(header.begin(), header.end(), ','));
  std::vector<std::vector<double>> cols(n_cols);

  std::size_t pos = 0, lineno = 0;
  bool saw_header = false;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = eol + 1;
    ++lineno;
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != header)
        throw IoError(path.string() + ": expected header '" + header +
                      "', found '" + line + "'");
      saw_header = true;
      continue;
    }
    std::size_t start = 0;
    for (std::size_t c = 0; c < n_cols; ++c) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) comma = line.size();
      if (c + 1 < n_cols && comma == line.size())
        throw IoError(path.string() + ":" + std::to_string(lineno) +
                      ": too few columns");
      cols[c].push_back(parse_field(line, start, comma, path, lineno));
      start = comma + 1;
    }
  }
  if (!saw_header) throw IoError(path.string() + ": empty file");
  return cols;
}

}  // namespace

void write_dataset_csv(const fs::path& path, const Dataset& data) {
  std::string out = "t,u,y\n";
  for (long t = 0; t < data.size(); ++t) {
    out += std::to_string(t);
    out += ',';
    out += format_double(data.u[t]);
    out += ',';
    out += format_double(data.y[t]);
    out += '\n';
  }
  write_text_file(path, out);
}

Dataset read_dataset_csv(const fs::path& path, double ts) {
  const auto cols = read_csv(path, "t,u,y");
  Dataset d;
  d.ts = ts;
  d.u = cols[1];
  d.y = cols[2];
  d.validate();
  return d;
}

void write_reference_csv(const fs::path& path,
                         const ReferenceProfile& profile) {
  std::string out = "t,r\n";
  for (long t = 0; t < profile.size(); ++t) {
    out += std::to_string(t);
    out += ',';
    out += format_double(profile.r[t]);
    out += '\n';
  }
  write_text_file(path, out);
}

ReferenceProfile read_reference_csv(const fs::path& path, double ts) {
  const auto cols = read_csv(path, "t,r");
  ReferenceProfile p;
  p.ts = ts;
  p.r = cols[1];
  p.id = path.stem().string();
  if (p.r.empty()) throw IoError(path.string() + ": empty reference");
  return p;
}

void write_ff_csv(const fs::path& path, const std::vector<double>& uff) {
  std::string out = "t,u_ff\n";
  for (std::size_t t = 0; t < uff.size(); ++t) {
    out += std::to_string(t);
    out += ',';
    out += format_double(uff[t]);
    out += '\n';
  }
  write_text_file(path, out);
}

std::vector<double> read_ff_csv(const fs::path& path) {
  return read_csv(path, "t,u_ff")[1];
}

void write_history_csv(const fs::path& path, const TrainingHistory& history) {
  if (history.records.empty()) throw IoError("history: empty");
  const long n_phy = history.records.front().theta_phy.size();
  std::string out = "iter,total_cost,data_fit,reg_term";
  for (long i = 0; i < n_phy; ++i)
    out += ",theta_phy_" + std::to_string(i);
  out += '\n';
  for (const auto& rec : history.records) {
    out += std::to_string(rec.iteration);
    out += ',';
    out += format_double(rec.total);
    out += ',';
    out += format_double(rec.data_fit);
    out += ',';
    out += format_double(rec.reg_term);
    for (long i = 0; i < n_phy; ++i) {
      out += ',';
      out += format_double(rec.theta_phy[i]);
    }
    out += '\n';
  }
  write_text_file(path, out);
}

void write_tracking_csv(const fs::path& path,
                        const ReferenceProfile& reference,
                        const TrackingResult& result) {
  std::string out = "t,r,y,e\n";
  for (std::size_t t = 0; t < result.e.size(); ++t) {
    const double r = reference.r[t];
    out += std::to_string(t);
    out += ',';
    out += format_double(r);
    out += ',';
    out += format_double(r - result.e[t]);
    out += ',';
    out += format_double(result.e[t]);
    out += '\n';
  }
  write_text_file(path, out);
}

void write_sweep_csv(const fs::path& path, const std::vector<SweepRow>& rows) {
  std::string out =
      "lambda,seed,final_data_fit,final_lip_dist2,best_cost,best_iteration\n";
  for (const auto& r : rows) {
    out += format_double(r.lambda);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += format_double(r.final_data_fit);
    out += ',';
    out += format_double(r.final_lip_dist2);
    out += ',';
    out += format_double(r.best_cost);
    out += ',';
    out += std::to_string(r.best_iteration);
    out += '\n';
  }
  write_text_file(path, out);
}

void write_table_csv(const fs::path& path,
                     const std::vector<TableCell>& cells) {
  std::string out = "mode,reference,n_l,seed,mae,best_cost\n";
  for (const auto& c : cells) {
    out += to_string(c.mode);
    out += ',';
    out += c.reference_id;
    out += ',';
    out += std::to_string(c.n_l);
    out += ',';
    out += std::to_string(c.seed);
    out += ',';
    out += format_double(c.mae);
    out += ',';
    out += format_double(c.best_cost);
    out += '\n';
  }
  write_text_file(path, out);
}

std::string render_table_text(const std::vector<TableCell>& cells) {
  std::ostringstream ss;
  ss << "mode            reference  n_l  seed  mae [m]\n";
  for (const auto& c : cells) {
    char line[128];
    std::snprintf(line, sizeof(line), "%-15s %-9s %4d %5llu  %.6e\n",
                  to_string(c.mode).c_str(), c.reference_id.c_str(), c.n_l,
                  static_cast<unsigned long long>(c.seed), c.mae);
    ss << line;
  }
  return ss.str();
}

namespace {

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (long i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from_json(const json& a) {
  Vec v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i].get<double>();
  return v;
}

json spec_to_json(const RegressorSpec& s) {
  return json{{"n_a", s.n_a}, {"n_b", s.n_b}, {"n_c", s.n_c}, {"ts", s.ts}};
}

RegressorSpec spec_from_json(const json& j) {
  RegressorSpec s;
  s.n_a = j.at("n_a").get<int>();
  s.n_b = j.at("n_b").get<int>();
  s.n_c = j.at("n_c").get<int>();
  s.ts = j.at("ts").get<double>();
  s.validate();
  return s;
}

json nn_to_json(const NNParams& nn) {
  json layers = json::array();
  json widths = json::array();
  widths.push_back(nn.layers.front().W.cols());
  for (const auto& l : nn.layers) {
    widths.push_back(l.W.rows());
    json w = json::array();  // row-major: one array per output neuron
    for (long r = 0; r < l.W.rows(); ++r) {
      json row = json::array();
      for (long c = 0; c < l.W.cols(); ++c) row.push_back(l.W(r, c));
      w.push_back(std::move(row));
    }
    layers.push_back(json{{"W", std::move(w)}, {"B", vec_to_json(l.B)}});
  }
  return json{{"activation", to_string(nn.activation)},
              {"widths", std::move(widths)},
              {"layers", std::move(layers)}};
}

NNParams nn_from_json(const json& j) {
  NNParams nn;
  nn.activation = activation_from_string(j.at("activation").get<std::string>());
  for (const auto& lj : j.at("layers")) {
    NNLayer l;
    const auto& w = lj.at("W");
    const long rows = static_cast<long>(w.size());
    const long cols = rows > 0 ? static_cast<long>(w[0].size()) : 0;
    l.W.resize(rows, cols);
    for (long r = 0; r < rows; ++r)
      for (long c = 0; c < cols; ++c) l.W(r, c) = w[r][c].get<double>();
    l.B = vec_from_json(lj.at("B"));
    nn.layers.push_back(std::move(l));
  }
  nn.validate();
  return nn;
}

}  // namespace

void write_model_json(const fs::path& path, const Model& model,
                      const json* cfg_echo) {
  json j;
  j["basis_kind"] = model.basis_kind;
  j["spec"] = spec_to_json(model.spec);
  if (model.kind == PredictorKind::Lip) {
    j["theta"] = vec_to_json(model.lip.theta);
  } else {
    j["predictor"] = to_string(model.kind);
    j["theta_phy"] = vec_to_json(model.pgnn.theta_phy);
    j["nn"] = nn_to_json(model.pgnn.nn);
    j["input_scaling"] = vec_to_json(model.input_scaling);
  }
  if (cfg_echo) j["cfg"] = *cfg_echo;
  write_json_file(path, j);
}

Model read_model_json(const fs::path& path) {
  const json j = read_json_file(path);
  Model m;
  m.basis_kind = j.at("basis_kind").get<std::string>();
  m.spec = spec_from_json(j.at("spec"));
  m.id = path.stem().string();
  if (j.contains("nn")) {
    m.kind = j.contains("predictor")
                 ? predictor_kind_from_string(j["predictor"].get<std::string>())
                 : PredictorKind::Pgnn;
    m.pgnn.nn = nn_from_json(j.at("nn"));
    m.pgnn.theta_phy = vec_from_json(j.at("theta_phy"));
    m.input_scaling = vec_from_json(j.at("input_scaling"));
  } else {
    m.kind = PredictorKind::Lip;
    m.lip.theta = vec_from_json(j.at("theta"));
  }
  return m;
}

void write_json_file(const fs::path& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

json read_json_file(const fs::path& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace pgnnff
