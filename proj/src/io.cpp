#include "spotiv/io.hpp"

#include "spotiv/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

namespace spotiv {

namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_number(const std::string& field, std::size_t line, const std::string& column) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (!field.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ": column '" + column +
                                      "' is not a number: '" + field + "'");
  }
  return value;
}

std::string fmt_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json mat_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec_json(m.row(i).transpose()));
  return rows;
}

json one_based(const std::vector<Eigen::Index>& idx) {
  json out = json::array();
  for (auto j : idx) out.push_back(j + 1);
  return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

Dataset read_dataset_csv(std::istream& in, const CsvOptions& options) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw Error(ErrorCode::Parse, "empty CSV: missing header");
  const auto header = split(line);
  auto find = [&](const std::string& name) -> std::size_t {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == name) return c;
    }
    throw Error(ErrorCode::Parse, "missing column '" + name + "'");
  };
  const std::size_t y_col = find("y");
  const std::size_t d_col = find("d");
  std::vector<std::size_t> w_cols;
  Eigen::Index named_z = 0;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == y_col || c == d_col) continue;
    w_cols.push_back(c);
    if (!header[c].empty() && header[c][0] == 'z') ++named_z;
  }
  const Eigen::Index p = static_cast<Eigen::Index>(w_cols.size());
  const Eigen::Index pz = options.pz.value_or(named_z);
  if (pz < 0 || pz > p) {
    throw Error(ErrorCode::Parse, "pz = " + std::to_string(pz) + " exceeds the " +
                                      std::to_string(p) + " covariate columns");
  }

  std::vector<double> ys, ds, ws;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(header.size()) + " fields, found " +
                                        std::to_string(fields.size()));
    }
    ys.push_back(parse_number(fields[y_col], line_no, "y"));
    ds.push_back(parse_number(fields[d_col], line_no, "d"));
    for (auto c : w_cols) ws.push_back(parse_number(fields[c], line_no, header[c]));
  }

  const auto n = static_cast<Eigen::Index>(ys.size());
  Dataset data;
  data.pz = pz;
  data.y = Eigen::Map<Eigen::VectorXd>(ys.data(), n);
  data.d = Eigen::Map<Eigen::VectorXd>(ds.data(), n);
  data.W = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      ws.data(), n, p);
  if (options.kind) {
    data.kind = *options.kind;
  } else {
    bool binary = n > 0;
    for (double v : ys) binary = binary && (v == 0.0 || v == 1.0);
    data.kind = binary ? OutcomeKind::Binary : OutcomeKind::Continuous;
  }
  return data;
}

Dataset read_dataset_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, "cannot open '" + path + "'");
  return read_dataset_csv(in, options);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  out << "y,d";
  for (Eigen::Index j = 0; j < data.pz; ++j) out << ",z" << j + 1;
  for (Eigen::Index j = 0; j < data.px(); ++j) out << ",x" << j + 1;
  out << '\n';
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out << fmt_double(data.y[i]) << ',' << fmt_double(data.d[i]);
    for (Eigen::Index j = 0; j < data.p(); ++j) out << ',' << fmt_double(data.W(i, j));
    out << '\n';
  }
}

json to_json(const ScenarioSpec& spec) {
  return json{{"scenario", std::string(to_string(spec.scenario))},
              {"n", spec.n},
              {"c_gamma", spec.c_gamma},
              {"z_dist", std::string(to_string(spec.z_dist))},
              {"seed", spec.seed}};
}

ScenarioSpec scenario_from_json(const json& j) {
  ScenarioSpec spec;
  if (j.contains("scenario")) spec.scenario = parse_scenario(j.at("scenario").get<std::string>());
  if (j.contains("n")) spec.n = j.at("n").get<Eigen::Index>();
  if (j.contains("c_gamma")) spec.c_gamma = j.at("c_gamma").get<double>();
  if (j.contains("z_dist")) spec.z_dist = parse_zdist(j.at("z_dist").get<std::string>());
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  return spec;
}

json to_json(const Estimate& est, const EvalPoint& point) {
  const auto& fs = est.first_stage;
  const auto& cate = est.cate;
  json out;
  out["eval"] = {{"d", point.d}, {"d_prime", point.d_prime}, {"w", vec_json(point.w)}};
  out["first_stage"] = {{"gamma_hat", vec_json(fs.gamma_hat)},
                        {"sigma_v_hat", fs.sigma_v_hat},
                        {"S_hat", one_based(fs.S_hat)},
                        {"condition_number", fs.condition_number}};
  if (fs.warning) out["first_stage"]["warning"] = *fs.warning;
  out["sir"] = {{"eigenvalues", vec_json(est.sir.eigenvalues)},
                {"M_hat", est.sir.M_hat},
                {"c0", est.sir.c0},
                {"Theta_hat", mat_json(est.sir.Theta_hat)}};
  out["structural"] = {{"b_hat", vec_json(est.structural.b_hat)},
                       {"B_hat", mat_json(est.structural.B_hat)},
                       {"ratios", mat_json(est.structural.ratios)}};
  if (est.majority) {
    json votes = json::object();
    for (const auto& [k, c] : est.majority->votes) votes[std::to_string(k + 1)] = c;
    out["majority_test"] = {
        {"passed", est.majority->passed},
        {"votes", votes},
        {"p_hat_source", est.majority->p_hat_source == PHatSource::Logistic ? "logistic" : "kernel"},
        {"ridge_fallback", est.majority->ridge_fallback}};
  } else {
    out["majority_test"] = nullptr;
  }
  out["cate"] = {{"phi_d", cate.phi_d},
                 {"phi_dprime", cate.phi_dprime},
                 {"cate", cate.cate},
                 {"plug_in_se", cate.plug_in_se},
                 {"boot_se", cate.boot_se},
                 {"ci", {cate.ci.first, cate.ci.second}},
                 {"n_boot", cate.n_boot},
                 {"dropped_points", cate.dropped_points},
                 {"bandwidths", vec_json(cate.bandwidths)}};
  return out;
}

json to_json(const SimulationRow& row) {
  return json{{"scenario", std::string(to_string(row.scenario))},
              {"n", row.n},
              {"c_gamma", row.c_gamma},
              {"z_dist", std::string(to_string(row.z_dist))},
              {"MAE", row.mae},
              {"COV", row.cov},
              {"SE", row.se},
              {"MT", optional_number(row.mt)},
              {"replications", row.replications},
              {"failures", row.failures},
              {"dropped_mean", row.dropped_mean},
              {"wall_time", optional_number(row.wall_time)},
              {"truth", row.truth}};
}

SimulationRow simulation_row_from_json(const json& j) {
  SimulationRow row;
  row.scenario = parse_scenario(j.at("scenario").get<std::string>());
  row.n = j.at("n").get<Eigen::Index>();
  row.c_gamma = j.at("c_gamma").get<double>();
  row.z_dist = parse_zdist(j.at("z_dist").get<std::string>());
  row.mae = j.at("MAE").get<double>();
  row.cov = j.at("COV").get<double>();
  row.se = j.at("SE").get<double>();
  row.mt = read_optional(j, "MT");
  row.replications = j.at("replications").get<Eigen::Index>();
  row.failures = j.value("failures", Eigen::Index{0});
  row.dropped_mean = j.at("dropped_mean").get<double>();
  row.wall_time = read_optional(j, "wall_time");
  row.truth = j.value("truth", 0.0);
  return row;
}

json to_json(const SimulationReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) rows.push_back(to_json(r));
  return json{{"rows", rows}};
}

SimulationReport simulation_report_from_json(const json& j) {
  SimulationReport report;
  for (const auto& r : j.at("rows")) report.rows.push_back(simulation_row_from_json(r));
  return report;
}

void write_simulation_csv(std::ostream& out, const SimulationReport& report) {
  out << "scenario,n,c_gamma,z_dist,MAE,COV,SE,MT,replications,failures,dropped_mean,wall_time\n";
  for (const auto& r : report.rows) {
    out << to_string(r.scenario) << ',' << r.n << ',' << fmt_double(r.c_gamma) << ','
        << to_string(r.z_dist) << ',' << fmt_double(r.mae) << ',' << fmt_double(r.cov) << ','
        << fmt_double(r.se) << ',' << (r.mt ? fmt_double(*r.mt) : "") << ',' << r.replications
        << ',' << r.failures << ',' << fmt_double(r.dropped_mean) << ','
        << (r.wall_time ? fmt_double(*r.wall_time) : "") << '\n';
  }
}

}  // namespace spotiv
