#include "dte/io.hpp"

#include <charconv>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

namespace dte::io {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& cell, int row, int col) {
  const std::string t = trim(cell);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size())
    throw InputError("csv: row " + std::to_string(row) + ", column " +
                     std::to_string(col + 1) + ": not a number: '" + cell +
                     "'");
  return value;
}

std::string format17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Dataset parse_dataset_csv(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line)) throw InputError("csv: empty file");
  const auto header = split_csv_line(trim(line));
  const int cols = static_cast<int>(header.size());
  if (cols < 3)
    throw InputError("csv: header must be x1,...,xd,a,y (at least 3 columns)");
  const int d = cols - 2;
  for (int j = 0; j < d; ++j)
    if (trim(header[static_cast<std::size_t>(j)]) != "x" + std::to_string(j + 1))
      throw InputError("csv: header column " + std::to_string(j + 1) +
                       " must be x" + std::to_string(j + 1));
  if (trim(header[static_cast<std::size_t>(d)]) != "a" ||
      trim(header[static_cast<std::size_t>(d + 1)]) != "y")
    throw InputError("csv: header must end with a,y");

  std::vector<std::vector<double>> x_rows;
  std::vector<int> a_vals;
  std::vector<double> y_vals;
  int row = 1;
  while (std::getline(ss, line)) {
    ++row;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto cells = split_csv_line(t);
    if (static_cast<int>(cells.size()) != cols)
      throw InputError("csv: row " + std::to_string(row) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(cols));
    for (const auto& c : cells)
      if (trim(c).empty())
        throw InputError("csv: row " + std::to_string(row) +
                         " has a missing cell");
    std::vector<double> xr(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j)
      xr[static_cast<std::size_t>(j)] = parse_double(cells[static_cast<std::size_t>(j)], row, j);
    const double a = parse_double(cells[static_cast<std::size_t>(d)], row, d);
    if (a != 0.0 && a != 1.0)
      throw InputError("csv: row " + std::to_string(row) +
                       ": treatment must be 0 or 1");
    x_rows.push_back(std::move(xr));
    a_vals.push_back(static_cast<int>(a));
    y_vals.push_back(parse_double(cells[static_cast<std::size_t>(d + 1)], row, d + 1));
  }
  if (x_rows.empty()) throw InputError("csv: no data rows");

  Dataset data;
  const auto n = static_cast<Eigen::Index>(x_rows.size());
  data.x.resize(n, d);
  data.a.resize(n);
  data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j)
      data.x(i, j) = x_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    data.a[i] = a_vals[static_cast<std::size_t>(i)];
    data.y[i] = y_vals[static_cast<std::size_t>(i)];
  }
  return data;
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_dataset_csv(buf.str());
}

std::string dataset_to_csv(const Dataset& data) {
  std::string out;
  for (int j = 0; j < data.d(); ++j) out += "x" + std::to_string(j + 1) + ",";
  out += "a,y\n";
  for (int i = 0; i < data.n(); ++i) {
    for (int j = 0; j < data.d(); ++j) out += format17(data.x(i, j)) + ",";
    out += std::to_string(data.a[i]) + "," + format17(data.y[i]) + "\n";
  }
  return out;
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  write_text_file(path, dataset_to_csv(data));
}

nlohmann::json result_to_json(const tests::TestResult& result,
                              const tests::TestConfig& config, int n, int d,
                              std::optional<int> permutations,
                              bool with_timestamp) {
  nlohmann::json j;
  j["method"] = tests::to_string(result.method);
  j["n"] = n;
  j["d"] = d;
  j["statistic"] = result.statistic;
  j["p_value"] = result.p_value;
  j["alpha"] = result.alpha;
  j["reject"] = result.reject;
  j["n_effective"] = result.n_effective;
  j["version"] = kVersion;

  nlohmann::json cfg;
  cfg["kernel"] = numerics::to_string(config.kernel_family);
  const auto diag = [&](const char* key) -> std::optional<double> {
    const auto it = result.diagnostics.find(key);
    if (it == result.diagnostics.end()) return std::nullopt;
    return it->second;
  };
  if (const auto bw = diag("bandwidth_y_sq")) cfg["bandwidth_y_sq"] = *bw;
  if (const auto bw = diag("bandwidth_x_sq")) cfg["bandwidth_x_sq"] = *bw;
  if (const auto l = diag("lambda")) cfg["lambda"] = *l;
  cfg["clip_eps"] = config.clip_eps;
  cfg["propensity"] = config.propensity_mode == tests::PropensityMode::Logistic
                          ? "logistic"
                          : "known";
  if (config.propensity_mode == tests::PropensityMode::KnownConstant)
    cfg["known_propensity"] = config.known_propensity;
  if (config.split_seed) cfg["seed"] = *config.split_seed;
  if (permutations) cfg["permutations"] = *permutations;
  j["config"] = cfg;

  nlohmann::json diag_json;
  for (const auto& [k, v] : result.diagnostics) diag_json[k] = v;
  j["diagnostics"] = diag_json;

  if (with_timestamp) j["timestamp"] = static_cast<std::int64_t>(::time(nullptr));
  return j;
}

nlohmann::json error_to_json(const std::string& kind,
                             const std::string& message) {
  nlohmann::json j;
  j["error"] = kind;
  j["message"] = message;
  j["version"] = kVersion;
  return j;
}

std::string rate_table_to_csv(const harness::RateTable& table) {
  std::string out = "method,scenario,n,rate,std_error,reps,failures\n";
  for (const auto& r : table.rows) {
    out += r.method + "," + r.scenario + "," + std::to_string(r.n) + "," +
           format17(r.rate) + "," + format17(r.std_error) + "," +
           std::to_string(r.reps) + "," + std::to_string(r.failures) + "\n";
  }
  return out;
}

std::string timing_table_to_csv(const std::vector<harness::TimingRow>& rows) {
  std::string out = "method,n,mean_ms\n";
  for (const auto& r : rows)
    out += r.method + "," + std::to_string(r.n) + "," + format17(r.mean_ms) +
           "\n";
  return out;
}

std::string statistics_to_csv(const std::vector<double>& stats) {
  std::string out = "statistic\n";
  for (const double s : stats) out += format17(s) + "\n";
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file: " + path);
  out << text;
  if (!out) throw Error("write failed: " + path);
}

}  // namespace dte::io
