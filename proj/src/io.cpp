#include "zilr/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "zilr/hash.hpp"

namespace zilr::io {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(const std::string& cell) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string now_utc() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (quoted) throw std::runtime_error("unterminated quote");
  out.push_back(trim(cur));
  return out;
}

std::map<double, double> parse_recode(const std::string& spec) {
  std::map<double, double> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("recode entry '" + item + "' is not of the form from:to");
    const auto from = parse_number(trim(item.substr(0, colon)));
    const auto to = parse_number(trim(item.substr(colon + 1)));
    if (!from || !to) throw std::invalid_argument("recode entry '" + item + "' is not numeric");
    out[*from] = *to;
  }
  return out;
}

Dataset load_csv(const fs::path& path, const CsvBindings& bindings, LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open for reading");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const std::vector<std::string> header = split_csv_line(line);

  auto column_index = [&](const std::string& name) {
    for (std::size_t j = 0; j < header.size(); ++j)
      if (header[j] == name) return j;
    throw std::runtime_error(path.string() + ": column '" + name + "' not found in header");
  };
  if (bindings.outcome.empty()) throw std::invalid_argument("no outcome column bound");
  struct Col {
    std::string name;
    std::size_t index;
    const std::map<double, double>* recode;
  };
  std::vector<Col> cols;
  cols.push_back({bindings.outcome, column_index(bindings.outcome), &bindings.outcome_recode});
  for (const ColumnBinding& b : bindings.covariates)
    cols.push_back({b.name, column_index(b.name), &b.recode});

  LoadReport rep;
  std::vector<std::vector<double>> rows;
  int file_row = 1;
  while (std::getline(in, line)) {
    ++file_row;
    if (trim(line).empty()) continue;
    ++rep.rows_read;
    std::vector<std::string> cells;
    try {
      cells = split_csv_line(line);
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ": row " + std::to_string(file_row) + ": " +
                               e.what());
    }
    std::vector<double> vals;
    bool complete = true;
    for (const Col& c : cols) {
      const std::string cell = c.index < cells.size() ? cells[c.index] : "";
      if (cell.empty()) {
        ++rep.missing[c.name];
        complete = false;
        vals.push_back(std::nan(""));
        continue;
      }
      const auto v = parse_number(cell);
      if (!v)
        throw std::runtime_error(path.string() + ": row " + std::to_string(file_row) +
                                 ", column '" + c.name + "': non-numeric value '" + cell + "'");
      double x = *v;
      if (!c.recode->empty()) {
        const auto it = c.recode->find(x);
        if (it == c.recode->end()) {
          ++rep.out_of_map[c.name];
          complete = false;
          vals.push_back(std::nan(""));
          continue;
        }
        x = it->second;
      }
      vals.push_back(x);
    }
    if (!complete) {
      if (bindings.complete_case) continue;
      throw std::runtime_error(path.string() + ": row " + std::to_string(file_row) +
                               " has a missing value and complete-case filtering is off");
    }
    rows.push_back(std::move(vals));
  }
  if (rows.empty())
    throw std::runtime_error(path.string() + ": no rows left after complete-case filtering");

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto k = static_cast<Eigen::Index>(bindings.covariates.size());
  Dataset data;
  data.y.resize(n);
  data.X.resize(n, k + 1);
  data.column_names = {"intercept"};
  for (const ColumnBinding& b : bindings.covariates) data.column_names.push_back(b.name);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double yv = rows[i][0];
    if (yv != 0.0 && yv != 1.0)
      throw std::runtime_error(path.string() + ": outcome '" + bindings.outcome +
                               "' takes value " + format_double(yv) +
                               " on a retained row; recode it to 0/1");
    data.y[i] = yv;
    data.X(i, 0) = 1.0;
    for (Eigen::Index j = 0; j < k; ++j) data.X(i, j + 1) = rows[i][j + 1];
  }
  for (Eigen::Index j = 0; j < k; ++j) {
    const ColumnBinding& b = bindings.covariates[j];
    if (!b.standardize) continue;
    auto col = data.X.col(j + 1);
    const double mean = col.mean();
    const double sd =
        n > 1 ? std::sqrt((col.array() - mean).square().sum() / static_cast<double>(n - 1)) : 0.0;
    if (!(sd > 0.0))
      throw std::runtime_error(path.string() + ": column '" + b.name +
                               "' is constant on retained rows and cannot be standardized");
    col = (col.array() - mean) / sd;
    rep.standardization[b.name] = {mean, sd};
  }
  rep.rows_kept = static_cast<int>(n);
  if (report) *report = std::move(rep);
  return data;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_dataset_csv(const fs::path& path, const Dataset& data, const std::string& outcome) {
  std::ostringstream out;
  out << outcome;
  for (int j = 1; j < data.d(); ++j)
    out << ',' << (j < static_cast<int>(data.column_names.size()) ? data.column_names[j]
                                                                    : "x" + std::to_string(j));
  out << '\n';
  for (int i = 0; i < data.n(); ++i) {
    out << format_double(data.y[i]);
    for (int j = 1; j < data.d(); ++j) out << ',' << format_double(data.X(i, j));
    out << '\n';
  }
  write_text(path, out.str());
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

void write_key_values(const fs::path& path, const KeyValues& kv) {
  std::ostringstream out;
  for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
  write_text(path, out.str());
}

KeyValues read_key_values(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open for reading");
  KeyValues kv;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path.string() + ": line " + std::to_string(row) +
                               " is not of the form key = value");
    kv.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return kv;
}

fs::path resolve_output_dir(const std::string& flag, const std::string& default_name) {
  if (!flag.empty()) return flag;
  if (const char* root = std::getenv("ZILR_OUTPUT_ROOT"); root && *root)
    return fs::path(root) / default_name;
  return fs::path("runs") / default_name;
}

RunManifest::RunManifest(fs::path dir, std::string subcommand, std::vector<std::string> argv,
                         std::map<std::string, std::string> config, std::uint64_t seed)
    : dir_(std::move(dir)),
      subcommand_(std::move(subcommand)),
      argv_(std::move(argv)),
      config_(std::move(config)),
      seed_(seed) {}

void RunManifest::add_input(const fs::path& path) {
  inputs_.emplace_back(path.string(), sha256_file_hex(path));
}

void RunManifest::add_output(const fs::path& path) {
  const std::string rel = path.lexically_relative(dir_).string();
  const std::string name = rel.empty() || rel.rfind("..", 0) == 0 ? path.string() : rel;
  for (const std::string& o : outputs_)
    if (o == name) return;
  outputs_.push_back(name);
}

void RunManifest::start() {
  started_ = now_utc();
  write("running");
}

void RunManifest::finalize(const std::string& status) {
  finished_ = now_utc();
  write(status);
}

void RunManifest::write(const std::string& status) const {
  nlohmann::ordered_json j;
  j["tool"] = "zilr";
  j["version"] = kToolVersion;
  j["subcommand"] = subcommand_;
  j["argv"] = argv_;
  j["seed"] = seed_;
  j["config"] = config_;
  j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& [p, h] : inputs_) j["inputs"].push_back({{"path", p}, {"sha256", h}});
  j["outputs"] = outputs_;
  j["status"] = status;
  j["started"] = started_;
  j["finished"] = finished_.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(finished_);
  write_text(path(), j.dump(2) + "\n");
}

}  // namespace zilr::io
