#pragma once

// CSV ingestion and emission, run directories and manifests.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "zilr/model.hpp"

namespace zilr::io {

inline constexpr const char* kToolVersion = "0.1.0";

struct ColumnBinding {
  std::string name;
  bool standardize = false;
  // When non-empty, values are mapped through it and anything else is missing.
  std::map<double, double> recode;
};

struct CsvBindings {
  std::string outcome;
  std::map<double, double> outcome_recode;
  std::vector<ColumnBinding> covariates;
  bool complete_case = true;
};

struct LoadReport {
  int rows_read = 0;
  int rows_kept = 0;
  std::map<std::string, int> missing;     // empty cells per column
  std::map<std::string, int> out_of_map;  // values outside a recode map
  std::map<std::string, std::pair<double, double>> standardization;  // mean, sd
};

/// Comma-separated, header required, empty cell = missing, '.' decimal point.
/// Double quotes may wrap a field.  Errors name the file row and column.
Dataset load_csv(const std::filesystem::path& path, const CsvBindings& bindings,
                 LoadReport* report = nullptr);

/// Splits one CSV record.  Throws on an unterminated quote.
std::vector<std::string> split_csv_line(const std::string& line);

/// Writes y then the non-intercept columns of X, full precision.
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data,
                       const std::string& outcome = "y");

/// Parses "k1:v1,k2:v2" into a recode map.
std::map<double, double> parse_recode(const std::string& spec);

std::string format_double(double v);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

void write_text(const std::filesystem::path& path, const std::string& text);
void write_key_values(const std::filesystem::path& path, const KeyValues& kv);
KeyValues read_key_values(const std::filesystem::path& path);

/// Flag value, else $ZILR_OUTPUT_ROOT/<default_name>, else runs/<default_name>.
std::filesystem::path resolve_output_dir(const std::string& flag, const std::string& default_name);

/// manifest.json in the run directory: written by start(), rewritten with the
/// produced files and end time by finalize().
class RunManifest {
 public:
  RunManifest(std::filesystem::path dir, std::string subcommand, std::vector<std::string> argv,
              std::map<std::string, std::string> config, std::uint64_t seed);

  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);
  void start();
  void finalize(const std::string& status);

  [[nodiscard]] const std::filesystem::path& dir() const { return dir_; }
  [[nodiscard]] std::filesystem::path path() const { return dir_ / "manifest.json"; }
  [[nodiscard]] const std::vector<std::string>& outputs() const { return outputs_; }

 private:
  void write(const std::string& status) const;

  std::filesystem::path dir_;
  std::string subcommand_;
  std::vector<std::string> argv_;
  std::map<std::string, std::string> config_;
  std::uint64_t seed_;
  std::vector<std::pair<std::string, std::string>> inputs_;  // path, sha256
  std::vector<std::string> outputs_;
  std::string started_;
  std::string finished_;
};

}  // namespace zilr::io
