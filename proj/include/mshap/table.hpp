#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "mshap/common.hpp"
#include "mshap/mshap.hpp"
#include "mshap/shapley.hpp"

namespace mshap {

// An attribution table on disk: `name.csv` holds a header of feature names
// (plus an optional prediction column) and one row per observation;
// `name.meta.json` beside it carries the baseline and any extra fields.
struct ShapTable {
  std::vector<std::string> feature_names;
  Matrix values;
  std::optional<Vector> predictions;
  double baseline = 0.0;
  std::string prediction_column = "prediction";
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
};

// Shortest text that is exact for 64-bit doubles (17 significant digits).
std::string format_double(double x);
double parse_double(std::string_view text);

std::string table_csv(const ShapTable& table);
std::string table_metadata(const ShapTable& table);
ShapTable parse_table(std::string_view csv, std::string_view metadata);

// Header-only numeric table without a sidecar (covariate files).
struct ValueTable {
  std::vector<std::string> columns;
  Matrix values;
};
ValueTable parse_values_csv(std::string_view csv);
std::string values_csv(const ValueTable& table);

std::filesystem::path metadata_path(const std::filesystem::path& csv_path);
std::string read_file(const std::filesystem::path& path);
// Writes through a temporary file in the same directory and renames it.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

ShapTable read_table(const std::filesystem::path& csv_path);
void write_table(const std::filesystem::path& csv_path, const ShapTable& table);

ShapTable to_table(const ShapExplanation& expl);
ShapTable to_table(const MshapExplanation& expl);
ShapExplanation to_explanation(const ShapTable& table);

}  // namespace mshap
