#include "mshap/table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace mshap {
namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

void check_name(const std::string& name) {
  if (name.empty()) throw ParseError("empty column name");
  if (name.find_first_of(",\"\r\n") != std::string::npos) {
    throw ParseError("column name '" + name + "' contains a delimiter or quote");
  }
}

ValueTable parse_csv(std::string_view csv) {
  const std::vector<std::string_view> lines = split_lines(csv);
  if (lines.empty()) throw ParseError("table is empty (missing header)");
  ValueTable out;
  for (std::string_view f : split_fields(lines[0])) {
    out.columns.emplace_back(trim(f));
    check_name(out.columns.back());
  }
  const auto cols = static_cast<Index>(out.columns.size());
  out.values.resize(static_cast<Index>(lines.size()) - 1, cols);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::vector<std::string_view> fields = split_fields(lines[r]);
    if (static_cast<Index>(fields.size()) != cols) {
      throw ParseError("line " + std::to_string(r + 1) + " has " + std::to_string(fields.size()) +
                       " fields, header has " + std::to_string(cols));
    }
    for (Index c = 0; c < cols; ++c) {
      try {
        out.values(static_cast<Index>(r) - 1, c) = parse_double(fields[static_cast<std::size_t>(c)]);
      } catch (const ParseError& e) {
        throw ParseError("line " + std::to_string(r + 1) + ", column '" +
                         out.columns[static_cast<std::size_t>(c)] + "': " + e.what());
      }
    }
  }
  return out;
}

void append_row(std::string& out, const auto& row) {
  for (Index j = 0; j < row.size(); ++j) {
    if (j) out += ',';
    out += format_double(row[j]);
  }
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ParseError("'" + std::string(text) + "' is not a number");
  }
  if (!std::isfinite(value)) throw ParseError("'" + std::string(text) + "' is not finite");
  return value;
}

std::string table_csv(const ShapTable& table) {
  std::string out;
  for (std::size_t j = 0; j < table.feature_names.size(); ++j) {
    check_name(table.feature_names[j]);
    if (j) out += ',';
    out += table.feature_names[j];
  }
  if (table.predictions) out += ',' + table.prediction_column;
  out += '\n';
  for (Index i = 0; i < table.values.rows(); ++i) {
    append_row(out, table.values.row(i));
    if (table.predictions) out += ',' + format_double((*table.predictions)[i]);
    out += '\n';
  }
  return out;
}

std::string table_metadata(const ShapTable& table) {
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  meta["baseline"] = table.baseline;
  if (table.predictions) {
    meta["prediction_column"] = table.prediction_column;
  } else {
    meta["prediction_column"] = nullptr;
  }
  for (const auto& [key, value] : table.extra.items()) meta[key] = value;
  return meta.dump(2) + "\n";
}

ShapTable parse_table(std::string_view csv, std::string_view metadata) {
  nlohmann::ordered_json meta;
  try {
    meta = nlohmann::ordered_json::parse(metadata);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("metadata is not valid JSON: ") + e.what());
  }
  if (!meta.is_object() || !meta.contains("baseline") || !meta["baseline"].is_number()) {
    throw ParseError("metadata needs a numeric 'baseline'");
  }
  ShapTable out;
  out.baseline = meta["baseline"].get<double>();
  std::optional<std::string> pred_col;
  if (meta.contains("prediction_column") && !meta["prediction_column"].is_null()) {
    if (!meta["prediction_column"].is_string()) {
      throw ParseError("metadata 'prediction_column' must be a string or null");
    }
    pred_col = meta["prediction_column"].get<std::string>();
  }
  for (const auto& [key, value] : meta.items()) {
    if (key != "baseline" && key != "prediction_column") out.extra[key] = value;
  }

  ValueTable raw = parse_csv(csv);
  Index pred_index = -1;
  for (std::size_t c = 0; c < raw.columns.size(); ++c) {
    if (pred_col && raw.columns[c] == *pred_col) pred_index = static_cast<Index>(c);
  }
  if (pred_col && pred_index < 0) {
    throw ParseError("prediction column '" + *pred_col + "' not found in header");
  }
  for (std::size_t c = 0; c < raw.columns.size(); ++c) {
    if (static_cast<Index>(c) != pred_index) out.feature_names.push_back(raw.columns[c]);
  }
  if (out.feature_names.empty()) throw ParseError("table has no feature columns");
  out.values.resize(raw.values.rows(), static_cast<Index>(out.feature_names.size()));
  Index dst = 0;
  for (Index c = 0; c < raw.values.cols(); ++c) {
    if (c == pred_index) continue;
    out.values.col(dst++) = raw.values.col(c);
  }
  if (pred_index >= 0) {
    out.predictions = raw.values.col(pred_index);
    out.prediction_column = *pred_col;
  }
  return out;
}

ValueTable parse_values_csv(std::string_view csv) { return parse_csv(csv); }

std::string values_csv(const ValueTable& table) {
  std::string out;
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    check_name(table.columns[j]);
    if (j) out += ',';
    out += table.columns[j];
  }
  out += '\n';
  for (Index i = 0; i < table.values.rows(); ++i) {
    append_row(out, table.values.row(i));
    out += '\n';
  }
  return out;
}

std::filesystem::path metadata_path(const std::filesystem::path& csv_path) {
  std::filesystem::path out = csv_path;
  out.replace_extension(".meta.json");
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

ShapTable read_table(const std::filesystem::path& csv_path) {
  const std::filesystem::path meta = metadata_path(csv_path);
  if (!std::filesystem::exists(meta)) {
    throw ParseError("missing metadata file " + meta.string());
  }
  try {
    return parse_table(read_file(csv_path), read_file(meta));
  } catch (const ParseError& e) {
    throw ParseError(csv_path.string() + ": " + e.what());
  }
}

void write_table(const std::filesystem::path& csv_path, const ShapTable& table) {
  write_file_atomic(csv_path, table_csv(table));
  write_file_atomic(metadata_path(csv_path), table_metadata(table));
}

ShapTable to_table(const ShapExplanation& expl) {
  ShapTable out;
  out.values = expl.values;
  out.baseline = expl.baseline;
  if (expl.predictions.size() == expl.values.rows()) out.predictions = expl.predictions;
  out.feature_names = expl.feature_names;
  if (out.feature_names.empty()) {
    for (Index j = 0; j < expl.features(); ++j) out.feature_names.push_back("x" + std::to_string(j + 1));
  }
  return out;
}

ShapTable to_table(const MshapExplanation& expl) {
  ShapTable out = to_table(as_explanation(expl));
  out.extra["alpha"] = expl.alpha;
  out.extra["method"] = std::string(to_string(expl.method));
  out.extra["advisories"] = expl.fallback_rows.size();
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Index r : expl.fallback_rows) rows.push_back(r + 1);
  out.extra["fallback_rows"] = rows;
  return out;
}

ShapExplanation to_explanation(const ShapTable& table) {
  ShapExplanation out;
  out.values = table.values;
  out.baseline = table.baseline;
  out.feature_names = table.feature_names;
  if (table.predictions) {
    out.predictions = *table.predictions;
  } else {
    out.predictions = (table.values.rowwise().sum().array() + table.baseline).matrix();
  }
  return out;
}

}  // namespace mshap
