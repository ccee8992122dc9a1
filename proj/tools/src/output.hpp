#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

namespace coalesce::cli {

using Json = nlohmann::ordered_json;

/// Either a table of equal-length numeric columns or a flat record.
struct Output {
  Json params = Json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;
  Json record = Json::object();
  bool is_table = false;
};

/// %.12g with '.' as the decimal separator.
std::string format_number(double v);

void write_csv(std::ostream& out, const Output& o);
void write_json(std::ostream& out, const Output& o);

/// Writes text to path through a temporary file in the same directory and a
/// rename. Throws std::runtime_error on failure.
void write_atomically(const std::string& path, const std::string& text);

}  // namespace coalesce::cli
