#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <system_error>
#include <unistd.h>

namespace coalesce::cli {

namespace {

std::string scalar_text(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_number()) return v.dump();
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  std::string s;
  for (const auto& item : v) {
    if (!s.empty()) s += ' ';
    s += scalar_text(item);
  }
  return s;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  // snprintf honours LC_NUMERIC; the format always uses '.'.
  for (char& c : buf) {
    if (c == ',') c = '.';
  }
  return buf;
}

void write_csv(std::ostream& out, const Output& o) {
  for (const auto& [key, value] : o.params.items()) {
    out << "# " << key << " = " << scalar_text(value) << '\n';
  }
  if (o.is_table) {
    for (std::size_t c = 0; c < o.columns.size(); ++c) out << (c ? "," : "") << o.columns[c];
    out << '\n';
    const std::size_t rows = o.values.empty() ? 0 : o.values.front().size();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < o.values.size(); ++c) {
        out << (c ? "," : "") << format_number(o.values[c][r]);
      }
      out << '\n';
    }
  } else {
    out << "key,value\n";
    for (const auto& [key, value] : o.record.items()) out << key << ',' << scalar_text(value) << '\n';
  }
}

void write_json(std::ostream& out, const Output& o) {
  Json doc = Json::object();
  doc["params"] = o.params;
  if (o.is_table) {
    Json data = Json::object();
    for (std::size_t c = 0; c < o.columns.size(); ++c) {
      Json col = Json::array();
      for (double v : o.values[c]) col.push_back(std::isfinite(v) ? Json(v) : Json(nullptr));
      data[o.columns[c]] = std::move(col);
    }
    doc["data"] = std::move(data);
  } else {
    doc["data"] = o.record;
  }
  out << doc.dump(2) << '\n';
}

void write_atomically(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    f << text;
    f.flush();
    if (!f) {
      f.close();
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw std::runtime_error("failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw std::runtime_error("cannot rename onto '" + path + "': " + ec.message());
  }
}

}  // namespace coalesce::cli
