#pragma once

// Plain-text output helpers: CSV rows and JSON files with round-trip doubles.

#include "hlyap/projlin.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace hlyap::io {

/// Shortest-exact decimal text for a double ("%.17g").
std::string format_double(double x);

/// Values joined by ';' inside one CSV cell.
std::string join(const std::vector<double>& values);
std::string join(const Vector& values);

nlohmann::json to_json(const Vector& v);
nlohmann::json to_json(const Matrix& m);
Vector vector_from_json(const nlohmann::json& j);

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  std::string str() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

}  // namespace hlyap::io
