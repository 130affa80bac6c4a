#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"

namespace idpflow {

/// CSV with a header row, LF line endings and %.17g numbers, so equal
/// values give equal bytes.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<double>& values);
  void flush();
  std::size_t columns() const { return ncol_; }

 private:
  std::FILE* f_ = nullptr;
  std::size_t ncol_ = 0;
  std::string path_;
};

std::string format_number(double x);

/// Creates the directory (and parents). Throws ConfigError on failure.
void ensure_directory(const std::string& dir);
void write_json_file(const std::string& path, const nlohmann::json& j);
std::string join_path(const std::string& dir, const std::string& name);

}  // namespace idpflow
