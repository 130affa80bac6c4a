#include "idpflow/output.hpp"

#include <filesystem>
#include <fstream>

#include "idpflow/errors.hpp"

namespace idpflow {

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : ncol_(columns.size()), path_(path) {
  f_ = std::fopen(path.c_str(), "wb");
  if (!f_) throw ConfigError("cannot open '" + path + "' for writing");
  for (std::size_t k = 0; k < columns.size(); ++k) std::fprintf(f_, "%s%s", k ? "," : "", columns[k].c_str());
  std::fputc('\n', f_);
}

CsvWriter::~CsvWriter() {
  if (f_) std::fclose(f_);
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != ncol_) throw DomainError("csv row for '" + path_ + "' has the wrong number of columns");
  for (std::size_t k = 0; k < values.size(); ++k) std::fprintf(f_, "%s%.17g", k ? "," : "", values[k]);
  std::fputc('\n', f_);
}

void CsvWriter::flush() { std::fflush(f_); }

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create directory '" + dir + "': " + ec.message());
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open '" + path + "' for writing");
  os << j.dump(2) << '\n';
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace idpflow
