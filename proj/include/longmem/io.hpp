#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "longmem/core.hpp"

namespace longmem {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Parses a decimal real, accepting "nan" and "inf". Throws ValidationError with `context`.
double parse_double(const std::string& text, const std::string& context);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Two-column series file: header `t,value` (or `q,w` for wavelet coefficients),
/// the last column holding the samples in order.
struct SeriesFile {
  std::string index_name;
  std::string value_name;
  TimeSeries series;
};

SeriesFile read_series_csv(const std::filesystem::path& path);
void write_series_csv(const std::filesystem::path& path, const Vector<double>& values,
                      const std::string& index_name = "t", const std::string& value_name = "value",
                      Eigen::Index first_index = 1);

}  // namespace longmem
