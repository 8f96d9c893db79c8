#include "longmem/io.hpp"

#include <charconv>
#include <limits>
#include <fstream>
#include <sstream>

namespace longmem {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& context) {
  std::size_t begin = text.find_first_not_of(" \t\r");
  std::size_t end = text.find_last_not_of(" \t\r");
  if (begin == std::string::npos) throw ValidationError(context + ": empty numeric field");
  const std::string s = text.substr(begin, end - begin + 1);
  if (s == "nan" || s == "NaN") return std::numeric_limits<double>::quiet_NaN();
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ValidationError(context + ": cannot parse '" + s + "' as a number");
  return v;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeError("cannot open '" + path.string() + "' for reading");
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (first) {
      table.header = split_line(line);
      first = false;
    } else {
      table.rows.push_back(split_line(line));
    }
  }
  if (first) throw ValidationError("'" + path.string() + "' has no header row");
  return table;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw RuntimeError("cannot open '" + path.string() + "' for writing");
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  };
  emit(table.header);
  for (const auto& row : table.rows) emit(row);
  if (!out) throw RuntimeError("write to '" + path.string() + "' failed");
}

SeriesFile read_series_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() < 2)
    throw ValidationError("'" + path.string() + "': expected a two-column header such as t,value");
  SeriesFile file;
  file.index_name = table.header.front();
  file.value_name = table.header.back();
  file.series.values.resize(Eigen::Index(table.rows.size()));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    if (row.size() != table.header.size())
      throw ValidationError("'" + path.string() + "' row " + std::to_string(i + 2) + ": expected " +
                            std::to_string(table.header.size()) + " fields");
    const double v = parse_double(row.back(), "'" + path.string() + "' row " + std::to_string(i + 2));
    if (!std::isfinite(v))
      throw ValidationError("'" + path.string() + "' row " + std::to_string(i + 2) + ": sample is not finite");
    file.series.values(Eigen::Index(i)) = v;
  }
  file.series.label = path.filename().string();
  return file;
}

void write_series_csv(const std::filesystem::path& path, const Vector<double>& values, const std::string& index_name,
                      const std::string& value_name, Eigen::Index first_index) {
  CsvTable table;
  table.header = {index_name, value_name};
  table.rows.reserve(std::size_t(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) table.rows.push_back({std::to_string(i + first_index), format_double(values(i))});
  write_csv(path, table);
}

}  // namespace longmem
