#include "greenport/data/csv.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

namespace greenport {

namespace {

constexpr std::array<std::string_view, 8> kColumns{"timestamp", "t_air",  "rh",           "radiation",
                                                   "co2",       "t_leaf", "transpiration", "photosynthesis"};

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw DataError(source + ":" + std::to_string(line) + ": " + what);
}

template <typename T>
T parse_number(std::string_view cell, const std::string& source, std::size_t line, std::string_view column) {
  cell = trim(cell);
  T value{};
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size()) {
    fail(source, line, "non-numeric value '" + std::string(cell) + "' in column " + std::string(column));
  }
  return value;
}

}  // namespace

std::string format_sig9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<ClimateRecord> parse_climate_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) fail(source, line_no, "missing header");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  std::array<std::size_t, kColumns.size()> index{};
  const auto header = split_fields(line);
  for (std::size_t c = 0; c < kColumns.size(); ++c) {
    std::size_t found = header.size();
    for (std::size_t h = 0; h < header.size(); ++h) {
      if (trim(header[h]) == kColumns[c]) found = h;
    }
    if (found == header.size()) fail(source, line_no, "missing column '" + std::string(kColumns[c]) + "'");
    index[c] = found;
  }

  std::vector<ClimateRecord> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_fields(line);
    if (cells.size() < header.size()) {
      fail(source, line_no, "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(cells.size()));
    }
    ClimateRecord r;
    r.timestamp = parse_number<std::int64_t>(cells[index[0]], source, line_no, kColumns[0]);
    double* fields[] = {&r.t_air, &r.rh, &r.radiation, &r.co2, &r.t_leaf, &r.transpiration, &r.photosynthesis};
    for (std::size_t c = 1; c < kColumns.size(); ++c) {
      *fields[c - 1] = parse_number<double>(cells[index[c]], source, line_no, kColumns[c]);
    }
    if (!out.empty() && r.timestamp <= out.back().timestamp) {
      fail(source, line_no, "timestamp " + std::to_string(r.timestamp) + " is not after previous " +
                                std::to_string(out.back().timestamp));
    }
    out.push_back(r);
  }
  return out;
}

std::vector<ClimateRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_climate_csv(in, path.string());
}

void write_climate_csv(std::ostream& out, const std::vector<ClimateRecord>& records) {
  out << kClimateCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.timestamp << ',' << format_sig9(r.t_air) << ',' << format_sig9(r.rh) << ',' << format_sig9(r.radiation)
        << ',' << format_sig9(r.co2) << ',' << format_sig9(r.t_leaf) << ',' << format_sig9(r.transpiration) << ','
        << format_sig9(r.photosynthesis) << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const std::vector<ClimateRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  write_climate_csv(out, records);
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace greenport
