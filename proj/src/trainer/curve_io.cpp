#include "greenport/trainer/curve_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace greenport {

namespace {

constexpr const char* kCurveHeader = "update_index,eval_index,phase,mse_total,mse_transpiration,mse_photosynthesis";
constexpr const char* kBoundariesHeader = "phase,start_update";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw TrainerError("cannot write " + path.string());
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T parse(const std::string& cell, const std::filesystem::path& path, std::size_t line) {
  T v{};
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size()) {
    throw TrainerError(path.string() + ":" + std::to_string(line) + ": bad number '" + cell + "'");
  }
  return v;
}

std::vector<std::vector<std::string>> read_table(const std::filesystem::path& path, const char* header,
                                                 std::size_t columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TrainerError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw TrainerError(path.string() + ":1: expected header '" + header + "'");
  }
  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != columns) {
      throw TrainerError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                         " fields");
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

void write_curve_csv(const std::filesystem::path& path, const LearningCurve& curve) {
  auto out = open_out(path);
  out << kCurveHeader << '\n';
  for (const auto& p : curve.points) {
    out << p.update_index << ',' << p.eval_index << ',' << p.phase << ',' << fmt(p.mse_total) << ','
        << fmt(p.mse_transpiration) << ',' << fmt(p.mse_photosynthesis) << '\n';
  }
  write_boundaries_csv(boundaries_path_for(path), curve.phases);
}

void write_boundaries_csv(const std::filesystem::path& path, const std::vector<PhaseStart>& phases) {
  auto out = open_out(path);
  out << kBoundariesHeader << '\n';
  for (const auto& p : phases) out << p.phase << ',' << p.start_update << '\n';
}

std::filesystem::path boundaries_path_for(const std::filesystem::path& curve_path) {
  auto p = curve_path;
  p.replace_extension(".boundaries.csv");
  return p;
}

LearningCurve read_curve(const std::filesystem::path& curve_path) {
  LearningCurve curve;
  std::size_t line = 1;
  for (const auto& r : read_table(curve_path, kCurveHeader, 6)) {
    ++line;
    curve.points.push_back({parse<std::size_t>(r[0], curve_path, line), parse<std::size_t>(r[1], curve_path, line),
                            r[2], parse<double>(r[3], curve_path, line), parse<double>(r[4], curve_path, line),
                            parse<double>(r[5], curve_path, line)});
  }
  const auto bpath = boundaries_path_for(curve_path);
  line = 1;
  for (const auto& r : read_table(bpath, kBoundariesHeader, 2)) {
    ++line;
    curve.phases.push_back({r[0], parse<std::size_t>(r[1], bpath, line)});
  }
  return curve;
}

void write_retention_csv(const std::filesystem::path& path, const std::vector<RetentionPoint>& rows) {
  auto out = open_out(path);
  out << "update_index,training_phase,test_phase,mse_total,mse_transpiration,mse_photosynthesis\n";
  for (const auto& r : rows) {
    out << r.update_index << ',' << r.training_phase << ',' << r.test_phase << ',' << fmt(r.mse_total) << ','
        << fmt(r.mse_transpiration) << ',' << fmt(r.mse_photosynthesis) << '\n';
  }
}

void write_memory_csv(const std::filesystem::path& path, const std::vector<MemoryShareRow>& rows) {
  auto out = open_out(path);
  out << "update_index,label,fraction\n";
  for (const auto& r : rows) out << r.update_index << ',' << r.label << ',' << fmt(r.fraction) << '\n';
}

}  // namespace greenport
