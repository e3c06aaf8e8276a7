#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "greenport/data/climate.hpp"

namespace greenport {

// Header: timestamp,t_air,rh,radiation,co2,t_leaf,transpiration,photosynthesis
// Integer timestamps, floats at 9 significant digits.
inline constexpr const char* kClimateCsvHeader =
    "timestamp,t_air,rh,radiation,co2,t_leaf,transpiration,photosynthesis";

std::vector<ClimateRecord> read_csv(const std::filesystem::path& path);
std::vector<ClimateRecord> parse_climate_csv(std::istream& in, const std::string& source);

void write_csv(const std::filesystem::path& path, const std::vector<ClimateRecord>& records);
void write_climate_csv(std::ostream& out, const std::vector<ClimateRecord>& records);

// "%.9g"
std::string format_sig9(double v);

}  // namespace greenport
