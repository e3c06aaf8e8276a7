#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "greenport/numeric/rng.hpp"

namespace greenport {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kInputCount = 5;   // t_air, rh, radiation, co2, t_leaf
inline constexpr std::size_t kTargetCount = 2;  // transpiration, photosynthesis
inline constexpr std::int64_t kSampleSpacingSeconds = 300;
inline constexpr std::size_t kSamplesPerDay = 86400 / kSampleSpacingSeconds;

// One 5-minute measurement. Units: °C, %, W/m2, ppm, °C, g/m2/min, umol/m2/s.
struct ClimateRecord {
  std::int64_t timestamp = 0;
  double t_air = 0.0;
  double rh = 0.0;
  double radiation = 0.0;
  double co2 = 0.0;
  double t_leaf = 0.0;
  double transpiration = 0.0;
  double photosynthesis = 0.0;

  std::array<double, kInputCount> inputs() const noexcept { return {t_air, rh, radiation, co2, t_leaf}; }
  std::array<double, kTargetCount> targets() const noexcept { return {transpiration, photosynthesis}; }

  friend bool operator==(const ClimateRecord&, const ClimateRecord&) = default;
};

struct GreenhouseParams {
  std::string name;
  double i_max = 800.0;        // peak transmitted radiation, W/m2
  double alpha = 0.05;         // light-use slope, umol/J
  double p_max = 30.0;         // light-saturated photosynthesis, umol/m2/s
  double k_c = 300.0;          // CO2 half-saturation, ppm
  double a_rad = 1.5e-3;       // transpiration per W/m2
  double b_vpd = 0.5;          // transpiration per kPa
  double t_base = 20.0;        // °C
  double t_amp = 8.0;          // °C
  double co2_day = 700.0;      // ppm
  double co2_night = 450.0;    // ppm
  double noise_sd = 0.03;      // relative target noise
  double day_length_h = 14.0;  // hours

  // Throws DataError naming the first offending field.
  void validate() const;

  // "GH-A", "GH-B" (mild shift from A) and "GH-C" (strong shift).
  static GreenhouseParams preset(const std::string& name);
  static std::vector<std::string> preset_names();

  friend bool operator==(const GreenhouseParams&, const GreenhouseParams&) = default;
};

// Magnus form, kPa. Requires t > -237.3.
double saturation_vapor_pressure(double t_celsius);
// e_s(t) * (1 - rh/100). Throws DataError when rh is outside [0, 100].
double vapor_pressure_deficit(double t_celsius, double rh_percent);

// Rectangular-hyperbola light response times CO2 saturation.
double photosynthesis_oracle(double radiation, double co2, const GreenhouseParams& p);
// a_rad * I + b_vpd * VPD.
double transpiration_oracle(double radiation, double vpd, const GreenhouseParams& p);

inline constexpr std::int64_t kDefaultStartTimestamp = 1293840000;  // 2011-01-01T00:00:00Z

// days * 288 records at 300 s spacing. Weather variability (cloudiness, daily
// temperature offsets) is part of the climate; the targets come from the
// oracles on that climate and then receive truncated multiplicative noise.
std::vector<ClimateRecord> generate_series(const GreenhouseParams& p, std::size_t days, SeededRng& rng,
                                           std::int64_t start_timestamp = kDefaultStartTimestamp);

}  // namespace greenport
