#include "greenport/data/climate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace greenport {

namespace {

void require_positive(double v, const char* field, const std::string& name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DataError("greenhouse '" + name + "': " + field + " must be > 0");
  }
}

// Standard normal truncated to [-3, 3] by rejection.
double truncated_normal(SeededRng& rng) {
  for (;;) {
    const double z = rng.normal();
    if (std::abs(z) <= 3.0) return z;
  }
}

}  // namespace

void GreenhouseParams::validate() const {
  require_positive(i_max, "i_max", name);
  require_positive(alpha, "alpha", name);
  require_positive(p_max, "p_max", name);
  require_positive(k_c, "k_c", name);
  require_positive(a_rad, "a_rad", name);
  require_positive(b_vpd, "b_vpd", name);
  require_positive(t_base, "t_base", name);
  require_positive(t_amp, "t_amp", name);
  require_positive(co2_day, "co2_day", name);
  require_positive(co2_night, "co2_night", name);
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) {
    throw DataError("greenhouse '" + name + "': noise_sd must be >= 0");
  }
  if (!(day_length_h > 0.0 && day_length_h < 24.0)) {
    throw DataError("greenhouse '" + name + "': day_length_h must be in (0, 24)");
  }
}

GreenhouseParams GreenhouseParams::preset(const std::string& name) {
  GreenhouseParams p;
  p.name = name;
  if (name == "GH-A") return p;
  if (name == "GH-B") {
    p.a_rad *= 1.10;
    p.p_max *= 0.90;
    return p;
  }
  if (name == "GH-C") {
    p.i_max *= 0.70;
    p.b_vpd *= 1.40;
    p.t_base = 23.0;
    p.t_amp = 10.0;
    p.day_length_h = 12.5;
    p.p_max *= 0.60;
    p.a_rad *= 1.50;
    p.co2_day = 500.0;
    p.co2_night = 420.0;
    return p;
  }
  throw DataError("unknown greenhouse preset '" + name + "'");
}

std::vector<std::string> GreenhouseParams::preset_names() { return {"GH-A", "GH-B", "GH-C"}; }

double saturation_vapor_pressure(double t) {
  if (!(t > -237.3)) throw DataError("saturation_vapor_pressure: temperature must be > -237.3 °C");
  return 0.6108 * std::exp(17.27 * t / (t + 237.3));
}

double vapor_pressure_deficit(double t, double rh) {
  if (!(rh >= 0.0 && rh <= 100.0)) {
    throw DataError("vapor_pressure_deficit: relative humidity " + std::to_string(rh) + " outside [0, 100]");
  }
  return saturation_vapor_pressure(t) * (1.0 - rh / 100.0);
}

double photosynthesis_oracle(double radiation, double co2, const GreenhouseParams& p) {
  const double light = p.alpha * radiation;
  const double light_limited = p.p_max * light / (light + p.p_max);
  return light_limited * co2 / (co2 + p.k_c);
}

double transpiration_oracle(double radiation, double vpd, const GreenhouseParams& p) {
  return p.a_rad * radiation + p.b_vpd * vpd;
}

std::vector<ClimateRecord> generate_series(const GreenhouseParams& p, std::size_t days, SeededRng& rng,
                                           std::int64_t start_timestamp) {
  p.validate();
  if (days < 1) throw DataError("generate_series: days must be >= 1");

  const double sunrise = 12.0 - p.day_length_h / 2.0;
  std::vector<ClimateRecord> out;
  out.reserve(days * kSamplesPerDay);

  double temp_drift = 0.0;  // AR(1) intra-day temperature wander
  for (std::size_t d = 0; d < days; ++d) {
    const double clearness = rng.uniform(0.55, 1.0);
    const double day_temp_offset = rng.normal(0.0, 1.5);
    const double day_rh_offset = rng.normal(0.0, 4.0);

    for (std::size_t k = 0; k < kSamplesPerDay; ++k) {
      const double hour = static_cast<double>(k * kSampleSpacingSeconds) / 3600.0;
      const double phase = (hour - sunrise) / p.day_length_h;
      const double sun = (phase > 0.0 && phase < 1.0) ? std::sin(std::numbers::pi * phase) : 0.0;

      const double jitter = 1.0 + rng.normal(0.0, 0.05);
      const double radiation = sun > 0.0 ? p.i_max * sun * std::clamp(clearness * jitter, 0.0, 1.0) : 0.0;
      const double light = radiation / p.i_max;

      temp_drift = 0.95 * temp_drift + rng.normal(0.0, 0.15);
      const double t_air = p.t_base + p.t_amp * light + day_temp_offset + temp_drift;
      const double rh =
          std::clamp(80.0 - 3.0 * (t_air - p.t_base) + day_rh_offset + rng.normal(0.0, 2.0), 20.0, 100.0);

      const double enrichment = std::min(1.0, 4.0 * sun);
      const double co2 = std::max(200.0, p.co2_night + (p.co2_day - p.co2_night) * enrichment - 80.0 * light +
                                             rng.normal(0.0, 10.0));
      const double t_leaf = t_air + 0.1 * light;

      const double photo = photosynthesis_oracle(radiation, co2, p);
      const double transp = transpiration_oracle(radiation, vapor_pressure_deficit(t_air, rh), p);
      const double photo_noise = 1.0 + p.noise_sd * truncated_normal(rng);
      const double transp_noise = 1.0 + p.noise_sd * truncated_normal(rng);

      ClimateRecord r;
      r.timestamp = start_timestamp + static_cast<std::int64_t>(d * kSamplesPerDay + k) * kSampleSpacingSeconds;
      r.t_air = t_air;
      r.rh = rh;
      r.radiation = radiation;
      r.co2 = co2;
      r.t_leaf = t_leaf;
      r.transpiration = transp * transp_noise;
      r.photosynthesis = photo * photo_noise;
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace greenport
