#include "greenport/cli/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace greenport::cli {

using nlohmann::json;

Preset Preset::desk() {
  Preset p;
  p.name = "desk";
  p.model.window_len = 50;
  p.model.hidden_dim = 16;
  p.model.dense_dim = 16;
  p.model.learning_rate = 3e-3;
  p.test_size = 1000;
  p.days = 30;
  return p;
}

Preset Preset::paper() {
  Preset p;
  p.name = "paper";
  p.model.window_len = 250;
  p.model.hidden_dim = 32;
  p.model.dense_dim = 32;
  p.model.learning_rate = 1e-3;
  p.memory.capacity = 10000;
  p.memory.substitution_probability = 0.1;
  p.batch_size = 100;
  p.replay_size = 100;
  p.eval_every = 3;
  p.test_size = 10000;
  p.stride = 2;  // 10 minutes at 5-minute sampling
  p.days = 365;
  return p;
}

Preset Preset::by_name(const std::string& name) {
  if (name == "desk") return desk();
  if (name == "paper") return paper();
  throw ValidationError("preset: unknown preset '" + name + "' (expected desk or paper)");
}

std::filesystem::path ExperimentSpec::dataset_path(const GreenhouseSource& g) const {
  return g.csv ? *g.csv : output_dir / (g.name + ".csv");
}

namespace {

constexpr std::array<const char*, kFeatureCount> kFeatureNames{"t_air",  "rh",           "radiation",     "co2",
                                                               "t_leaf", "transpiration", "photosynthesis"};

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError((path.empty() ? std::string("spec") : path) + ": expected an object");
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.contains(key)) throw ValidationError(join(path, key) + ": unknown key");
  }
}

std::size_t read_count(const json& obj, const char* key, const std::string& path, std::size_t min, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw ValidationError(join(path, key) + ": expected a non-negative integer");
  }
  const auto n = v.get<std::size_t>();
  if (n < min) throw ValidationError(join(path, key) + ": must be >= " + std::to_string(min));
  return n;
}

double read_number(const json& obj, const char* key, const std::string& path, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(join(path, key) + ": expected a number");
  return v.get<double>();
}

bool read_bool(const json& obj, const char* key, const std::string& path, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) throw ValidationError(join(path, key) + ": expected true or false");
  return v.get<bool>();
}

std::string read_string(const json& obj, const char* key, const std::string& path, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ValidationError(join(path, key) + ": expected a string");
  return v.get<std::string>();
}

void check_label(const std::string& name, const std::string& path) {
  if (name.empty()) throw ValidationError(path + ": must not be empty");
  if (name.find_first_of(",/\\\n\r\"") != std::string::npos) {
    throw ValidationError(path + ": must not contain ',', '/', '\\', quotes or newlines");
  }
}

GreenhouseParams read_params(const json& obj, const std::string& path, GreenhouseParams p) {
  require_object(obj, path);
  reject_unknown(obj, path,
                 {"i_max", "alpha", "p_max", "k_c", "a_rad", "b_vpd", "t_base", "t_amp", "co2_day", "co2_night",
                  "noise_sd", "day_length_h"});
  p.i_max = read_number(obj, "i_max", path, p.i_max);
  p.alpha = read_number(obj, "alpha", path, p.alpha);
  p.p_max = read_number(obj, "p_max", path, p.p_max);
  p.k_c = read_number(obj, "k_c", path, p.k_c);
  p.a_rad = read_number(obj, "a_rad", path, p.a_rad);
  p.b_vpd = read_number(obj, "b_vpd", path, p.b_vpd);
  p.t_base = read_number(obj, "t_base", path, p.t_base);
  p.t_amp = read_number(obj, "t_amp", path, p.t_amp);
  p.co2_day = read_number(obj, "co2_day", path, p.co2_day);
  p.co2_night = read_number(obj, "co2_night", path, p.co2_night);
  p.noise_sd = read_number(obj, "noise_sd", path, p.noise_sd);
  p.day_length_h = read_number(obj, "day_length_h", path, p.day_length_h);
  return p;
}

GreenhouseSource read_greenhouse(const json& obj, const std::string& path, std::size_t default_days) {
  require_object(obj, path);
  reject_unknown(obj, path, {"name", "preset", "params", "days", "csv"});
  GreenhouseSource g;
  if (!obj.contains("name")) throw ValidationError(join(path, "name") + ": required");
  g.name = read_string(obj, "name", path, "");
  check_label(g.name, join(path, "name"));

  if (obj.contains("csv")) {
    if (obj.contains("preset") || obj.contains("params") || obj.contains("days")) {
      throw ValidationError(join(path, "csv") + ": cannot be combined with preset, params or days");
    }
    g.csv = read_string(obj, "csv", path, "");
    if (g.csv->empty()) throw ValidationError(join(path, "csv") + ": must not be empty");
    g.params.name = g.name;
    return g;
  }

  const std::string base = read_string(obj, "preset", path, "GH-A");
  try {
    g.params = GreenhouseParams::preset(base);
  } catch (const DataError& e) {
    throw ValidationError(join(path, "preset") + ": " + e.what());
  }
  if (obj.contains("params")) g.params = read_params(obj.at("params"), join(path, "params"), g.params);
  g.params.name = g.name;
  try {
    g.params.validate();
  } catch (const DataError& e) {
    throw ValidationError(join(path, "params") + ": " + e.what());
  }
  g.days = read_count(obj, "days", path, 1, default_days);
  return g;
}

}  // namespace

ExperimentSpec parse_experiment(const json& doc, const Overrides& ov) {
  require_object(doc, "");
  reject_unknown(doc, "",
                 {"$schema", "preset", "seed", "output_dir", "greenhouses", "model", "memory", "scenario", "normalizer"});

  ExperimentSpec spec;
  spec.preset = ov.preset.value_or(read_string(doc, "preset", "", "desk"));
  const Preset preset = Preset::by_name(spec.preset);
  spec.model = preset.model;
  spec.memory = preset.memory;
  spec.batch_size = preset.batch_size;
  spec.replay_size = preset.replay_size;
  spec.eval_every = preset.eval_every;
  spec.test_size = preset.test_size;
  spec.stride = preset.stride;

  if (doc.contains("seed")) {
    const auto& v = doc.at("seed");
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      throw ValidationError("seed: expected a non-negative integer");
    }
    spec.seed = doc.at("seed").get<std::uint64_t>();
  }
  spec.output_dir = read_string(doc, "output_dir", "", "out");

  if (doc.contains("greenhouses")) {
    const auto& arr = doc.at("greenhouses");
    if (!arr.is_array() || arr.empty()) throw ValidationError("greenhouses: expected a non-empty array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      spec.greenhouses.push_back(read_greenhouse(arr[i], "greenhouses[" + std::to_string(i) + "]", preset.days));
    }
  } else {
    for (const auto& name : GreenhouseParams::preset_names()) {
      spec.greenhouses.push_back({name, std::nullopt, GreenhouseParams::preset(name), preset.days});
    }
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < spec.greenhouses.size(); ++i) {
    if (!names.insert(spec.greenhouses[i].name).second) {
      throw ValidationError("greenhouses[" + std::to_string(i) + "].name: duplicate '" + spec.greenhouses[i].name + "'");
    }
  }

  if (doc.contains("model")) {
    const auto& m = doc.at("model");
    require_object(m, "model");
    reject_unknown(m, "model",
                   {"hidden_dim", "dense_dim", "learning_rate", "adam_beta1", "adam_beta2", "adam_epsilon", "clip_norm"});
    spec.model.hidden_dim = read_count(m, "hidden_dim", "model", 1, spec.model.hidden_dim);
    spec.model.dense_dim = read_count(m, "dense_dim", "model", 1, spec.model.dense_dim);
    spec.model.learning_rate = read_number(m, "learning_rate", "model", spec.model.learning_rate);
    spec.model.adam_beta1 = read_number(m, "adam_beta1", "model", spec.model.adam_beta1);
    spec.model.adam_beta2 = read_number(m, "adam_beta2", "model", spec.model.adam_beta2);
    spec.model.adam_epsilon = read_number(m, "adam_epsilon", "model", spec.model.adam_epsilon);
    spec.model.clip_norm = read_number(m, "clip_norm", "model", spec.model.clip_norm);
  }

  std::string strategy(strategy_name(spec.memory.strategy));
  if (doc.contains("memory")) {
    const auto& m = doc.at("memory");
    require_object(m, "memory");
    reject_unknown(m, "memory", {"capacity", "substitution_probability", "strategy"});
    spec.memory.capacity = read_count(m, "capacity", "memory", 1, spec.memory.capacity);
    spec.memory.substitution_probability =
        read_number(m, "substitution_probability", "memory", spec.memory.substitution_probability);
    strategy = read_string(m, "strategy", "memory", strategy);
  }
  if (ov.memory_strategy) strategy = *ov.memory_strategy;
  try {
    spec.memory.strategy = parse_strategy(strategy);
  } catch (const MemoryError& e) {
    throw ValidationError(std::string("memory.strategy: ") + e.what());
  }
  if (!(spec.memory.substitution_probability >= 0.0 && spec.memory.substitution_probability <= 1.0)) {
    throw ValidationError("memory.substitution_probability: must be in [0, 1]");
  }

  if (doc.contains("scenario")) {
    const auto& s = doc.at("scenario");
    require_object(s, "scenario");
    reject_unknown(s, "scenario",
                   {"batch_size", "replay_size", "eval_every", "test_size", "window_len", "stride", "retention",
                    "dump_memory"});
    spec.batch_size = read_count(s, "batch_size", "scenario", 1, spec.batch_size);
    spec.replay_size = read_count(s, "replay_size", "scenario", 0, spec.replay_size);
    spec.eval_every = read_count(s, "eval_every", "scenario", 1, spec.eval_every);
    spec.test_size = read_count(s, "test_size", "scenario", 1, spec.test_size);
    spec.model.window_len = read_count(s, "window_len", "scenario", 1, spec.model.window_len);
    spec.stride = read_count(s, "stride", "scenario", 1, spec.stride);
    spec.retention = read_bool(s, "retention", "scenario", false);
    spec.dump_memory = read_bool(s, "dump_memory", "scenario", false);
  }

  if (doc.contains("normalizer")) {
    const auto& n = doc.at("normalizer");
    require_object(n, "normalizer");
    for (const auto& [key, value] : n.items()) {
      const auto it = std::find(kFeatureNames.begin(), kFeatureNames.end(), key);
      if (it == kFeatureNames.end()) throw ValidationError("normalizer." + key + ": unknown key");
      if (!value.is_array() || value.size() != 2 || !value[0].is_number() || !value[1].is_number()) {
        throw ValidationError("normalizer." + key + ": expected [min, max]");
      }
      auto& b = spec.bounds[static_cast<std::size_t>(it - kFeatureNames.begin())];
      b = {value[0].get<double>(), value[1].get<double>()};
      if (!(b.max > b.min)) throw ValidationError("normalizer." + key + ": max must exceed min");
    }
  }

  if (ov.seed) spec.seed = *ov.seed;
  if (ov.output_dir) spec.output_dir = *ov.output_dir;
  if (ov.replay_size) spec.replay_size = *ov.replay_size;
  if (ov.retention) spec.retention = true;
  if (ov.dump_memory) spec.dump_memory = true;

  try {
    spec.model.validate();
  } catch (const ModelError& e) {
    throw ValidationError(std::string("model: ") + e.what());
  }
  return spec;
}

ExperimentSpec load_experiment(const std::optional<std::filesystem::path>& path, const Overrides& overrides) {
  if (!path) return parse_experiment(json::object(), overrides);
  std::ifstream in(*path, std::ios::binary);
  if (!in) throw ValidationError("spec: cannot open " + path->string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("spec: " + path->string() + " is not valid JSON: " + e.what());
  }
  return parse_experiment(doc, overrides);
}

json greenhouse_params_json(const GreenhouseParams& p) {
  return {{"i_max", p.i_max},         {"alpha", p.alpha},         {"p_max", p.p_max},
          {"k_c", p.k_c},             {"a_rad", p.a_rad},         {"b_vpd", p.b_vpd},
          {"t_base", p.t_base},       {"t_amp", p.t_amp},         {"co2_day", p.co2_day},
          {"co2_night", p.co2_night}, {"noise_sd", p.noise_sd},   {"day_length_h", p.day_length_h}};
}

}  // namespace greenport::cli
