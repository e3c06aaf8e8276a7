#include "greenport/trainer/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "greenport/numeric/kernels.hpp"
#include "json.hpp"

namespace greenport {

namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'G', 'P', 'C', 'K', 'P', 'T', '\0', '\1'};
constexpr int kVersion = 1;

class CheckpointError : public TrainerError {
 public:
  using TrainerError::TrainerError;
};

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw CheckpointError("checkpoint: truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

// Flat list of doubles making up the payload, in write order.
class PayloadWriter {
 public:
  std::size_t append(std::span<const double> values) {
    const std::size_t offset = data_.size();
    data_.insert(data_.end(), values.begin(), values.end());
    return offset;
  }
  const std::vector<double>& data() const { return data_; }

 private:
  std::vector<double> data_;
};

json model_config_json(const ModelConfig& c) {
  return {{"input_dim", c.input_dim},       {"hidden_dim", c.hidden_dim},       {"dense_dim", c.dense_dim},
          {"output_dim", c.output_dim},     {"window_len", c.window_len},       {"learning_rate", c.learning_rate},
          {"adam_beta1", c.adam_beta1},     {"adam_beta2", c.adam_beta2},       {"adam_epsilon", c.adam_epsilon},
          {"clip_norm", c.clip_norm}};
}

ModelConfig model_config_from(const json& j) {
  ModelConfig c;
  c.input_dim = j.at("input_dim").get<std::size_t>();
  c.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  c.dense_dim = j.at("dense_dim").get<std::size_t>();
  c.output_dim = j.at("output_dim").get<std::size_t>();
  c.window_len = j.at("window_len").get<std::size_t>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.adam_beta1 = j.at("adam_beta1").get<double>();
  c.adam_beta2 = j.at("adam_beta2").get<double>();
  c.adam_epsilon = j.at("adam_epsilon").get<double>();
  c.clip_norm = j.at("clip_norm").get<double>();
  c.validate();
  return c;
}

json rng_json(const SeededRng& r) {
  const auto& s = r.state();
  return {{"seed", r.seed()}, {"state", {s[0], s[1], s[2], s[3]}}};
}

SeededRng rng_from(const json& j) {
  SeededRng::State s{};
  const auto& arr = j.at("state");
  if (arr.size() != 4) throw CheckpointError("checkpoint: rng state must have 4 words");
  for (std::size_t i = 0; i < 4; ++i) s[i] = arr[i].get<std::uint64_t>();
  return SeededRng::restore(j.at("seed").get<std::uint64_t>(), s);
}

void tensors_json(json& table, PayloadWriter& payload, const char* group, const LstmTensors& t) {
  const auto ts = t.tensors();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    table.push_back({{"group", group},
                     {"name", LstmTensors::tensor_name(i)},
                     {"rows", ts[i]->rows()},
                     {"cols", ts[i]->cols()},
                     {"offset", payload.append(ts[i]->values())}});
  }
}

std::span<const double> slice(const std::vector<double>& payload, std::size_t offset, std::size_t count) {
  if (offset > payload.size() || count > payload.size() - offset) {
    throw CheckpointError("checkpoint: payload reference out of range");
  }
  return {payload.data() + offset, count};
}

void tensors_from(const json& table, const std::vector<double>& payload, const char* group, LstmTensors& t) {
  auto ts = t.tensors();
  std::size_t found = 0;
  for (const auto& entry : table) {
    if (entry.at("group").get<std::string>() != group) continue;
    const auto name = entry.at("name").get<std::string>();
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (LstmTensors::tensor_name(i) != name) continue;
      const auto rows = entry.at("rows").get<std::size_t>();
      const auto cols = entry.at("cols").get<std::size_t>();
      if (rows != ts[i]->rows() || cols != ts[i]->cols()) {
        throw CheckpointError("checkpoint: tensor " + std::string(group) + "/" + name + " has wrong shape");
      }
      const auto src = slice(payload, entry.at("offset").get<std::size_t>(), rows * cols);
      std::copy(src.begin(), src.end(), ts[i]->values().begin());
      ++found;
    }
  }
  if (found != ts.size()) throw CheckpointError("checkpoint: missing tensors in group " + std::string(group));
}

}  // namespace

void save_checkpoint(std::ostream& out, const TrainerState& state) {
  PayloadWriter payload;
  json header;
  header["format"] = "greenport-checkpoint";
  header["version"] = kVersion;
  header["kernel_isa"] = kernels::isa_name(kernels::active().isa);
  header["model_config"] = model_config_json(state.model_config);
  header["update_index"] = state.update_index;
  header["adam_step"] = state.adam.step;
  header["rng"] = {{"memory", rng_json(state.memory_rng)}, {"replay", rng_json(state.replay_rng)}};

  json tensors = json::array();
  tensors_json(tensors, payload, "params", state.params);
  tensors_json(tensors, payload, "adam_m", state.adam.m);
  tensors_json(tensors, payload, "adam_v", state.adam.v);
  header["tensors"] = std::move(tensors);

  // Memory: each distinct sample once, slots and pending refer by index.
  const auto& mem = state.memory;
  std::unordered_map<const WindowedSample*, std::size_t> index;
  json samples = json::array();
  auto intern = [&](const SamplePtr& s) {
    auto [it, inserted] = index.try_emplace(s.get(), index.size());
    if (inserted) {
      const std::size_t offset = payload.append(s->inputs.values());
      payload.append(s->targets);
      samples.push_back({{"label", s->origin.label},
                         {"end_timestamp", s->origin.end_timestamp},
                         {"rows", s->inputs.rows()},
                         {"cols", s->inputs.cols()},
                         {"targets", s->targets.size()},
                         {"offset", offset}});
    }
    return it->second;
  };
  json slots = json::array();
  for (const auto& s : mem.slots()) slots.push_back(intern(s));
  json pending = json::array();
  for (const auto& s : mem.pending()) pending.push_back(intern(s));
  header["memory"] = {{"capacity", mem.config().capacity},
                      {"substitution_probability", mem.config().substitution_probability},
                      {"strategy", strategy_name(mem.config().strategy)},
                      {"observed_count", mem.observed_count()},
                      {"samples", std::move(samples)},
                      {"slots", std::move(slots)},
                      {"pending", std::move(pending)}};
  header["payload_doubles"] = payload.data().size();

  const std::string text = header.dump();
  out.write(kMagic, sizeof kMagic);
  put_u64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (double v : payload.data()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  if (!out) throw CheckpointError("checkpoint: write failed");
}

TrainerState load_checkpoint(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw CheckpointError("checkpoint: bad magic");
  }
  const std::uint64_t header_len = get_u64(in);
  std::string text(header_len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(header_len))) throw CheckpointError("checkpoint: truncated header");

  json header;
  try {
    header = json::parse(text);
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("checkpoint: malformed header: ") + e.what());
  }
  try {
    if (header.at("format") != "greenport-checkpoint" || header.at("version") != kVersion) {
      throw CheckpointError("checkpoint: unsupported format or version");
    }
    const auto count = header.at("payload_doubles").get<std::size_t>();
    std::vector<double> payload(count);
    for (double& v : payload) v = std::bit_cast<double>(get_u64(in));

    const ModelConfig cfg = model_config_from(header.at("model_config"));
    ModelParams params{LstmTensors::zeros(cfg)};
    AdamState adam = AdamState::zeros(cfg);
    tensors_from(header.at("tensors"), payload, "params", params);
    tensors_from(header.at("tensors"), payload, "adam_m", adam.m);
    tensors_from(header.at("tensors"), payload, "adam_v", adam.v);
    adam.step = header.at("adam_step").get<std::uint64_t>();

    const auto& jm = header.at("memory");
    MemoryConfig mcfg;
    mcfg.capacity = jm.at("capacity").get<std::size_t>();
    mcfg.substitution_probability = jm.at("substitution_probability").get<double>();
    mcfg.strategy = parse_strategy(jm.at("strategy").get<std::string>());

    std::vector<SamplePtr> samples;
    for (const auto& js : jm.at("samples")) {
      auto s = std::make_shared<WindowedSample>();
      const auto rows = js.at("rows").get<std::size_t>();
      const auto cols = js.at("cols").get<std::size_t>();
      if (js.at("targets").get<std::size_t>() != kTargetCount) throw CheckpointError("checkpoint: bad target count");
      const auto offset = js.at("offset").get<std::size_t>();
      const auto in_vals = slice(payload, offset, rows * cols + kTargetCount);
      s->inputs = Matrix(rows, cols, std::vector<double>(in_vals.begin(), in_vals.end() - kTargetCount));
      std::copy(in_vals.end() - kTargetCount, in_vals.end(), s->targets.begin());
      s->origin = {js.at("label").get<std::string>(), js.at("end_timestamp").get<std::int64_t>()};
      samples.push_back(std::move(s));
    }
    auto resolve = [&](const json& refs) {
      std::vector<SamplePtr> out;
      for (const auto& r : refs) out.push_back(samples.at(r.get<std::size_t>()));
      return out;
    };

    return TrainerState{cfg,
                        std::move(params),
                        std::move(adam),
                        EpisodicMemory::restore(mcfg, resolve(jm.at("slots")), resolve(jm.at("pending")),
                                                jm.at("observed_count").get<std::size_t>()),
                        rng_from(header.at("rng").at("memory")),
                        rng_from(header.at("rng").at("replay")),
                        header.at("update_index").get<std::size_t>()};
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("checkpoint: ") + e.what());
  } catch (const std::out_of_range&) {
    throw CheckpointError("checkpoint: sample reference out of range");
  }
}

void save_checkpoint(const std::filesystem::path& path, const TrainerState& state) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot write " + path.string());
  save_checkpoint(out, state);
}

TrainerState load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path.string());
  return load_checkpoint(in);
}

}  // namespace greenport
