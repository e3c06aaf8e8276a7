#pragma once

#include <filesystem>
#include <iosfwd>

#include "greenport/trainer/trainer.hpp"

namespace greenport {

// Binary checkpoint:
//   8-byte magic "GPCKPT\0\1"
//   u64 little-endian length of a JSON header
//   JSON header (model config, memory config, RNG states, counters, and a
//   table of every tensor and memory sample with its payload offset)
//   payload of little-endian IEEE-754 doubles
// save(load(save(s))) is byte-identical to save(s).
void save_checkpoint(std::ostream& out, const TrainerState& state);
TrainerState load_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const TrainerState& state);
TrainerState load_checkpoint(const std::filesystem::path& path);

}  // namespace greenport
