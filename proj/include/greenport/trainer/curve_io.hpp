#pragma once

#include <filesystem>
#include <vector>

#include "greenport/trainer/trainer.hpp"

namespace greenport {

// update_index,eval_index,phase,mse_total,mse_transpiration,mse_photosynthesis
void write_curve_csv(const std::filesystem::path& path, const LearningCurve& curve);
// phase,start_update
void write_boundaries_csv(const std::filesystem::path& path, const std::vector<PhaseStart>& phases);
// "x/curve.csv" -> "x/curve.boundaries.csv"
std::filesystem::path boundaries_path_for(const std::filesystem::path& curve_path);

// Reads a curve CSV and its boundaries sidecar.
LearningCurve read_curve(const std::filesystem::path& curve_path);

// update_index,training_phase,test_phase,mse_total,mse_transpiration,mse_photosynthesis
void write_retention_csv(const std::filesystem::path& path, const std::vector<RetentionPoint>& rows);
// update_index,label,fraction
void write_memory_csv(const std::filesystem::path& path, const std::vector<MemoryShareRow>& rows);

}  // namespace greenport
