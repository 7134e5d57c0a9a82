#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "grtr/model.hpp"

namespace grtr {

/// {"rank", "shapes", "factors": [row-major U^(1), ...], "bias", "config"}.
nlohmann::json model_to_json(const GrtrModel& m);
GrtrModel model_from_json(const nlohmann::json& j);

nlohmann::json config_to_json(const GrtrConfig& c);
GrtrConfig config_from_json(const nlohmann::json& j);

/// {"shape": [...], "data": [row-major values]}.
nlohmann::json tensor_to_json(const DenseTensor& t);
DenseTensor tensor_from_json(const nlohmann::json& j);

/// One matrix row per line, comma separated, full round-trip precision.
std::string matrix_to_csv(const Matrix& m);
/// Header `iteration,mse,loss`; iterations are 1-based.
std::string trace_to_csv(const TrainTrace& trace);

std::string read_text_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it into place, so a failed
/// write never leaves a partial file at `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace grtr
