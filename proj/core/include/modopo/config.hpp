#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "modopo/model.hpp"

namespace modopo {

/// Parses a JSON object whose keys are a subset of gamma3_over_gamma,
/// k_over_gamma, fbar_over_fth, f1_over_fbar, delta_over_gamma, phi, phi_L,
/// phi_K. Missing keys keep their defaults; unknown keys and non-numeric
/// values raise ConfigError.
[[nodiscard]] DimensionlessConfig parse_config(std::string_view json_text,
                                               const DimensionlessConfig& defaults = {});
[[nodiscard]] DimensionlessConfig load_config(const std::filesystem::path& path,
                                              const DimensionlessConfig& defaults = {});

/// Single-line JSON with every key, values at 17 significant digits.
[[nodiscard]] std::string to_json(const DimensionlessConfig& c);

}  // namespace modopo
