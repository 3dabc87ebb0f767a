#pragma once

#include <filesystem>
#include <vector>

#include "sparsebench/datagen.hpp"

namespace sparsebench::scenario_io {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Declarative scenario description:
///   { "setting": "low" | {"n":..,"p":..,"s":..}, "beta_type": 2,
///     "rho": 0.35, "snr": 0.7 or [..], "reps": 10, "seed": 1 }
/// Either "setting" or explicit n/p/s must be present (not both). A list of
/// SNR values expands into one spec per value, sharing the same seed so
/// draws are common across SNR levels.
std::vector<datagen::ScenarioSpec> load_scenarios(
    const std::filesystem::path& path);

std::vector<datagen::ScenarioSpec> parse_scenarios(const std::string& text);

}  // namespace sparsebench::scenario_io
