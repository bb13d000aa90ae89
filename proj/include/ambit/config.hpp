#pragma once

#include <filesystem>
#include <string>

#include "ambit/runtime.hpp"
#include "ambit/timing_energy.hpp"

namespace ambit {

struct SimConfig {
  RuntimeConfig runtime{};
  bool calibrate = true;
  bool row_kb_from_geometry = true;
  CalibrationTargets targets{};

  /// Derived values (row_kb, calibrated energies). Call after overrides.
  void finalize();
};

/// Parses a JSON config. Unknown keys and wrong types raise ConfigError.
SimConfig parse_config(const std::string& json_text);
SimConfig load_config(const std::filesystem::path& path);

TimingConfig timing_preset(const std::string& name);
BandwidthPreset bandwidth_preset(const std::string& name);

}  // namespace ambit
