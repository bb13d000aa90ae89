#include "ambit/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "ambit/errors.hpp"
#include "json.hpp"

namespace ambit {

using nlohmann::json;

TimingConfig timing_preset(const std::string& name) {
  if (name == "ddr3-1600-8-8-8") return TimingConfig::ddr3_1600_888();
  if (name == "ddr3-1600-table") return TimingConfig::ddr3_1600_table();
  throw ConfigError("unknown timing preset '" + name + "'");
}

BandwidthPreset bandwidth_preset(const std::string& name) {
  for (auto& p : BandwidthPreset::all())
    if (p.name == name) return p;
  throw ConfigError("unknown bandwidth preset '" + name + "'");
}

namespace {

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, _] : obj.items())
    if (!ok.contains(k)) throw ConfigError("unknown key '" + where + "." + k + "'");
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + where + "." + key + "': " + e.what());
  }
}

void non_negative(double v, const char* name) {
  if (!(v >= 0.0)) throw ConfigError(std::string(name) + " must be >= 0");
}

}  // namespace

void SimConfig::finalize() {
  auto& e = runtime.energy;
  if (row_kb_from_geometry) e.row_kb = static_cast<double>(runtime.geometry.row_bytes()) / 1024.0;
  if (calibrate) e = ambit::calibrate(e, targets);
}

SimConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  SimConfig cfg;
  if (root.is_null()) return cfg;
  check_keys(root, "config", {"timing", "energy", "baseline", "geometry", "electrical", "runtime"});
  RuntimeConfig& rc = cfg.runtime;

  if (root.contains("timing")) {
    const json& t = root["timing"];
    check_keys(t, "timing", {"preset", "tRAS", "tRCD", "tRP", "tWR", "aap_overlap_delta", "t_burst", "mode"});
    std::string preset;
    read(t, "preset", preset, "timing");
    if (!preset.empty()) rc.timing = timing_preset(preset);
    read(t, "tRAS", rc.timing.tRAS, "timing");
    read(t, "tRCD", rc.timing.tRCD, "timing");
    read(t, "tRP", rc.timing.tRP, "timing");
    read(t, "tWR", rc.timing.tWR, "timing");
    read(t, "aap_overlap_delta", rc.timing.aap_overlap_delta, "timing");
    read(t, "t_burst", rc.timing.t_burst, "timing");
    std::string mode;
    read(t, "mode", mode, "timing");
    if (mode == "naive") rc.timing.mode = AapMode::naive;
    else if (mode == "split") rc.timing.mode = AapMode::split;
    else if (!mode.empty()) throw ConfigError("timing.mode must be 'naive' or 'split'");
    for (double v : {rc.timing.tRAS, rc.timing.tRCD, rc.timing.tRP, rc.timing.tWR, rc.timing.aap_overlap_delta, rc.timing.t_burst})
      non_negative(v, "timing values");
  }

  if (root.contains("energy")) {
    const json& e = root["energy"];
    check_keys(e, "energy", {"e_act_base", "extra_wordline_factor", "e_pre", "e_transfer_col", "e_ddr3_read_kb",
                             "e_ddr3_write_kb", "row_kb", "calibrate", "not_nj_per_kb", "pre_to_act_ratio"});
    auto& ec = rc.energy;
    read(e, "e_act_base", ec.e_act_base, "energy");
    read(e, "extra_wordline_factor", ec.extra_wordline_factor, "energy");
    read(e, "e_pre", ec.e_pre, "energy");
    read(e, "e_transfer_col", ec.e_transfer_col, "energy");
    read(e, "e_ddr3_read_kb", ec.e_ddr3_read_kb, "energy");
    read(e, "e_ddr3_write_kb", ec.e_ddr3_write_kb, "energy");
    if (e.contains("row_kb")) {
      read(e, "row_kb", ec.row_kb, "energy");
      cfg.row_kb_from_geometry = false;
    }
    read(e, "calibrate", cfg.calibrate, "energy");
    read(e, "not_nj_per_kb", cfg.targets.not_nj_per_kb, "energy");
    read(e, "pre_to_act_ratio", cfg.targets.pre_to_act_ratio, "energy");
  }

  if (root.contains("baseline")) {
    const json& b = root["baseline"];
    check_keys(b, "baseline", {"preset", "bytes_per_second"});
    std::string preset;
    read(b, "preset", preset, "baseline");
    if (!preset.empty()) rc.baseline = bandwidth_preset(preset);
    if (b.contains("bytes_per_second")) {
      read(b, "bytes_per_second", rc.baseline.bytes_per_second, "baseline");
      if (preset.empty()) rc.baseline.name = "custom";
    }
    if (!(rc.baseline.bytes_per_second > 0.0)) throw ConfigError("baseline bandwidth must be positive");
  }

  if (root.contains("geometry")) {
    const json& g = root["geometry"];
    check_keys(g, "geometry", {"banks", "subarrays_per_bank", "row_bits"});
    read(g, "banks", rc.geometry.banks, "geometry");
    read(g, "subarrays_per_bank", rc.geometry.subarrays_per_bank, "geometry");
    read(g, "row_bits", rc.geometry.row_bits, "geometry");
  }

  if (root.contains("electrical")) {
    const json& el = root["electrical"];
    check_keys(el, "electrical", {"cell_capacitance", "bitline_capacitance", "vdd", "offset_threshold"});
    read(el, "cell_capacitance", rc.electrical.cell_capacitance, "electrical");
    read(el, "bitline_capacitance", rc.electrical.bitline_capacitance, "electrical");
    read(el, "vdd", rc.electrical.vdd, "electrical");
    read(el, "offset_threshold", rc.electrical.offset_threshold, "electrical");
    if (!(rc.electrical.cell_capacitance > 0 && rc.electrical.bitline_capacitance > 0 && rc.electrical.vdd > 0))
      throw ConfigError("capacitances and vdd must be positive");
    non_negative(rc.electrical.offset_threshold, "electrical.offset_threshold");
  }

  if (root.contains("runtime")) {
    const json& r = root["runtime"];
    check_keys(r, "runtime", {"flush_ns_per_line", "staging"});
    read(r, "flush_ns_per_line", rc.flush_ns_per_line, "runtime");
    read(r, "staging", rc.staging, "runtime");
  }
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace ambit
