#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ambit/controller.hpp"
#include "ambit/trace.hpp"

namespace ambit {

enum class AapMode { naive, split };

/// DRAM timing in nanoseconds.
struct TimingConfig {
  double tRAS = 35.0;
  double tRCD = 10.0;
  double tRP = 10.0;
  double tWR = 15.0;
  double aap_overlap_delta = 4.0;  // second activate beyond tRAS with a split decoder
  double t_burst = 5.0;            // one 64-byte column transfer
  AapMode mode = AapMode::split;

  /// DDR3-1600 as listed in the usual timing table (tRP = 15).
  static TimingConfig ddr3_1600_table() { return {35.0, 15.0, 15.0, 15.0, 4.0, 5.0, AapMode::split}; }
  /// DDR3-1600 8-8-8; the one that yields 80 ns / 49 ns AAPs.
  static TimingConfig ddr3_1600_888() { return {35.0, 10.0, 10.0, 15.0, 4.0, 5.0, AapMode::split}; }

  double aap_ns() const { return mode == AapMode::naive ? 2.0 * tRAS + tRP : tRAS + aap_overlap_delta + tRP; }
  double ap_ns() const { return tRAS + tRP; }
};

/// Energies in nJ.
struct EnergyConfig {
  double e_act_base = 1.0;             // single-wordline ACTIVATE of one row
  double extra_wordline_factor = 1.22; // per additional raised wordline
  double e_pre = 0.3;
  double e_transfer_col = 44.2 / 16.0; // one 64-byte PSM column (DDR3 read energy per KB / 16)
  double e_ddr3_read_kb = 44.2;
  double e_ddr3_write_kb = 49.5;
  double row_kb = 8.0;

  double activate_nj(unsigned wordlines) const;
};

struct BandwidthPreset {
  std::string name;
  double bytes_per_second = 0.0;

  /// Two 64-bit DDR3-2133 channels.
  static BandwidthPreset skylake() { return {"skylake", 2 * 8 * 2133e6}; }
  /// One 128-bit DDR3-1800 channel.
  static BandwidthPreset gtx745() { return {"gtx745", 16 * 1800e6}; }
  /// 32 vaults at 10 GB/s.
  static BandwidthPreset hmc2() { return {"hmc2", 32 * 10e9}; }

  static std::vector<BandwidthPreset> all() { return {skylake(), gtx745(), hmc2()}; }
};

double latency_of(const CommandTrace& trace, const TimingConfig& cfg);
/// Latency of a symbolic sequence: #AAP * L_AAP + #AP * L_AP.
double latency_of(std::span<const Step> steps, const TimingConfig& cfg);

double energy_of(const CommandTrace& trace, const EnergyConfig& cfg);
/// Energy per KB of output when the trace produced `output_rows` rows.
double energy_per_kb(const CommandTrace& trace, const EnergyConfig& cfg, std::size_t output_rows = 1);

/// Canonical single-row trace of `kind` (built symbolically, no chip needed).
CommandTrace canonical_trace(BbopKind kind);

struct CalibrationTargets {
  double not_nj_per_kb = 1.6;
  double pre_to_act_ratio = 0.3;
};

/// Solves e_act_base (and e_pre = ratio * e_act_base) so the not sequence
/// costs exactly `targets.not_nj_per_kb`.
EnergyConfig calibrate(EnergyConfig cfg, const CalibrationTargets& targets = {});

/// Operand plus result streams the host must move for `kind`.
constexpr int baseline_streams(BbopKind kind) { return is_unary(kind) ? 2 : 3; }

double ambit_throughput(BbopKind kind, unsigned banks, const TimingConfig& cfg, std::size_t row_bytes);
double baseline_throughput(BbopKind kind, const BandwidthPreset& preset);
double baseline_energy_per_kb(BbopKind kind, const EnergyConfig& cfg);
/// Time for the host to move `bytes` of each of `streams` streams.
double baseline_ns(double bytes, int streams, const BandwidthPreset& preset);

struct OpReport {
  std::string op;
  double latency_ns = 0.0;
  double energy_nj_per_kb = 0.0;
  double ambit_gbps = 0.0;
  double baseline_gbps = 0.0;
  double speedup = 0.0;
  double energy_reduction = 0.0;
};

OpReport report_for(BbopKind kind, unsigned banks, const TimingConfig& timing, const EnergyConfig& energy,
                    const BandwidthPreset& preset, std::size_t row_bytes);

}  // namespace ambit
