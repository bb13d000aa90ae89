#include "ambit/timing_energy.hpp"

#include <cmath>

#include "ambit/errors.hpp"

namespace ambit {

double EnergyConfig::activate_nj(unsigned wordlines) const {
  return e_act_base * std::pow(extra_wordline_factor, static_cast<double>(wordlines) - 1.0);
}

double latency_of(const CommandTrace& trace, const TimingConfig& cfg) {
  const auto& es = trace.entries();
  double total = 0.0;
  std::size_t i = 0;
  while (i < es.size()) {
    std::size_t end = i + 1;
    while (end < es.size() && !es[end].aap_boundary) ++end;
    switch (es[i].primitive) {
      case Primitive::aap: total += cfg.aap_ns(); break;
      case Primitive::ap: total += cfg.ap_ns(); break;
      case Primitive::psm: {
        std::size_t transfers = 0;
        for (std::size_t j = i; j < end; ++j)
          if (es[j].command == Command::transfer) ++transfers;
        total += cfg.tRAS + static_cast<double>(transfers) * cfg.t_burst + cfg.tRP;
        break;
      }
      case Primitive::host: total += static_cast<double>(end - i) * cfg.t_burst; break;
    }
    i = end;
  }
  return total;
}

double latency_of(std::span<const Step> steps, const TimingConfig& cfg) {
  double total = 0.0;
  for (const Step& s : steps) total += s.kind == Step::Kind::aap ? cfg.aap_ns() : cfg.ap_ns();
  return total;
}

double energy_of(const CommandTrace& trace, const EnergyConfig& cfg) {
  double total = 0.0;
  for (const auto& e : trace.entries()) {
    switch (e.command) {
      case Command::activate: total += cfg.activate_nj(e.wordlines_raised); break;
      case Command::precharge: total += cfg.e_pre; break;
      case Command::transfer: total += cfg.e_transfer_col; break;
      case Command::read: total += cfg.e_ddr3_read_kb * kColumnBytes / 1024.0; break;
      case Command::write: total += cfg.e_ddr3_write_kb * kColumnBytes / 1024.0; break;
    }
  }
  return total;
}

double energy_per_kb(const CommandTrace& trace, const EnergyConfig& cfg, std::size_t output_rows) {
  return energy_of(trace, cfg) / (static_cast<double>(output_rows) * cfg.row_kb);
}

CommandTrace canonical_trace(BbopKind kind) {
  const RowAddress di = RowAddress::d(0), dj = RowAddress::d(1), dk = RowAddress::d(2);
  auto resolve = [&](const Operand& o) {
    switch (o.kind) {
      case Operand::Kind::src1: return di;
      case Operand::Kind::src2: return dj;
      case Operand::Kind::dst: return dk;
      case Operand::Kind::b: return RowAddress::b(o.index);
      case Operand::Kind::c: return RowAddress::c(o.index);
    }
    return dk;
  };
  auto act = [](const RowAddress& a, bool boundary, Primitive p) {
    return TraceEntry{Command::activate, a.bank, a.subarray, a.label(),
                      static_cast<unsigned>(decode(a).size()),
                      a.group == Group::B ? Decoder::b_group : Decoder::cd_group, boundary, p};
  };
  CommandTrace t;
  for (const Step& s : sequence_for(kind)) {
    const Primitive p = s.kind == Step::Kind::aap ? Primitive::aap : Primitive::ap;
    t.push(act(resolve(s.first), true, p));
    if (s.kind == Step::Kind::aap) t.push(act(resolve(s.second), false, p));
    t.push({Command::precharge, 0, 0, "", 0, Decoder::none, false, p});
  }
  return t;
}

EnergyConfig calibrate(EnergyConfig cfg, const CalibrationTargets& targets) {
  if (!(targets.not_nj_per_kb > 0.0) || !std::isfinite(targets.not_nj_per_kb))
    throw Infeasible("not-energy anchor must be positive, got " + std::to_string(targets.not_nj_per_kb));
  if (!(targets.pre_to_act_ratio >= 0.0) || !std::isfinite(targets.pre_to_act_ratio))
    throw Infeasible("precharge/activate ratio must be non-negative");
  if (!(cfg.row_kb > 0.0)) throw Infeasible("row size must be positive");

  // Energy is linear in e_act_base once e_pre is tied to it.
  EnergyConfig unit = cfg;
  unit.e_act_base = 1.0;
  unit.e_pre = targets.pre_to_act_ratio;
  const double per_unit = energy_per_kb(canonical_trace(BbopKind::Not), unit);
  if (!(per_unit > 0.0)) throw Infeasible("not sequence has no energy-bearing commands");

  cfg.e_act_base = targets.not_nj_per_kb / per_unit;
  cfg.e_pre = targets.pre_to_act_ratio * cfg.e_act_base;
  return cfg;
}

double ambit_throughput(BbopKind kind, unsigned banks, const TimingConfig& cfg, std::size_t row_bytes) {
  const double ns = latency_of(sequence_for(kind), cfg);
  return static_cast<double>(banks) * static_cast<double>(row_bytes) / (ns * 1e-9);
}

double baseline_throughput(BbopKind kind, const BandwidthPreset& preset) {
  return preset.bytes_per_second / baseline_streams(kind);
}

double baseline_energy_per_kb(BbopKind kind, const EnergyConfig& cfg) {
  const int reads = baseline_streams(kind) - 1;
  return reads * cfg.e_ddr3_read_kb + cfg.e_ddr3_write_kb;
}

double baseline_ns(double bytes, int streams, const BandwidthPreset& preset) {
  return bytes * streams / preset.bytes_per_second * 1e9;
}

OpReport report_for(BbopKind kind, unsigned banks, const TimingConfig& timing, const EnergyConfig& energy,
                    const BandwidthPreset& preset, std::size_t row_bytes) {
  OpReport r;
  r.op = std::string(to_string(kind));
  r.latency_ns = latency_of(sequence_for(kind), timing);
  r.energy_nj_per_kb = energy_per_kb(canonical_trace(kind), energy);
  r.ambit_gbps = ambit_throughput(kind, banks, timing, row_bytes) / 1e9;
  r.baseline_gbps = baseline_throughput(kind, preset) / 1e9;
  r.speedup = r.ambit_gbps / r.baseline_gbps;
  r.energy_reduction = baseline_energy_per_kb(kind, energy) / r.energy_nj_per_kb;
  return r;
}

}  // namespace ambit
