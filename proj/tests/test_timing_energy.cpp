#include <cmath>

#include "ambit/errors.hpp"
#include "ambit/timing_energy.hpp"
#include "doctest.h"

using namespace ambit;

namespace {

TimingConfig naive888() {
  TimingConfig t = TimingConfig::ddr3_1600_888();
  t.mode = AapMode::naive;
  return t;
}

}  // namespace

TEST_CASE("AAP latency presets") {
  CHECK(naive888().aap_ns() == 80.0);
  CHECK(TimingConfig::ddr3_1600_888().aap_ns() == 49.0);
  CHECK(TimingConfig::ddr3_1600_888().ap_ns() == 45.0);
  CHECK(latency_of(canonical_trace(BbopKind::And), TimingConfig::ddr3_1600_888()) == 196.0);
  CHECK(latency_of(canonical_trace(BbopKind::And), naive888()) == 320.0);
  CHECK(latency_of(sequence_for(BbopKind::Xor), TimingConfig::ddr3_1600_888()) == 5 * 49.0 + 2 * 45.0);
}

TEST_CASE("trace latency equals the symbolic sequence latency") {
  for (BbopKind k : kAllBbops)
    for (auto t : {naive888(), TimingConfig::ddr3_1600_888(), TimingConfig::ddr3_1600_table()})
      CHECK(latency_of(canonical_trace(k), t) == latency_of(sequence_for(k), t));
}

TEST_CASE("activate energy grows per extra wordline") {
  EnergyConfig e;
  e.e_act_base = 2.0;
  CHECK(e.activate_nj(3) == doctest::Approx(e.activate_nj(1) * 1.22 * 1.22));
  CHECK(e.activate_nj(2) == doctest::Approx(2.0 * 1.22));
}

TEST_CASE("calibration anchors not at 1.6 nJ/KB") {
  EnergyConfig e = calibrate(EnergyConfig{});
  // not = 4 single-wordline ACTs + 2 PREs on an 8 KB row, PRE = 0.3 ACT.
  const double act = 1.6 * 8.0 / (4.0 + 2.0 * 0.3);
  CHECK(e.e_act_base == doctest::Approx(act));
  CHECK(e.e_pre == doctest::Approx(0.3 * act));
  CHECK(energy_per_kb(canonical_trace(BbopKind::Not), e) == doctest::Approx(1.6));

  const double f2 = 1.22, f3 = 1.22 * 1.22;
  const double and_kb = (7 * act + f3 * act + 4 * 0.3 * act) / 8.0;
  CHECK(energy_per_kb(canonical_trace(BbopKind::And), e) == doctest::Approx(and_kb));
  const double nand_kb = (9 * act + f3 * act + 5 * 0.3 * act) / 8.0;
  CHECK(energy_per_kb(canonical_trace(BbopKind::Nand), e) == doctest::Approx(nand_kb));
  // xor: six single-wordline ACTs; B8, B9, B10 raise two; B12, B14, B15 raise three.
  const double xor_kb = (6 * act + 3 * f2 * act + 3 * f3 * act + 7 * 0.3 * act) / 8.0;
  CHECK(energy_per_kb(canonical_trace(BbopKind::Xor), e) == doctest::Approx(xor_kb));
}

TEST_CASE("predicted energies within 20% of the reference table") {
  EnergyConfig e = calibrate(EnergyConfig{});
  auto within = [](double got, double want) { return std::abs(got - want) <= 0.2 * want; };
  CHECK(within(energy_per_kb(canonical_trace(BbopKind::And), e), 3.2));
  CHECK(within(energy_per_kb(canonical_trace(BbopKind::Or), e), 3.2));
  CHECK(within(energy_per_kb(canonical_trace(BbopKind::Nand), e), 4.0));
  CHECK(within(energy_per_kb(canonical_trace(BbopKind::Nor), e), 4.0));
  CHECK(within(energy_per_kb(canonical_trace(BbopKind::Xor), e), 5.5));
  CHECK(within(energy_per_kb(canonical_trace(BbopKind::Xnor), e), 5.5));
  const double not_red = baseline_energy_per_kb(BbopKind::Not, e) / 1.6;
  CHECK(not_red == doctest::Approx(93.7 / 1.6));
  CHECK(std::abs(not_red - 59.5) <= 0.05 * 59.5);
}

TEST_CASE("calibration rejects infeasible targets") {
  CHECK_THROWS_AS(calibrate(EnergyConfig{}, {0.0, 0.3}), Infeasible);
  CHECK_THROWS_AS(calibrate(EnergyConfig{}, {-1.0, 0.3}), Infeasible);
}

TEST_CASE("baseline energies") {
  EnergyConfig e;
  CHECK(baseline_energy_per_kb(BbopKind::Not, e) == doctest::Approx(93.7));
  CHECK(baseline_energy_per_kb(BbopKind::Xor, e) == doctest::Approx(137.9));
}

TEST_CASE("throughput arithmetic") {
  const auto t = TimingConfig::ddr3_1600_888();
  const double and1 = ambit_throughput(BbopKind::And, 1, t, 8192);
  CHECK(and1 == doctest::Approx(8192.0 / 196e-9));
  CHECK(and1 / 1e9 == doctest::Approx(41.8).epsilon(0.01));
  CHECK(ambit_throughput(BbopKind::And, 8, t, 8192) / 1e9 == doctest::Approx(334.4).epsilon(0.01));
  CHECK(ambit_throughput(BbopKind::Not, 8, t, 8192) == doctest::Approx(2 * ambit_throughput(BbopKind::And, 8, t, 8192)));

  const auto sky = BandwidthPreset::skylake();
  CHECK(baseline_throughput(BbopKind::And, sky) / 1e9 == doctest::Approx(34.128 / 3));
  CHECK(baseline_throughput(BbopKind::Not, sky) / 1e9 == doctest::Approx(34.128 / 2));
  CHECK(baseline_ns(1024, 3, sky) == doctest::Approx(3 * 1024 / 34.128));
}

TEST_CASE("report combines the models") {
  EnergyConfig e = calibrate(EnergyConfig{});
  OpReport r = report_for(BbopKind::And, 8, TimingConfig::ddr3_1600_888(), e, BandwidthPreset::skylake(), 8192);
  CHECK(r.op == "and");
  CHECK(r.latency_ns == 196.0);
  CHECK(r.speedup == doctest::Approx(r.ambit_gbps / r.baseline_gbps));
  CHECK(r.speedup >= 20.0);
  CHECK(r.speedup <= 60.0);
  CHECK(r.energy_reduction == doctest::Approx(137.9 / r.energy_nj_per_kb));
}

TEST_CASE("PSM groups are charged one row cycle plus bursts") {
  CommandTrace t;
  t.push({Command::activate, 0, 0, "D0", 1, Decoder::cd_group, true, Primitive::psm});
  t.push({Command::activate, 1, 0, "D0", 1, Decoder::cd_group, false, Primitive::psm});
  for (int i = 0; i < 128; ++i) t.push({Command::transfer, 0, 0, "col", 0, Decoder::none, false, Primitive::psm});
  t.push({Command::precharge, 0, 0, "", 0, Decoder::none, false, Primitive::psm});
  t.push({Command::precharge, 1, 0, "", 0, Decoder::none, false, Primitive::psm});
  const auto cfg = TimingConfig::ddr3_1600_888();
  CHECK(latency_of(t, cfg) == doctest::Approx(cfg.tRAS + 128 * cfg.t_burst + cfg.tRP));
}
