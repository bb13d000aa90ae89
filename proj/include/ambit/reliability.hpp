#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ambit/dram.hpp"

namespace ambit {

/// Process variation for a triple-row activation. Every varied component is
/// scaled by an independent multiplier drawn uniformly from [1-v, 1+v].
/// Charged cells hold min(1, multiplier) of full charge (retention).
struct VariationModel {
  double variation = 0.0;
  std::uint64_t seed = 1;
  ElectricalParams nominal{};
  bool vary_cells = true;
  bool vary_bitline = true;
  bool vary_vdd = true;
  bool vary_offset = true;
  bool vary_retention = true;
};

struct McResult {
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  double failure_rate = 0.0;
  std::array<std::uint64_t, 4> per_k_failures{};  // k = number of charged cells

  double per_k_rate(unsigned k) const {
    return trials ? static_cast<double>(per_k_failures[k]) / static_cast<double>(trials) : 0.0;
  }
  friend bool operator==(const McResult&, const McResult&) = default;
};

/// Largest capacitance variation for which every TRA input still resolves to
/// the right majority under the most adversarial capacitance assignment, with
/// charged cells holding `retention_floor` of full charge. Sense offset is not
/// considered. 1/3 for ideal retention.
double worst_case_threshold(double retention_floor = 1.0);

/// Outcome of one TRA trial: bit k set when some input with k charged cells
/// failed to resolve correctly.
unsigned tra_trial_failures(const VariationModel& model, std::uint64_t trial);

McResult monte_carlo(const VariationModel& model, std::uint64_t trials, unsigned threads = 0);

/// Reference SPICE failure percentages for 0..25% variation; printed for comparison.
std::optional<double> reference_failure_percent(double variation);
inline constexpr std::array<double, 6> kReferenceVariations = {0.0, 0.05, 0.10, 0.15, 0.20, 0.25};

/// CSV: variation,trials,failures,rate,reference_rate
void write_mc_csv(std::ostream& os, const std::vector<std::pair<double, McResult>>& rows);

}  // namespace ambit
