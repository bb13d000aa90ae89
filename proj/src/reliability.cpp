#include "ambit/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <thread>

#include "ambit/errors.hpp"

namespace ambit {

double worst_case_threshold(double retention_floor) {
  const double rho = std::clamp(retention_floor, 0.0, 1.0);
  // Sign of delta is sign(sum q_i C_i - sum C_i / 2); the bitline term cancels.
  // k = 2: both charged cells shrink to (1-v), the empty one grows to (1+v):
  //   (2 rho - 1)(1 - v) > (1 + v) / 2
  // k = 1: the charged cell grows, the empty ones shrink:
  //   (rho - 1/2)(1 + v) < 1 - v
  // k = 3 needs rho > 1/2 and k = 0 never fails.
  if (rho <= 0.5) return 0.0;
  const double k2 = (2.0 * rho - 1.5) / (2.0 * rho - 0.5);
  const double k1 = (1.5 - rho) / (rho + 0.5);
  return std::max(0.0, std::min(k1, k2));
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

unsigned tra_trial_failures(const VariationModel& model, std::uint64_t trial) {
  const double v = model.variation;
  std::mt19937_64 rng(splitmix64(model.seed ^ splitmix64(trial)));
  // Draw every multiplier regardless of flags so streams stay aligned.
  auto draw = [&](bool enabled) {
    const double m = 1.0 + v * (2.0 * unit(rng) - 1.0);
    return enabled ? m : 1.0;
  };
  const ElectricalParams& p = model.nominal;
  std::array<double, 3> caps{};
  for (auto& c : caps) c = p.cell_capacitance * draw(model.vary_cells);
  const double cb = p.bitline_capacitance * draw(model.vary_bitline);
  const double vdd = p.vdd * draw(model.vary_vdd);
  const double offset = p.offset_threshold * p.vdd * draw(model.vary_offset);
  std::array<double, 3> retention{};
  for (auto& r : retention) r = std::min(1.0, draw(model.vary_retention));

  unsigned failed = 0;
  for (unsigned combo = 0; combo < 8; ++combo) {
    std::array<double, 3> q{};
    unsigned k = 0;
    for (unsigned i = 0; i < 3; ++i) {
      if (combo >> i & 1U) {
        q[i] = retention[i];
        ++k;
      }
    }
    const double volts = charge_share_deviation(q, caps, cb, vdd) * vdd;
    const bool want_high = k >= 2;
    const bool ok = volts != 0.0 && std::abs(volts) >= offset && (volts > 0.0) == want_high;
    if (!ok) failed |= 1U << k;
  }
  return failed;
}

McResult monte_carlo(const VariationModel& model, std::uint64_t trials, unsigned threads) {
  if (trials == 0) throw OutOfRange("at least one trial is required");
  if (!(model.variation >= 0.0 && model.variation <= 0.5))
    throw OutOfRange("variation must lie in [0, 0.5]");

  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, trials));

  std::vector<McResult> partial(threads);
  auto run = [&](unsigned t) {
    McResult& r = partial[t];
    for (std::uint64_t i = t; i < trials; i += threads) {
      const unsigned f = tra_trial_failures(model, i);
      if (f) ++r.failures;
      for (unsigned k = 0; k < 4; ++k)
        if (f >> k & 1U) ++r.per_k_failures[k];
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(run, t);
    run(0);
  }

  McResult out;
  out.trials = trials;
  for (const McResult& r : partial) {
    out.failures += r.failures;
    for (unsigned k = 0; k < 4; ++k) out.per_k_failures[k] += r.per_k_failures[k];
  }
  out.failure_rate = static_cast<double>(out.failures) / static_cast<double>(trials);
  return out;
}

std::optional<double> reference_failure_percent(double variation) {
  static constexpr std::array<double, 6> percent = {0.00, 0.00, 0.29, 6.01, 16.36, 26.19};
  for (std::size_t i = 0; i < kReferenceVariations.size(); ++i)
    if (std::abs(variation - kReferenceVariations[i]) < 1e-9) return percent[i];
  return std::nullopt;
}

void write_mc_csv(std::ostream& os, const std::vector<std::pair<double, McResult>>& rows) {
  os << "variation,trials,failures,rate,reference_rate\n";
  const auto flags = os.flags();
  for (const auto& [v, r] : rows) {
    os << std::fixed << std::setprecision(4) << v << ',' << r.trials << ',' << r.failures << ','
       << std::setprecision(6) << r.failure_rate << ',';
    if (auto ref = reference_failure_percent(v)) os << std::setprecision(4) << *ref / 100.0;
    else os << "NA";
    os << '\n';
  }
  os.flags(flags);
}

}  // namespace ambit
