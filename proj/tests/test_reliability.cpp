#include <array>
#include <cmath>
#include <sstream>

#include "ambit/errors.hpp"
#include "ambit/reliability.hpp"
#include "doctest.h"

using namespace ambit;

namespace {

// True when every input combination resolves correctly for every extreme
// assignment of cell capacitances in [1-v, 1+v]. The bitline is precharged to
// half, so the sign of the deviation is the sign of sum (q_i - 1/2) C_i.
bool all_correct(double v, double rho) {
  for (unsigned caps = 0; caps < 8; ++caps) {
    std::array<double, 3> c{};
    for (unsigned i = 0; i < 3; ++i) c[i] = caps >> i & 1U ? 1.0 + v : 1.0 - v;
    for (unsigned combo = 0; combo < 8; ++combo) {
      double s = 0.0;
      int k = 0;
      for (unsigned i = 0; i < 3; ++i) {
        const bool on = combo >> i & 1U;
        k += on;
        s += ((on ? rho : 0.0) - 0.5) * c[i];
      }
      if (s == 0.0 || (s > 0.0) != (k >= 2)) return false;
    }
  }
  return true;
}

double grid_threshold(double rho) {
  double lo = 0.0, hi = 1.0;
  // Coarse scan first so the bisection brackets the first failure.
  for (double v = 0.0; v <= 1.0; v += 1e-3) {
    if (!all_correct(v, rho)) {
      hi = v;
      break;
    }
    lo = v;
  }
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (all_correct(mid, rho) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

TEST_CASE("capacitance-only worst-case threshold is one third") {
  CHECK(worst_case_threshold() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(worst_case_threshold() == doctest::Approx(grid_threshold(1.0)).epsilon(1e-9));
}

TEST_CASE("weaker retention lowers the threshold") {
  const double t = worst_case_threshold(0.9);
  CHECK(t < 1.0 / 3.0);
  CHECK(t == doctest::Approx(grid_threshold(0.9)).epsilon(1e-9));
  CHECK(worst_case_threshold(0.5) == 0.0);
}

TEST_CASE("no variation never fails") {
  VariationModel m;
  for (std::uint64_t i = 0; i < 100; ++i) CHECK(tra_trial_failures(m, i) == 0);
  McResult r = monte_carlo(m, 1000);
  CHECK(r.failures == 0);
  CHECK(r.failure_rate == 0.0);
}

TEST_CASE("failure rate grows with variation") {
  VariationModel lo, hi;
  lo.variation = 0.10;
  hi.variation = 0.25;
  const McResult a = monte_carlo(lo, 5000), b = monte_carlo(hi, 5000);
  CHECK(b.failure_rate >= a.failure_rate);
  CHECK(b.failures > 0);
}

TEST_CASE("capacitance variation alone below the threshold never fails") {
  VariationModel m;
  m.variation = 0.30;
  m.vary_bitline = m.vary_vdd = m.vary_offset = m.vary_retention = false;
  m.nominal.offset_threshold = 0.0;
  CHECK(monte_carlo(m, 5000).failures == 0);
}

TEST_CASE("results do not depend on thread count") {
  VariationModel m;
  m.variation = 0.2;
  m.seed = 99;
  const McResult one = monte_carlo(m, 3000, 1);
  CHECK(monte_carlo(m, 3000, 4) == one);
  CHECK(monte_carlo(m, 3000, 7) == one);
  std::uint64_t per_k_total = 0;
  for (unsigned k = 0; k < 4; ++k) per_k_total += one.per_k_failures[k];
  CHECK(per_k_total >= one.failures);
  CHECK(one.per_k_failures[0] == 0);
}

TEST_CASE("input validation") {
  VariationModel m;
  CHECK_THROWS_AS(monte_carlo(m, 0), OutOfRange);
  m.variation = 0.6;
  CHECK_THROWS_AS(monte_carlo(m, 10), OutOfRange);
  m.variation = -0.1;
  CHECK_THROWS_AS(monte_carlo(m, 10), OutOfRange);
}

TEST_CASE("reference table and CSV") {
  CHECK(reference_failure_percent(0.10).value() == doctest::Approx(0.29));
  CHECK(reference_failure_percent(0.25).value() == doctest::Approx(26.19));
  CHECK_FALSE(reference_failure_percent(0.07).has_value());

  McResult r;
  r.trials = 100;
  r.failures = 3;
  r.failure_rate = 0.03;
  std::ostringstream os;
  write_mc_csv(os, {{0.15, r}, {0.07, r}});
  CHECK(os.str() ==
        "variation,trials,failures,rate,reference_rate\n"
        "0.1500,100,3,0.030000,0.0601\n"
        "0.0700,100,3,0.030000,NA\n");
}
