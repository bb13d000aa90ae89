#include "ambit/config.hpp"
#include "ambit/errors.hpp"
#include "doctest.h"

using namespace ambit;

TEST_CASE("empty config keeps defaults") {
  SimConfig c = parse_config("{}");
  CHECK(c.runtime.timing.aap_ns() == 49.0);
  CHECK(c.runtime.baseline.name == "skylake");
  CHECK(c.calibrate);
  c.finalize();
  CHECK(c.runtime.energy.row_kb == 8.0);
  CHECK(c.runtime.energy.e_act_base == doctest::Approx(1.6 * 8.0 / 4.6));
}

TEST_CASE("overrides") {
  SimConfig c = parse_config(R"({
    "timing": {"preset": "ddr3-1600-table", "mode": "naive"},
    "energy": {"calibrate": false, "e_act_base": 3.0},
    "baseline": {"preset": "hmc2"},
    "geometry": {"banks": 4, "row_bits": 16384},
    "electrical": {"offset_threshold": 0.01},
    "runtime": {"staging": false}
  })");
  CHECK(c.runtime.timing.tRP == 15.0);
  CHECK(c.runtime.timing.aap_ns() == 2 * 35.0 + 15.0);
  CHECK(c.runtime.baseline.bytes_per_second == 320e9);
  CHECK(c.runtime.geometry.banks == 4);
  CHECK(c.runtime.electrical.offset_threshold == 0.01);
  CHECK_FALSE(c.runtime.staging);
  c.finalize();
  CHECK(c.runtime.energy.e_act_base == 3.0);
  CHECK(c.runtime.energy.row_kb == 2.0);
}

TEST_CASE("custom bandwidth") {
  SimConfig c = parse_config(R"({"baseline": {"bytes_per_second": 1e9}})");
  CHECK(c.runtime.baseline.name == "custom");
  CHECK(c.runtime.baseline.bytes_per_second == 1e9);
}

TEST_CASE("bad configs are rejected") {
  CHECK_THROWS_AS(parse_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"timing": {"tRAS": "fast"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"timings": {}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"timing": {"tras": 30}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"timing": {"preset": "ddr4"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"timing": {"mode": "fast"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"timing": {"tRP": -1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"baseline": {"bytes_per_second": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"electrical": {"vdd": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"([1, 2])"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/ambit.json"), ConfigError);
}
