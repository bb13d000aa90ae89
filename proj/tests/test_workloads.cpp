#include <algorithm>
#include <random>

#include "ambit/errors.hpp"
#include "ambit/workloads.hpp"
#include "doctest.h"

using namespace ambit;

namespace {

RuntimeConfig config(std::size_t row_bits = 8192) {
  RuntimeConfig c;
  c.geometry = {8, 16, row_bits};
  return c;
}

// Per-user recomputation written out longhand.
std::pair<std::size_t, std::vector<std::size_t>> naive_bitmap(const BitmapWorkload& w) {
  std::size_t all = 0;
  std::vector<std::size_t> male(w.weeks, 0);
  for (std::size_t u = 0; u < w.users; ++u) {
    bool every = true;
    for (std::size_t wk = 0; wk < w.weeks; ++wk) {
      bool any = false;
      for (std::size_t d = 0; d < 7; ++d) any = any || w.daily[wk * 7 + d].get(u);
      every = every && any;
      if (any && w.male.get(u)) ++male[wk];
    }
    all += every;
  }
  return {all, male};
}

}  // namespace

TEST_CASE("bitmap tally follows the closed form") {
  std::mt19937_64 rng(1);
  for (std::size_t weeks : {1u, 2u, 4u}) {
    Runtime rt(config());
    BitmapWorkload w = BitmapWorkload::random(20000, weeks, rng);
    BitmapResult r = bitmap_query(rt, w);
    CHECK(r.tally == OpTally{6 * weeks, 2 * weeks - 1, weeks + 1});
    auto [all, male] = naive_bitmap(w);
    CHECK(r.weekly_active_count == all);
    CHECK(r.male_weekly_counts == male);
    BitmapResult s = bitmap_query_scalar(w);
    CHECK(s.weekly_active_count == all);
    CHECK(s.male_weekly_counts == male);
    CHECK(r.sim_ns > 0.0);
    CHECK(r.baseline_ns > 0.0);
  }
}

TEST_CASE("everyone active every day") {
  Runtime rt(config());
  BitmapWorkload w;
  w.users = 5000;
  w.weeks = 2;
  w.daily.assign(14, BitRow(5000, true));
  w.male = BitRow(5000);
  BitmapResult r = bitmap_query(rt, w);
  CHECK(r.weekly_active_count == 5000);
  CHECK(r.male_weekly_counts == std::vector<std::size_t>{0, 0});
}

TEST_CASE("bit slices reassemble the column") {
  std::mt19937_64 rng(2);
  std::vector<std::uint32_t> v(1000);
  for (auto& x : v) x = static_cast<std::uint32_t>(rng() & 0xfff);
  BitWeavingTable t(v, 12);
  CHECK(t.reassemble() == v);
  CHECK(t.slices().size() == 12);
  CHECK(t.slices()[0].get(0) == bool(v[0] >> 11 & 1));
  CHECK_THROWS_AS(BitWeavingTable({16}, 4), OutOfRange);
}

TEST_CASE("BitWeaving scan edge cases") {
  std::mt19937_64 rng(3);
  BitRow bits = BitRow::random(3000, rng);
  std::vector<std::uint32_t> v(3000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = bits.get(i);
  BitWeavingTable one(v, 1);
  Runtime rt(config());
  CHECK(bitweaving_scan(rt, one, 1, 1).count == bits.popcount());

  std::vector<std::uint32_t> w(3000);
  for (auto& x : w) x = static_cast<std::uint32_t>(rng() & 0xff);
  BitWeavingTable t(w, 8);
  CHECK(bitweaving_scan(rt, t, 0, 255).count == 3000);
  CHECK_THROWS_AS(bitweaving_scan(rt, t, 0, 256), ConstantOutOfRange);
  CHECK_THROWS_AS(bitweaving_scan(rt, t, 9, 3), ConstantOutOfRange);
}

TEST_CASE("BitWeaving scan equals a filter over the column") {
  std::mt19937_64 rng(4);
  for (unsigned b : {4u, 7u, 16u}) {
    Runtime rt(config());
    std::vector<std::uint32_t> v(20000);
    for (auto& x : v) x = static_cast<std::uint32_t>(rng() & ((1u << b) - 1));
    BitWeavingTable t(v, b);
    LoadedColumn col(rt, t);
    for (int p = 0; p < 10; ++p) {
      auto c1 = static_cast<std::uint32_t>(rng() & ((1u << b) - 1));
      auto c2 = static_cast<std::uint32_t>(rng() & ((1u << b) - 1));
      if (c1 > c2) std::swap(c1, c2);
      const auto want = static_cast<std::size_t>(
          std::count_if(v.begin(), v.end(), [&](std::uint32_t x) { return c1 <= x && x <= c2; }));
      CHECK(col.scan(c1, c2).count == want);
      CHECK(bitweaving_scan_scalar(t, c1, c2) == want);
    }
  }
}

TEST_CASE("loaded column frees its rows") {
  Runtime rt(config());
  const std::size_t before = rt.free_rows(0, 0);
  {
    std::vector<std::uint32_t> v(100, 3);
    BitWeavingTable t(v, 4);
    LoadedColumn col(rt, t);
    CHECK(rt.free_rows(0, 0) < before);
  }
  CHECK(rt.free_rows(0, 0) == before);
}

TEST_CASE("small set operations") {
  SetInstance inst{8, {{1}, {2}}};
  Runtime rt(config());
  SetOpResult u = set_op(rt, SetOpKind::Union, inst);
  CHECK(u.elements == std::vector<std::uint32_t>{1, 2});
  CHECK(u.bits.get(0));
  CHECK(u.bits.get(1));
  CHECK(u.bits.popcount() == 2);

  SetInstance with_empty{8, {{1, 3, 5}, {}}};
  CHECK(set_op(rt, SetOpKind::Intersection, with_empty).elements.empty());
  CHECK(set_op(rt, SetOpKind::Difference, with_empty).elements == std::vector<std::uint32_t>{1, 3, 5});

  CHECK_THROWS(set_op(rt, SetOpKind::Union, SetInstance{8, {{1}}}));
  CHECK_THROWS(set_op(rt, SetOpKind::Union, SetInstance{8, {{0}, {1}}}));
  CHECK_THROWS(set_op(rt, SetOpKind::Union, SetInstance{8, {{9}, {1}}}));
}

TEST_CASE("random set operations equal the sorted-set oracle") {
  std::mt19937_64 rng(5);
  for (std::size_t e : {16u, 1000u}) {
    SetInstance inst = SetInstance::random(1u << 16, 6, e, rng);
    for (const auto& s : inst.sets) {
      CHECK(s.size() == e);
      CHECK(std::is_sorted(s.begin(), s.end()));
    }
    for (SetOpKind k : {SetOpKind::Union, SetOpKind::Intersection, SetOpKind::Difference}) {
      Runtime rt(config());
      SetOpResult r = set_op(rt, k, inst);
      CHECK(r.elements == set_op_sorted(k, inst));
      CHECK(r.bits.popcount() == r.elements.size());
      CHECK(r.rbtree_ns_estimate > 0.0);
    }
  }
}

TEST_CASE("set operations use the expected number of bbops") {
  std::mt19937_64 rng(6);
  SetInstance inst = SetInstance::random(4096, 5, 20, rng);
  Runtime rt(config(4096));
  CHECK(set_op(rt, SetOpKind::Union, inst).bbops == 4);
  CHECK(set_op(rt, SetOpKind::Intersection, inst).bbops == 4);
  CHECK(set_op(rt, SetOpKind::Difference, inst).bbops == 8);
}
