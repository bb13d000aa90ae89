#include <random>

#include "ambit/errors.hpp"
#include "ambit/runtime.hpp"
#include "doctest.h"

using namespace ambit;

namespace {

RuntimeConfig small_config(std::size_t row_bits = 4096) {
  RuntimeConfig c;
  c.geometry = {2, 4, row_bits};
  return c;
}

bool co_located(const BitvectorHandle& a, const BitvectorHandle& b) {
  if (a.segments.size() != b.segments.size()) return false;
  for (std::size_t i = 0; i < a.segments.size(); ++i)
    if (a.segments[i].bank != b.segments[i].bank || a.segments[i].subarray != b.segments[i].subarray) return false;
  return true;
}

}  // namespace

TEST_CASE("group members share subarrays segment by segment") {
  Runtime rt;  // 64K-bit rows
  GroupId g = rt.new_group();
  BitvectorHandle a = rt.alloc(128 * 1024, g), b = rt.alloc(128 * 1024, g);
  CHECK(a.segments.size() == 2);
  CHECK(b.segments.size() == 2);
  CHECK(co_located(a, b));
  CHECK(a.segments[0].bank != a.segments[1].bank);
}

TEST_CASE("a one-bit vector takes a whole row") {
  Runtime rt(small_config());
  BitvectorHandle h = rt.alloc(1);
  CHECK(h.segments.size() == 1);
  CHECK(rt.free_rows(h.segments[0].bank, h.segments[0].subarray) == row::kData - 1);
  rt.free(h);
  CHECK(rt.free_rows(h.segments[0].bank, h.segments[0].subarray) == row::kData);
}

TEST_CASE("a group can hold one subarray's worth of rows") {
  Runtime rt(small_config(512));
  GroupId g = rt.new_group();
  for (std::size_t i = 0; i < row::kData; ++i) rt.alloc(10, g);
  CHECK_THROWS_AS(rt.alloc(10, g), CapacityExhausted);
  // Other groups still find space elsewhere.
  CHECK_NOTHROW(rt.alloc(10));
}

TEST_CASE("write and read round trip") {
  std::mt19937_64 rng(4);
  Runtime rt(small_config());
  BitvectorHandle h = rt.alloc(10000);
  BitRow x = BitRow::random(10000, rng);
  rt.write(h, x);
  CHECK(rt.read(h) == x);
  CHECK_THROWS_AS(rt.write(h, BitRow(9999)), WidthMismatch);
}

TEST_CASE("aligned two-row and runs in DRAM") {
  std::mt19937_64 rng(8);
  Runtime rt(small_config());
  GroupId g = rt.new_group();
  const std::size_t n = 2 * 4096;
  BitvectorHandle a = rt.alloc(n, g), b = rt.alloc(n, g), d = rt.alloc(n, g);
  BitRow x = BitRow::random(n, rng), y = BitRow::random(n, rng);
  rt.write(a, x);
  rt.write(b, y);
  rt.cache().insert_range(rt.segment_address(a, 0), 64, true);
  rt.cache().insert_range(rt.segment_address(d, 1), 128, false);
  Runtime::OpCost c = rt.bbop(BbopKind::And, d, a, &b);
  CHECK(c.trace.count(Primitive::aap) == 8);
  CHECK(c.fallback_segments == 0);
  CHECK(c.coherence.dirty_lines_flushed == 1);
  CHECK(c.coherence.lines_invalidated == 2);
  CHECK(rt.read(d) == (x & y));
  CHECK(rt.read(a) == x);
  // Segments sit in different banks and run in parallel.
  CHECK(c.sim_ns == doctest::Approx(4 * 49.0 + 5.0));
}

TEST_CASE("unaligned instruction falls back to the host") {
  std::mt19937_64 rng(12);
  Runtime rt(small_config());
  GroupId g = rt.new_group();
  BitvectorHandle a = rt.alloc(4096, g), b = rt.alloc(4096, g), d = rt.alloc(4096, g);
  BitRow x = BitRow::random(4096, rng), y = BitRow::random(4096, rng), z = BitRow::random(4096, rng);
  rt.write(a, x);
  rt.write(b, y);
  rt.write(d, z);
  const std::uint64_t rb = rt.row_bytes();
  BbopOutcome o = rt.bbop_execute({BbopKind::Or, rt.segment_address(d, 0), rt.segment_address(a, 0),
                                   rt.segment_address(b, 0), rb - 8});
  CHECK(o.host_fallback);
  CHECK(o.trace.empty());
  CHECK(o.sim_ns() == doctest::Approx(baseline_ns(static_cast<double>(rb - 8), 3, rt.config().baseline)));
  const BitRow got = rt.read(d), want = x | y;
  for (std::size_t i = 0; i < 4096; ++i) CHECK(got.get(i) == (i < (rb - 8) * 8 ? want.get(i) : z.get(i)));
}

TEST_CASE("instruction validation") {
  Runtime rt(small_config());
  CHECK_THROWS_AS(rt.bbop_execute({BbopKind::Not, 0, 512, std::nullopt, 0}), OutOfRange);
  CHECK_THROWS_AS(rt.bbop_execute({BbopKind::Not, rt.capacity_bytes(), 0, std::nullopt, 512}), OutOfRange);
  CHECK_THROWS_AS(rt.bbop_execute({BbopKind::And, 0, 512, std::nullopt, 512}), OperandPlacement);
}

TEST_CASE("xor of co-located vectors over many segments") {
  std::mt19937_64 rng(16);
  Runtime rt(small_config());
  GroupId g = rt.new_group();
  const std::size_t n = 9 * 4096 + 100;
  BitvectorHandle a = rt.alloc(n, g), b = rt.alloc(n, g), d = rt.alloc(n, g);
  BitRow x = BitRow::random(n, rng), y = BitRow::random(n, rng);
  rt.write(a, x);
  rt.write(b, y);
  Runtime::OpCost c = rt.bbop(BbopKind::Xor, d, a, &b);
  CHECK(rt.read(d) == (x ^ y));
  CHECK(c.fallback_segments == 1);  // the partial tail row
}

TEST_CASE("operands in other subarrays are staged") {
  std::mt19937_64 rng(20);
  Runtime rt(small_config());
  // Groups land on (0,0), (1,0) and then (0,1).
  BitvectorHandle a = rt.alloc(4096), b = rt.alloc(4096), d = rt.alloc(4096);
  REQUIRE(a.segments[0].bank == 0);
  REQUIRE(b.segments[0].bank == 1);
  REQUIRE(d.segments[0].bank == 0);
  REQUIRE(d.segments[0].subarray == 1);
  BitRow x = BitRow::random(4096, rng), y = BitRow::random(4096, rng);
  rt.write(a, x);
  rt.write(b, y);
  BbopOutcome o = rt.bbop_execute({BbopKind::Nand, rt.segment_address(d, 0), rt.segment_address(a, 0),
                                   rt.segment_address(b, 0), rt.row_bytes()});
  CHECK_FALSE(o.host_fallback);
  CHECK(o.staged_rows == 2);
  CHECK(o.trace.count(Primitive::psm) == 3);  // one direct hop, one two-hop
  CHECK(rt.read(d) == ~(x & y));
  CHECK(rt.read(a) == x);
  CHECK(rt.read(b) == y);

  RuntimeConfig cfg = small_config();
  cfg.staging = false;
  Runtime plain(cfg);
  BitvectorHandle p = plain.alloc(4096), q = plain.alloc(4096);
  plain.write(p, x);
  CHECK(plain.bbop(BbopKind::Not, q, p).fallback_segments == 1);
  CHECK(plain.read(q) == ~x);
}

TEST_CASE("fill from control rows") {
  Runtime rt(small_config());
  BitvectorHandle h = rt.alloc(5000);
  rt.fill(h, true);
  CHECK(rt.read(h) == BitRow(5000, true));
  rt.fill(h, false);
  CHECK(rt.bitcount(h).value == 0);
}

TEST_CASE("fill of a partial tail row keeps the padding clear") {
  Runtime rt(small_config());
  BitvectorHandle h = rt.alloc(4096 + 100);
  Runtime::OpCost c = rt.fill(h, true);
  CHECK(c.fallback_segments == 1);
  CHECK(c.trace.count(Primitive::aap) == 1);
  const auto& tail = h.segments[1];
  CHECK(rt.chip().read_row(tail.bank, tail.subarray, row::D(tail.data_row)).popcount() == 100);
}

TEST_CASE("coherence accounting") {
  CacheState cache;
  const std::vector<std::uint64_t> src{0}, dst{1};
  CoherenceCost clean = coherence_prepare(src, dst, cache, 8192, 5.0);
  CHECK(clean.dirty_lines_flushed == 0);
  CHECK(clean.added_ns == 0.0);

  cache.insert_range(0, 8192, true);
  cache.insert_range(8192, 8192, false);
  CoherenceCost c = coherence_prepare(src, dst, cache, 8192, 5.0);
  CHECK(c.dirty_lines_flushed == 8192 / 64);
  CHECK(c.lines_invalidated == 8192 / 64);
  CHECK(c.added_ns == doctest::Approx(128 * 5.0));
  CHECK_FALSE(cache.dirty(0));
  CHECK(cache.resident(0));
  CHECK_FALSE(cache.resident(8192 / 64));

  CacheState only_dst;
  only_dst.insert_range(8192, 8192, true);
  CHECK(coherence_prepare(src, dst, only_dst, 8192, 5.0).added_ns == 0.0);
}

TEST_CASE("dual-copy ECC") {
  std::mt19937_64 rng(24);
  for (BbopKind k : kAllBbops) {
    BitRow a = BitRow::random(777, rng), b = BitRow::random(777, rng);
    const TmrCodeword cb = tmr_encode(b);
    TmrCodeword got = tmr_op(k, tmr_encode(a), &cb);
    TmrCodeword want = tmr_encode(reference_op(k, a, &b));
    CHECK(got.payload == want.payload);
    CHECK(got.replica == want.replica);
    CHECK(tmr_check(got) == TmrStatus::valid);
  }
  BitRow a = BitRow::random(100, rng);
  TmrCodeword n = tmr_op(BbopKind::Not, tmr_encode(a));
  CHECK(n.payload == ~a);
  CHECK(n.replica == ~a);

  TmrCodeword bad = tmr_encode(a);
  bad.replica.set(5, !bad.replica.get(5));
  CHECK(tmr_check(bad) == TmrStatus::corrupt);
  CHECK_THROWS_AS(tmr_op(BbopKind::Not, bad), CorruptInput);
}

TEST_CASE("host bitcount") {
  std::mt19937_64 rng(28);
  CHECK(host_bitcount(BitRow(4096)) == 0);
  CHECK(host_bitcount(BitRow(4096, true)) == 4096);
  BitRow x = BitRow::random(3000, rng);
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) n += x.get(i);
  CHECK(host_bitcount(x) == n);
}
