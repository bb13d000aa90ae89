#include "ambit/workloads.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <unordered_set>

#include "ambit/errors.hpp"

namespace ambit {

namespace {

struct Accumulator {
  double sim_ns = 0.0;
  double baseline_ns = 0.0;

  void add(const Runtime::OpCost& c) {
    sim_ns += c.sim_ns;
    baseline_ns += c.baseline_ns;
  }
  std::size_t count(const Runtime& rt, const BitvectorHandle& h) {
    const auto c = rt.bitcount(h);
    sim_ns += c.ns;
    baseline_ns += c.ns;
    return c.value;
  }
};

}  // namespace

BitmapWorkload BitmapWorkload::random(std::size_t users, std::size_t weeks, std::mt19937_64& rng) {
  BitmapWorkload w;
  w.users = users;
  w.weeks = weeks;
  for (std::size_t d = 0; d < 7 * weeks; ++d) w.daily.push_back(BitRow::random(users, rng) & BitRow::random(users, rng));
  w.male = BitRow::random(users, rng);
  return w;
}

BitmapResult bitmap_query(Runtime& rt, const BitmapWorkload& w) {
  if (w.weeks == 0 || w.daily.size() != 7 * w.weeks) throw OutOfRange("bitmap workload needs 7 daily bitmaps per week");
  for (const auto& d : w.daily)
    if (d.size() != w.users) throw WidthMismatch("daily bitmap length differs from user count");
  if (w.male.size() != w.users) throw WidthMismatch("gender bitmap length differs from user count");

  const GroupId g = rt.new_group();
  std::vector<BitvectorHandle> handles;
  auto alloc = [&] {
    handles.push_back(rt.alloc(w.users, g));
    return handles.back();
  };
  std::vector<BitvectorHandle> daily;
  for (const auto& d : w.daily) {
    daily.push_back(alloc());
    rt.write(daily.back(), d);
  }
  const BitvectorHandle male = alloc();
  rt.write(male, w.male);
  std::vector<BitvectorHandle> week;
  for (std::size_t i = 0; i < w.weeks; ++i) week.push_back(alloc());
  const BitvectorHandle every = alloc();
  const BitvectorHandle tmp = alloc();

  BitmapResult r;
  Accumulator acc;
  for (std::size_t i = 0; i < w.weeks; ++i) {
    acc.add(rt.bbop(BbopKind::Or, week[i], daily[7 * i], &daily[7 * i + 1]));
    ++r.tally.ors;
    for (std::size_t d = 2; d < 7; ++d) {
      acc.add(rt.bbop(BbopKind::Or, week[i], week[i], &daily[7 * i + d]));
      ++r.tally.ors;
    }
  }

  const BitvectorHandle* all_weeks = &week[0];
  if (w.weeks > 1) {
    acc.add(rt.bbop(BbopKind::And, every, week[0], &week[1]));
    ++r.tally.ands;
    for (std::size_t i = 2; i < w.weeks; ++i) {
      acc.add(rt.bbop(BbopKind::And, every, every, &week[i]));
      ++r.tally.ands;
    }
    all_weeks = &every;
  }
  r.weekly_active_count = acc.count(rt, *all_weeks);
  ++r.tally.bitcounts;

  for (std::size_t i = 0; i < w.weeks; ++i) {
    acc.add(rt.bbop(BbopKind::And, tmp, male, &week[i]));
    ++r.tally.ands;
    r.male_weekly_counts.push_back(acc.count(rt, tmp));
    ++r.tally.bitcounts;
  }

  for (const auto& h : handles) rt.free(h);
  r.sim_ns = acc.sim_ns;
  r.baseline_ns = acc.baseline_ns;
  return r;
}

BitmapResult bitmap_query_scalar(const BitmapWorkload& w) {
  BitmapResult r;
  r.male_weekly_counts.assign(w.weeks, 0);
  for (std::size_t u = 0; u < w.users; ++u) {
    bool every = true;
    for (std::size_t i = 0; i < w.weeks; ++i) {
      bool active = false;
      for (std::size_t d = 0; d < 7; ++d) active = active || w.daily[7 * i + d].get(u);
      every = every && active;
      if (active && w.male.get(u)) ++r.male_weekly_counts[i];
    }
    if (every) ++r.weekly_active_count;
  }
  return r;
}

// ---------------------------------------------------------------------------

BitWeavingTable::BitWeavingTable(std::vector<std::uint32_t> values, unsigned bits)
    : values_(std::move(values)), bits_(bits) {
  if (bits_ < 1 || bits_ > 32) throw OutOfRange("bits per value must be in [1, 32]");
  for (std::uint32_t v : values_)
    if (bits_ < 32 && v >> bits_) throw OutOfRange("value " + std::to_string(v) + " needs more than " + std::to_string(bits_) + " bits");
  slices_.assign(bits_, BitRow(values_.size()));
  for (std::size_t r = 0; r < values_.size(); ++r)
    for (unsigned j = 0; j < bits_; ++j)
      if (values_[r] >> (bits_ - 1 - j) & 1U) slices_[j].set(r, true);
}

std::vector<std::uint32_t> BitWeavingTable::reassemble() const {
  std::vector<std::uint32_t> out(values_.size(), 0);
  for (std::size_t r = 0; r < out.size(); ++r)
    for (unsigned j = 0; j < bits_; ++j) out[r] = (out[r] << 1) | (slices_[j].get(r) ? 1U : 0U);
  return out;
}

namespace {
enum Scratch { kLt, kEqLe, kGt, kEqGe, kTmp, kLe, kGe, kResult, kScratchCount };
}

LoadedColumn::LoadedColumn(Runtime& rt, const BitWeavingTable& table)
    : rt_(&rt), rows_(table.rows()), bits_(table.bits()) {
  const GroupId g = rt.new_group();
  for (const auto& s : table.slices()) {
    slices_.push_back(rt.alloc(rows_, g));
    rt.write(slices_.back(), s);
  }
  for (int i = 0; i < kScratchCount; ++i) scratch_.push_back(rt.alloc(rows_, g));
}

LoadedColumn::~LoadedColumn() {
  for (const auto& h : slices_) rt_->free(h);
  for (const auto& h : scratch_) rt_->free(h);
}

ScanResult LoadedColumn::scan(std::uint32_t c1, std::uint32_t c2) {
  const std::uint64_t limit = std::uint64_t{1} << bits_;
  if (c1 > c2 || c2 >= limit)
    throw ConstantOutOfRange("need 0 <= c1 <= c2 < 2^" + std::to_string(bits_) + ", got [" + std::to_string(c1) +
                             ", " + std::to_string(c2) + "]");
  Runtime& rt = *rt_;
  const auto& lt = scratch_[kLt];
  const auto& eq_le = scratch_[kEqLe];
  const auto& gt = scratch_[kGt];
  const auto& eq_ge = scratch_[kEqGe];
  const auto& tmp = scratch_[kTmp];

  ScanResult r;
  Accumulator acc;
  auto op = [&](BbopKind k, const BitvectorHandle& d, const BitvectorHandle& a, const BitvectorHandle* b = nullptr) {
    acc.add(rt.bbop(k, d, a, b));
    ++r.bbops;
  };

  acc.add(rt.fill(lt, false));
  acc.add(rt.fill(eq_le, true));
  acc.add(rt.fill(gt, false));
  acc.add(rt.fill(eq_ge, true));

  // MSB to LSB. lt/gt latch once a strictly smaller/larger prefix is seen;
  // eq tracks an equal prefix so far.
  for (unsigned j = 0; j < bits_; ++j) {
    const auto& s = slices_[j];
    const bool hi_bit = c2 >> (bits_ - 1 - j) & 1U;
    const bool lo_bit = c1 >> (bits_ - 1 - j) & 1U;

    op(BbopKind::Not, tmp, s);
    if (hi_bit) {
      op(BbopKind::And, tmp, eq_le, &tmp);
      op(BbopKind::Or, lt, lt, &tmp);
      op(BbopKind::And, eq_le, eq_le, &s);
    } else {
      op(BbopKind::And, eq_le, eq_le, &tmp);
    }

    if (lo_bit) {
      op(BbopKind::And, eq_ge, eq_ge, &s);
    } else {
      op(BbopKind::And, tmp, eq_ge, &s);
      op(BbopKind::Or, gt, gt, &tmp);
      op(BbopKind::Not, tmp, s);
      op(BbopKind::And, eq_ge, eq_ge, &tmp);
    }
  }
  op(BbopKind::Or, scratch_[kLe], lt, &eq_le);
  op(BbopKind::Or, scratch_[kGe], gt, &eq_ge);
  op(BbopKind::And, scratch_[kResult], scratch_[kLe], &scratch_[kGe]);
  r.count = acc.count(rt, scratch_[kResult]);
  r.sim_ns = acc.sim_ns;
  r.baseline_ns = acc.baseline_ns;
  return r;
}

ScanResult bitweaving_scan(Runtime& rt, const BitWeavingTable& table, std::uint32_t c1, std::uint32_t c2) {
  LoadedColumn col(rt, table);
  return col.scan(c1, c2);
}

std::size_t bitweaving_scan_scalar(const BitWeavingTable& table, std::uint32_t c1, std::uint32_t c2) {
  return static_cast<std::size_t>(std::count_if(table.values().begin(), table.values().end(),
                                                [&](std::uint32_t v) { return c1 <= v && v <= c2; }));
}

// ---------------------------------------------------------------------------

SetInstance SetInstance::random(std::size_t domain, std::size_t m, std::size_t elements, std::mt19937_64& rng) {
  if (elements > domain) throw OutOfRange("more elements than the domain holds");
  SetInstance inst;
  inst.domain = domain;
  std::uniform_int_distribution<std::uint32_t> pick(1, static_cast<std::uint32_t>(domain));
  for (std::size_t i = 0; i < m; ++i) {
    std::unordered_set<std::uint32_t> seen;
    while (seen.size() < elements) seen.insert(pick(rng));
    std::vector<std::uint32_t> s(seen.begin(), seen.end());
    std::sort(s.begin(), s.end());
    inst.sets.push_back(std::move(s));
  }
  return inst;
}

SetOpResult set_op(Runtime& rt, SetOpKind kind, const SetInstance& inst) {
  if (inst.sets.size() < 2) throw OutOfRange("set operations need at least two input sets");
  const std::size_t n = inst.domain;

  for (const auto& s : inst.sets)
    for (std::uint32_t e : s)
      if (e < 1 || e > n) throw OutOfRange("element " + std::to_string(e) + " outside [1, " + std::to_string(n) + "]");

  const GroupId g = rt.new_group();
  std::vector<BitvectorHandle> in;
  for (const auto& s : inst.sets) {
    BitRow bits(n);
    for (std::uint32_t e : s) bits.set(e - 1, true);
    in.push_back(rt.alloc(n, g));
    rt.write(in.back(), bits);
  }
  const BitvectorHandle acc_h = rt.alloc(n, g);
  const BitvectorHandle tmp = rt.alloc(n, g);

  SetOpResult r;
  Accumulator acc;
  auto op = [&](BbopKind k, const BitvectorHandle& d, const BitvectorHandle& a, const BitvectorHandle* b = nullptr) {
    acc.add(rt.bbop(k, d, a, b));
    ++r.bbops;
  };

  switch (kind) {
    case SetOpKind::Union:
    case SetOpKind::Intersection: {
      const BbopKind k = kind == SetOpKind::Union ? BbopKind::Or : BbopKind::And;
      op(k, acc_h, in[0], &in[1]);
      for (std::size_t i = 2; i < in.size(); ++i) op(k, acc_h, acc_h, &in[i]);
      break;
    }
    case SetOpKind::Difference:
      op(BbopKind::Not, tmp, in[1]);
      op(BbopKind::And, acc_h, in[0], &tmp);
      for (std::size_t i = 2; i < in.size(); ++i) {
        op(BbopKind::Not, tmp, in[i]);
        op(BbopKind::And, acc_h, acc_h, &tmp);
      }
      break;
  }

  r.bits = rt.read(acc_h);
  for (std::size_t i = 0; i < n; ++i)
    if (r.bits.get(i)) r.elements.push_back(static_cast<std::uint32_t>(i + 1));

  for (const auto& h : in) rt.free(h);
  rt.free(acc_h);
  rt.free(tmp);

  std::size_t total = 0;
  std::size_t largest = 0;
  for (const auto& s : inst.sets) {
    total += s.size();
    largest = std::max(largest, s.size());
  }
  r.rbtree_ns_estimate = kRbTreeNsPerNode * static_cast<double>(total) * std::log2(std::max<double>(2.0, static_cast<double>(largest)));
  r.sim_ns = acc.sim_ns;
  r.baseline_ns = acc.baseline_ns;
  return r;
}

std::vector<std::uint32_t> set_op_sorted(SetOpKind kind, const SetInstance& inst) {
  std::vector<std::uint32_t> acc = inst.sets.at(0);
  for (std::size_t i = 1; i < inst.sets.size(); ++i) {
    std::vector<std::uint32_t> next;
    const auto& s = inst.sets[i];
    switch (kind) {
      case SetOpKind::Union:
        std::set_union(acc.begin(), acc.end(), s.begin(), s.end(), std::back_inserter(next));
        break;
      case SetOpKind::Intersection:
        std::set_intersection(acc.begin(), acc.end(), s.begin(), s.end(), std::back_inserter(next));
        break;
      case SetOpKind::Difference:
        std::set_difference(acc.begin(), acc.end(), s.begin(), s.end(), std::back_inserter(next));
        break;
    }
    acc = std::move(next);
  }
  return acc;
}

}  // namespace ambit
