#include "ambit/runtime.hpp"

#include <algorithm>
#include <set>

#include "ambit/errors.hpp"

namespace ambit {

void CacheState::insert_range(std::uint64_t addr, std::uint64_t bytes, bool dirty) {
  if (bytes == 0) return;
  const std::uint64_t first = addr / kCacheLineBytes;
  const std::uint64_t last = (addr + bytes - 1) / kCacheLineBytes;
  for (std::uint64_t l = first; l <= last; ++l) lines_[l] = dirty;
}

CoherenceCost coherence_prepare(std::span<const std::uint64_t> src_rows, std::span<const std::uint64_t> dst_rows,
                                CacheState& cache, std::size_t row_bytes, double flush_ns_per_line) {
  const std::uint64_t lines_per_row = std::max<std::uint64_t>(1, row_bytes / kCacheLineBytes);
  CoherenceCost cost;
  auto& lines = cache.lines_;
  for (std::uint64_t r : src_rows) {
    auto it = lines.lower_bound(r * lines_per_row);
    const auto end = lines.lower_bound((r + 1) * lines_per_row);
    for (; it != end; ++it) {
      if (it->second) {
        ++cost.dirty_lines_flushed;
        it->second = false;
      }
    }
  }
  for (std::uint64_t r : dst_rows) {
    auto it = lines.lower_bound(r * lines_per_row);
    const auto end = lines.lower_bound((r + 1) * lines_per_row);
    cost.lines_invalidated += static_cast<std::uint64_t>(std::distance(it, end));
    lines.erase(it, end);
  }
  cost.added_ns = static_cast<double>(cost.dirty_lines_flushed) * flush_ns_per_line;
  return cost;
}

double BbopOutcome::sim_ns() const {
  const double banks = bank_ns.empty() ? 0.0 : *std::max_element(bank_ns.begin(), bank_ns.end());
  return banks + host_ns + coherence.added_ns;
}

// ---------------------------------------------------------------------------

TmrCodeword tmr_encode(const BitRow& bits) { return {bits, bits}; }

TmrStatus tmr_check(const TmrCodeword& cw) {
  return cw.payload == cw.replica ? TmrStatus::valid : TmrStatus::corrupt;
}

TmrCodeword tmr_op(BbopKind kind, const TmrCodeword& a, const TmrCodeword* b) {
  if (tmr_check(a) == TmrStatus::corrupt) throw CorruptInput("first operand replica mismatch");
  if (b && tmr_check(*b) == TmrStatus::corrupt) throw CorruptInput("second operand replica mismatch");
  return {reference_op(kind, a.payload, b ? &b->payload : nullptr),
          reference_op(kind, a.replica, b ? &b->replica : nullptr)};
}

std::size_t host_bitcount(const BitRow& bits) { return bits.popcount(); }

// ---------------------------------------------------------------------------

Runtime::Runtime(RuntimeConfig cfg)
    : cfg_(std::move(cfg)), chip_(cfg_.geometry, cfg_.electrical), ctrl_(chip_) {
  if (cfg_.geometry.row_bits % BitRow::kWordBits != 0)
    throw WidthMismatch("runtime rows must be a multiple of 64 bits");
  const std::size_t subs = std::size_t{cfg_.geometry.banks} * cfg_.geometry.subarrays_per_bank;
  owned_.assign(subs, std::vector<bool>(row::kData, false));
  used_.assign(subs, 0);
}

GroupId Runtime::new_group() {
  groups_.emplace_back();
  return static_cast<GroupId>(groups_.size() - 1);
}

std::uint32_t Runtime::pick_subarray() const {
  // Least-loaded subarray; ties go to the next bank first so that segments of
  // one vector spread across banks.
  const auto& g = cfg_.geometry;
  std::uint32_t best = 0;
  std::size_t best_free = 0;
  bool found = false;
  for (std::uint32_t s = 0; s < g.subarrays_per_bank; ++s) {
    for (std::uint32_t b = 0; b < g.banks; ++b) {
      const std::uint32_t gs = b * g.subarrays_per_bank + s;
      const std::size_t free = row::kData - used_[gs];
      if (!found || free > best_free) {
        best = gs;
        best_free = free;
        found = true;
      }
    }
  }
  if (best_free == 0) throw CapacityExhausted("no free data rows left on the chip");
  return best;
}

std::optional<std::uint16_t> Runtime::take_row(std::uint32_t gsub) {
  auto& rows = owned_[gsub];
  for (std::uint16_t r = 0; r < row::kData; ++r) {
    if (!rows[r]) {
      rows[r] = true;
      ++used_[gsub];
      return r;
    }
  }
  return std::nullopt;
}

std::optional<std::uint16_t> Runtime::find_free_row(std::uint32_t gsub, std::span<const std::uint16_t> exclude) const {
  const auto& rows = owned_[gsub];
  for (std::uint16_t r = row::kData; r-- > 0;) {
    if (!rows[r] && std::find(exclude.begin(), exclude.end(), r) == exclude.end()) return r;
  }
  return std::nullopt;
}

std::size_t Runtime::free_rows(std::uint32_t bank, std::uint32_t subarray) const {
  return row::kData - used_[global_subarray({bank, subarray, 0})];
}

BitvectorHandle Runtime::alloc(std::size_t nbits, std::optional<GroupId> group) {
  const GroupId gid = group ? *group : new_group();
  if (gid >= groups_.size()) throw OutOfRange("unknown group " + std::to_string(gid));
  const std::size_t row_bits = cfg_.geometry.row_bits;
  const std::size_t nsegs = std::max<std::size_t>(1, (nbits + row_bits - 1) / row_bits);

  BitvectorHandle h;
  h.id = next_handle_++;
  h.length_bits = nbits;
  h.group = gid;
  const std::uint32_t spb = cfg_.geometry.subarrays_per_bank;
  for (std::size_t i = 0; i < nsegs; ++i) {
    auto& slots = groups_[gid].slots;
    if (i == slots.size()) slots.push_back(pick_subarray());
    const std::uint32_t gs = slots[i];
    auto r = take_row(gs);
    if (!r) {
      free(h);
      throw CapacityExhausted("subarray " + std::to_string(gs) + " has no data row left for segment " +
                              std::to_string(i) + " of group " + std::to_string(gid));
    }
    h.segments.push_back({gs / spb, gs % spb, *r});
  }
  for (const auto& seg : h.segments)
    chip_.write_row(seg.bank, seg.subarray, row::D(seg.data_row), BitRow(row_bits));
  return h;
}

void Runtime::free(const BitvectorHandle& h) {
  for (const auto& seg : h.segments) {
    const std::uint32_t gs = global_subarray(seg);
    if (owned_[gs][seg.data_row]) {
      owned_[gs][seg.data_row] = false;
      --used_[gs];
    }
  }
}

void Runtime::write(const BitvectorHandle& h, const BitRow& bits) {
  if (bits.size() != h.length_bits)
    throw WidthMismatch("vector is " + std::to_string(h.length_bits) + " bits, got " + std::to_string(bits.size()));
  const std::size_t words_per_row = cfg_.geometry.row_bits / BitRow::kWordBits;
  const auto src = bits.words();
  for (std::size_t s = 0; s < h.segments.size(); ++s) {
    BitRow row_bits(cfg_.geometry.row_bits);
    auto dst = row_bits.words();
    for (std::size_t w = 0; w < words_per_row && s * words_per_row + w < src.size(); ++w)
      dst[w] = src[s * words_per_row + w];
    const auto& seg = h.segments[s];
    chip_.write_row(seg.bank, seg.subarray, row::D(seg.data_row), row_bits);
  }
}

BitRow Runtime::read(const BitvectorHandle& h) const {
  BitRow out(h.length_bits);
  const std::size_t words_per_row = cfg_.geometry.row_bits / BitRow::kWordBits;
  auto dst = out.words();
  for (std::size_t s = 0; s < h.segments.size(); ++s) {
    const auto& seg = h.segments[s];
    const BitRow r = chip_.read_row(seg.bank, seg.subarray, row::D(seg.data_row));
    for (std::size_t w = 0; w < words_per_row && s * words_per_row + w < dst.size(); ++w)
      dst[s * words_per_row + w] = r.words()[w];
  }
  out.trim();
  return out;
}

std::uint64_t Runtime::segment_address(const BitvectorHandle& h, std::size_t seg) const {
  return ctrl_.linear_index(h.segments.at(seg)) * row_bytes();
}

// ---------------------------------------------------------------------------

std::vector<std::uint8_t> Runtime::read_bytes(std::uint64_t addr, std::uint64_t n) {
  std::vector<std::uint8_t> out;
  out.reserve(n);
  const std::uint64_t rb = row_bytes();
  while (out.size() < n) {
    const std::uint64_t a = addr + out.size();
    const RowLocation loc = ctrl_.interleave(a / rb);
    const BitRow r = chip_.read_row(loc.bank, loc.subarray, row::D(loc.data_row));
    for (std::uint64_t off = a % rb; off < rb && out.size() < n; ++off) out.push_back(r.byte(off));
  }
  return out;
}

void Runtime::write_bytes(std::uint64_t addr, std::span<const std::uint8_t> data) {
  const std::uint64_t rb = row_bytes();
  std::size_t done = 0;
  while (done < data.size()) {
    const std::uint64_t a = addr + done;
    const RowLocation loc = ctrl_.interleave(a / rb);
    BitRow r = chip_.read_row(loc.bank, loc.subarray, row::D(loc.data_row));
    for (std::uint64_t off = a % rb; off < rb && done < data.size(); ++off) r.set_byte(off, data[done++]);
    chip_.write_row(loc.bank, loc.subarray, row::D(loc.data_row), r);
  }
}

BbopOutcome Runtime::host_execute(const BbopInstruction& in) {
  const auto a = read_bytes(in.src1, in.size);
  std::vector<std::uint8_t> b;
  if (!is_unary(in.op)) b = read_bytes(*in.src2, in.size);
  std::vector<std::uint8_t> out(in.size);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::uint8_t x = a[i];
    const std::uint8_t y = b.empty() ? 0 : b[i];
    std::uint8_t r = 0;
    switch (in.op) {
      case BbopKind::Not: r = static_cast<std::uint8_t>(~x); break;
      case BbopKind::And: r = x & y; break;
      case BbopKind::Or: r = x | y; break;
      case BbopKind::Nand: r = static_cast<std::uint8_t>(~(x & y)); break;
      case BbopKind::Nor: r = static_cast<std::uint8_t>(~(x | y)); break;
      case BbopKind::Xor: r = x ^ y; break;
      case BbopKind::Xnor: r = static_cast<std::uint8_t>(~(x ^ y)); break;
    }
    out[i] = r;
  }
  write_bytes(in.dst, out);

  BbopOutcome o;
  o.host_fallback = true;
  o.bank_ns.assign(cfg_.geometry.banks, 0.0);
  o.host_ns = baseline_ns(static_cast<double>(in.size), baseline_streams(in.op), cfg_.baseline);
  return o;
}

BbopOutcome Runtime::bbop_execute(const BbopInstruction& in) {
  if (in.size == 0) throw OutOfRange("bbop size must be positive");
  if (!is_unary(in.op) && !in.src2) throw OperandPlacement(std::string(to_string(in.op)) + " needs src2");
  const std::uint64_t cap = capacity_bytes();
  for (std::uint64_t addr : {in.dst, in.src1, in.src2.value_or(in.src1)})
    if (addr > cap || in.size > cap - addr) throw OutOfRange("bbop range exceeds simulated memory");

  const std::uint64_t rb = row_bytes();
  const bool binary = !is_unary(in.op);
  const bool aligned = in.size % rb == 0 && in.dst % rb == 0 && in.src1 % rb == 0 && (!binary || *in.src2 % rb == 0);
  if (!aligned) return host_execute(in);

  const std::uint64_t nrows = in.size / rb;

  struct Source {
    RowLocation loc;
    std::optional<std::uint16_t> stage;  // data row in the destination subarray
    std::optional<RowLocation> temp;     // hop in another bank
  };
  struct Plan {
    RowLocation dst;
    std::vector<Source> srcs;
  };

  std::set<std::pair<std::uint32_t, std::uint16_t>> operand_rows;
  std::vector<Plan> plans(nrows);
  for (std::uint64_t t = 0; t < nrows; ++t) {
    plans[t].dst = ctrl_.interleave(in.dst / rb + t);
    plans[t].srcs.push_back({ctrl_.interleave(in.src1 / rb + t), {}, {}});
    if (binary) plans[t].srcs.push_back({ctrl_.interleave(*in.src2 / rb + t), {}, {}});
    operand_rows.insert({global_subarray(plans[t].dst), plans[t].dst.data_row});
    for (const auto& s : plans[t].srcs) operand_rows.insert({global_subarray(s.loc), s.loc.data_row});
  }

  auto excluded_in = [&](std::uint32_t gs) {
    std::vector<std::uint16_t> ex;
    for (const auto& [g, r] : operand_rows)
      if (g == gs) ex.push_back(r);
    return ex;
  };

  std::size_t staged = 0;
  for (auto& p : plans) {
    const std::uint32_t dgs = global_subarray(p.dst);
    std::vector<std::uint16_t> ex = excluded_in(dgs);
    for (auto& s : p.srcs) {
      if (s.loc.bank == p.dst.bank && s.loc.subarray == p.dst.subarray) continue;
      if (!cfg_.staging) return host_execute(in);
      s.stage = find_free_row(dgs, ex);
      if (!s.stage) return host_execute(in);
      ex.push_back(*s.stage);
      ++staged;
      if (s.loc.bank != p.dst.bank) continue;
      for (std::uint32_t b = 0; b < cfg_.geometry.banks && !s.temp; ++b) {
        if (b == p.dst.bank) continue;
        for (std::uint32_t sub = 0; sub < cfg_.geometry.subarrays_per_bank && !s.temp; ++sub) {
          const std::uint32_t gs = b * cfg_.geometry.subarrays_per_bank + sub;
          if (auto r = find_free_row(gs, excluded_in(gs))) s.temp = RowLocation{b, sub, *r};
        }
      }
      if (!s.temp) return host_execute(in);
    }
  }

  BbopOutcome o;
  o.bank_ns.assign(cfg_.geometry.banks, 0.0);
  o.staged_rows = staged;

  std::vector<std::uint64_t> src_rows;
  std::vector<std::uint64_t> dst_rows;
  for (std::uint64_t t = 0; t < nrows; ++t) {
    dst_rows.push_back(in.dst / rb + t);
    src_rows.push_back(in.src1 / rb + t);
    if (binary) src_rows.push_back(*in.src2 / rb + t);
  }
  o.coherence = coherence_prepare(src_rows, dst_rows, cache_, rb, cfg_.flush_ns_per_line);

  for (const auto& p : plans) {
    std::vector<RowAddress> operands;
    for (const auto& s : p.srcs) {
      if (!s.stage) {
        operands.push_back(s.loc.address());
        continue;
      }
      const RowAddress staged_at = RowAddress::d(*s.stage, p.dst.bank, p.dst.subarray);
      std::optional<RowAddress> temp;
      if (s.temp) temp = s.temp->address();
      const CommandTrace copy = ctrl_.copy_row(s.loc.address(), staged_at, temp);
      const double ns = latency_of(copy, cfg_.timing);
      std::set<std::uint32_t> banks;
      for (const auto& e : copy.entries())
        if (e.command == Command::activate) banks.insert(e.bank);
      for (std::uint32_t b : banks) o.bank_ns[b] += ns;
      o.trace.append(copy);
      operands.push_back(staged_at);
    }
    std::optional<RowAddress> src2;
    if (binary) src2 = operands[1];
    const CommandTrace op = ctrl_.exec_bbop(in.op, p.dst.address(), operands[0], src2);
    o.bank_ns[p.dst.bank] += latency_of(op, cfg_.timing);
    o.trace.append(op);
  }
  return o;
}

Runtime::OpCost Runtime::bbop(BbopKind kind, const BitvectorHandle& dst, const BitvectorHandle& a,
                              const BitvectorHandle* b) {
  if (!is_unary(kind) && !b) throw OperandPlacement(std::string(to_string(kind)) + " needs two operands");
  if (a.length_bits != dst.length_bits || (b && b->length_bits != dst.length_bits))
    throw WidthMismatch("bitvector lengths differ");

  const std::uint64_t rb = row_bytes();
  const std::uint64_t total = dst.bytes();
  std::vector<double> bank_ns(cfg_.geometry.banks, 0.0);
  double host_ns = 0.0;
  OpCost cost;
  for (std::size_t s = 0; s < dst.segments.size(); ++s) {
    BbopInstruction in;
    in.op = kind;
    in.dst = segment_address(dst, s);
    in.src1 = segment_address(a, s);
    if (b) in.src2 = segment_address(*b, s);
    in.size = std::min<std::uint64_t>(rb, total - s * rb);
    BbopOutcome o = bbop_execute(in);
    for (std::size_t i = 0; i < bank_ns.size(); ++i) bank_ns[i] += o.bank_ns[i];
    host_ns += o.host_ns;
    if (o.host_fallback) ++cost.fallback_segments;
    cost.coherence += o.coherence;
    cost.trace.append(o.trace);
  }
  cost.sim_ns = *std::max_element(bank_ns.begin(), bank_ns.end()) + host_ns + cost.coherence.added_ns;
  cost.baseline_ns = baseline_ns(static_cast<double>(total), baseline_streams(kind), cfg_.baseline);
  return cost;
}

Runtime::OpCost Runtime::fill(const BitvectorHandle& h, bool value) {
  const std::size_t row_bits = cfg_.geometry.row_bits;
  std::vector<double> bank_ns(cfg_.geometry.banks, 0.0);
  double host_ns = 0.0;
  OpCost cost;
  std::vector<std::uint64_t> dst_rows;
  for (std::size_t s = 0; s < h.segments.size(); ++s)
    if ((s + 1) * row_bits <= h.length_bits) dst_rows.push_back(ctrl_.linear_index(h.segments[s]));
  cost.coherence = coherence_prepare({}, dst_rows, cache_, row_bytes(), cfg_.flush_ns_per_line);
  for (std::size_t s = 0; s < h.segments.size(); ++s) {
    const auto& seg = h.segments[s];
    if ((s + 1) * row_bits <= h.length_bits) {
      const CommandTrace t = ctrl_.aap(RowAddress::c(value ? 1 : 0, seg.bank, seg.subarray), seg.address());
      bank_ns[seg.bank] += latency_of(t, cfg_.timing);
      cost.trace.append(t);
      continue;
    }
    // Partial tail row: the host sets the logical bits and leaves the padding clear.
    const std::size_t nbits = h.length_bits - s * row_bits;
    BitRow r(row_bits);
    if (value)
      for (std::size_t i = 0; i < nbits; ++i) r.set(i, true);
    chip_.write_row(seg.bank, seg.subarray, row::D(seg.data_row), r);
    host_ns += baseline_ns(static_cast<double>((nbits + 7) / 8), 1, cfg_.baseline);
    ++cost.fallback_segments;
  }
  cost.sim_ns = *std::max_element(bank_ns.begin(), bank_ns.end()) + host_ns + cost.coherence.added_ns;
  cost.baseline_ns = baseline_ns(static_cast<double>(h.bytes()), 1, cfg_.baseline);
  return cost;
}

Runtime::Count Runtime::bitcount(const BitvectorHandle& h) const {
  return {host_bitcount(read(h)), baseline_ns(static_cast<double>(h.bytes()), 1, cfg_.baseline)};
}

}  // namespace ambit
