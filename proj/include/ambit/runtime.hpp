#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "ambit/bits.hpp"
#include "ambit/controller.hpp"
#include "ambit/dram.hpp"
#include "ambit/timing_energy.hpp"
#include "ambit/trace.hpp"

namespace ambit {

inline constexpr std::size_t kCacheLineBytes = 64;

struct RuntimeConfig {
  Geometry geometry{};
  ElectricalParams electrical{};
  TimingConfig timing = TimingConfig::ddr3_1600_888();
  EnergyConfig energy{};
  BandwidthPreset baseline = BandwidthPreset::skylake();
  double flush_ns_per_line = 5.0;
  bool staging = true;  // stage remote operands with PSM instead of falling back
};

/// bbop dst, src1, [src2], size. Addresses are bytes in the linear data-row
/// space exposed to software.
struct BbopInstruction {
  BbopKind op = BbopKind::And;
  std::uint64_t dst = 0;
  std::uint64_t src1 = 0;
  std::optional<std::uint64_t> src2;
  std::uint64_t size = 0;
};

using GroupId = std::uint32_t;

struct BitvectorHandle {
  std::uint32_t id = 0;
  std::size_t length_bits = 0;
  std::vector<RowLocation> segments;
  GroupId group = 0;

  std::size_t bytes() const { return (length_bits + 7) / 8; }
  friend bool operator==(const BitvectorHandle&, const BitvectorHandle&) = default;
};

struct CoherenceCost {
  std::uint64_t dirty_lines_flushed = 0;
  std::uint64_t lines_invalidated = 0;
  double added_ns = 0.0;  // flushes only; invalidation overlaps the operation

  CoherenceCost& operator+=(const CoherenceCost& o) {
    dirty_lines_flushed += o.dirty_lines_flushed;
    lines_invalidated += o.lines_invalidated;
    added_ns += o.added_ns;
    return *this;
  }
};

/// Injected view of which lines the host caches hold, and which are dirty.
class CacheState {
 public:
  void insert(std::uint64_t line, bool dirty) { lines_[line] = dirty; }
  /// Marks every line of [addr, addr + bytes) resident with the given state.
  void insert_range(std::uint64_t addr, std::uint64_t bytes, bool dirty);
  bool resident(std::uint64_t line) const { return lines_.contains(line); }
  bool dirty(std::uint64_t line) const {
    auto it = lines_.find(line);
    return it != lines_.end() && it->second;
  }
  std::size_t size() const { return lines_.size(); }

 private:
  friend CoherenceCost coherence_prepare(std::span<const std::uint64_t>, std::span<const std::uint64_t>,
                                         CacheState&, std::size_t, double);
  std::map<std::uint64_t, bool> lines_;
};

/// Flushes dirty lines of the source rows and invalidates cached lines of the
/// destination rows. Rows are linear data-row numbers.
CoherenceCost coherence_prepare(std::span<const std::uint64_t> src_rows, std::span<const std::uint64_t> dst_rows,
                                CacheState& cache, std::size_t row_bytes, double flush_ns_per_line);

struct BbopOutcome {
  bool host_fallback = false;
  CommandTrace trace;
  CoherenceCost coherence;
  std::vector<double> bank_ns;  // busy time per bank
  double host_ns = 0.0;         // fallback execution on the host
  std::size_t staged_rows = 0;

  double sim_ns() const;
};

// Dual-copy ECC, homomorphic over every bulk bitwise operation.
struct TmrCodeword {
  BitRow payload;
  BitRow replica;
};

enum class TmrStatus { valid, corrupt };

TmrCodeword tmr_encode(const BitRow& bits);
TmrStatus tmr_check(const TmrCodeword& cw);
/// Applies `kind` to payloads and replicas independently. Throws CorruptInput
/// if an input codeword does not check.
TmrCodeword tmr_op(BbopKind kind, const TmrCodeword& a, const TmrCodeword* b = nullptr);

std::size_t host_bitcount(const BitRow& bits);

/// Host-visible runtime: allocator, bbop execution and host-side accounting
/// on top of one Chip. Callers serialize mutating calls.
class Runtime {
 public:
  explicit Runtime(RuntimeConfig cfg = {});

  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  const RuntimeConfig& config() const { return cfg_; }
  Chip& chip() { return chip_; }
  Controller& controller() { return ctrl_; }
  CacheState& cache() { return cache_; }
  std::size_t row_bytes() const { return cfg_.geometry.row_bytes(); }
  std::uint64_t capacity_bytes() const { return ctrl_.total_data_rows() * row_bytes(); }

  GroupId new_group();
  /// Row-aligned placement; segment i of every member of a group shares a
  /// subarray. Rows are zeroed.
  BitvectorHandle alloc(std::size_t nbits, std::optional<GroupId> group = std::nullopt);
  void free(const BitvectorHandle& h);

  void write(const BitvectorHandle& h, const BitRow& bits);
  BitRow read(const BitvectorHandle& h) const;
  std::uint64_t segment_address(const BitvectorHandle& h, std::size_t seg) const;

  BbopOutcome bbop_execute(const BbopInstruction& instr);

  struct OpCost {
    double sim_ns = 0.0;
    double baseline_ns = 0.0;
    std::size_t fallback_segments = 0;
    CommandTrace trace;
    CoherenceCost coherence;
  };

  /// dst = kind(a, b), one instruction per segment. Banks run in parallel.
  OpCost bbop(BbopKind kind, const BitvectorHandle& dst, const BitvectorHandle& a,
              const BitvectorHandle* b = nullptr);
  /// Sets every bit of `h`: full rows by an in-DRAM copy from C0/C1, a
  /// partial tail row on the host.
  OpCost fill(const BitvectorHandle& h, bool value);

  struct Count {
    std::size_t value = 0;
    double ns = 0.0;  // host read of the vector
  };
  Count bitcount(const BitvectorHandle& h) const;

  std::size_t free_rows(std::uint32_t bank, std::uint32_t subarray) const;

 private:
  struct Group {
    std::vector<std::uint32_t> slots;  // global subarray per segment index
  };

  std::uint32_t global_subarray(const RowLocation& l) const {
    return l.bank * cfg_.geometry.subarrays_per_bank + l.subarray;
  }
  std::uint32_t pick_subarray() const;
  std::optional<std::uint16_t> take_row(std::uint32_t gsub);
  std::optional<std::uint16_t> find_free_row(std::uint32_t gsub, std::span<const std::uint16_t> exclude) const;

  std::vector<std::uint8_t> read_bytes(std::uint64_t addr, std::uint64_t n);
  void write_bytes(std::uint64_t addr, std::span<const std::uint8_t> data);
  BbopOutcome host_execute(const BbopInstruction& instr);

  RuntimeConfig cfg_;
  Chip chip_;
  Controller ctrl_;
  CacheState cache_;
  std::vector<std::vector<bool>> owned_;  // per global subarray, per data row
  std::vector<std::size_t> used_;
  std::vector<Group> groups_;
  std::uint32_t next_handle_ = 1;
};

}  // namespace ambit
