#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "ambit/bits.hpp"
#include "ambit/runtime.hpp"

namespace ambit {

// ---------------------------------------------------------------------------
// Bitmap index: "how many users were active every week for the past w weeks,
// and how many male users were active in each of those weeks?"

struct BitmapWorkload {
  std::size_t users = 0;
  std::size_t weeks = 0;
  std::vector<BitRow> daily;  // 7 * weeks vectors, day-major
  BitRow male;

  /// Each user is active on a given day with probability 1/4; gender is 1/2.
  static BitmapWorkload random(std::size_t users, std::size_t weeks, std::mt19937_64& rng);
};

struct OpTally {
  std::size_t ors = 0;
  std::size_t ands = 0;
  std::size_t bitcounts = 0;
  friend bool operator==(const OpTally&, const OpTally&) = default;
};

struct BitmapResult {
  std::size_t weekly_active_count = 0;
  std::vector<std::size_t> male_weekly_counts;
  OpTally tally;
  double sim_ns = 0.0;
  double baseline_ns = 0.0;
};

BitmapResult bitmap_query(Runtime& rt, const BitmapWorkload& w);
/// Scalar per-user recomputation.
BitmapResult bitmap_query_scalar(const BitmapWorkload& w);

// ---------------------------------------------------------------------------
// BitWeaving-V column scan: count of c1 <= val <= c2.

class BitWeavingTable {
 public:
  BitWeavingTable(std::vector<std::uint32_t> values, unsigned bits);

  std::size_t rows() const { return values_.size(); }
  unsigned bits() const { return bits_; }
  const std::vector<std::uint32_t>& values() const { return values_; }
  /// Slice j holds bit (bits-1-j) of every value: slice 0 is the MSB.
  const std::vector<BitRow>& slices() const { return slices_; }
  /// Rebuilds the column from the slices.
  std::vector<std::uint32_t> reassemble() const;

 private:
  std::vector<std::uint32_t> values_;
  unsigned bits_;
  std::vector<BitRow> slices_;
};

struct ScanResult {
  std::size_t count = 0;
  std::size_t bbops = 0;
  double sim_ns = 0.0;
  double baseline_ns = 0.0;
};

/// Column stored in a runtime as one affinity group.
class LoadedColumn {
 public:
  LoadedColumn(Runtime& rt, const BitWeavingTable& table);
  ~LoadedColumn();
  LoadedColumn(const LoadedColumn&) = delete;
  LoadedColumn& operator=(const LoadedColumn&) = delete;

  ScanResult scan(std::uint32_t c1, std::uint32_t c2);

 private:
  Runtime* rt_;
  std::size_t rows_;
  unsigned bits_;
  std::vector<BitvectorHandle> slices_;
  std::vector<BitvectorHandle> scratch_;
};

ScanResult bitweaving_scan(Runtime& rt, const BitWeavingTable& table, std::uint32_t c1, std::uint32_t c2);
std::size_t bitweaving_scan_scalar(const BitWeavingTable& table, std::uint32_t c1, std::uint32_t c2);

// ---------------------------------------------------------------------------
// Bitvector sets over the domain [1, N].

enum class SetOpKind { Union, Intersection, Difference };

struct SetInstance {
  std::size_t domain = 0;
  std::vector<std::vector<std::uint32_t>> sets;  // sorted, unique, in [1, domain]

  static SetInstance random(std::size_t domain, std::size_t m, std::size_t elements, std::mt19937_64& rng);
};

struct SetOpResult {
  BitRow bits;  // bit e-1 set for element e
  std::vector<std::uint32_t> elements;
  std::size_t bbops = 0;
  double sim_ns = 0.0;
  double baseline_ns = 0.0;
  double rbtree_ns_estimate = 0.0;
};

/// Cost per visited tree node for the red-black tree estimate.
inline constexpr double kRbTreeNsPerNode = 20.0;

SetOpResult set_op(Runtime& rt, SetOpKind kind, const SetInstance& inst);
std::vector<std::uint32_t> set_op_sorted(SetOpKind kind, const SetInstance& inst);

}  // namespace ambit
