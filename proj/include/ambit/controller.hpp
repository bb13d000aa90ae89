#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ambit/bits.hpp"
#include "ambit/dram.hpp"
#include "ambit/trace.hpp"

namespace ambit {

/// Address groups of a subarray: bitwise (B0-B15), control (C0, C1) and data
/// (D0-D1005). Only D-group rows are exposed to software.
enum class Group { B, C, D };

struct RowAddress {
  Group group = Group::D;
  std::uint16_t index = 0;
  std::uint32_t bank = 0;
  std::uint32_t subarray = 0;

  static RowAddress b(unsigned i, std::uint32_t bank = 0, std::uint32_t sub = 0) {
    return {Group::B, static_cast<std::uint16_t>(i), bank, sub};
  }
  static RowAddress c(unsigned i, std::uint32_t bank = 0, std::uint32_t sub = 0) {
    return {Group::C, static_cast<std::uint16_t>(i), bank, sub};
  }
  static RowAddress d(unsigned i, std::uint32_t bank = 0, std::uint32_t sub = 0) {
    return {Group::D, static_cast<std::uint16_t>(i), bank, sub};
  }

  std::string label() const;
  bool same_subarray(const RowAddress& o) const { return bank == o.bank && subarray == o.subarray; }

  friend bool operator==(const RowAddress&, const RowAddress&) = default;
};

/// The sixteen B-group addresses and the wordlines each raises.
const std::array<WordlineSet, 16>& b_group_map();

/// Wordlines raised by an ACTIVATE to `addr`.
WordlineSet decode(const RowAddress& addr);

enum class BbopKind { Not, And, Or, Nand, Nor, Xor, Xnor };

inline constexpr std::array<BbopKind, 7> kAllBbops = {BbopKind::Not, BbopKind::And, BbopKind::Or,
                                                      BbopKind::Nand, BbopKind::Nor, BbopKind::Xor,
                                                      BbopKind::Xnor};

std::string_view to_string(BbopKind k);
std::optional<BbopKind> parse_bbop(std::string_view s);
constexpr bool is_unary(BbopKind k) { return k == BbopKind::Not; }

/// Host-side reference semantics of a bulk bitwise operation.
BitRow reference_op(BbopKind k, const BitRow& a, const BitRow* b = nullptr);

/// Symbolic operand of a command sequence step.
struct Operand {
  enum class Kind { src1, src2, dst, b, c } kind;
  std::uint8_t index = 0;  // for b / c

  static constexpr Operand Di() { return {Kind::src1, 0}; }
  static constexpr Operand Dj() { return {Kind::src2, 0}; }
  static constexpr Operand Dk() { return {Kind::dst, 0}; }
  static constexpr Operand B(std::uint8_t i) { return {Kind::b, i}; }
  static constexpr Operand C(std::uint8_t i) { return {Kind::c, i}; }

  friend bool operator==(const Operand&, const Operand&) = default;
};

struct Step {
  enum class Kind { aap, ap } kind;
  Operand first;
  Operand second{Operand::Kind::dst, 0};  // unused for AP

  friend bool operator==(const Step&, const Step&) = default;
};

std::string to_string(const Operand& o);
std::string to_string(const Step& s);

/// AAP/AP steps realizing `kind` for Dk = kind(Di, Dj).
const std::vector<Step>& sequence_for(BbopKind kind);

/// A data row in chip coordinates.
struct RowLocation {
  std::uint32_t bank = 0;
  std::uint32_t subarray = 0;
  std::uint16_t data_row = 0;

  RowAddress address() const { return RowAddress::d(data_row, bank, subarray); }
  friend bool operator==(const RowLocation&, const RowLocation&) = default;
};

/// Issues Ambit command sequences to a Chip and records what it issued.
class Controller {
 public:
  explicit Controller(Chip& chip) : chip_(&chip) {}

  Chip& chip() { return *chip_; }
  const Chip& chip() const { return *chip_; }

  CommandTrace aap(const RowAddress& first, const RowAddress& second);
  CommandTrace ap(const RowAddress& addr);

  /// dst = kind(src1, src2). All operands must share one subarray.
  CommandTrace exec_bbop(BbopKind kind, const RowAddress& dst, const RowAddress& src1,
                         const std::optional<RowAddress>& src2 = std::nullopt);

  /// Row copy: FPM inside a subarray, PSM across banks, and two PSM hops via
  /// `temp` (a row in another bank) across subarrays of the same bank.
  CommandTrace copy_row(const RowAddress& src, const RowAddress& dst,
                        const std::optional<RowAddress>& temp = std::nullopt);

  /// Linear data-row number to chip coordinates: fill a subarray's data rows,
  /// then the next subarray, then the next bank.
  RowLocation interleave(std::uint64_t d_index) const;
  std::uint64_t linear_index(const RowLocation& loc) const;
  std::uint64_t total_data_rows() const;

 private:
  TraceEntry activate(const RowAddress& a, bool boundary, Primitive p);
  static std::uint16_t physical_row(const RowAddress& a);

  Chip* chip_;
};

}  // namespace ambit
