#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ambit/bits.hpp"
#include "ambit/trace.hpp"

namespace ambit {

/// Electrical parameters of a subarray. Offsets are fractions of vdd.
struct ElectricalParams {
  double cell_capacitance = 22e-15;     // farads
  double bitline_capacitance = 220e-15; // farads
  double vdd = 1.0;                     // volts
  double offset_threshold = 0.015;      // minimum resolvable |delta| / vdd
};

/// Bitline deviation from vdd/2 after charge sharing between the connected
/// cells and a bitline precharged to vdd/2, as a signed fraction of vdd.
///
///   delta = (sum q_i C_i vdd + C_b vdd / 2) / (sum C_i + C_b) - vdd / 2
///
/// For three equal cells with k of them charged this is
/// (2k - 3) C_c / (6 C_c + 2 C_b).
double charge_share_deviation(std::span<const double> charges, std::span<const double> caps,
                              double bitline_cap, double vdd);

// Physical row layout of one subarray.
namespace row {
inline constexpr std::uint16_t kDesignated = 4;
inline constexpr std::uint16_t kDcc = 2;
inline constexpr std::uint16_t kData = 1006;
inline constexpr std::uint16_t kPhysical = kDesignated + kDcc + 2 + kData;

constexpr std::uint16_t T(unsigned i) { return static_cast<std::uint16_t>(i); }
constexpr std::uint16_t DCC(unsigned i) { return static_cast<std::uint16_t>(kDesignated + i); }
inline constexpr std::uint16_t C0 = kDesignated + kDcc;
inline constexpr std::uint16_t C1 = C0 + 1;
constexpr std::uint16_t D(unsigned i) { return static_cast<std::uint16_t>(C1 + 1 + i); }

constexpr bool is_designated(std::uint16_t r) { return r < kDesignated; }
constexpr bool is_dcc(std::uint16_t r) { return r >= kDesignated && r < C0; }
constexpr bool is_control(std::uint16_t r) { return r == C0 || r == C1; }
constexpr bool is_data(std::uint16_t r) { return r >= D(0) && r < kPhysical; }
/// Rows reachable only through the bitwise (B-group) decoder.
constexpr bool in_b_group(std::uint16_t r) { return is_designated(r) || is_dcc(r); }

std::string name(std::uint16_t r);
}  // namespace row

/// One wordline: a row, and for dual-contact rows which contact is raised.
/// `negated` selects the n-wordline, which connects the cell to bitline-bar.
struct Wordline {
  std::uint16_t row = 0;
  bool negated = false;

  friend bool operator==(const Wordline&, const Wordline&) = default;
};

std::string to_string(const Wordline& w);

/// Up to three wordlines raised together by a single ACTIVATE.
class WordlineSet {
 public:
  static constexpr std::size_t kMax = 3;

  WordlineSet() = default;
  WordlineSet(std::initializer_list<Wordline> wls);

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  const Wordline& operator[](std::size_t i) const { return items_[i]; }
  const Wordline* begin() const { return items_.data(); }
  const Wordline* end() const { return items_.data() + size_; }

  void push(Wordline w);

  friend bool operator==(const WordlineSet& a, const WordlineSet& b) {
    if (a.size_ != b.size_) return false;
    for (std::size_t i = 0; i < a.size_; ++i)
      if (!(a.items_[i] == b.items_[i])) return false;
    return true;
  }

 private:
  std::array<Wordline, kMax> items_{};
  std::size_t size_ = 0;
};

std::string to_string(const WordlineSet& s);

enum class SenseState { precharged, amplifying, stable_high, stable_low };

/// The row of sense amplifiers shared by a subarray's bitlines.
class SenseAmpArray {
 public:
  enum class Phase { precharged, amplifying, stable };

  explicit SenseAmpArray(std::size_t width) : latched_(width) {}

  Phase phase() const { return phase_; }
  SenseState state(std::size_t bitline) const;
  /// Bitline voltage as a fraction of vdd.
  double bitline_voltage(std::size_t bitline) const;
  const BitRow& latched() const { return latched_; }

 private:
  friend class Bank;

  Phase phase_ = Phase::precharged;
  BitRow latched_;
  std::vector<double> shared_;  // post-sharing voltages while amplifying
};

/// Charge-level state of one subarray. Cells hold binary charge except after
/// a failed activation, where the post-sharing analog charge is kept.
class Subarray {
 public:
  explicit Subarray(std::size_t width);

  std::size_t width() const { return width_; }

  BitRow read_row(std::uint16_t r) const;
  void write_row(std::uint16_t r, const BitRow& bits);

  /// Charge of one cell as a fraction of full charge.
  double charge(std::uint16_t r, std::size_t col) const;
  bool has_analog(std::uint16_t r) const { return analog_.contains(r); }

  const SenseAmpArray& sense_amps() const { return sense_; }

 private:
  friend class Bank;

  const BitRow& bits(std::uint16_t r) const;
  BitRow& mutable_bits(std::uint16_t r);
  void store(std::uint16_t r, BitRow bits);

  std::size_t width_;
  BitRow zero_;
  std::vector<BitRow> rows_;  // empty entry means all zeros
  std::unordered_map<std::uint16_t, std::vector<double>> analog_;
  SenseAmpArray sense_;
};

class Bank {
 public:
  Bank(std::size_t subarrays, std::size_t width, const ElectricalParams* params);

  std::size_t subarray_count() const { return subarrays_.size(); }
  std::size_t width() const { return width_; }

  /// Raises `wls` in `subarray`. From the precharged state this performs
  /// charge sharing and amplification; on an already activated subarray the
  /// newly connected cells are overwritten with the latched value.
  void activate(std::uint32_t subarray, const WordlineSet& wls);
  void precharge();

  bool precharged() const { return !active_.has_value(); }
  bool poisoned() const { return poisoned_; }
  std::optional<std::uint32_t> active_subarray() const { return active_; }
  const std::vector<Wordline>& raised() const { return raised_; }

  Subarray& subarray(std::uint32_t id);
  const Subarray& subarray(std::uint32_t id) const;

  /// Drives latched bits [first, first+count) from `src` onto this bank's
  /// active sense amplifiers and every raised cell. Used by PSM transfers.
  void drive_columns(std::size_t first, std::size_t count, const BitRow& src);

 private:
  void share_charge(Subarray& sa, const WordlineSet& wls);
  void share_charge_analog(Subarray& sa, const WordlineSet& wls);
  void connect(Subarray& sa, const Wordline& w);
  [[noreturn]] void fail(Subarray& sa, const WordlineSet& wls, std::vector<double> voltages,
                         std::size_t first_bad);

  std::size_t width_;
  const ElectricalParams* params_;
  mutable std::vector<std::unique_ptr<Subarray>> subarrays_;
  std::optional<std::uint32_t> active_;
  std::vector<Wordline> raised_;
  bool poisoned_ = false;
};

struct Geometry {
  std::uint32_t banks = 8;
  std::uint32_t subarrays_per_bank = 64;
  std::size_t row_bits = 65536;

  std::size_t row_bytes() const { return row_bits / 8; }
};

/// Bytes moved by one PSM TRANSFER.
inline constexpr std::size_t kColumnBytes = 64;

/// A DRAM chip (or rank treated as one chip): banks of subarrays.
/// Not thread-safe; one owner at a time.
class Chip {
 public:
  explicit Chip(Geometry geometry = {}, ElectricalParams params = {});

  // Non-copyable: banks point at params_.
  Chip(const Chip&) = delete;
  Chip& operator=(const Chip&) = delete;

  const Geometry& geometry() const { return geometry_; }
  const ElectricalParams& params() const { return params_; }

  Bank& bank(std::uint32_t b);
  const Bank& bank(std::uint32_t b) const;

  void activate(std::uint32_t b, std::uint32_t s, const WordlineSet& wls) { bank(b).activate(s, wls); }
  void precharge(std::uint32_t b) { bank(b).precharge(); }

  BitRow read_row(std::uint32_t b, std::uint32_t s, std::uint16_t r) const;
  void write_row(std::uint32_t b, std::uint32_t s, std::uint16_t r, const BitRow& bits);

  /// In-subarray copy via two back-to-back activations.
  void rowclone_fpm(std::uint32_t b, std::uint32_t src_sub, std::uint16_t src,
                    std::uint32_t dst_sub, std::uint16_t dst);

  /// Inter-bank copy; one TRANSFER per 64-byte column.
  CommandTrace transfer_psm(std::uint32_t src_bank, std::uint32_t src_sub, std::uint16_t src_row,
                            std::uint32_t dst_bank, std::uint32_t dst_sub, std::uint16_t dst_row);

  /// Copies NOT(src) into DCC row `dcc` through its n-wordline.
  void dcc_not_capture(std::uint32_t b, std::uint32_t s, std::uint16_t src, unsigned dcc);

  std::size_t columns_per_row() const;

 private:
  Geometry geometry_;
  ElectricalParams params_;
  std::vector<Bank> banks_;
};

}  // namespace ambit
