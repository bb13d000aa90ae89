#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ambit {

enum class Command { activate, precharge, read, write, transfer };
enum class Decoder { none, b_group, cd_group };

/// The controller-level primitive a trace entry belongs to.
enum class Primitive { aap, ap, psm, host };

const char* to_string(Command c);
const char* to_string(Decoder d);
const char* to_string(Primitive p);

struct TraceEntry {
  Command command = Command::activate;
  std::uint32_t bank = 0;
  std::uint32_t subarray = 0;
  std::string address_label;
  unsigned wordlines_raised = 0;  // ACTIVATE only
  Decoder decoder = Decoder::none;
  bool aap_boundary = false;  // first command of a primitive
  Primitive primitive = Primitive::aap;

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

/// Ordered record of every DRAM command issued. Timing and energy are derived
/// from this and nothing else.
class CommandTrace {
 public:
  const std::vector<TraceEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  void push(TraceEntry e) { entries_.push_back(std::move(e)); }
  void append(const CommandTrace& other) {
    entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
  }

  std::size_t count(Command c) const;
  std::size_t count(Primitive p) const;  // number of primitives, not entries

  /// CSV: seq_no,command,bank,subarray,address_label,wordlines_raised,decoder,aap_boundary
  void write_csv(std::ostream& os, bool header = true) const;

  friend bool operator==(const CommandTrace&, const CommandTrace&) = default;

 private:
  std::vector<TraceEntry> entries_;
};

}  // namespace ambit
