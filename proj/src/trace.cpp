#include "ambit/trace.hpp"

#include <ostream>

namespace ambit {

const char* to_string(Command c) {
  switch (c) {
    case Command::activate: return "ACTIVATE";
    case Command::precharge: return "PRECHARGE";
    case Command::read: return "READ";
    case Command::write: return "WRITE";
    case Command::transfer: return "TRANSFER";
  }
  return "?";
}

const char* to_string(Decoder d) {
  switch (d) {
    case Decoder::none: return "none";
    case Decoder::b_group: return "b_group";
    case Decoder::cd_group: return "cd_group";
  }
  return "?";
}

const char* to_string(Primitive p) {
  switch (p) {
    case Primitive::aap: return "AAP";
    case Primitive::ap: return "AP";
    case Primitive::psm: return "PSM";
    case Primitive::host: return "HOST";
  }
  return "?";
}

std::size_t CommandTrace::count(Command c) const {
  std::size_t n = 0;
  for (const auto& e : entries_)
    if (e.command == c) ++n;
  return n;
}

std::size_t CommandTrace::count(Primitive p) const {
  std::size_t n = 0;
  for (const auto& e : entries_)
    if (e.aap_boundary && e.primitive == p) ++n;
  return n;
}

void CommandTrace::write_csv(std::ostream& os, bool header) const {
  if (header)
    os << "seq_no,command,bank,subarray,address_label,wordlines_raised,decoder,aap_boundary\n";
  std::size_t seq = 0;
  for (const auto& e : entries_) {
    os << seq++ << ',' << to_string(e.command) << ',' << e.bank << ',' << e.subarray << ','
       << e.address_label << ',' << e.wordlines_raised << ',' << to_string(e.decoder) << ','
       << (e.aap_boundary ? 1 : 0) << '\n';
  }
}

}  // namespace ambit
