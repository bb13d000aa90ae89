#include "ambit/controller.hpp"

#include "ambit/errors.hpp"

namespace ambit {

std::string RowAddress::label() const {
  const char g = group == Group::B ? 'B' : group == Group::C ? 'C' : 'D';
  return g + std::to_string(index);
}

const std::array<WordlineSet, 16>& b_group_map() {
  using row::DCC;
  using row::T;
  static const std::array<WordlineSet, 16> map = {
      WordlineSet{{T(0)}},
      WordlineSet{{T(1)}},
      WordlineSet{{T(2)}},
      WordlineSet{{T(3)}},
      WordlineSet{{DCC(0)}},
      WordlineSet{{DCC(0), true}},
      WordlineSet{{DCC(1)}},
      WordlineSet{{DCC(1), true}},
      WordlineSet{{DCC(0), true}, {T(0)}},
      WordlineSet{{DCC(1), true}, {T(1)}},
      WordlineSet{{T(2)}, {T(3)}},
      WordlineSet{{T(0)}, {T(3)}},
      WordlineSet{{T(0)}, {T(1)}, {T(2)}},
      WordlineSet{{T(1)}, {T(2)}, {T(3)}},
      WordlineSet{{DCC(0)}, {T(1)}, {T(2)}},
      WordlineSet{{DCC(1)}, {T(0)}, {T(3)}},
  };
  return map;
}

WordlineSet decode(const RowAddress& addr) {
  switch (addr.group) {
    case Group::B:
      if (addr.index < 16) return b_group_map()[addr.index];
      break;
    case Group::C:
      if (addr.index < 2) return WordlineSet{{addr.index == 0 ? row::C0 : row::C1}};
      break;
    case Group::D:
      if (addr.index < row::kData) return WordlineSet{{row::D(addr.index)}};
      break;
  }
  throw UnknownAddress(addr.label());
}

std::string_view to_string(BbopKind k) {
  switch (k) {
    case BbopKind::Not: return "not";
    case BbopKind::And: return "and";
    case BbopKind::Or: return "or";
    case BbopKind::Nand: return "nand";
    case BbopKind::Nor: return "nor";
    case BbopKind::Xor: return "xor";
    case BbopKind::Xnor: return "xnor";
  }
  return "?";
}

std::optional<BbopKind> parse_bbop(std::string_view s) {
  for (BbopKind k : kAllBbops)
    if (to_string(k) == s) return k;
  return std::nullopt;
}

BitRow reference_op(BbopKind k, const BitRow& a, const BitRow* b) {
  if (k == BbopKind::Not) return ~a;
  if (!b) throw OperandPlacement(std::string(to_string(k)) + " needs two operands");
  if (a.size() != b->size()) throw WidthMismatch("operand widths differ");
  switch (k) {
    case BbopKind::And: return a & *b;
    case BbopKind::Or: return a | *b;
    case BbopKind::Nand: return ~(a & *b);
    case BbopKind::Nor: return ~(a | *b);
    case BbopKind::Xor: return a ^ *b;
    case BbopKind::Xnor: return ~(a ^ *b);
    case BbopKind::Not: break;
  }
  return ~a;
}

std::string to_string(const Operand& o) {
  switch (o.kind) {
    case Operand::Kind::src1: return "Di";
    case Operand::Kind::src2: return "Dj";
    case Operand::Kind::dst: return "Dk";
    case Operand::Kind::b: return "B" + std::to_string(o.index);
    case Operand::Kind::c: return "C" + std::to_string(o.index);
  }
  return "?";
}

std::string to_string(const Step& s) {
  if (s.kind == Step::Kind::ap) return "AP(" + to_string(s.first) + ")";
  return "AAP(" + to_string(s.first) + "," + to_string(s.second) + ")";
}

namespace {

Step aap(Operand a, Operand b) { return {Step::Kind::aap, a, b}; }
Step ap(Operand a) { return {Step::Kind::ap, a}; }

std::vector<Step> two_input(std::uint8_t control, bool negate) {
  using O = Operand;
  std::vector<Step> s = {aap(O::Di(), O::B(0)), aap(O::Dj(), O::B(1)), aap(O::C(control), O::B(2))};
  if (negate) {
    // TRA result goes straight into DCC0 through its n-wordline.
    s.push_back(aap(O::B(12), O::B(5)));
    s.push_back(aap(O::B(4), O::Dk()));
  } else {
    s.push_back(aap(O::B(12), O::Dk()));
  }
  return s;
}

// B8/B9 copy each source into a designated row and its complement into a DCC
// row. B14 and B15 then form (~i & j) and (i & ~j) for xor, or (~i | j) and
// (i | ~j) for xnor, depending on the control value loaded into T2/T3.
std::vector<Step> exclusive(bool complement) {
  using O = Operand;
  const std::uint8_t inner = complement ? 1 : 0;
  return {aap(O::Di(), O::B(8)),        aap(O::Dj(), O::B(9)), aap(O::C(inner), O::B(10)),
          ap(O::B(14)),                 ap(O::B(15)),          aap(O::C(1 - inner), O::B(2)),
          aap(O::B(12), O::Dk())};
}

}  // namespace

const std::vector<Step>& sequence_for(BbopKind kind) {
  using O = Operand;
  static const std::vector<Step> seq_not = {aap(O::Di(), O::B(5)), aap(O::B(4), O::Dk())};
  static const std::vector<Step> seq_and = two_input(0, false);
  static const std::vector<Step> seq_or = two_input(1, false);
  static const std::vector<Step> seq_nand = two_input(0, true);
  static const std::vector<Step> seq_nor = two_input(1, true);
  static const std::vector<Step> seq_xor = exclusive(false);
  static const std::vector<Step> seq_xnor = exclusive(true);
  switch (kind) {
    case BbopKind::Not: return seq_not;
    case BbopKind::And: return seq_and;
    case BbopKind::Or: return seq_or;
    case BbopKind::Nand: return seq_nand;
    case BbopKind::Nor: return seq_nor;
    case BbopKind::Xor: return seq_xor;
    case BbopKind::Xnor: return seq_xnor;
  }
  return seq_not;
}

// ---------------------------------------------------------------------------

TraceEntry Controller::activate(const RowAddress& a, bool boundary, Primitive p) {
  const WordlineSet wls = decode(a);
  chip_->activate(a.bank, a.subarray, wls);
  return {Command::activate,
          a.bank,
          a.subarray,
          a.label(),
          static_cast<unsigned>(wls.size()),
          a.group == Group::B ? Decoder::b_group : Decoder::cd_group,
          boundary,
          p};
}

CommandTrace Controller::aap(const RowAddress& first, const RowAddress& second) {
  if (first.bank != second.bank)
    throw InvalidActivate("AAP across banks " + std::to_string(first.bank) + " and " + std::to_string(second.bank));
  if (!chip_->bank(first.bank).precharged()) throw InvalidActivate("AAP issued to an open bank");
  CommandTrace t;
  t.push(activate(first, true, Primitive::aap));
  t.push(activate(second, false, Primitive::aap));
  chip_->precharge(first.bank);
  t.push({Command::precharge, first.bank, first.subarray, "", 0, Decoder::none, false, Primitive::aap});
  return t;
}

CommandTrace Controller::ap(const RowAddress& addr) {
  if (!chip_->bank(addr.bank).precharged()) throw InvalidActivate("AP issued to an open bank");
  CommandTrace t;
  t.push(activate(addr, true, Primitive::ap));
  chip_->precharge(addr.bank);
  t.push({Command::precharge, addr.bank, addr.subarray, "", 0, Decoder::none, false, Primitive::ap});
  return t;
}

CommandTrace Controller::exec_bbop(BbopKind kind, const RowAddress& dst, const RowAddress& src1,
                                   const std::optional<RowAddress>& src2) {
  if (!is_unary(kind) && !src2)
    throw OperandPlacement(std::string(to_string(kind)) + " needs a second source");
  for (const RowAddress* a : {&dst, &src1, src2 ? &*src2 : &src1}) {
    if (a->group != Group::D) throw OperandPlacement(a->label() + " is not a data row");
    if (!a->same_subarray(dst))
      throw OperandPlacement(a->label() + " in bank " + std::to_string(a->bank) + " subarray " +
                             std::to_string(a->subarray) + " is not co-located with the destination");
  }

  auto resolve = [&](const Operand& o) -> RowAddress {
    switch (o.kind) {
      case Operand::Kind::src1: return src1;
      case Operand::Kind::src2: return *src2;
      case Operand::Kind::dst: return dst;
      case Operand::Kind::b: return RowAddress::b(o.index, dst.bank, dst.subarray);
      case Operand::Kind::c: return RowAddress::c(o.index, dst.bank, dst.subarray);
    }
    return dst;
  };

  CommandTrace trace;
  for (const Step& s : sequence_for(kind)) {
    if (s.kind == Step::Kind::aap)
      trace.append(aap(resolve(s.first), resolve(s.second)));
    else
      trace.append(ap(resolve(s.first)));
  }
  return trace;
}

std::uint16_t Controller::physical_row(const RowAddress& a) {
  switch (a.group) {
    case Group::D:
      if (a.index < row::kData) return row::D(a.index);
      break;
    case Group::C:
      if (a.index < 2) return a.index == 0 ? row::C0 : row::C1;
      break;
    case Group::B: break;
  }
  throw UnknownAddress(a.label() + " cannot be a copy endpoint");
}

CommandTrace Controller::copy_row(const RowAddress& src, const RowAddress& dst, const std::optional<RowAddress>& temp) {
  const std::uint16_t s = physical_row(src);
  const std::uint16_t d = physical_row(dst);
  if (src.same_subarray(dst)) return aap(src, dst);
  if (src.bank != dst.bank) return chip_->transfer_psm(src.bank, src.subarray, s, dst.bank, dst.subarray, d);
  if (!temp) throw OperandPlacement("copy across subarrays of bank " + std::to_string(src.bank) + " needs a temporary row");
  if (temp->bank == src.bank) throw SameBank("temporary row must live in another bank");
  const std::uint16_t t = physical_row(*temp);
  CommandTrace trace = chip_->transfer_psm(src.bank, src.subarray, s, temp->bank, temp->subarray, t);
  trace.append(chip_->transfer_psm(temp->bank, temp->subarray, t, dst.bank, dst.subarray, d));
  return trace;
}

std::uint64_t Controller::total_data_rows() const {
  const auto& g = chip_->geometry();
  return std::uint64_t{g.banks} * g.subarrays_per_bank * row::kData;
}

RowLocation Controller::interleave(std::uint64_t d_index) const {
  if (d_index >= total_data_rows())
    throw OutOfRange("data row " + std::to_string(d_index) + " of " + std::to_string(total_data_rows()));
  const auto& g = chip_->geometry();
  const std::uint64_t sub_global = d_index / row::kData;
  return {static_cast<std::uint32_t>(sub_global / g.subarrays_per_bank),
          static_cast<std::uint32_t>(sub_global % g.subarrays_per_bank),
          static_cast<std::uint16_t>(d_index % row::kData)};
}

std::uint64_t Controller::linear_index(const RowLocation& loc) const {
  const auto& g = chip_->geometry();
  return (std::uint64_t{loc.bank} * g.subarrays_per_bank + loc.subarray) * row::kData + loc.data_row;
}

}  // namespace ambit
