#include "ambit/dram.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ambit/errors.hpp"

namespace ambit {

double charge_share_deviation(std::span<const double> charges, std::span<const double> caps,
                              double bitline_cap, double vdd) {
  double stored = 0.0;
  double total_cap = bitline_cap;
  for (std::size_t i = 0; i < charges.size(); ++i) {
    stored += charges[i] * caps[i] * vdd;
    total_cap += caps[i];
  }
  const double shared = (stored + bitline_cap * vdd / 2.0) / total_cap;
  return (shared - vdd / 2.0) / vdd;
}

namespace row {
std::string name(std::uint16_t r) {
  if (is_designated(r)) return "T" + std::to_string(r);
  if (is_dcc(r)) return "DCC" + std::to_string(r - kDesignated);
  if (r == C0) return "C0";
  if (r == C1) return "C1";
  return "D" + std::to_string(r - D(0));
}
}  // namespace row

std::string to_string(const Wordline& w) { return (w.negated ? "~" : "") + row::name(w.row); }

WordlineSet::WordlineSet(std::initializer_list<Wordline> wls) {
  for (const auto& w : wls) push(w);
}

void WordlineSet::push(Wordline w) {
  if (size_ == kMax) throw InvalidActivate("more than three wordlines in one activation");
  items_[size_++] = w;
}

std::string to_string(const WordlineSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += to_string(s[i]);
  }
  return out + "}";
}

// ---------------------------------------------------------------------------

SenseState SenseAmpArray::state(std::size_t bitline) const {
  switch (phase_) {
    case Phase::precharged: return SenseState::precharged;
    case Phase::amplifying: return SenseState::amplifying;
    case Phase::stable: break;
  }
  return latched_.get(bitline) ? SenseState::stable_high : SenseState::stable_low;
}

double SenseAmpArray::bitline_voltage(std::size_t bitline) const {
  switch (phase_) {
    case Phase::precharged: return 0.5;
    case Phase::amplifying: return shared_[bitline];
    case Phase::stable: break;
  }
  return latched_.get(bitline) ? 1.0 : 0.0;
}

// ---------------------------------------------------------------------------

Subarray::Subarray(std::size_t width) : width_(width), zero_(width), rows_(row::kPhysical), sense_(width) {
  rows_[row::C1] = BitRow(width, true);
}

const BitRow& Subarray::bits(std::uint16_t r) const { return rows_[r].empty() ? zero_ : rows_[r]; }

BitRow& Subarray::mutable_bits(std::uint16_t r) {
  if (rows_[r].empty()) rows_[r] = BitRow(width_);
  return rows_[r];
}

void Subarray::store(std::uint16_t r, BitRow b) {
  rows_[r] = std::move(b);
  analog_.erase(r);
}

BitRow Subarray::read_row(std::uint16_t r) const {
  if (r >= row::kPhysical) throw OutOfRange("row " + std::to_string(r));
  if (auto it = analog_.find(r); it != analog_.end()) {
    BitRow out(width_);
    for (std::size_t i = 0; i < width_; ++i) out.set(i, it->second[i] >= 0.5);
    return out;
  }
  return bits(r);
}

void Subarray::write_row(std::uint16_t r, const BitRow& b) {
  if (r >= row::kPhysical) throw OutOfRange("row " + std::to_string(r));
  if (b.size() != width_)
    throw WidthMismatch("row is " + std::to_string(width_) + " bits, got " + std::to_string(b.size()));
  store(r, b);
}

double Subarray::charge(std::uint16_t r, std::size_t col) const {
  if (auto it = analog_.find(r); it != analog_.end()) return it->second[col];
  return bits(r).get(col) ? 1.0 : 0.0;
}

// ---------------------------------------------------------------------------

Bank::Bank(std::size_t subarrays, std::size_t width, const ElectricalParams* params)
    : width_(width), params_(params), subarrays_(subarrays) {}

Subarray& Bank::subarray(std::uint32_t id) {
  return const_cast<Subarray&>(std::as_const(*this).subarray(id));
}

const Subarray& Bank::subarray(std::uint32_t id) const {
  if (id >= subarrays_.size()) throw OutOfRange("subarray " + std::to_string(id));
  auto& slot = subarrays_[id];
  if (!slot) slot = std::make_unique<Subarray>(width_);
  return *slot;
}

void Bank::activate(std::uint32_t sid, const WordlineSet& wls) {
  if (wls.empty()) throw InvalidActivate("empty wordline set");
  if (sid >= subarrays_.size()) throw InvalidActivate("subarray " + std::to_string(sid) + " does not exist");
  for (std::size_t i = 0; i < wls.size(); ++i) {
    const Wordline& w = wls[i];
    if (w.row >= row::kPhysical) throw InvalidActivate("row " + std::to_string(w.row) + " does not exist");
    if (w.negated && !row::is_dcc(w.row)) throw InvalidActivate(row::name(w.row) + " has no n-wordline");
    for (std::size_t j = 0; j < i; ++j)
      if (wls[j].row == w.row) throw InvalidActivate("row raised twice in " + to_string(wls));
  }
  if (poisoned_) throw InvalidActivate("bank holds a failed activation; precharge first");
  if (active_ && *active_ != sid)
    throw InvalidActivate("subarray " + std::to_string(*active_) + " is active, activate to subarray " +
                          std::to_string(sid) + " needs a precharge");

  Subarray& sa = subarray(sid);

  if (active_) {
    // Sense amplifiers are already stable; new cells take the latched value.
    for (const Wordline& w : wls) {
      auto it = std::find_if(raised_.begin(), raised_.end(), [&](const Wordline& r) { return r.row == w.row; });
      if (it != raised_.end()) {
        if (it->negated != w.negated)
          throw InvalidActivate(row::name(w.row) + " cannot connect to both bitline and bitline-bar");
        continue;
      }
      connect(sa, w);
      raised_.push_back(w);
    }
    return;
  }

  active_ = sid;
  raised_.assign(wls.begin(), wls.end());
  const bool analog = std::any_of(wls.begin(), wls.end(), [&](const Wordline& w) { return sa.has_analog(w.row); });
  if (analog)
    share_charge_analog(sa, wls);
  else
    share_charge(sa, wls);
  sa.sense_.phase_ = SenseAmpArray::Phase::stable;
  sa.sense_.shared_.clear();
  for (const Wordline& w : wls) connect(sa, w);
}

void Bank::connect(Subarray& sa, const Wordline& w) {
  sa.store(w.row, w.negated ? ~sa.sense_.latched_ : sa.sense_.latched_);
}

// Binary charges with equal capacitances: delta depends only on how many of the
// connected cells drive the bitline high, so evaluate it once per count and
// apply it word-parallel.
void Bank::share_charge(Subarray& sa, const WordlineSet& wls) {
  using Word = BitRow::Word;
  const std::size_t n = wls.size();
  const double thr = params_->offset_threshold;

  std::array<double, 4> delta{};
  std::array<bool, 4> resolves{};
  std::array<bool, 4> high{};
  const std::vector<double> caps(n, params_->cell_capacitance);
  for (std::size_t k = 0; k <= n; ++k) {
    std::vector<double> charges(n, 0.0);
    std::fill_n(charges.begin(), k, 1.0);
    delta[k] = charge_share_deviation(charges, caps, params_->bitline_capacitance, params_->vdd);
    resolves[k] = delta[k] != 0.0 && std::abs(delta[k]) >= thr;
    high[k] = delta[k] > 0.0;
  }

  std::array<const BitRow*, 3> src{};
  for (std::size_t j = 0; j < n; ++j) src[j] = &sa.bits(wls[j].row);

  BitRow& out = sa.sense_.latched_;
  auto out_words = out.words();
  Word any_bad = 0;
  for (std::size_t i = 0; i < out.word_count(); ++i) {
    const Word valid = out.valid_mask(i);
    std::array<Word, 3> v{};
    for (std::size_t j = 0; j < n; ++j) {
      v[j] = src[j]->words()[i];
      if (wls[j].negated) v[j] = ~v[j];
      v[j] &= valid;
    }
    std::array<Word, 4> exactly{};
    if (n == 1) {
      exactly[1] = v[0];
      exactly[0] = ~v[0];
    } else if (n == 2) {
      exactly[2] = v[0] & v[1];
      exactly[1] = v[0] ^ v[1];
      exactly[0] = ~(v[0] | v[1]);
    } else {
      const Word parity = v[0] ^ v[1] ^ v[2];
      const Word maj = (v[0] & v[1]) | (v[1] & v[2]) | (v[0] & v[2]);
      exactly[3] = parity & maj;
      exactly[2] = maj & ~parity;
      exactly[1] = parity & ~maj;
      exactly[0] = ~(v[0] | v[1] | v[2]);
    }
    Word bad = 0;
    Word hi = 0;
    for (std::size_t k = 0; k <= n; ++k) {
      exactly[k] &= valid;
      if (!resolves[k]) bad |= exactly[k];
      if (high[k]) hi |= exactly[k];
    }
    any_bad |= bad;
    out_words[i] = hi;
  }

  if (any_bad == 0) return;

  std::vector<double> voltages(width_);
  std::size_t first_bad = width_;
  for (std::size_t b = 0; b < width_; ++b) {
    std::size_t k = 0;
    for (std::size_t j = 0; j < n; ++j) k += (src[j]->get(b) != wls[j].negated) ? 1 : 0;
    voltages[b] = 0.5 + delta[k];
    if (!resolves[k] && first_bad == width_) first_bad = b;
  }
  fail(sa, wls, std::move(voltages), first_bad);
}

void Bank::share_charge_analog(Subarray& sa, const WordlineSet& wls) {
  const std::size_t n = wls.size();
  const double thr = params_->offset_threshold;
  const std::vector<double> caps(n, params_->cell_capacitance);
  std::vector<double> charges(n);
  std::vector<double> voltages(width_);
  std::size_t first_bad = width_;
  BitRow& out = sa.sense_.latched_;
  for (std::size_t b = 0; b < width_; ++b) {
    for (std::size_t j = 0; j < n; ++j) {
      const double q = sa.charge(wls[j].row, b);
      charges[j] = wls[j].negated ? 1.0 - q : q;
    }
    const double d = charge_share_deviation(charges, caps, params_->bitline_capacitance, params_->vdd);
    voltages[b] = 0.5 + d;
    if ((d == 0.0 || std::abs(d) < thr) && first_bad == width_) first_bad = b;
    out.set(b, d > 0.0);
  }
  if (first_bad != width_) fail(sa, wls, std::move(voltages), first_bad);
}

void Bank::fail(Subarray& sa, const WordlineSet& wls, std::vector<double> voltages, std::size_t first_bad) {
  for (const Wordline& w : wls) {
    std::vector<double> q(voltages);
    if (w.negated)
      for (auto& x : q) x = 1.0 - x;
    BitRow approx(width_);
    for (std::size_t b = 0; b < width_; ++b) approx.set(b, q[b] >= 0.5);
    sa.rows_[w.row] = std::move(approx);
    sa.analog_[w.row] = std::move(q);
  }
  const double d = voltages[first_bad] - 0.5;
  sa.sense_.phase_ = SenseAmpArray::Phase::amplifying;
  sa.sense_.shared_ = std::move(voltages);
  poisoned_ = true;
  std::ostringstream msg;
  msg << "activation " << to_string(wls) << " bitline " << first_bad << " deviation " << d
      << " below offset " << params_->offset_threshold;
  throw SenseFailure(msg.str());
}

void Bank::precharge() {
  if (!active_) return;
  SenseAmpArray& s = subarray(*active_).sense_;
  s.phase_ = SenseAmpArray::Phase::precharged;
  s.shared_.clear();
  active_.reset();
  raised_.clear();
  poisoned_ = false;
}

void Bank::drive_columns(std::size_t first, std::size_t count, const BitRow& src) {
  if (!active_ || poisoned_) throw InvalidActivate("column transfer into a bank without stable sense amplifiers");
  Subarray& sa = subarray(*active_);
  const std::size_t last = std::min(first + count, width_);
  for (std::size_t b = first; b < last; ++b) {
    const bool v = src.get(b);
    sa.sense_.latched_.set(b, v);
    for (const Wordline& w : raised_) sa.mutable_bits(w.row).set(b, v != w.negated);
  }
}

// ---------------------------------------------------------------------------

Chip::Chip(Geometry geometry, ElectricalParams params) : geometry_(geometry), params_(params) {
  if (geometry_.row_bits == 0 || geometry_.row_bits % 8 != 0)
    throw WidthMismatch("row width must be a positive multiple of 8 bits");
  banks_.reserve(geometry_.banks);
  for (std::uint32_t b = 0; b < geometry_.banks; ++b)
    banks_.emplace_back(geometry_.subarrays_per_bank, geometry_.row_bits, &params_);
}

Bank& Chip::bank(std::uint32_t b) {
  if (b >= banks_.size()) throw OutOfRange("bank " + std::to_string(b));
  return banks_[b];
}

const Bank& Chip::bank(std::uint32_t b) const {
  if (b >= banks_.size()) throw OutOfRange("bank " + std::to_string(b));
  return banks_[b];
}

BitRow Chip::read_row(std::uint32_t b, std::uint32_t s, std::uint16_t r) const {
  return bank(b).subarray(s).read_row(r);
}

void Chip::write_row(std::uint32_t b, std::uint32_t s, std::uint16_t r, const BitRow& bits) {
  bank(b).subarray(s).write_row(r, bits);
}

void Chip::rowclone_fpm(std::uint32_t b, std::uint32_t src_sub, std::uint16_t src, std::uint32_t dst_sub,
                        std::uint16_t dst) {
  if (src_sub != dst_sub)
    throw CrossSubarray("FPM copy from subarray " + std::to_string(src_sub) + " to " + std::to_string(dst_sub));
  Bank& bk = bank(b);
  if (!bk.precharged()) throw InvalidActivate("FPM copy needs a precharged bank");
  bk.activate(src_sub, {{src}});
  bk.activate(src_sub, {{dst}});
  bk.precharge();
}

std::size_t Chip::columns_per_row() const {
  return std::max<std::size_t>(1, (geometry_.row_bytes() + kColumnBytes - 1) / kColumnBytes);
}

CommandTrace Chip::transfer_psm(std::uint32_t src_bank, std::uint32_t src_sub, std::uint16_t src_row,
                                std::uint32_t dst_bank, std::uint32_t dst_sub, std::uint16_t dst_row) {
  if (src_bank == dst_bank) throw SameBank("PSM transfer within bank " + std::to_string(src_bank));
  Bank& from = bank(src_bank);
  Bank& to = bank(dst_bank);

  auto act = [](std::uint32_t b, std::uint32_t s, std::uint16_t r, bool first) {
    return TraceEntry{Command::activate, b, s, row::name(r), 1,
                      row::in_b_group(r) ? Decoder::b_group : Decoder::cd_group, first, Primitive::psm};
  };

  CommandTrace t;
  from.activate(src_sub, {{src_row}});
  t.push(act(src_bank, src_sub, src_row, true));
  to.activate(dst_sub, {{dst_row}});
  t.push(act(dst_bank, dst_sub, dst_row, false));

  const BitRow& source = from.subarray(src_sub).sense_amps().latched();
  const std::size_t col_bits = kColumnBytes * 8;
  for (std::size_t c = 0; c < columns_per_row(); ++c) {
    to.drive_columns(c * col_bits, col_bits, source);
    t.push({Command::transfer, dst_bank, dst_sub, "col" + std::to_string(c), 0, Decoder::none, false,
            Primitive::psm});
  }

  from.precharge();
  t.push({Command::precharge, src_bank, src_sub, "", 0, Decoder::none, false, Primitive::psm});
  to.precharge();
  t.push({Command::precharge, dst_bank, dst_sub, "", 0, Decoder::none, false, Primitive::psm});
  return t;
}

void Chip::dcc_not_capture(std::uint32_t b, std::uint32_t s, std::uint16_t src, unsigned dcc) {
  if (dcc >= row::kDcc) throw OutOfRange("DCC index " + std::to_string(dcc));
  Bank& bk = bank(b);
  if (!bk.precharged()) throw InvalidActivate("NOT capture needs a precharged bank");
  bk.activate(s, {{src}});
  bk.activate(s, {{row::DCC(dcc), true}});
  bk.precharge();
}

}  // namespace ambit
