#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace ambit {

/// Fixed-width packed bit vector. One instance holds the logical contents of a
/// DRAM row (or any bulk bitvector). Bits past size() in the last word are
/// always zero.
class BitRow {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  BitRow() = default;
  explicit BitRow(std::size_t nbits, bool value = false)
      : nbits_(nbits), words_((nbits + kWordBits - 1) / kWordBits, value ? ~Word{0} : Word{0}) {
    trim();
  }

  static BitRow random(std::size_t nbits, std::mt19937_64& rng) {
    BitRow r(nbits);
    for (auto& w : r.words_) w = rng();
    r.trim();
    return r;
  }

  std::size_t size() const { return nbits_; }
  bool empty() const { return nbits_ == 0; }
  std::size_t word_count() const { return words_.size(); }

  std::span<Word> words() { return words_; }
  std::span<const Word> words() const { return words_; }

  bool get(std::size_t i) const { return (words_[i / kWordBits] >> (i % kWordBits)) & 1U; }
  void set(std::size_t i, bool v) {
    const Word m = Word{1} << (i % kWordBits);
    if (v)
      words_[i / kWordBits] |= m;
    else
      words_[i / kWordBits] &= ~m;
  }

  void fill(bool v) {
    for (auto& w : words_) w = v ? ~Word{0} : Word{0};
    trim();
  }

  std::size_t popcount() const {
    std::size_t n = 0;
    for (Word w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  /// Mask with the valid bits of word i set.
  Word valid_mask(std::size_t i) const {
    if (i + 1 < words_.size() || nbits_ % kWordBits == 0) return ~Word{0};
    return (Word{1} << (nbits_ % kWordBits)) - 1;
  }

  void trim() {
    if (!words_.empty()) words_.back() &= valid_mask(words_.size() - 1);
  }

  BitRow& operator&=(const BitRow& o) { return apply(o, [](Word a, Word b) { return a & b; }); }
  BitRow& operator|=(const BitRow& o) { return apply(o, [](Word a, Word b) { return a | b; }); }
  BitRow& operator^=(const BitRow& o) { return apply(o, [](Word a, Word b) { return a ^ b; }); }

  friend BitRow operator&(BitRow a, const BitRow& b) { return a &= b; }
  friend BitRow operator|(BitRow a, const BitRow& b) { return a |= b; }
  friend BitRow operator^(BitRow a, const BitRow& b) { return a ^= b; }
  friend BitRow operator~(BitRow a) {
    for (auto& w : a.words_) w = ~w;
    a.trim();
    return a;
  }

  friend bool operator==(const BitRow&, const BitRow&) = default;

  /// Little-endian byte view helpers used by the host access path.
  std::uint8_t byte(std::size_t i) const {
    return static_cast<std::uint8_t>(words_[i / 8] >> (8 * (i % 8)));
  }
  void set_byte(std::size_t i, std::uint8_t b) {
    const unsigned shift = 8 * (i % 8);
    Word& w = words_[i / 8];
    w = (w & ~(Word{0xFF} << shift)) | (Word{b} << shift);
  }

  std::string to_string() const {
    std::string s(nbits_, '0');
    for (std::size_t i = 0; i < nbits_; ++i)
      if (get(i)) s[i] = '1';
    return s;
  }

 private:
  template <class F>
  BitRow& apply(const BitRow& o, F f) {
    for (std::size_t i = 0; i < words_.size() && i < o.words_.size(); ++i)
      words_[i] = f(words_[i], o.words_[i]);
    trim();
    return *this;
  }

  std::size_t nbits_ = 0;
  std::vector<Word> words_;
};

}  // namespace ambit
