#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ddikit::fp {

// Fixed-width 166-bit structural-key fingerprint.  Keys are numbered 1..166
// externally; bit i here stores key i+1.
class Fingerprint {
 public:
  static constexpr int kBits = 166;

  void set(int bit) {
    check_range(bit);
    words_[static_cast<std::size_t>(bit) / 64] |= std::uint64_t{1} << (bit % 64);
  }

  bool test(int bit) const {
    check_range(bit);
    return (words_[static_cast<std::size_t>(bit) / 64] >> (bit % 64)) & 1;
  }

  int popcount() const {
    return std::popcount(words_[0]) + std::popcount(words_[1]) + std::popcount(words_[2]);
  }

  // 42 lowercase hex characters: 21 bytes, byte j holding bits [8j, 8j+8)
  // least-significant-bit first; the two bits past 165 are always zero.
  std::string to_hex() const;
  static Fingerprint from_hex(std::string_view hex);

  bool operator==(const Fingerprint &) const = default;

  const std::array<std::uint64_t, 3> &words() const { return words_; }

 private:
  static void check_range(int bit) {
    if (bit < 0 || bit >= kBits) throw std::out_of_range("fingerprint bit out of range");
  }

  std::array<std::uint64_t, 3> words_{0, 0, 0};
};

// |intersection| / |union| over set bits.  Two empty fingerprints compare as
// identical: 1.0.
double tanimoto(const Fingerprint &a, const Fingerprint &b);

}  // namespace ddikit::fp
