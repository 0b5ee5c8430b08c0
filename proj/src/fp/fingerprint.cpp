#include "ddikit/fp/fingerprint.hpp"

namespace ddikit::fp {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

std::string Fingerprint::to_hex() const {
  std::string out;
  out.reserve(42);
  for (int byte = 0; byte < 21; ++byte) {
    const int word = byte / 8;
    const int shift = (byte % 8) * 8;
    const auto v = static_cast<unsigned>((words_[static_cast<std::size_t>(word)] >> shift) & 0xff);
    out += kHexDigits[v >> 4];
    out += kHexDigits[v & 0xf];
  }
  return out;
}

Fingerprint Fingerprint::from_hex(std::string_view hex) {
  if (hex.size() != 42)
    throw std::invalid_argument("fingerprint hex must be 42 characters, got " +
                                std::to_string(hex.size()));
  Fingerprint fp;
  for (int byte = 0; byte < 21; ++byte) {
    const int hi = hex_value(hex[static_cast<std::size_t>(byte) * 2]);
    const int lo = hex_value(hex[static_cast<std::size_t>(byte) * 2 + 1]);
    if (hi < 0 || lo < 0)
      throw std::invalid_argument("fingerprint hex contains a non-hex character");
    const auto v = static_cast<std::uint64_t>(hi * 16 + lo);
    fp.words_[static_cast<std::size_t>(byte) / 8] |= v << ((byte % 8) * 8);
  }
  if ((fp.words_[2] >> (kBits - 128)) != 0)
    throw std::invalid_argument("fingerprint hex sets bits past position 165");
  return fp;
}

double tanimoto(const Fingerprint &a, const Fingerprint &b) {
  int inter = 0, uni = 0;
  for (std::size_t w = 0; w < 3; ++w) {
    inter += std::popcount(a.words()[w] & b.words()[w]);
    uni += std::popcount(a.words()[w] | b.words()[w]);
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace ddikit::fp
