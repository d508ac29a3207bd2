#include <cctype>

#include "behavsteg/error.hpp"
#include "behavsteg/timing_codec.hpp"

namespace behavsteg {

Bits parse_bits(std::string_view text) {
  Bits bits;
  bits.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '0' || c == '1') {
      bits.push_back(c == '1');
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      throw ValidationError("invalid bit character '" + std::string(1, c) +
                            "' at offset " + std::to_string(i));
    }
  }
  return bits;
}

std::string format_bits(const Bits& bits) {
  std::string out;
  out.reserve(bits.size());
  for (bool b : bits) out.push_back(b ? '1' : '0');
  return out;
}

Bits bits_from_bytes(std::span<const std::uint8_t> bytes) {
  Bits bits;
  bits.reserve(bytes.size() * 8);
  for (std::uint8_t byte : bytes) {
    for (int shift = 7; shift >= 0; --shift) {
      bits.push_back(((byte >> shift) & 1U) != 0);
    }
  }
  return bits;
}

}  // namespace behavsteg
