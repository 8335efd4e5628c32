#pragma once

// Base64 (RFC 4648, padded) and the little-endian fp64 packing used by
// checkpoint tensors.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ucca {

std::string base64_encode(std::span<const std::uint8_t> bytes);
// Throws std::invalid_argument on malformed input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

std::string encode_doubles(std::span<const double> values);
std::vector<double> decode_doubles(std::string_view text);

}  // namespace ucca
