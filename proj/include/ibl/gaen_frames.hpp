// Copyright 2026 The ibl-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Advertisement PDUs carrying exposure-notification beacons.
//
// Wire layout of an ADV_NONCONN_IND PDU:
//
//   offset  0..2   header (opaque)
//   offset  2..8   AdvA, the advertiser's (randomized) device address
//   offset  8..    AdvData, 0..31 bytes
//
// AdvData of a GAEN broadcast is exactly 31 bytes:
//
//   0..3    flags
//   3..7    service UUID block; bytes 5,6 hold 0xFD6F little-endian
//   7..23   rolling pseudonym
//   23..31  trailer (opaque)

#ifndef IBL_GAEN_FRAMES_HPP
#define IBL_GAEN_FRAMES_HPP

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ibl {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline constexpr std::size_t kHeaderSize = 2;
inline constexpr std::size_t kAddressSize = 6;
inline constexpr std::size_t kMaxAdvDataSize = 31;
inline constexpr std::size_t kMinPduSize = kHeaderSize + kAddressSize;
inline constexpr std::size_t kMaxPduSize = kMinPduSize + kMaxAdvDataSize;

inline constexpr std::uint16_t kGaenServiceUuid = 0xFD6F;
inline constexpr std::size_t kGaenAdvDataSize = 31;
inline constexpr std::size_t kPseudonymSize = 16;
inline constexpr std::size_t kTrailerSize = 8;

/// 48-bit device address. Octets are kept in the order they appear in the
/// PDU and rendered in that same order.
struct MacAddress {
  std::array<std::uint8_t, kAddressSize> octets{};

  /// "AA:BB:CC:DD:EE:FF", always 17 characters.
  std::string to_string() const;

  /// Accepts exactly six colon-separated hex pairs, either case.
  static std::optional<MacAddress> parse(std::string_view text);

  friend auto operator<=>(const MacAddress&, const MacAddress&) = default;
};

using Pseudonym = std::array<std::uint8_t, kPseudonymSize>;

struct AdvertisementFrame {
  std::array<std::uint8_t, kHeaderSize> header{};
  MacAddress adv_address;
  Bytes adv_data;  // at most kMaxAdvDataSize bytes

  friend bool operator==(const AdvertisementFrame&, const AdvertisementFrame&) = default;
};

struct GaenPayload {
  std::array<std::uint8_t, 3> flags{};
  std::array<std::uint8_t, 4> uuid_block{};
  Pseudonym pseudonym{};
  std::array<std::uint8_t, kTrailerSize> trailer{};

  std::uint16_t service_uuid() const {
    return static_cast<std::uint16_t>(uuid_block[2] | (uuid_block[3] << 8));
  }

  friend bool operator==(const GaenPayload&, const GaenPayload&) = default;
};

/// Splits a raw PDU at the fixed offsets above. Throws Error with
/// Errc::TooShort below 8 bytes and Errc::TooLong when AdvData exceeds 31.
AdvertisementFrame parse_advertisement(ByteView raw);

/// Inverse of parse_advertisement. The frame must satisfy its size invariant.
Bytes serialize_advertisement(const AdvertisementFrame& frame);

/// Returns the decoded payload iff adv_data is a 31-byte GAEN AdvData.
/// Anything else is ordinary non-GAEN traffic and yields nullopt.
std::optional<GaenPayload> classify_gaen(ByteView adv_data);

/// Builds a 31-byte GAEN AdvData around the given pseudonym and trailer.
Bytes make_gaen_adv_data(const Pseudonym& pseudonym,
                         const std::array<std::uint8_t, kTrailerSize>& trailer);

/// Lowercase hex, no separators.
std::string to_hex(ByteView bytes);
std::optional<Bytes> from_hex(std::string_view text);

}  // namespace ibl

template <>
struct std::hash<ibl::MacAddress> {
  std::size_t operator()(const ibl::MacAddress& mac) const noexcept {
    std::uint64_t v = 0;
    for (auto b : mac.octets) v = (v << 8) | b;
    return std::hash<std::uint64_t>{}(v);
  }
};

#endif  // IBL_GAEN_FRAMES_HPP
