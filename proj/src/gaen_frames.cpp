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

#include "ibl/gaen_frames.hpp"

#include <algorithm>
#include <cassert>

#include <fmt/format.h>

#include "ibl/error.hpp"

namespace ibl {
namespace {

constexpr std::array<std::uint8_t, 3> kGaenFlags = {0x02, 0x01, 0x1A};
// Complete list of 16-bit service UUIDs, one entry.
constexpr std::array<std::uint8_t, 4> kGaenUuidBlock = {0x03, 0x03, 0x6F, 0xFD};

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string MacAddress::to_string() const {
  return fmt::format("{:02X}:{:02X}:{:02X}:{:02X}:{:02X}:{:02X}", octets[0], octets[1],
                     octets[2], octets[3], octets[4], octets[5]);
}

std::optional<MacAddress> MacAddress::parse(std::string_view text) {
  if (text.size() != 17) return std::nullopt;
  MacAddress mac;
  for (std::size_t i = 0; i < kAddressSize; ++i) {
    const std::size_t pos = i * 3;
    if (i > 0 && text[pos - 1] != ':') return std::nullopt;
    const int hi = hex_value(text[pos]);
    const int lo = hex_value(text[pos + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    mac.octets[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return mac;
}

AdvertisementFrame parse_advertisement(ByteView raw) {
  if (raw.size() < kMinPduSize) {
    throw Error(Errc::TooShort,
                fmt::format("advertisement PDU of {} bytes, need at least {}", raw.size(),
                            kMinPduSize));
  }
  if (raw.size() > kMaxPduSize) {
    throw Error(Errc::TooLong, fmt::format("AdvData of {} bytes exceeds {}",
                                           raw.size() - kMinPduSize, kMaxAdvDataSize));
  }
  AdvertisementFrame frame;
  std::copy_n(raw.begin(), kHeaderSize, frame.header.begin());
  std::copy_n(raw.begin() + kHeaderSize, kAddressSize, frame.adv_address.octets.begin());
  frame.adv_data.assign(raw.begin() + kMinPduSize, raw.end());
  return frame;
}

Bytes serialize_advertisement(const AdvertisementFrame& frame) {
  assert(frame.adv_data.size() <= kMaxAdvDataSize);
  Bytes out;
  out.reserve(kMinPduSize + frame.adv_data.size());
  out.insert(out.end(), frame.header.begin(), frame.header.end());
  out.insert(out.end(), frame.adv_address.octets.begin(), frame.adv_address.octets.end());
  out.insert(out.end(), frame.adv_data.begin(), frame.adv_data.end());
  return out;
}

std::optional<GaenPayload> classify_gaen(ByteView adv_data) {
  if (adv_data.size() != kGaenAdvDataSize) return std::nullopt;
  GaenPayload p;
  auto it = adv_data.begin();
  std::copy_n(it, p.flags.size(), p.flags.begin());
  it += p.flags.size();
  std::copy_n(it, p.uuid_block.size(), p.uuid_block.begin());
  it += p.uuid_block.size();
  if (p.service_uuid() != kGaenServiceUuid) return std::nullopt;
  std::copy_n(it, kPseudonymSize, p.pseudonym.begin());
  it += kPseudonymSize;
  std::copy_n(it, kTrailerSize, p.trailer.begin());
  return p;
}

Bytes make_gaen_adv_data(const Pseudonym& pseudonym,
                         const std::array<std::uint8_t, kTrailerSize>& trailer) {
  Bytes out;
  out.reserve(kGaenAdvDataSize);
  out.insert(out.end(), kGaenFlags.begin(), kGaenFlags.end());
  out.insert(out.end(), kGaenUuidBlock.begin(), kGaenUuidBlock.end());
  out.insert(out.end(), pseudonym.begin(), pseudonym.end());
  out.insert(out.end(), trailer.begin(), trailer.end());
  return out;
}

std::string to_hex(ByteView bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0F]);
  }
  return out;
}

std::optional<Bytes> from_hex(std::string_view text) {
  if (text.size() % 2 != 0) return std::nullopt;
  Bytes out(text.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = hex_value(text[2 * i]);
    const int lo = hex_value(text[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

}  // namespace ibl
