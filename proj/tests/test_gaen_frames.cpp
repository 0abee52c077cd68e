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

#include <random>

#include <gtest/gtest.h>

#include "ibl/error.hpp"

namespace ibl {
namespace {

// Header, AdvA, then a GAEN AdvData laid out field by field.
Bytes gaen_pdu() {
  Bytes raw = {0x42, 0x25,                           // header
               0x11, 0x22, 0x33, 0x44, 0x55, 0x66};  // AdvA
  const Bytes adv = {0x02, 0x01, 0x1A,        // flags
                     0x03, 0x03, 0x6F, 0xFD,  // service UUID block
                     0x00, 0x01, 0x02, 0x03, 0x04, 0x05, 0x06, 0x07,
                     0x08, 0x09, 0x0A, 0x0B, 0x0C, 0x0D, 0x0E, 0x0F,  // pseudonym
                     0xA0, 0xA1, 0xA2, 0xA3, 0xA4, 0xA5, 0xA6, 0xA7};  // trailer
  raw.insert(raw.end(), adv.begin(), adv.end());
  return raw;
}

Errc error_code(ByteView raw) {
  try {
    parse_advertisement(raw);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return Errc::InvalidConfig;
}

TEST(ParseAdvertisement, GaenPduSplitsAtFixedOffsets) {
  const Bytes raw = gaen_pdu();
  ASSERT_EQ(raw.size(), 39u);
  const AdvertisementFrame f = parse_advertisement(raw);
  EXPECT_EQ(f.header[0], 0x42);
  EXPECT_EQ(f.adv_address.to_string(), "11:22:33:44:55:66");
  ASSERT_EQ(f.adv_data.size(), 31u);

  const auto payload = classify_gaen(f.adv_data);
  ASSERT_TRUE(payload.has_value());
  EXPECT_EQ(payload->service_uuid(), kGaenServiceUuid);
  for (std::size_t i = 0; i < kPseudonymSize; ++i) EXPECT_EQ(payload->pseudonym[i], i);
  EXPECT_EQ(payload->trailer[0], 0xA0);
  EXPECT_EQ(payload->trailer[7], 0xA7);
}

TEST(ParseAdvertisement, MinimumLengthHasEmptyAdvData) {
  const Bytes raw(8, 0xEE);
  const AdvertisementFrame f = parse_advertisement(raw);
  EXPECT_TRUE(f.adv_data.empty());
}

TEST(ParseAdvertisement, RejectsShortAndLongInput) {
  EXPECT_EQ(error_code(Bytes(7, 0)), Errc::TooShort);
  EXPECT_EQ(error_code(Bytes{}), Errc::TooShort);
  EXPECT_EQ(error_code(Bytes(40, 0)), Errc::TooLong);
}

TEST(SerializeAdvertisement, Sizes) {
  AdvertisementFrame f;
  EXPECT_EQ(serialize_advertisement(f).size(), 8u);
  f.adv_data.assign(31, 0x5A);
  EXPECT_EQ(serialize_advertisement(f).size(), 39u);
}

TEST(SerializeAdvertisement, RoundTripOverRandomFrames) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_int_distribution<std::size_t> len(0, kMaxAdvDataSize);
  for (int i = 0; i < 2000; ++i) {
    AdvertisementFrame f;
    for (auto& b : f.header) b = static_cast<std::uint8_t>(byte(rng));
    for (auto& b : f.adv_address.octets) b = static_cast<std::uint8_t>(byte(rng));
    f.adv_data.resize(len(rng));
    for (auto& b : f.adv_data) b = static_cast<std::uint8_t>(byte(rng));
    const Bytes wire = serialize_advertisement(f);
    EXPECT_EQ(parse_advertisement(wire), f);
    EXPECT_EQ(serialize_advertisement(parse_advertisement(wire)), wire);
  }
}

TEST(ParseAdvertisement, EveryInputParsesOrFailsWithDeclaredError) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> byte(0, 255);
  for (std::size_t n = 0; n <= 64; ++n) {
    Bytes raw(n);
    for (auto& b : raw) b = static_cast<std::uint8_t>(byte(rng));
    try {
      const auto f = parse_advertisement(raw);
      EXPECT_GE(n, kMinPduSize);
      EXPECT_EQ(f.adv_data.size(), n - kMinPduSize);
    } catch (const Error& e) {
      EXPECT_TRUE(e.code() == Errc::TooShort || e.code() == Errc::TooLong);
      EXPECT_TRUE(n < kMinPduSize || n > kMaxPduSize);
    }
  }
}

TEST(ClassifyGaen, RejectsOtherServicesAndLengths) {
  const Bytes pdu = gaen_pdu();
  Bytes adv(pdu.begin() + 8, pdu.end());
  adv[5] = 0x0F;
  adv[6] = 0x18;  // 0x180F, battery service
  EXPECT_FALSE(classify_gaen(adv).has_value());
  EXPECT_FALSE(classify_gaen(Bytes(12, 0)).has_value());
  EXPECT_FALSE(classify_gaen(Bytes{}).has_value());
}

TEST(ClassifyGaen, PresentImpliesGaenUuid) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> byte(0, 255);
  int hits = 0;
  for (int i = 0; i < 5000; ++i) {
    Bytes adv(31);
    for (auto& b : adv) b = static_cast<std::uint8_t>(byte(rng));
    if (i % 2 == 0) {
      adv[5] = 0x6F;
      adv[6] = 0xFD;
    }
    if (auto p = classify_gaen(adv)) {
      ++hits;
      EXPECT_EQ(p->service_uuid(), 0xFD6F);
      EXPECT_EQ(p->pseudonym.size(), 16u);
      EXPECT_TRUE(std::equal(p->pseudonym.begin(), p->pseudonym.end(), adv.begin() + 7));
    }
  }
  EXPECT_GE(hits, 2500);
}

TEST(MakeGaenAdvData, ClassifiesBack) {
  Pseudonym id{};
  id[0] = 0xAB;
  id[15] = 0xCD;
  std::array<std::uint8_t, kTrailerSize> trailer{1, 2, 3, 4, 5, 6, 7, 8};
  const Bytes adv = make_gaen_adv_data(id, trailer);
  ASSERT_EQ(adv.size(), kGaenAdvDataSize);
  EXPECT_EQ(adv[5], 0x6F);
  EXPECT_EQ(adv[6], 0xFD);
  const auto p = classify_gaen(adv);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->pseudonym, id);
  EXPECT_EQ(p->trailer, trailer);
}

TEST(MacAddress, TextForm) {
  MacAddress mac{{0x0a, 0xbc, 0x00, 0xff, 0x12, 0x9e}};
  const std::string text = mac.to_string();
  EXPECT_EQ(text, "0A:BC:00:FF:12:9E");
  EXPECT_EQ(text.size(), 17u);
  EXPECT_EQ(MacAddress::parse(text), mac);
  EXPECT_EQ(MacAddress::parse("0a:bc:00:ff:12:9e"), mac);
  EXPECT_FALSE(MacAddress::parse("0A:BC:00:FF:12"));
  EXPECT_FALSE(MacAddress::parse("0A-BC-00-FF-12-9E"));
  EXPECT_FALSE(MacAddress::parse("0A:BC:00:FF:12:9G"));
}

TEST(Hex, LowercaseNoSeparators) {
  const Bytes b = {0x00, 0x6F, 0xFD, 0xA5};
  EXPECT_EQ(to_hex(b), "006ffda5");
  EXPECT_EQ(from_hex("006ffda5"), b);
  EXPECT_EQ(from_hex("006FFDA5"), b);
  EXPECT_FALSE(from_hex("abc"));
  EXPECT_FALSE(from_hex("zz"));
}

}  // namespace
}  // namespace ibl
