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

#include "ibl/traffic_sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "ibl/error.hpp"
#include "json.hpp"

namespace ibl {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::array<Table1Row, 15> kTable1 = {{
    {"Google Pixel 4a (5G)", "Android 12", 10, 286.38, 0.41},
    {"Huawei Mate 10", "Android 10", 38, 283.04, 0.24},
    {"Huawei P10", "Android 9", 11, 283.02, 0.3},
    {"Huawei P10 Lite", "Android 8", 4, 261.92, 0.21},
    {"iPhone 13", "iOS 15", 3, 274.98, 0.19},
    {"iPhone 13 Mini (a)", "iOS 15", 4, 274.96, 0.12},
    {"iPhone 13 Mini (b)", "iOS 15", 5, 275.36, 0.06},
    {"iPhone 13 Mini (c)", "iOS 15", 4, 275.05, 0.16},
    {"iPhone X", "iOS 15", 8, 271.74, 0.24},
    {"OnePlus Nord", "Android 12", 28, 286.28, 0.2},
    {"OnePlus Nord 2", "Android 11", 7, 270.0, 0.44},
    {"Redmi Note 11 Pro", "Android 12", 9, 286.01, 0.67},
    {"Samsung Galaxy A51", "Android 11", 7, 286.11, 0.31},
    {"Samsung Galaxy A6", "Android 10", 3, 283.1, 0.1},
    {"Samsung Galaxy J7", "Android 9", 3, 282.96, 0.12},
}};

// Stream tags keep device and receiver randomness independent of each other.
constexpr std::uint32_t kDeviceStream = 0x64657631;
constexpr std::uint32_t kReceiverStream = 0x72637672;

std::mt19937_64 make_engine(std::uint64_t seed, std::uint32_t stream, std::uint32_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    stream, index};
  return std::mt19937_64(seq);
}

double draw_normal(std::mt19937_64& rng, double mean, double sd) {
  if (sd <= 0.0) return mean;
  return std::normal_distribution<double>(mean, sd)(rng);
}

template <std::size_t N>
std::array<std::uint8_t, N> draw_bytes(std::mt19937_64& rng) {
  std::array<std::uint8_t, N> out{};
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < N; ++i) {
    if (i % 8 == 0) word = rng();
    out[i] = static_cast<std::uint8_t>(word >> (8 * (i % 8)));
  }
  return out;
}

struct Emission {
  std::int64_t ts_us;
  std::uint32_t identity;  // index into the truth vector
};

double get_number(const ordered_json& j, const char* key, std::size_t line_number) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) {
    throw Error(Errc::MalformedLine,
                fmt::format("line {}: missing or non-numeric '{}'", line_number, key));
  }
  return it->get<double>();
}

template <typename Fn>
void for_each_object(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw Error(Errc::MalformedLine, fmt::format("line {}: not a JSON object", line_number));
    }
    fn(j, line_number);
  }
}

std::string require_string(const ordered_json& j, const char* key, std::size_t line_number) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw Error(Errc::MalformedLine,
                fmt::format("line {}: missing or non-string '{}'", line_number, key));
  }
  return it->get<std::string>();
}

}  // namespace

void DeviceProfile::validate() const {
  auto fail = [&](std::string_view why) {
    throw Error(Errc::InvalidProfile, fmt::format("profile '{}': {}", label, why));
  };
  if (!(ibl_mean_ms > 0.0)) fail("ibl_mean_ms must be positive");
  if (!(pseudonym_sigma_ms >= 0.0)) fail("pseudonym_sigma_ms must be non-negative");
  if (!(broadcast_jitter_ms >= 0.0)) fail("broadcast_jitter_ms must be non-negative");
  if (!(rotation_min_s > 0.0) || !(rotation_min_s <= rotation_max_s)) {
    fail("rotation bounds must satisfy 0 < min <= max");
  }
}

void ReceiverModel::validate() const {
  if (!(loss_probability >= 0.0 && loss_probability <= 1.0)) {
    throw Error(Errc::InvalidConfig, "loss probability must lie in [0, 1]");
  }
  if (!(quantization_ms >= 0.0)) {
    throw Error(Errc::InvalidConfig, "quantization must be non-negative");
  }
}

SimulationResult simulate(std::span<const DeviceProfile> profiles, double duration_s,
                          const ReceiverModel& receiver, std::uint64_t seed) {
  if (profiles.empty()) throw Error(Errc::InvalidProfile, "no device profiles given");
  if (!(duration_s > 0.0)) throw Error(Errc::InvalidConfig, "duration must be positive");
  for (const auto& p : profiles) p.validate();
  receiver.validate();

  const auto duration_us = static_cast<std::int64_t>(std::llround(duration_s * 1e6));
  SimulationResult result;
  std::vector<Emission> emissions;

  for (std::size_t d = 0; d < profiles.size(); ++d) {
    const DeviceProfile& p = profiles[d];
    auto rng = make_engine(seed, kDeviceStream, static_cast<std::uint32_t>(d));
    std::uniform_real_distribution<double> lifetime(p.rotation_min_s, p.rotation_max_s);

    // First broadcast lands somewhere inside one nominal period.
    const auto period_us = std::max<std::int64_t>(1, std::llround(p.ibl_mean_ms * 1000.0));
    std::int64_t t = std::uniform_int_distribution<std::int64_t>(0, period_us - 1)(rng);

    for (std::int64_t start = 0; start < duration_us;) {
      const auto length_us = std::max<std::int64_t>(1, std::llround(lifetime(rng) * 1e6));
      const std::int64_t end = std::min(start + length_us, duration_us);

      GroundTruthEntry id;
      id.device = p.label;
      id.pseudonym = draw_bytes<kPseudonymSize>(rng);
      id.mac.octets = draw_bytes<kAddressSize>(rng);
      id.start_us = start;
      id.end_us = end;
      id.pseudonym_mean_ms = draw_normal(rng, p.ibl_mean_ms, p.pseudonym_sigma_ms);
      const auto identity = static_cast<std::uint32_t>(result.truth.size());
      result.truth.push_back(id);

      while (t < end) {
        emissions.push_back({t, identity});
        const double gap_ms =
            std::max(1.0, draw_normal(rng, id.pseudonym_mean_ms, p.broadcast_jitter_ms));
        t += std::llround(gap_ms * 1000.0);
      }
      start += length_us;
    }
  }

  std::stable_sort(emissions.begin(), emissions.end(),
                   [](const Emission& a, const Emission& b) { return a.ts_us < b.ts_us; });

  // Identical AdvData for every broadcast of one identity.
  std::vector<Bytes> adv_data(result.truth.size());
  for (std::size_t i = 0; i < result.truth.size(); ++i) {
    auto trailer_rng = make_engine(seed, kDeviceStream ^ 0xFFFFu, static_cast<std::uint32_t>(i));
    adv_data[i] = make_gaen_adv_data(result.truth[i].pseudonym,
                                     draw_bytes<kTrailerSize>(trailer_rng));
  }

  auto rx = make_engine(seed, kReceiverStream, 0);
  std::bernoulli_distribution lost(receiver.loss_probability);
  const auto quantum_us = std::llround(receiver.quantization_ms * 1000.0);
  result.records.reserve(emissions.size());
  for (const Emission& e : emissions) {
    if (lost(rx)) continue;
    std::int64_t ts = e.ts_us;
    if (quantum_us > 0) ts = (ts + quantum_us / 2) / quantum_us * quantum_us;
    result.records.push_back({ts, result.truth[e.identity].mac, adv_data[e.identity]});
  }
  return result;
}

std::span<const Table1Row> table1_rows() { return kTable1; }

std::vector<DeviceProfile> table1_profiles(double jitter_ms) {
  std::vector<DeviceProfile> out;
  out.reserve(kTable1.size());
  for (const auto& row : kTable1) {
    DeviceProfile p;
    p.label = std::string(row.device);
    p.ibl_mean_ms = row.mean_ms;
    p.pseudonym_sigma_ms = row.double_stdev_ms / 2.0;
    p.broadcast_jitter_ms = jitter_ms;
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<DeviceProfile> read_profiles(std::istream& in) {
  std::vector<DeviceProfile> out;
  for_each_object(in, [&](const ordered_json& j, std::size_t line_number) {
    DeviceProfile p;
    p.label = require_string(j, "label", line_number);
    p.ibl_mean_ms = get_number(j, "ibl_mean_ms", line_number);
    p.pseudonym_sigma_ms = get_number(j, "pseudonym_sigma_ms", line_number);
    if (j.contains("broadcast_jitter_ms")) {
      p.broadcast_jitter_ms = get_number(j, "broadcast_jitter_ms", line_number);
    }
    if (j.contains("rotation_min_s")) p.rotation_min_s = get_number(j, "rotation_min_s", line_number);
    if (j.contains("rotation_max_s")) p.rotation_max_s = get_number(j, "rotation_max_s", line_number);
    out.push_back(std::move(p));
  });
  return out;
}

void write_profiles(std::ostream& out, std::span<const DeviceProfile> profiles) {
  for (const auto& p : profiles) {
    ordered_json j;
    j["label"] = p.label;
    j["ibl_mean_ms"] = p.ibl_mean_ms;
    j["pseudonym_sigma_ms"] = p.pseudonym_sigma_ms;
    j["broadcast_jitter_ms"] = p.broadcast_jitter_ms;
    j["rotation_min_s"] = p.rotation_min_s;
    j["rotation_max_s"] = p.rotation_max_s;
    out << j.dump() << '\n';
  }
}

std::vector<GroundTruthEntry> read_truth(std::istream& in) {
  std::vector<GroundTruthEntry> out;
  for_each_object(in, [&](const ordered_json& j, std::size_t line_number) {
    auto bad = [&](std::string_view why) {
      throw Error(Errc::MalformedLine, fmt::format("line {}: {}", line_number, why));
    };
    GroundTruthEntry e;
    e.device = require_string(j, "device", line_number);
    auto pseudonym = from_hex(require_string(j, "pseudonym", line_number));
    if (!pseudonym || pseudonym->size() != kPseudonymSize) bad("'pseudonym' must be 16 hex bytes");
    std::copy(pseudonym->begin(), pseudonym->end(), e.pseudonym.begin());
    auto mac = MacAddress::parse(require_string(j, "mac", line_number));
    if (!mac) bad("bad 'mac'");
    e.mac = *mac;
    for (auto [key, field] : {std::pair{"start_us", &e.start_us}, std::pair{"end_us", &e.end_us}}) {
      auto it = j.find(key);
      if (it == j.end() || !it->is_number_integer()) bad(fmt::format("bad '{}'", key));
      *field = it->get<std::int64_t>();
    }
    e.pseudonym_mean_ms = get_number(j, "pseudonym_mean_ms", line_number);
    out.push_back(std::move(e));
  });
  return out;
}

void write_truth(std::ostream& out, std::span<const GroundTruthEntry> truth) {
  for (const auto& e : truth) {
    ordered_json j;
    j["device"] = e.device;
    j["pseudonym"] = to_hex(e.pseudonym);
    j["mac"] = e.mac.to_string();
    j["start_us"] = e.start_us;
    j["end_us"] = e.end_us;
    j["pseudonym_mean_ms"] = e.pseudonym_mean_ms;
    out << j.dump() << '\n';
  }
}

}  // namespace ibl
