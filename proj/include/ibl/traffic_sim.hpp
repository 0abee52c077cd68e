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

// Seeded discrete-event generator of exposure-notification broadcast traffic.
//
// Each device cycles through identities (random MAC + random pseudonym,
// always swapped together). Identity lifetimes are uniform over the profile's
// rotation bounds. Within one identity a pseudonym mean is drawn around the
// device mean, and broadcast gaps are drawn around that pseudonym mean.

#ifndef IBL_TRAFFIC_SIM_HPP
#define IBL_TRAFFIC_SIM_HPP

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ibl/capture_io.hpp"
#include "ibl/gaen_frames.hpp"

namespace ibl {

inline constexpr double kDefaultJitterMs = 5.0;
inline constexpr double kDefaultRotationMinS = 600.0;
inline constexpr double kDefaultRotationMaxS = 1200.0;

struct DeviceProfile {
  std::string label;
  double ibl_mean_ms = 0.0;
  double pseudonym_sigma_ms = 0.0;
  double broadcast_jitter_ms = kDefaultJitterMs;
  double rotation_min_s = kDefaultRotationMinS;
  double rotation_max_s = kDefaultRotationMaxS;

  /// Throws Error(Errc::InvalidProfile).
  void validate() const;
};

struct ReceiverModel {
  double loss_probability = 0.05;
  double quantization_ms = 0.0;  // 0 keeps timestamps untouched

  /// Throws Error(Errc::InvalidConfig).
  void validate() const;
};

struct GroundTruthEntry {
  std::string device;
  Pseudonym pseudonym{};
  MacAddress mac;
  std::int64_t start_us = 0;
  std::int64_t end_us = 0;
  double pseudonym_mean_ms = 0.0;

  friend bool operator==(const GroundTruthEntry&, const GroundTruthEntry&) = default;
};

struct SimulationResult {
  std::vector<CaptureRecord> records;   // time-sorted, after the receiver model
  std::vector<GroundTruthEntry> truth;  // grouped by device, chronological
};

SimulationResult simulate(std::span<const DeviceProfile> profiles, double duration_s,
                          const ReceiverModel& receiver, std::uint64_t seed);

/// One row of the isolated laboratory measurements.
struct Table1Row {
  std::string_view device;
  std::string_view os;
  int pseudonyms;
  double mean_ms;
  double double_stdev_ms;
};

std::span<const Table1Row> table1_rows();

/// Profiles for the 15 laboratory phones: mean from the table, sigma half
/// of the printed double standard deviation.
std::vector<DeviceProfile> table1_profiles(double jitter_ms = kDefaultJitterMs);

std::vector<DeviceProfile> read_profiles(std::istream& in);
void write_profiles(std::ostream& out, std::span<const DeviceProfile> profiles);

std::vector<GroundTruthEntry> read_truth(std::istream& in);
void write_truth(std::ostream& out, std::span<const GroundTruthEntry> truth);

}  // namespace ibl

#endif  // IBL_TRAFFIC_SIM_HPP
