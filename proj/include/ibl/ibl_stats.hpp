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

#ifndef IBL_IBL_STATS_HPP
#define IBL_IBL_STATS_HPP

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ibl/capture_io.hpp"
#include "ibl/gaen_frames.hpp"

namespace ibl {

struct TrackSummary {
  MacAddress mac;
  std::size_t sample_count = 0;
  double ibl_mean_ms = 0.0;
  double ibl_stdev_ms = 0.0;  // population
};

struct DeviceSummary {
  std::string label;
  std::size_t pseudonym_count = 0;
  double mean_of_means_ms = 0.0;
  double double_stdev_ms = 0.0;  // 2x population stdev of the track means
};

/// Throws Error(Errc::EmptyTrack) when the track carries no samples.
TrackSummary summarize_track(const PseudonymTrack& track);

/// Every pseudonym cycle weighs the same regardless of its sample count.
/// Throws Error(Errc::EmptyInput).
DeviceSummary summarize_device(std::span<const TrackSummary> summaries, std::string label);

/// Measurement precision: the mean of the per-device double stdevs.
/// Throws Error(Errc::EmptyInput).
double precision_epsilon(std::span<const DeviceSummary> devices);

struct FleetSummary {
  std::vector<DeviceSummary> devices;  // in order of first appearance in the label map
  std::size_t unlabeled_tracks = 0;
};

/// Groups track summaries into devices using a MAC -> device label map.
FleetSummary summarize_fleet(std::span<const TrackSummary> summaries,
                             std::span<const std::pair<MacAddress, std::string>> labels);

/// Plain-text table: device, pseudonym count, mean, double stdev.
std::string format_device_table(std::span<const DeviceSummary> devices);

}  // namespace ibl

#endif  // IBL_IBL_STATS_HPP
