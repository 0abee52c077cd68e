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

#include "ibl/ibl_stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include <fmt/format.h>

#include "ibl/error.hpp"

namespace ibl {
namespace {

struct Moments {
  double mean;
  double stdev;
};

// Two-pass population moments.
Moments moments(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / n)};
}

}  // namespace

TrackSummary summarize_track(const PseudonymTrack& track) {
  if (track.ibl_samples_ms.empty()) {
    throw Error(Errc::EmptyTrack, fmt::format("track {} has no IBL samples", track.mac.to_string()));
  }
  const Moments m = moments(track.ibl_samples_ms);
  return {track.mac, track.ibl_samples_ms.size(), m.mean, m.stdev};
}

DeviceSummary summarize_device(std::span<const TrackSummary> summaries, std::string label) {
  if (summaries.empty()) {
    throw Error(Errc::EmptyInput, fmt::format("no pseudonym summaries for device '{}'", label));
  }
  std::vector<double> means;
  means.reserve(summaries.size());
  for (const auto& s : summaries) means.push_back(s.ibl_mean_ms);
  const Moments m = moments(means);
  return {std::move(label), summaries.size(), m.mean, 2.0 * m.stdev};
}

double precision_epsilon(std::span<const DeviceSummary> devices) {
  if (devices.empty()) throw Error(Errc::EmptyInput, "precision needs at least one device");
  double sum = 0.0;
  for (const auto& d : devices) sum += d.double_stdev_ms;
  return sum / static_cast<double>(devices.size());
}

FleetSummary summarize_fleet(std::span<const TrackSummary> summaries,
                             std::span<const std::pair<MacAddress, std::string>> labels) {
  std::unordered_map<MacAddress, std::size_t> device_of;
  std::vector<std::string> order;
  std::map<std::string, std::size_t, std::less<>> index_of;
  for (const auto& [mac, label] : labels) {
    auto [it, inserted] = index_of.try_emplace(label, order.size());
    if (inserted) order.push_back(label);
    device_of.emplace(mac, it->second);
  }

  std::vector<std::vector<TrackSummary>> grouped(order.size());
  FleetSummary fleet;
  for (const auto& s : summaries) {
    auto it = device_of.find(s.mac);
    if (it == device_of.end()) {
      ++fleet.unlabeled_tracks;
      continue;
    }
    grouped[it->second].push_back(s);
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (grouped[i].empty()) continue;
    fleet.devices.push_back(summarize_device(grouped[i], order[i]));
  }
  return fleet;
}

std::string format_device_table(std::span<const DeviceSummary> devices) {
  std::size_t width = std::string_view("Device").size();
  for (const auto& d : devices) width = std::max(width, d.label.size());
  std::string out = fmt::format("{:<{}}  {:>10}  {:>8}  {:>13}\n", "Device", width, "Pseudonyms",
                                "Mean", "Double stdev.");
  for (const auto& d : devices) {
    fmt::format_to(std::back_inserter(out), "{:<{}}  {:>10}  {:>8.2f}  {:>13.2f}\n", d.label,
                   width, d.pseudonym_count, d.mean_of_means_ms, d.double_stdev_ms);
  }
  return out;
}

}  // namespace ibl
