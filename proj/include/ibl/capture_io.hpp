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

// Capture files and the passive measurement pipeline.
//
// A capture file holds one JSON object per line:
//   {"ts_us":123456,"mac":"AA:BB:CC:DD:EE:FF","adv_data":"02011a0303..."}
// A track file holds one JSON object per line:
//   {"mac":"..","first_seen_us":..,"last_seen_us":..,"raw_count":..,
//    "ibl_ms":"280.000,281.125"}

#ifndef IBL_CAPTURE_IO_HPP
#define IBL_CAPTURE_IO_HPP

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ibl/gaen_frames.hpp"

namespace ibl {

struct CaptureRecord {
  std::int64_t ts_us = 0;
  MacAddress mac;
  Bytes adv_data;

  friend bool operator==(const CaptureRecord&, const CaptureRecord&) = default;
};

struct PipelineConfig {
  double window_low_ms = 220.0;
  double window_high_ms = 350.0;
  double session_limit_s = 600.0;
  std::size_t min_points = 50;

  /// Throws Error(Errc::InvalidConfig) on a violated invariant.
  void validate() const;
};

struct PseudonymTrack {
  MacAddress mac;
  std::int64_t first_seen_us = 0;
  std::int64_t last_seen_us = 0;
  std::vector<double> ibl_samples_ms;
  std::size_t raw_count = 0;

  friend bool operator==(const PseudonymTrack&, const PseudonymTrack&) = default;
};

CaptureRecord parse_capture_line(std::string_view line, std::size_t line_number);
std::string format_capture_line(const CaptureRecord& record);

/// Pulls records off a stream one line at a time. Blank lines are skipped.
class CaptureReader {
 public:
  explicit CaptureReader(std::istream& in) : in_(in) {}

  std::optional<CaptureRecord> next();

  std::size_t line_number() const { return line_number_; }
  /// Records whose timestamp went backwards relative to the previous one.
  std::size_t non_monotonic_count() const { return non_monotonic_; }

 private:
  std::istream& in_;
  std::string line_;
  std::size_t line_number_ = 0;
  std::size_t non_monotonic_ = 0;
  std::optional<std::int64_t> last_ts_;
};

std::vector<CaptureRecord> read_capture(std::istream& in);
void write_capture(std::ostream& out, std::span<const CaptureRecord> records);

/// Incremental form of build_tracks: feed records, then call finish().
class TrackBuilder {
 public:
  explicit TrackBuilder(const PipelineConfig& cfg);

  void add(const CaptureRecord& record);
  std::size_t discarded() const { return discarded_; }
  std::vector<PseudonymTrack> finish() const;

 private:
  PipelineConfig cfg_;
  std::unordered_map<MacAddress, std::vector<std::int64_t>> groups_;
  std::size_t discarded_ = 0;
};

/// Filters GAEN broadcasts, groups them by MAC, differences successive
/// timestamps and keeps latencies inside the window. Each group is cut to its
/// first session_limit_s seconds and dropped below min_points samples.
/// Output is ordered by first_seen_us, then MAC.
std::vector<PseudonymTrack> build_tracks(std::span<const CaptureRecord> records,
                                         const PipelineConfig& cfg);
std::vector<PseudonymTrack> build_tracks(CaptureReader& reader, const PipelineConfig& cfg);

void write_tracks(std::ostream& out, std::span<const PseudonymTrack> tracks);
std::vector<PseudonymTrack> read_tracks(std::istream& in);

}  // namespace ibl

#endif  // IBL_CAPTURE_IO_HPP
