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

#include "ibl/capture_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <tuple>

#include <fmt/format.h>

#include "ibl/error.hpp"
#include "json.hpp"

namespace ibl {
namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void malformed(std::size_t line_number, std::string_view why) {
  throw Error(Errc::MalformedLine, fmt::format("line {}: {}", line_number, why));
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

ordered_json parse_object(std::string_view line, std::size_t line_number) {
  ordered_json j = ordered_json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) malformed(line_number, "not a JSON object");
  return j;
}

std::int64_t get_int(const ordered_json& j, const char* key, std::size_t line_number) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number_integer()) {
    malformed(line_number, fmt::format("missing or non-integer '{}'", key));
  }
  return it->get<std::int64_t>();
}

const std::string& get_string(const ordered_json& j, const char* key,
                              std::size_t line_number) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    malformed(line_number, fmt::format("missing or non-string '{}'", key));
  }
  return it->get_ref<const std::string&>();
}

MacAddress get_mac(const ordered_json& j, std::size_t line_number) {
  auto mac = MacAddress::parse(get_string(j, "mac", line_number));
  if (!mac) malformed(line_number, "'mac' is not a 6-octet colon-separated address");
  return *mac;
}

std::string format_samples(std::span<const double> samples) {
  std::string out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i > 0) out.push_back(',');
    fmt::format_to(std::back_inserter(out), "{:.3f}", samples[i]);
  }
  return out;
}

std::vector<double> parse_samples(std::string_view text, std::size_t line_number) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    const std::string_view field =
        text.substr(pos, comma == std::string_view::npos ? text.size() - pos : comma - pos);
    double v = 0;
    auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || end != field.data() + field.size() || !std::isfinite(v)) {
      malformed(line_number, fmt::format("bad IBL value '{}'", field));
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(window_low_ms > 0.0) || !(window_low_ms < window_high_ms)) {
    throw Error(Errc::InvalidConfig,
                fmt::format("window must satisfy 0 < low < high, got [{}, {}]", window_low_ms,
                            window_high_ms));
  }
  if (!(session_limit_s > 0.0)) {
    throw Error(Errc::InvalidConfig, "session limit must be positive");
  }
  if (min_points < 1) throw Error(Errc::InvalidConfig, "min_points must be at least 1");
}

CaptureRecord parse_capture_line(std::string_view line, std::size_t line_number) {
  const ordered_json j = parse_object(line, line_number);
  CaptureRecord rec;
  rec.ts_us = get_int(j, "ts_us", line_number);
  if (rec.ts_us < 0) malformed(line_number, "negative 'ts_us'");
  rec.mac = get_mac(j, line_number);
  auto bytes = from_hex(get_string(j, "adv_data", line_number));
  if (!bytes) malformed(line_number, "'adv_data' is not a hex string");
  if (bytes->size() > kMaxAdvDataSize) malformed(line_number, "'adv_data' exceeds 31 bytes");
  rec.adv_data = std::move(*bytes);
  return rec;
}

std::string format_capture_line(const CaptureRecord& record) {
  ordered_json j;
  j["ts_us"] = record.ts_us;
  j["mac"] = record.mac.to_string();
  j["adv_data"] = to_hex(record.adv_data);
  return j.dump();
}

std::optional<CaptureRecord> CaptureReader::next() {
  while (std::getline(in_, line_)) {
    ++line_number_;
    if (is_blank(line_)) continue;
    CaptureRecord rec = parse_capture_line(line_, line_number_);
    if (last_ts_ && rec.ts_us < *last_ts_) ++non_monotonic_;
    last_ts_ = rec.ts_us;
    return rec;
  }
  return std::nullopt;
}

std::vector<CaptureRecord> read_capture(std::istream& in) {
  CaptureReader reader(in);
  std::vector<CaptureRecord> out;
  while (auto rec = reader.next()) out.push_back(std::move(*rec));
  return out;
}

void write_capture(std::ostream& out, std::span<const CaptureRecord> records) {
  for (const auto& rec : records) out << format_capture_line(rec) << '\n';
}

TrackBuilder::TrackBuilder(const PipelineConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

void TrackBuilder::add(const CaptureRecord& record) {
  if (!classify_gaen(record.adv_data)) {
    ++discarded_;
    return;
  }
  groups_[record.mac].push_back(record.ts_us);
}

std::vector<PseudonymTrack> TrackBuilder::finish() const {
  const auto session_us = static_cast<std::int64_t>(std::llround(cfg_.session_limit_s * 1e6));
  std::vector<PseudonymTrack> tracks;
  for (const auto& [mac, stamps] : groups_) {
    std::vector<std::int64_t> ts = stamps;
    std::sort(ts.begin(), ts.end());
    const std::int64_t first = ts.front();
    auto cut = std::upper_bound(ts.begin(), ts.end(), first + session_us);
    ts.erase(cut, ts.end());

    PseudonymTrack track;
    track.mac = mac;
    track.first_seen_us = first;
    track.last_seen_us = ts.back();
    track.raw_count = ts.size();
    for (std::size_t i = 1; i < ts.size(); ++i) {
      const double gap_ms = static_cast<double>(ts[i] - ts[i - 1]) / 1000.0;
      if (gap_ms >= cfg_.window_low_ms && gap_ms <= cfg_.window_high_ms) {
        track.ibl_samples_ms.push_back(gap_ms);
      }
    }
    if (track.ibl_samples_ms.size() >= cfg_.min_points) tracks.push_back(std::move(track));
  }
  std::sort(tracks.begin(), tracks.end(), [](const auto& a, const auto& b) {
    return std::tie(a.first_seen_us, a.mac) < std::tie(b.first_seen_us, b.mac);
  });
  return tracks;
}

std::vector<PseudonymTrack> build_tracks(std::span<const CaptureRecord> records,
                                         const PipelineConfig& cfg) {
  TrackBuilder builder(cfg);
  for (const auto& rec : records) builder.add(rec);
  return builder.finish();
}

std::vector<PseudonymTrack> build_tracks(CaptureReader& reader, const PipelineConfig& cfg) {
  TrackBuilder builder(cfg);
  while (auto rec = reader.next()) builder.add(*rec);
  return builder.finish();
}

void write_tracks(std::ostream& out, std::span<const PseudonymTrack> tracks) {
  for (const auto& t : tracks) {
    ordered_json j;
    j["mac"] = t.mac.to_string();
    j["first_seen_us"] = t.first_seen_us;
    j["last_seen_us"] = t.last_seen_us;
    j["raw_count"] = t.raw_count;
    j["ibl_ms"] = format_samples(t.ibl_samples_ms);
    out << j.dump() << '\n';
  }
}

std::vector<PseudonymTrack> read_tracks(std::istream& in) {
  std::vector<PseudonymTrack> out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (is_blank(line)) continue;
    const ordered_json j = parse_object(line, line_number);
    PseudonymTrack t;
    t.mac = get_mac(j, line_number);
    t.first_seen_us = get_int(j, "first_seen_us", line_number);
    t.last_seen_us = get_int(j, "last_seen_us", line_number);
    if (t.first_seen_us > t.last_seen_us) malformed(line_number, "first_seen_us > last_seen_us");
    const std::int64_t raw = get_int(j, "raw_count", line_number);
    if (raw < 0) malformed(line_number, "negative 'raw_count'");
    t.raw_count = static_cast<std::size_t>(raw);
    t.ibl_samples_ms = parse_samples(get_string(j, "ibl_ms", line_number), line_number);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace ibl
