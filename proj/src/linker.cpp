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

#include "ibl/linker.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "ibl/error.hpp"
#include "ibl/ibl_stats.hpp"

namespace ibl {
namespace {

struct Prepared {
  std::vector<double> means;
  double epsilon;
  std::int64_t max_gap_us;
};

Prepared prepare(std::span<const PseudonymTrack> tracks, double epsilon_ms, double max_gap_s) {
  if (!(epsilon_ms > 0.0)) {
    throw Error(Errc::NonPositiveEpsilon, fmt::format("epsilon must be positive, got {}", epsilon_ms));
  }
  if (!(max_gap_s > 0.0)) throw Error(Errc::InvalidConfig, "max gap must be positive");
  Prepared p{{}, epsilon_ms, std::llround(max_gap_s * 1e6)};
  p.means.reserve(tracks.size());
  for (const auto& t : tracks) p.means.push_back(summarize_track(t).ibl_mean_ms);
  return p;
}

// Candidates with `a` as predecessor.
void candidates_from(std::size_t a, std::span<const PseudonymTrack> tracks, const Prepared& p,
                     std::vector<LinkHypothesis>& out) {
  const PseudonymTrack& pred = tracks[a];
  for (std::size_t b = 0; b < tracks.size(); ++b) {
    if (b == a) continue;
    const PseudonymTrack& succ = tracks[b];
    const std::int64_t gap_us = succ.first_seen_us - pred.last_seen_us;
    if (gap_us < 0 || gap_us > p.max_gap_us) continue;
    const double mean_gap = std::abs(p.means[a] - p.means[b]);
    if (mean_gap > p.epsilon) continue;
    out.push_back({pred.mac, succ.mac, mean_gap, static_cast<double>(gap_us) / 1e6,
                   1.0 - mean_gap / p.epsilon});
  }
}

std::vector<LinkHypothesis> greedy_match(std::vector<LinkHypothesis> candidates) {
  std::sort(candidates.begin(), candidates.end(), [](const auto& x, const auto& y) {
    return std::tie(x.mean_gap_ms, x.time_gap_s, x.predecessor, x.successor) <
           std::tie(y.mean_gap_ms, y.time_gap_s, y.predecessor, y.successor);
  });
  std::unordered_set<MacAddress> has_successor, has_predecessor;
  std::vector<LinkHypothesis> links;
  for (auto& c : candidates) {
    if (has_successor.contains(c.predecessor) || has_predecessor.contains(c.successor)) continue;
    has_successor.insert(c.predecessor);
    has_predecessor.insert(c.successor);
    links.push_back(c);
  }
  return links;
}

}  // namespace

std::vector<LinkHypothesis> link_tracks(std::span<const PseudonymTrack> tracks, double epsilon_ms,
                                        double max_gap_s, int threads) {
  const Prepared p = prepare(tracks, epsilon_ms, max_gap_s);
  const auto n = static_cast<std::int64_t>(tracks.size());
  std::vector<std::vector<LinkHypothesis>> per_track(tracks.size());

#pragma omp parallel for num_threads(std::max(1, threads)) schedule(dynamic, 16)
  for (std::int64_t a = 0; a < n; ++a) {
    candidates_from(static_cast<std::size_t>(a), tracks, p, per_track[static_cast<std::size_t>(a)]);
  }

  std::vector<LinkHypothesis> all;
  for (auto& v : per_track) all.insert(all.end(), v.begin(), v.end());
  return greedy_match(std::move(all));
}

std::vector<LinkHypothesis> link_tracks_reference(std::span<const PseudonymTrack> tracks,
                                                  double epsilon_ms, double max_gap_s) {
  const Prepared p = prepare(tracks, epsilon_ms, max_gap_s);
  std::vector<LinkHypothesis> all;
  for (std::size_t a = 0; a < tracks.size(); ++a) candidates_from(a, tracks, p, all);
  return greedy_match(std::move(all));
}

LinkEvaluation evaluate_links(std::span<const LinkHypothesis> hypotheses,
                              std::span<const GroundTruthEntry> truth,
                              std::span<const PseudonymTrack> surviving) {
  // Position of every identity inside its device's chronological sequence.
  std::map<std::string, std::vector<const GroundTruthEntry*>, std::less<>> by_device;
  for (const auto& e : truth) by_device[e.device].push_back(&e);
  struct Slot {
    const std::string* device;
    std::size_t position;
  };
  std::unordered_map<MacAddress, Slot> slot_of;
  for (auto& [device, entries] : by_device) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto* x, const auto* y) { return x->start_us < y->start_us; });
    for (std::size_t i = 0; i < entries.size(); ++i) slot_of[entries[i]->mac] = {&device, i};
  }

  auto lookup = [&](const MacAddress& mac) {
    auto it = slot_of.find(mac);
    if (it == slot_of.end()) {
      throw Error(Errc::UnknownMac, fmt::format("MAC {} is not in the ground truth", mac.to_string()));
    }
    return it->second;
  };

  LinkEvaluation ev;
  std::set<std::pair<MacAddress, MacAddress>> found;
  for (const auto& h : hypotheses) {
    const Slot a = lookup(h.predecessor);
    const Slot b = lookup(h.successor);
    if (*a.device == *b.device && b.position == a.position + 1) {
      ++ev.true_positive;
      found.emplace(h.predecessor, h.successor);
    } else {
      ++ev.false_positive;
    }
  }

  std::unordered_set<MacAddress> present;
  for (const auto& t : surviving) present.insert(t.mac);
  for (const auto& [device, entries] : by_device) {
    for (std::size_t i = 0; i + 1 < entries.size(); ++i) {
      const MacAddress& a = entries[i]->mac;
      const MacAddress& b = entries[i + 1]->mac;
      if (present.contains(a) && present.contains(b) && !found.contains({a, b})) {
        ++ev.false_negative;
      }
    }
  }

  const std::size_t claimed = ev.true_positive + ev.false_positive;
  const std::size_t actual = ev.true_positive + ev.false_negative;
  ev.precision = claimed == 0 ? 1.0 : static_cast<double>(ev.true_positive) / claimed;
  ev.recall = actual == 0 ? 1.0 : static_cast<double>(ev.true_positive) / actual;
  return ev;
}

std::vector<std::vector<MacAddress>> link_chains(std::span<const PseudonymTrack> tracks,
                                                 std::span<const LinkHypothesis> hypotheses) {
  std::unordered_map<MacAddress, MacAddress> next;
  std::unordered_set<MacAddress> has_predecessor;
  for (const auto& h : hypotheses) {
    next.emplace(h.predecessor, h.successor);
    has_predecessor.insert(h.successor);
  }
  std::vector<std::vector<MacAddress>> chains;
  for (const auto& t : tracks) {
    if (has_predecessor.contains(t.mac)) continue;
    std::vector<MacAddress> chain{t.mac};
    for (auto it = next.find(t.mac); it != next.end(); it = next.find(it->second)) {
      chain.push_back(it->second);
    }
    chains.push_back(std::move(chain));
  }
  return chains;
}

std::string format_chains(const std::vector<std::vector<MacAddress>>& chains) {
  std::string out;
  for (const auto& chain : chains) {
    for (std::size_t i = 0; i < chain.size(); ++i) {
      if (i > 0) out += " -> ";
      out += chain[i].to_string();
    }
    out += '\n';
  }
  return out;
}

}  // namespace ibl
