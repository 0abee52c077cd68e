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

// Linking pseudonym tracks across rotations: a device broadcasts one identity
// at a time, so a track that starts shortly after another one ended and has a
// near-identical mean latency is a candidate continuation of it.

#ifndef IBL_LINKER_HPP
#define IBL_LINKER_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ibl/capture_io.hpp"
#include "ibl/gaen_frames.hpp"
#include "ibl/traffic_sim.hpp"

namespace ibl {

inline constexpr double kDefaultLinkEpsilonMs = 0.25;
inline constexpr double kDefaultMaxGapS = 30.0;

struct LinkHypothesis {
  MacAddress predecessor;
  MacAddress successor;
  double mean_gap_ms = 0.0;
  double time_gap_s = 0.0;
  double score = 0.0;  // 1 - mean_gap / epsilon

  friend bool operator==(const LinkHypothesis&, const LinkHypothesis&) = default;
};

struct LinkEvaluation {
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t false_negative = 0;
  double precision = 1.0;
  double recall = 1.0;
};

/// Greedy one-to-one matching of candidate pairs in ascending mean gap, ties
/// broken by time gap and then MAC order. Candidate pairs are scored on up to
/// `threads` OpenMP threads; the output does not depend on the thread count.
std::vector<LinkHypothesis> link_tracks(std::span<const PseudonymTrack> tracks, double epsilon_ms,
                                        double max_gap_s, int threads = 1);

/// Single-threaded link_tracks, kept as the reference for tests.
std::vector<LinkHypothesis> link_tracks_reference(std::span<const PseudonymTrack> tracks,
                                                  double epsilon_ms, double max_gap_s);

/// Scores hypotheses against simulator ground truth. A true link joins two
/// consecutive identities of one device; consecutive pairs whose tracks both
/// appear in `surviving` but were not linked count as false negatives.
/// Throws Error(Errc::UnknownMac) for a hypothesis MAC absent from the truth.
LinkEvaluation evaluate_links(std::span<const LinkHypothesis> hypotheses,
                              std::span<const GroundTruthEntry> truth,
                              std::span<const PseudonymTrack> surviving);

/// Follows links from every track without a predecessor. Tracks that were
/// never linked form chains of length one.
std::vector<std::vector<MacAddress>> link_chains(std::span<const PseudonymTrack> tracks,
                                                 std::span<const LinkHypothesis> hypotheses);

std::string format_chains(const std::vector<std::vector<MacAddress>>& chains);

}  // namespace ibl

#endif  // IBL_LINKER_HPP
