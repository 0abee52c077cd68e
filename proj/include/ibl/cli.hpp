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

#ifndef IBL_CLI_HPP
#define IBL_CLI_HPP

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ibl/anonymity.hpp"
#include "ibl/capture_io.hpp"
#include "ibl/ibl_stats.hpp"
#include "ibl/linker.hpp"
#include "ibl/traffic_sim.hpp"

namespace ibl {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitIo = 2 };

/// Entry point behind the ibl-lab binary. `args` excludes the program name.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

/// The whole laboratory run: simulate the fleet, extract tracks, summarize
/// devices, quantify anonymity of the pseudonym means, link and score.
struct ReproduceOptions {
  std::uint64_t seed = 42;
  double duration_s = 7200.0;
  double jitter_ms = kDefaultJitterMs;
  ReceiverModel receiver;
  // Lab devices are observed for whole pseudonym cycles, so the session cap
  // is lifted to the full duration unless set explicitly.
  double session_limit_s = 0.0;
  double epsilon_ms = kDefaultLinkEpsilonMs;
  double max_gap_s = kDefaultMaxGapS;
  int threads = 1;
};

struct ReproduceResult {
  std::vector<DeviceProfile> profiles;
  SimulationResult simulation;
  PipelineConfig pipeline;
  std::vector<PseudonymTrack> tracks;
  std::vector<TrackSummary> track_summaries;
  FleetSummary fleet;
  double printed_epsilon_ms = 0.0;    // from the laboratory table's column
  double recovered_epsilon_ms = 0.0;  // from the simulated fleet
  AnonymityReport anonymity;
  std::vector<LinkHypothesis> links;
  LinkEvaluation evaluation;
};

ReproduceResult reproduce(const ReproduceOptions& options);

/// MAC -> device label pairs in ground-truth order.
std::vector<std::pair<MacAddress, std::string>> mac_labels(std::span<const GroundTruthEntry> truth);

/// One decimal value per line; blank lines and '#' comments are skipped.
std::vector<double> read_values(std::istream& in);

}  // namespace ibl

#endif  // IBL_CLI_HPP
