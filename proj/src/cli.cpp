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

#include "ibl/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "ibl/error.hpp"
#include "json.hpp"

namespace ibl {
namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Format { Text, Structured };

class Input {
 public:
  explicit Input(const std::string& path) {
    if (path == "-") return;
    file_.open(path);
    if (!file_) throw IoError(fmt::format("cannot open '{}' for reading", path));
  }
  std::istream& stream() { return file_.is_open() ? file_ : std::cin; }

 private:
  std::ifstream file_;
};

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : fallback_(fallback), path_(path) {
    if (path == "-") return;
    file_.open(path);
    if (!file_) throw IoError(fmt::format("cannot open '{}' for writing", path));
  }
  std::ostream& stream() { return file_.is_open() ? file_ : fallback_; }
  void close() {
    if (!file_.is_open()) return;
    file_.close();
    if (!file_) throw IoError(fmt::format("failed writing '{}'", path_));
  }

 private:
  std::ostream& fallback_;
  std::string path_;
  std::ofstream file_;
};

void write_text_file(const std::string& path, std::string_view text, std::ostream& fallback) {
  Output o(path, fallback);
  o.stream() << text;
  o.close();
}

std::string truth_path_for(const std::string& capture_path) {
  return capture_path + ".truth.jsonl";
}

std::vector<TrackSummary> summarize_all(std::span<const PseudonymTrack> tracks) {
  std::vector<TrackSummary> out;
  out.reserve(tracks.size());
  for (const auto& t : tracks) out.push_back(summarize_track(t));
  return out;
}

std::vector<double> means_of(std::span<const TrackSummary> summaries) {
  std::vector<double> out;
  out.reserve(summaries.size());
  for (const auto& s : summaries) out.push_back(s.ibl_mean_ms);
  return out;
}

ordered_json to_json(const DeviceSummary& d) {
  return {{"label", d.label},
          {"pseudonyms", d.pseudonym_count},
          {"mean_ms", d.mean_of_means_ms},
          {"double_stdev_ms", d.double_stdev_ms}};
}

ordered_json to_json(const TrackSummary& s) {
  return {{"mac", s.mac.to_string()},
          {"samples", s.sample_count},
          {"mean_ms", s.ibl_mean_ms},
          {"stdev_ms", s.ibl_stdev_ms}};
}

ordered_json to_json(const AnonymityReport& r) {
  ordered_json bins = ordered_json::array();
  for (const auto& b : r.histogram.bins) {
    bins.push_back({{"lower_ms", r.histogram.lower_edge(b)}, {"count", b.count}});
  }
  return {{"n", r.n},
          {"epsilon_ms", r.epsilon_ms},
          {"best_offset_ms", r.best_offset_ms},
          {"entropy_bits", r.entropy_bits},
          {"anonymity", r.anonymity},
          {"distinguishable_devices", r.distinguishable_devices},
          {"histogram", bins}};
}

ordered_json to_json(const LinkHypothesis& h) {
  return {{"predecessor", h.predecessor.to_string()},
          {"successor", h.successor.to_string()},
          {"mean_gap_ms", h.mean_gap_ms},
          {"time_gap_s", h.time_gap_s},
          {"score", h.score}};
}

ordered_json to_json(const LinkEvaluation& e) {
  return {{"true_positive", e.true_positive},
          {"false_positive", e.false_positive},
          {"false_negative", e.false_negative},
          {"precision", e.precision},
          {"recall", e.recall}};
}

std::string format_track_table(std::span<const TrackSummary> summaries) {
  std::string out = fmt::format("{:<17}  {:>7}  {:>9}  {:>8}\n", "MAC", "Samples", "Mean", "Stdev");
  for (const auto& s : summaries) {
    fmt::format_to(std::back_inserter(out), "{:<17}  {:>7}  {:>9.3f}  {:>8.3f}\n",
                   s.mac.to_string(), s.sample_count, s.ibl_mean_ms, s.ibl_stdev_ms);
  }
  return out;
}

std::string format_anonymity(const AnonymityReport& r) {
  return fmt::format(
      "n                        {}\n"
      "epsilon (ms)             {:.4f}\n"
      "best bin offset (ms)     {:.6f}\n"
      "occupied bins            {}\n"
      "max entropy H (bits)     {:.4f}\n"
      "fingerprinting anonymity {:.4f}\n"
      "distinguishable devices  {:.1f}\n",
      r.n, r.epsilon_ms, r.best_offset_ms, r.histogram.bins.size(), r.entropy_bits, r.anonymity,
      r.distinguishable_devices);
}

std::string format_links(std::span<const LinkHypothesis> links) {
  std::string out = fmt::format("{:<17}  {:<17}  {:>10}  {:>9}  {:>6}\n", "Predecessor",
                                "Successor", "Mean gap", "Time gap", "Score");
  for (const auto& h : links) {
    fmt::format_to(std::back_inserter(out), "{:<17}  {:<17}  {:>10.4f}  {:>9.3f}  {:>6.3f}\n",
                   h.predecessor.to_string(), h.successor.to_string(), h.mean_gap_ms,
                   h.time_gap_s, h.score);
  }
  return out;
}

std::string format_evaluation(const LinkEvaluation& e) {
  return fmt::format("true positives {}  false positives {}  false negatives {}\n"
                     "precision {:.4f}  recall {:.4f}\n",
                     e.true_positive, e.false_positive, e.false_negative, e.precision, e.recall);
}

void check_threads(int threads) {
  if (threads < 1) throw Error(Errc::InvalidConfig, "--threads must be at least 1");
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0)) throw Error(Errc::NonPositiveEpsilon, "--epsilon must be positive");
}

// Subcommand option holders. Defaults come from the owning modules.

struct SimulateArgs {
  std::string profiles = "table1";
  double duration_s = 7200.0;
  std::uint64_t seed = 42;
  double jitter_ms = kDefaultJitterMs;
  ReceiverModel receiver;
  std::string out;
  std::string truth_out;
};

struct AnalyzeArgs {
  std::string in;
  std::string truth;
  std::string tracks_out;
  std::string means_out;
  PipelineConfig pipeline;
};

struct AnonymityArgs {
  std::string means;
  std::string tracks;
  double epsilon_ms = kDefaultLinkEpsilonMs;
  std::string svg;
  int threads = 1;
};

struct LinkArgs {
  std::string tracks;
  std::string truth;
  double epsilon_ms = kDefaultLinkEpsilonMs;
  double max_gap_s = kDefaultMaxGapS;
  bool chains = false;
  int threads = 1;
};

struct ReproduceArgs {
  ReproduceOptions options;
  std::string out_dir;
};

void add_pipeline_flags(CLI::App& cmd, PipelineConfig& cfg) {
  cmd.add_option("--window-low", cfg.window_low_ms, "Smallest accepted IBL in ms");
  cmd.add_option("--window-high", cfg.window_high_ms, "Largest accepted IBL in ms");
  cmd.add_option("--session-limit", cfg.session_limit_s,
                 "Keep only the first N seconds of every MAC group");
  cmd.add_option("--min-points", cfg.min_points, "Drop tracks with fewer IBL samples");
}

void add_receiver_flags(CLI::App& cmd, ReceiverModel& rx) {
  cmd.add_option("--loss", rx.loss_probability, "Per-broadcast receive loss probability");
  cmd.add_option("--quantization", rx.quantization_ms,
                 "Timestamp rounding granularity in ms (0 = none)");
}

int cmd_simulate(const SimulateArgs& a, bool jitter_given, std::ostream& out, std::ostream& err) {
  std::vector<DeviceProfile> profiles;
  if (a.profiles == "table1") {
    profiles = table1_profiles(a.jitter_ms);
  } else {
    Input in(a.profiles);
    profiles = read_profiles(in.stream());
    if (jitter_given) {
      for (auto& p : profiles) p.broadcast_jitter_ms = a.jitter_ms;
    }
  }
  const SimulationResult sim = simulate(profiles, a.duration_s, a.receiver, a.seed);

  Output capture(a.out, out);
  write_capture(capture.stream(), sim.records);
  capture.close();

  std::string truth_path = a.truth_out;
  if (truth_path.empty() && a.out != "-") truth_path = truth_path_for(a.out);
  if (!truth_path.empty()) {
    Output truth(truth_path, out);
    write_truth(truth.stream(), sim.truth);
    truth.close();
  }
  err << fmt::format("simulated {} devices: {} records, {} identities\n", profiles.size(),
                     sim.records.size(), sim.truth.size());
  return kExitOk;
}

int cmd_analyze(const AnalyzeArgs& a, Format format, std::ostream& out, std::ostream& err) {
  a.pipeline.validate();
  std::vector<PseudonymTrack> tracks;
  {
    Input in(a.in);
    CaptureReader reader(in.stream());
    TrackBuilder builder(a.pipeline);
    while (auto rec = reader.next()) builder.add(*rec);
    tracks = builder.finish();
    if (reader.non_monotonic_count() > 0) {
      err << fmt::format("warning: {} records arrived out of timestamp order\n",
                         reader.non_monotonic_count());
    }
    if (builder.discarded() > 0) {
      err << fmt::format("discarded {} non-GAEN records\n", builder.discarded());
    }
  }

  std::string truth_path = a.truth;
  if (truth_path.empty() && a.in != "-" && fs::exists(truth_path_for(a.in))) {
    truth_path = truth_path_for(a.in);
  }
  std::optional<std::vector<GroundTruthEntry>> truth;
  if (!truth_path.empty()) {
    Input in(truth_path);
    truth = read_truth(in.stream());
  }

  if (!a.tracks_out.empty()) {
    Output o(a.tracks_out, out);
    write_tracks(o.stream(), tracks);
    o.close();
  }
  const auto summaries = summarize_all(tracks);
  if (!a.means_out.empty()) {
    Output o(a.means_out, out);
    for (const auto& s : summaries) o.stream() << fmt::format("{:.6f}\n", s.ibl_mean_ms);
    o.close();
  }

  ordered_json doc;
  doc["tracks"] = tracks.size();
  std::string text = fmt::format("{} pseudonym tracks\n", tracks.size());
  if (truth) {
    const auto labels = mac_labels(*truth);
    const FleetSummary fleet = summarize_fleet(summaries, labels);
    text += format_device_table(fleet.devices);
    ordered_json devices = ordered_json::array();
    for (const auto& d : fleet.devices) devices.push_back(to_json(d));
    doc["devices"] = devices;
    if (!fleet.devices.empty()) {
      const double eps = precision_epsilon(fleet.devices);
      text += fmt::format("precision epsilon (ms): {:.4f}\n", eps);
      doc["precision_epsilon_ms"] = eps;
    }
    if (fleet.unlabeled_tracks > 0) {
      err << fmt::format("warning: {} tracks have no ground-truth label\n", fleet.unlabeled_tracks);
    }
  } else {
    text += format_track_table(summaries);
    ordered_json js = ordered_json::array();
    for (const auto& s : summaries) js.push_back(to_json(s));
    doc["track_summaries"] = js;
  }
  if (format == Format::Structured) {
    out << doc.dump(2) << '\n';
  } else {
    out << text;
  }
  return kExitOk;
}

int cmd_anonymity(const AnonymityArgs& a, Format format, std::ostream& out) {
  check_epsilon(a.epsilon_ms);
  check_threads(a.threads);
  std::vector<double> values;
  if (!a.means.empty()) {
    Input in(a.means);
    values = read_values(in.stream());
  } else {
    Input in(a.tracks);
    values = means_of(summarize_all(read_tracks(in.stream())));
  }
  const AnonymityReport report = fingerprinting_anonymity(values, a.epsilon_ms, a.threads);
  if (!a.svg.empty()) write_text_file(a.svg, render_histogram_svg(report.histogram), out);
  if (format == Format::Structured) {
    out << to_json(report).dump(2) << '\n';
  } else {
    out << format_anonymity(report);
  }
  return kExitOk;
}

int cmd_link(const LinkArgs& a, Format format, std::ostream& out) {
  check_epsilon(a.epsilon_ms);
  check_threads(a.threads);
  if (!(a.max_gap_s > 0.0)) throw Error(Errc::InvalidConfig, "--max-gap must be positive");
  std::vector<PseudonymTrack> tracks;
  {
    Input in(a.tracks);
    tracks = read_tracks(in.stream());
  }
  const auto links = link_tracks(tracks, a.epsilon_ms, a.max_gap_s, a.threads);
  std::optional<LinkEvaluation> evaluation;
  if (!a.truth.empty()) {
    Input in(a.truth);
    const auto truth = read_truth(in.stream());
    evaluation = evaluate_links(links, truth, tracks);
  }
  const auto chains = link_chains(tracks, links);

  if (format == Format::Structured) {
    ordered_json doc;
    ordered_json hyps = ordered_json::array();
    for (const auto& h : links) hyps.push_back(to_json(h));
    doc["links"] = hyps;
    if (evaluation) doc["evaluation"] = to_json(*evaluation);
    if (a.chains) {
      ordered_json cs = ordered_json::array();
      for (const auto& chain : chains) {
        ordered_json c = ordered_json::array();
        for (const auto& mac : chain) c.push_back(mac.to_string());
        cs.push_back(c);
      }
      doc["chains"] = cs;
    }
    out << doc.dump(2) << '\n';
  } else {
    out << format_links(links);
    if (evaluation) out << format_evaluation(*evaluation);
    if (a.chains) out << format_chains(chains);
  }
  return kExitOk;
}

std::string format_reproduction(const ReproduceResult& r, const ReproduceOptions& o) {
  std::string out = fmt::format(
      "Laboratory fleet: {} devices, {:.0f} s, seed {}, loss {:.2f}, jitter {:.1f} ms\n"
      "{} records, {} identities, {} tracks\n\n",
      r.profiles.size(), o.duration_s, o.seed, o.receiver.loss_probability, o.jitter_ms,
      r.simulation.records.size(), r.simulation.truth.size(), r.tracks.size());
  std::size_t width = 6;
  for (const auto& d : r.fleet.devices) width = std::max(width, d.label.size());
  fmt::format_to(std::back_inserter(out), "{:<{}}  {:>10}  {:>8}  {:>8}  {:>13}  {:>13}\n",
                 "Device", width, "Pseudonyms", "Target", "Mean", "Target 2sd", "Double stdev.");
  for (const auto& d : r.fleet.devices) {
    auto p = std::find_if(r.profiles.begin(), r.profiles.end(),
                          [&](const auto& prof) { return prof.label == d.label; });
    fmt::format_to(std::back_inserter(out),
                   "{:<{}}  {:>10}  {:>8.2f}  {:>8.2f}  {:>13.2f}  {:>13.2f}\n", d.label, width,
                   d.pseudonym_count, p->ibl_mean_ms, d.mean_of_means_ms,
                   2.0 * p->pseudonym_sigma_ms, d.double_stdev_ms);
  }
  fmt::format_to(std::back_inserter(out),
                 "\nprecision epsilon from the printed table (ms):  {:.5f}\n"
                 "precision epsilon from the simulated fleet (ms): {:.5f}\n\n"
                 "Fingerprinting anonymity of all pseudonym means\n{}\n"
                 "Linking (epsilon {:.3f} ms, max gap {:.0f} s): {} links\n{}",
                 r.printed_epsilon_ms, r.recovered_epsilon_ms, format_anonymity(r.anonymity),
                 o.epsilon_ms, o.max_gap_s, r.links.size(), format_evaluation(r.evaluation));
  return out;
}

ordered_json reproduction_json(const ReproduceResult& r, const ReproduceOptions& o) {
  ordered_json devices = ordered_json::array();
  for (const auto& d : r.fleet.devices) devices.push_back(to_json(d));
  return {{"seed", o.seed},
          {"duration_s", o.duration_s},
          {"records", r.simulation.records.size()},
          {"identities", r.simulation.truth.size()},
          {"tracks", r.tracks.size()},
          {"devices", devices},
          {"printed_epsilon_ms", r.printed_epsilon_ms},
          {"recovered_epsilon_ms", r.recovered_epsilon_ms},
          {"anonymity", to_json(r.anonymity)},
          {"link_count", r.links.size()},
          {"evaluation", to_json(r.evaluation)}};
}

int cmd_reproduce(const ReproduceArgs& a, Format format, std::ostream& out) {
  check_threads(a.options.threads);
  check_epsilon(a.options.epsilon_ms);
  const ReproduceResult r = reproduce(a.options);
  const std::string text = format_reproduction(r, a.options);
  const std::string structured = reproduction_json(r, a.options).dump(2) + "\n";

  if (!a.out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(a.out_dir, ec);
    if (ec) throw IoError(fmt::format("cannot create '{}': {}", a.out_dir, ec.message()));
    const fs::path dir(a.out_dir);
    auto write = [&](const char* name, auto&& fn) {
      Output o((dir / name).string(), out);
      fn(o.stream());
      o.close();
    };
    write("capture.jsonl", [&](std::ostream& s) { write_capture(s, r.simulation.records); });
    write("capture.jsonl.truth.jsonl", [&](std::ostream& s) { write_truth(s, r.simulation.truth); });
    write("tracks.jsonl", [&](std::ostream& s) { write_tracks(s, r.tracks); });
    write("means.txt", [&](std::ostream& s) {
      for (const auto& t : r.track_summaries) s << fmt::format("{:.6f}\n", t.ibl_mean_ms);
    });
    write("histogram.svg", [&](std::ostream& s) { s << render_histogram_svg(r.anonymity.histogram); });
    write("report.txt", [&](std::ostream& s) { s << text; });
    write("report.json", [&](std::ostream& s) { s << structured; });
  }
  out << (format == Format::Structured ? structured : text);
  return kExitOk;
}

}  // namespace

std::vector<std::pair<MacAddress, std::string>> mac_labels(std::span<const GroundTruthEntry> truth) {
  std::vector<std::pair<MacAddress, std::string>> out;
  out.reserve(truth.size());
  for (const auto& e : truth) out.emplace_back(e.mac, e.device);
  return out;
}

std::vector<double> read_values(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    const char* begin = line.data() + first;
    const char* end = line.data() + last + 1;
    double v = 0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
      throw Error(Errc::MalformedLine, fmt::format("line {}: not a number", line_number));
    }
    out.push_back(v);
  }
  return out;
}

ReproduceResult reproduce(const ReproduceOptions& options) {
  ReproduceResult r;
  r.profiles = table1_profiles(options.jitter_ms);
  r.simulation = simulate(r.profiles, options.duration_s, options.receiver, options.seed);
  r.pipeline.session_limit_s =
      options.session_limit_s > 0.0 ? options.session_limit_s : options.duration_s;
  r.tracks = build_tracks(r.simulation.records, r.pipeline);
  r.track_summaries = summarize_all(r.tracks);
  r.fleet = summarize_fleet(r.track_summaries, mac_labels(r.simulation.truth));

  std::vector<DeviceSummary> printed;
  for (const auto& row : table1_rows()) {
    printed.push_back({std::string(row.device), static_cast<std::size_t>(row.pseudonyms),
                       row.mean_ms, row.double_stdev_ms});
  }
  r.printed_epsilon_ms = precision_epsilon(printed);
  r.recovered_epsilon_ms = precision_epsilon(r.fleet.devices);

  const auto means = means_of(r.track_summaries);
  r.anonymity = fingerprinting_anonymity(means, options.epsilon_ms, options.threads);
  r.links = link_tracks(r.tracks, options.epsilon_ms, options.max_gap_s, options.threads);
  r.evaluation = evaluate_links(r.links, r.simulation.truth, r.tracks);
  return r;
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Inter-broadcast latency fingerprinting lab for exposure-notification beacons",
               "ibl-lab"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1, 1);
  app.fallthrough();
  std::string format_name = "text";
  app.add_option("--format", format_name, "Report format")
      ->check(CLI::IsMember({"text", "structured"}));

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Generate a capture and its ground truth");
  simulate_cmd->add_option("--profiles", sim.profiles,
                           "'table1' or a JSON-lines file of device profiles");
  simulate_cmd->add_option("--duration", sim.duration_s, "Simulated seconds");
  simulate_cmd->add_option("--seed", sim.seed, "Random seed");
  auto* jitter_opt = simulate_cmd->add_option("--jitter", sim.jitter_ms,
                                              "Per-broadcast IBL std-dev in ms");
  add_receiver_flags(*simulate_cmd, sim.receiver);
  simulate_cmd->add_option("--out", sim.out, "Capture file ('-' for stdout)")->required();
  simulate_cmd->add_option("--truth-out", sim.truth_out,
                           "Ground-truth file (default: <out>.truth.jsonl)");

  AnalyzeArgs an;
  auto* analyze_cmd = app.add_subcommand("analyze", "Build pseudonym tracks and summarize devices");
  analyze_cmd->add_option("--in", an.in, "Capture file ('-' for stdin)")->required();
  analyze_cmd->add_option("--truth", an.truth,
                          "Ground truth for device labels (default: <in>.truth.jsonl if present)");
  analyze_cmd->add_option("--tracks-out", an.tracks_out, "Write tracks to this file");
  analyze_cmd->add_option("--means-out", an.means_out, "Write per-track IBL means to this file");
  add_pipeline_flags(*analyze_cmd, an.pipeline);

  AnonymityArgs anon;
  auto* anonymity_cmd = app.add_subcommand("anonymity", "Fingerprinting anonymity of IBL means");
  auto* means_opt = anonymity_cmd->add_option("--means", anon.means, "File with one mean per line");
  auto* tracks_opt = anonymity_cmd->add_option("--tracks", anon.tracks, "Track file");
  means_opt->excludes(tracks_opt);
  anonymity_cmd->add_option("--epsilon", anon.epsilon_ms, "Bin width in ms");
  anonymity_cmd->add_option("--svg", anon.svg, "Write the histogram as SVG");
  anonymity_cmd->add_option("--threads", anon.threads, "Worker threads");

  LinkArgs lk;
  auto* link_cmd = app.add_subcommand("link", "Link tracks across pseudonym rotations");
  link_cmd->add_option("--tracks", lk.tracks, "Track file")->required();
  link_cmd->add_option("--truth", lk.truth, "Ground truth to score the links against");
  link_cmd->add_option("--epsilon", lk.epsilon_ms, "Largest mean difference in ms");
  link_cmd->add_option("--max-gap", lk.max_gap_s, "Largest silence between linked tracks in s");
  link_cmd->add_flag("--chains", lk.chains, "Print linked MAC chains");
  link_cmd->add_option("--threads", lk.threads, "Worker threads");

  ReproduceArgs rep;
  auto* reproduce_cmd = app.add_subcommand("reproduce", "Run the full laboratory experiment");
  reproduce_cmd->add_option("--seed", rep.options.seed, "Random seed");
  reproduce_cmd->add_option("--duration", rep.options.duration_s, "Simulated seconds");
  reproduce_cmd->add_option("--jitter", rep.options.jitter_ms, "Per-broadcast IBL std-dev in ms");
  add_receiver_flags(*reproduce_cmd, rep.options.receiver);
  reproduce_cmd->add_option("--session-limit", rep.options.session_limit_s,
                            "Track session cap in s (0 = whole duration)");
  reproduce_cmd->add_option("--epsilon", rep.options.epsilon_ms,
                            "Histogram bin width and link threshold in ms");
  reproduce_cmd->add_option("--max-gap", rep.options.max_gap_s, "Link time gap limit in s");
  reproduce_cmd->add_option("--threads", rep.options.threads, "Worker threads");
  reproduce_cmd->add_option("--out-dir", rep.out_dir, "Also write all artifacts here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  const Format format = format_name == "structured" ? Format::Structured : Format::Text;
  try {
    if (*simulate_cmd) {
      return cmd_simulate(sim, jitter_opt->count() > 0, out, err);
    }
    if (*analyze_cmd) return cmd_analyze(an, format, out, err);
    if (*anonymity_cmd) {
      if (anon.means.empty() && anon.tracks.empty()) {
        err << "error: one of --means or --tracks is required\n";
        return kExitValidation;
      }
      return cmd_anonymity(anon, format, out);
    }
    if (*link_cmd) return cmd_link(lk, format, out);
    if (*reproduce_cmd) return cmd_reproduce(rep, format, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace ibl
