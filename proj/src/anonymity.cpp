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

#include "ibl/anonymity.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include <omp.h>
#include <fmt/format.h>

#include "ibl/error.hpp"

namespace ibl {
namespace {

void check_inputs(std::span<const double> values, double epsilon) {
  if (values.empty()) throw Error(Errc::EmptyData, "no data points");
  if (!(epsilon > 0.0)) {
    throw Error(Errc::NonPositiveEpsilon, fmt::format("epsilon must be positive, got {}", epsilon));
  }
}

double residue(double x, double epsilon) {
  double r = x - epsilon * std::floor(x / epsilon);
  if (r >= epsilon * (1.0 - kEdgeTolerance) || r < 0.0) r = 0.0;
  return r;
}

// Largest value first; among equal values the first (smallest) offset wins.
EntropyMax pick_best(std::span<const double> offsets, std::span<const double> bits) {
  EntropyMax best{-1.0, 0.0};
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    if (bits[i] > best.bits) best = {bits[i], offsets[i]};
  }
  return best;
}

}  // namespace

Histogram histogram(std::span<const double> values, double epsilon, double offset) {
  check_inputs(values, epsilon);
  if (!(offset >= 0.0 && offset < epsilon)) {
    throw Error(Errc::InvalidConfig,
                fmt::format("offset {} outside [0, {})", offset, epsilon));
  }
  std::map<std::int64_t, std::size_t> counts;
  for (double x : values) ++counts[bin_index(x, epsilon, offset)];

  Histogram h;
  h.epsilon_ms = epsilon;
  h.offset_ms = offset;
  h.n = values.size();
  h.bins.reserve(counts.size());
  for (auto [index, count] : counts) h.bins.push_back({index, count});
  return h;
}

double entropy_from_counts(std::vector<std::size_t> counts, std::size_t n) {
  std::sort(counts.begin(), counts.end());
  const double total = static_cast<double>(n);
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return h;
}

double entropy(const Histogram& h) {
  std::vector<std::size_t> counts;
  counts.reserve(h.bins.size());
  for (const auto& b : h.bins) counts.push_back(b.count);
  return entropy_from_counts(std::move(counts), h.n);
}

std::vector<double> candidate_offsets(std::span<const double> values, double epsilon) {
  check_inputs(values, epsilon);
  std::vector<double> res;
  res.reserve(values.size());
  for (double x : values) res.push_back(residue(x, epsilon));
  std::sort(res.begin(), res.end());
  const double tol = epsilon * kEdgeTolerance;
  res.erase(std::unique(res.begin(), res.end(),
                        [tol](double a, double b) { return b - a <= tol; }),
            res.end());

  std::vector<double> out;
  out.reserve(2 * res.size());
  for (std::size_t i = 0; i < res.size(); ++i) {
    out.push_back(res[i]);
    if (i + 1 < res.size()) out.push_back(0.5 * (res[i] + res[i + 1]));
  }
  double wrap = 0.5 * (res.back() + res.front() + epsilon);
  if (wrap >= epsilon) wrap -= epsilon;
  if (wrap < 0.0 || wrap >= epsilon) wrap = 0.0;
  out.push_back(wrap);

  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

EntropyMax max_entropy(std::span<const double> values, double epsilon, int threads) {
  const std::vector<double> offsets = candidate_offsets(values, epsilon);
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const auto count = static_cast<std::int64_t>(offsets.size());
  std::vector<double> bits(offsets.size());

#pragma omp parallel num_threads(std::max(1, threads))
  {
    std::vector<std::size_t> counts;
    counts.reserve(n);
#pragma omp for schedule(static)
    for (std::int64_t c = 0; c < count; ++c) {
      const double offset = offsets[static_cast<std::size_t>(c)];
      // Bin indices are non-decreasing along sorted values, so each bin is a run.
      counts.clear();
      std::int64_t current = bin_index(sorted[0], epsilon, offset);
      std::size_t run = 0;
      for (double x : sorted) {
        const std::int64_t b = bin_index(x, epsilon, offset);
        if (b != current) {
          counts.push_back(run);
          current = b;
          run = 0;
        }
        ++run;
      }
      counts.push_back(run);
      bits[static_cast<std::size_t>(c)] = entropy_from_counts(counts, n);
    }
  }
  return pick_best(offsets, bits);
}

EntropyMax max_entropy_reference(std::span<const double> values, double epsilon) {
  const std::vector<double> offsets = candidate_offsets(values, epsilon);
  std::vector<double> bits;
  bits.reserve(offsets.size());
  for (double offset : offsets) bits.push_back(entropy(histogram(values, epsilon, offset)));
  return pick_best(offsets, bits);
}

double anonymity_degree(double entropy_bits, std::size_t n) {
  if (n < 2) {
    throw Error(Errc::SinglePoint, "fingerprinting anonymity is undefined for a single point");
  }
  const double a = 1.0 - entropy_bits / std::log2(static_cast<double>(n));
  return std::clamp(a, 0.0, 1.0);
}

AnonymityReport fingerprinting_anonymity(std::span<const double> values, double epsilon,
                                         int threads) {
  check_inputs(values, epsilon);
  if (values.size() < 2) {
    throw Error(Errc::SinglePoint, "fingerprinting anonymity is undefined for a single point");
  }
  const EntropyMax best = max_entropy(values, epsilon, threads);
  AnonymityReport report;
  report.n = values.size();
  report.epsilon_ms = epsilon;
  report.best_offset_ms = best.offset_ms;
  report.entropy_bits = best.bits;
  report.anonymity = anonymity_degree(best.bits, values.size());
  report.distinguishable_devices = std::exp2(best.bits);
  report.histogram = histogram(values, epsilon, best.offset_ms);
  return report;
}

std::string render_histogram_svg(const Histogram& h) {
  constexpr double kWidth = 640, kHeight = 320;
  constexpr double kLeft = 56, kRight = 16, kTop = 16, kBottom = 48;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "viewBox=\"0 0 {} {}\">\n",
      kWidth, kHeight, kWidth, kHeight);
  auto out = std::back_inserter(svg);
  fmt::format_to(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

  double lo = 0.0, hi = 1.0;
  std::size_t peak = 1;
  if (!h.bins.empty()) {
    lo = h.lower_edge(h.bins.front());
    hi = h.lower_edge(h.bins.back()) + h.epsilon_ms;
    for (const auto& b : h.bins) peak = std::max(peak, b.count);
  }
  const double span = std::max(hi - lo, std::numeric_limits<double>::min());
  auto sx = [&](double x) { return kLeft + (x - lo) / span * plot_w; };
  auto sy = [&](double c) { return kTop + plot_h - c / static_cast<double>(peak) * plot_h; };

  for (const auto& b : h.bins) {
    const double x0 = sx(h.lower_edge(b));
    const double x1 = sx(h.lower_edge(b) + h.epsilon_ms);
    const double y = sy(static_cast<double>(b.count));
    fmt::format_to(out,
                   "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" "
                   "fill=\"#3b6ea8\"><title>[{:.3f}, {:.3f}) ms: {}</title></rect>\n",
                   x0, y, std::max(x1 - x0, 0.5), kTop + plot_h - y, h.lower_edge(b),
                   h.lower_edge(b) + h.epsilon_ms, b.count);
  }

  // Axes, end-point ticks and labels.
  fmt::format_to(out,
                 "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n"
                 "<line x1=\"{0}\" y1=\"{3}\" x2=\"{0}\" y2=\"{1}\" stroke=\"black\"/>\n",
                 kLeft, kTop + plot_h, kLeft + plot_w, kTop);
  fmt::format_to(out,
                 "<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"start\">{:.2f}</text>\n"
                 "<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"end\">{:.2f}</text>\n"
                 "<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
                 kLeft, kTop + plot_h + 14, lo, kLeft + plot_w, kTop + plot_h + 14, hi,
                 kLeft - 4, kTop + 10, peak);
  fmt::format_to(out,
                 "<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"12\" text-anchor=\"middle\">"
                 "IBL mean in ms</text>\n"
                 "<text x=\"14\" y=\"{:.2f}\" font-size=\"12\" text-anchor=\"middle\" "
                 "transform=\"rotate(-90 14 {:.2f})\">pseudonyms in bin</text>\n",
                 kLeft + plot_w / 2, kHeight - 10, kTop + plot_h / 2, kTop + plot_h / 2);
  svg += "</svg>\n";
  return svg;
}

}  // namespace ibl
