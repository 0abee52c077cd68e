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

// Fingerprinting anonymity of a set of measured values.
//
// The values are binned into a histogram of width epsilon. Since the bin
// origin is free, the entropy is taken as the maximum over all origins.
// The anonymity A = 1 - H / log2(n) is 0 when every value is told apart
// and 1 when none is.

#ifndef IBL_ANONYMITY_HPP
#define IBL_ANONYMITY_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ibl {

struct Bin {
  std::int64_t index = 0;
  std::size_t count = 0;

  friend bool operator==(const Bin&, const Bin&) = default;
};

struct Histogram {
  double epsilon_ms = 0.0;
  double offset_ms = 0.0;
  std::vector<Bin> bins;  // ascending index, no empty bins
  std::size_t n = 0;

  /// Bin i covers [offset + i * epsilon, offset + (i + 1) * epsilon).
  double lower_edge(const Bin& bin) const {
    return offset_ms + static_cast<double>(bin.index) * epsilon_ms;
  }
};

struct EntropyMax {
  double bits = 0.0;
  double offset_ms = 0.0;
};

struct AnonymityReport {
  std::size_t n = 0;
  double epsilon_ms = 0.0;
  double best_offset_ms = 0.0;
  double entropy_bits = 0.0;
  double anonymity = 0.0;
  double distinguishable_devices = 1.0;
  Histogram histogram;
};

/// Points within kEdgeTolerance bin widths below an edge count as on the edge,
/// so values that differ only by rounding noise share a bin.
inline constexpr double kEdgeTolerance = 1e-9;

inline std::int64_t bin_index(double x, double epsilon, double offset) {
  return static_cast<std::int64_t>(std::floor((x - offset) / epsilon + kEdgeTolerance));
}

/// Throws Error with Errc::EmptyData, Errc::NonPositiveEpsilon, or
/// Errc::InvalidConfig for an offset outside [0, epsilon).
Histogram histogram(std::span<const double> values, double epsilon, double offset);

/// Shannon entropy in bits of the bin frequencies.
double entropy(const Histogram& h);

/// Entropy of a count vector; counts are summed in ascending order so equal
/// multisets give bit-identical results.
double entropy_from_counts(std::vector<std::size_t> counts, std::size_t n);

/// Bin origins that between them realise every distinct partition of the
/// values: each residue modulo epsilon, and the midpoint of every gap between
/// neighbouring residues (including the wrap-around gap). Sorted ascending.
std::vector<double> candidate_offsets(std::span<const double> values, double epsilon);

/// Exact maximum entropy over bin origins. Ties go to the smallest origin.
/// Candidates are scored in parallel on up to `threads` OpenMP threads; the
/// result does not depend on the thread count.
EntropyMax max_entropy(std::span<const double> values, double epsilon, int threads = 1);

/// Serial version of max_entropy built on histogram()/entropy(). Kept as the
/// reference the parallel kernel is tested against.
EntropyMax max_entropy_reference(std::span<const double> values, double epsilon);

/// A = 1 - H / log2(n), clamped into [0, 1]. Throws Errc::SinglePoint for n < 2.
double anonymity_degree(double entropy_bits, std::size_t n);

/// Throws Errc::EmptyData for no values and Errc::SinglePoint for one.
AnonymityReport fingerprinting_anonymity(std::span<const double> values, double epsilon,
                                         int threads = 1);

/// Bar chart of the histogram: IBL mean in ms against pseudonyms per bin.
std::string render_histogram_svg(const Histogram& h);

}  // namespace ibl

#endif  // IBL_ANONYMITY_HPP
