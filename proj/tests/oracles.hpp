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

// Test-only oracles. Nothing here calls into the anonymity module, so the
// exact maximization can be checked against an independent route.

#ifndef IBL_TESTS_ORACLES_HPP
#define IBL_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <vector>

namespace ibl::oracle {

// Entropy of the binning of `xs` into [offset + k*eps, offset + (k+1)*eps).
inline double binned_entropy(std::span<const double> xs, double eps, double offset) {
  std::map<long long, int> counts;
  for (double x : xs) counts[static_cast<long long>(std::floor((x - offset) / eps))]++;
  const double n = static_cast<double>(xs.size());
  double h = 0.0;
  for (const auto& [bin, c] : counts) {
    const double p = c / n;
    h += -p * std::log2(p);
  }
  return h;
}

// Maximum entropy over `steps` equally spaced bin origins in [0, eps).
// Values are sorted once; bins are then contiguous runs.
inline double dense_sweep_max_entropy(std::span<const double> xs, double eps, int steps = 10000) {
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double best = 0.0;
  for (int k = 0; k < steps; ++k) {
    // Offsets sit off the instance grid so no point lands exactly on an edge.
    const double offset = eps * (k + 0.381966) / steps;
    double h = 0.0;
    long long current = static_cast<long long>(std::floor((sorted[0] - offset) / eps));
    int run = 0;
    for (double x : sorted) {
      const long long b = static_cast<long long>(std::floor((x - offset) / eps));
      if (b != current) {
        h -= run / n * std::log2(run / n);
        current = b;
        run = 0;
      }
      ++run;
    }
    h -= run / n * std::log2(run / n);
    best = std::max(best, h);
  }
  return best;
}

// Random instance on a 1 us grid; eps is a whole number of grid steps no larger
// than 2 ms, so every partition interval is at least one grid step wide and
// a 10^4-point sweep cannot step over it.
struct Instance {
  std::vector<double> values;
  double epsilon;
};

inline Instance random_grid_instance(std::mt19937_64& rng, std::size_t max_n = 200) {
  std::uniform_int_distribution<std::size_t> n_dist(1, max_n);
  std::uniform_int_distribution<int> eps_steps(10, 2000);
  std::uniform_int_distribution<int> spread_steps(1, 30000);
  Instance inst;
  inst.epsilon = eps_steps(rng) / 1000.0;
  const std::size_t n = n_dist(rng);
  const int spread = spread_steps(rng);
  std::uniform_int_distribution<int> value_steps(0, spread);
  const double base = 250.0;
  for (std::size_t i = 0; i < n; ++i) inst.values.push_back(base + value_steps(rng) / 1000.0);
  return inst;
}

}  // namespace ibl::oracle

#endif  // IBL_TESTS_ORACLES_HPP
