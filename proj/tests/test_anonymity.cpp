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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ibl/error.hpp"
#include "ibl/traffic_sim.hpp"
#include "oracles.hpp"

namespace ibl {
namespace {

Errc error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::InvalidConfig;
}

std::vector<std::size_t> counts_of(const Histogram& h) {
  std::vector<std::size_t> out;
  for (const auto& b : h.bins) out.push_back(b.count);
  return out;
}

TEST(Histogram, Examples) {
  const std::vector<double> same{1, 1, 1};
  EXPECT_EQ(counts_of(histogram(same, 0.25, 0)), (std::vector<std::size_t>{3}));

  const std::vector<double> spread{0, 10, 20};
  const Histogram h = histogram(spread, 1, 0);
  EXPECT_EQ(counts_of(h), (std::vector<std::size_t>{1, 1, 1}));
  EXPECT_EQ(h.bins[1].index, 10);
  EXPECT_EQ(h.n, 3u);

  const std::vector<double> straddle{0.24, 0.26};
  EXPECT_EQ(histogram(straddle, 0.25, 0).bins.size(), 2u);
}

TEST(Histogram, LeftClosedRightOpen) {
  const std::vector<double> xs{0.0, 1.0, 1.999, 2.0};
  const Histogram h = histogram(xs, 1.0, 0.0);
  ASSERT_EQ(h.bins.size(), 3u);
  EXPECT_EQ(h.bins[0], (Bin{0, 1}));
  EXPECT_EQ(h.bins[1], (Bin{1, 2}));
  EXPECT_EQ(h.bins[2], (Bin{2, 1}));
  EXPECT_EQ(h.lower_edge(h.bins[1]), 1.0);

  const Histogram shifted = histogram(xs, 1.0, 0.5);
  EXPECT_EQ(shifted.bins.front().index, -1);
}

TEST(Histogram, Errors) {
  const std::vector<double> xs{1.0};
  EXPECT_EQ(error_of([] { histogram({}, 1.0, 0.0); }), Errc::EmptyData);
  EXPECT_EQ(error_of([&] { histogram(xs, 0.0, 0.0); }), Errc::NonPositiveEpsilon);
  EXPECT_EQ(error_of([&] { histogram(xs, -1.0, 0.0); }), Errc::NonPositiveEpsilon);
  EXPECT_EQ(error_of([&] { histogram(xs, 1.0, 1.0); }), Errc::InvalidConfig);
}

TEST(Entropy, Examples) {
  const std::vector<double> one_bin(8, 3.0);
  EXPECT_EQ(entropy(histogram(one_bin, 1, 0)), 0.0);

  std::vector<double> singletons;
  for (int i = 0; i < 16; ++i) singletons.push_back(i);
  EXPECT_NEAR(entropy(histogram(singletons, 1, 0)), 4.0, 1e-12);

  const std::vector<double> xs{0.1, 1.1, 2.1, 2.2};
  EXPECT_NEAR(entropy(histogram(xs, 1, 0)), 1.5, 1e-12);
}

TEST(MaxEntropy, IdenticalPointsHaveZeroEntropy) {
  const std::vector<double> xs{1, 1, 1};
  for (double eps : {0.01, 0.25, 3.0}) {
    EXPECT_EQ(max_entropy(xs, eps).bits, 0.0);
  }
}

TEST(MaxEntropy, PeriodicBoundariesLimitThePartition) {
  const std::vector<double> xs{0, 0.3, 0.6, 0.9};
  EXPECT_NEAR(oracle::dense_sweep_max_entropy(xs, 0.5), 1.5, 1e-12);
  const EntropyMax best = max_entropy(xs, 0.5);
  EXPECT_NEAR(best.bits, 1.5, 1e-12);
  EXPECT_NEAR(entropy(histogram(xs, 0.5, best.offset_ms)), best.bits, 1e-15);
}

TEST(MaxEntropy, SyntheticFleetMeansMatchDenseSweep) {
  const auto profiles = table1_profiles();
  std::mt19937_64 rng(2022);
  std::uniform_int_distribution<std::size_t> pick(0, profiles.size() - 1);
  std::vector<double> means;
  for (int i = 0; i < 121; ++i) {
    const auto& p = profiles[pick(rng)];
    const double m = std::normal_distribution<double>(p.ibl_mean_ms, p.pseudonym_sigma_ms)(rng);
    means.push_back(std::round(m * 1000.0) / 1000.0);
  }
  const EntropyMax best = max_entropy(means, 0.25);
  EXPECT_NEAR(best.bits, oracle::dense_sweep_max_entropy(means, 0.25), 1e-9);
  EXPECT_GT(best.bits, 2.0);
}

TEST(MaxEntropy, MatchesDenseSweepOnRandomInstances) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 150; ++i) {
    const auto inst = oracle::random_grid_instance(rng);
    const double exact = max_entropy(inst.values, inst.epsilon).bits;
    EXPECT_NEAR(exact, oracle::dense_sweep_max_entropy(inst.values, inst.epsilon), 1e-9)
        << "instance " << i << " n=" << inst.values.size() << " eps=" << inst.epsilon;
  }
}

TEST(MaxEntropy, ParallelKernelAgreesWithReference) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const auto inst = oracle::random_grid_instance(rng);
    const EntropyMax ref = max_entropy_reference(inst.values, inst.epsilon);
    for (int threads : {1, 2, 4}) {
      const EntropyMax par = max_entropy(inst.values, inst.epsilon, threads);
      EXPECT_EQ(par.bits, ref.bits);
      EXPECT_EQ(par.offset_ms, ref.offset_ms);
    }
  }
}

TEST(MaxEntropy, WitnessOffsetAchievesTheMaximum) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto inst = oracle::random_grid_instance(rng);
    const EntropyMax best = max_entropy(inst.values, inst.epsilon);
    EXPECT_GE(best.offset_ms, 0.0);
    EXPECT_LT(best.offset_ms, inst.epsilon);
    EXPECT_EQ(entropy(histogram(inst.values, inst.epsilon, best.offset_ms)), best.bits);
    for (double c : candidate_offsets(inst.values, inst.epsilon)) {
      EXPECT_GE(c, 0.0);
      EXPECT_LT(c, inst.epsilon);
    }
  }
}

TEST(MaxEntropyProperty, BoundsAndTranslationInvariance) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> shift(-100.0, 100.0);
  for (int i = 0; i < 200; ++i) {
    const auto inst = oracle::random_grid_instance(rng);
    const double h = max_entropy(inst.values, inst.epsilon).bits;
    const double n = static_cast<double>(inst.values.size());
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, std::log2(n) + 1e-12);

    auto moved = inst.values;
    const double c = shift(rng);
    for (auto& x : moved) x += c;
    EXPECT_NEAR(max_entropy(moved, inst.epsilon).bits, h, 1e-9);
  }
}

TEST(MaxEntropyProperty, CoarseningNeverGainsEntropy) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> factor(1, 6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const auto inst = oracle::random_grid_instance(rng);
    const int m = factor(rng);
    const double coarse = m * inst.epsilon;
    const double offset = unit(rng) * inst.epsilon;
    EXPECT_LE(entropy(histogram(inst.values, coarse, offset)),
              entropy(histogram(inst.values, inst.epsilon, offset)) + 1e-12);
    EXPECT_LE(max_entropy(inst.values, coarse).bits,
              max_entropy(inst.values, inst.epsilon).bits + 1e-12);
  }
}

TEST(MaxEntropy, Errors) {
  const std::vector<double> xs{1.0, 2.0};
  EXPECT_EQ(error_of([] { max_entropy({}, 0.25); }), Errc::EmptyData);
  EXPECT_EQ(error_of([&] { max_entropy(xs, 0.0); }), Errc::NonPositiveEpsilon);
}

TEST(AnonymityDegree, FieldExperimentArithmetic) {
  EXPECT_NEAR(anonymity_degree(4.88, 121), 1.0 - 4.88 / std::log2(121.0), 1e-15);
  EXPECT_NEAR(anonymity_degree(4.88, 121), 0.2946, 0.0005);
  EXPECT_NEAR(std::exp2(4.88), 29.4, 0.1);
  EXPECT_EQ(anonymity_degree(0.0, 121), 1.0);
  EXPECT_EQ(anonymity_degree(std::log2(121.0), 121), 0.0);
  EXPECT_EQ(error_of([] { anonymity_degree(0.0, 1); }), Errc::SinglePoint);
}

TEST(FingerprintingAnonymity, Extremes) {
  const std::vector<double> same(121, 283.04);
  const AnonymityReport none = fingerprinting_anonymity(same, 0.25);
  EXPECT_EQ(none.entropy_bits, 0.0);
  EXPECT_EQ(none.anonymity, 1.0);
  EXPECT_EQ(none.distinguishable_devices, 1.0);
  EXPECT_EQ(none.n, 121u);

  std::vector<double> apart;
  for (int i = 0; i < 64; ++i) apart.push_back(260.0 + 0.5 * i);
  const AnonymityReport all = fingerprinting_anonymity(apart, 0.25);
  EXPECT_NEAR(all.entropy_bits, 6.0, 1e-12);
  EXPECT_NEAR(all.anonymity, 0.0, 1e-12);
  EXPECT_NEAR(all.distinguishable_devices, 64.0, 1e-9);
  EXPECT_EQ(all.histogram.bins.size(), 64u);
}

TEST(FingerprintingAnonymity, ReportIsConsistent) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 50; ++i) {
    auto inst = oracle::random_grid_instance(rng);
    if (inst.values.size() < 2) inst.values.push_back(inst.values.front());
    const auto r = fingerprinting_anonymity(inst.values, inst.epsilon, 2);
    EXPECT_GE(r.anonymity, 0.0);
    EXPECT_LE(r.anonymity, 1.0);
    EXPECT_NEAR(r.anonymity, 1.0 - r.entropy_bits / std::log2(double(r.n)), 1e-12);
    EXPECT_EQ(entropy(r.histogram), r.entropy_bits);
    EXPECT_EQ(r.histogram.offset_ms, r.best_offset_ms);
  }
}

TEST(FingerprintingAnonymity, Errors) {
  const std::vector<double> one{283.0};
  EXPECT_EQ(error_of([] { fingerprinting_anonymity({}, 0.25); }), Errc::EmptyData);
  EXPECT_EQ(error_of([&] { fingerprinting_anonymity(one, 0.25); }), Errc::SinglePoint);
}

TEST(RenderHistogramSvg, HasBarsAndAxisLabels) {
  const std::vector<double> xs{270.0, 270.1, 283.0, 283.05, 286.3};
  const auto h = histogram(xs, 0.25, 0.0);
  const std::string svg = render_histogram_svg(h);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("IBL mean in ms"), std::string::npos);
  EXPECT_NE(svg.find("pseudonyms in bin"), std::string::npos);
  std::size_t bars = 0;
  for (auto pos = svg.find("<title>"); pos != std::string::npos; pos = svg.find("<title>", pos + 1)) {
    ++bars;
  }
  EXPECT_EQ(bars, h.bins.size());
}

}  // namespace
}  // namespace ibl
