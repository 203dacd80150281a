// Copyright 2026 The clvr Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "clvr/clvr_lazy.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "clvr/clvr_reference.hpp"
#include "clvr/error.hpp"
#include "oracles.hpp"

namespace clvr {
namespace {

std::vector<double> RandomVector(Index n, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> val(lo, hi);
  std::vector<double> v(n);
  for (double& e : v) e = val(rng);
  return v;
}

GlpInstance RandomLp(Index n, Index d, double density, std::mt19937_64& rng) {
  SparseMatrix a = oracle::RandomSparse(n, d, density, rng);
  std::vector<double> b = a.Multiply(RandomVector(d, 0.0, 1.0, rng));
  return GlpInstance::StandardLp(std::move(a), std::move(b), RandomVector(d, 0.0, 1.0, rng));
}

GlpInstance StronglyConvexGlp(Index n, Index d, double density, double sigma,
                              std::mt19937_64& rng) {
  SparseMatrix a = oracle::RandomSparse(n, d, density, rng);
  std::vector<double> b = a.Multiply(RandomVector(d, 0.0, 1.0, rng));
  std::vector<CoordSpec> specs(d, {Constraint::NonNegative(), Regularizer::Quadratic(sigma)});
  return GlpInstance(std::move(a), std::move(b), RandomVector(d, -1.0, 1.0, rng), specs);
}

double RelDist(const std::vector<double>& a, const std::vector<double>& b) {
  return oracle::Dist(a, b) / std::max(1.0, oracle::Norm(b));
}

TEST(ClvrLazyInit, RejectsBadCounts) {
  std::mt19937_64 rng(1);
  const GlpInstance p = RandomLp(4, 6, 0.5, rng);
  const BlockPartition part = PartitionRows(p.a(), 2);
  LazyParams params;
  params.iterations = 5;
  params.samples = 6;
  EXPECT_THROW(ClvrLazy(p, part, params, std::vector<double>(6, 0.0), std::vector<double>(4)),
               ParameterError);
  params.iterations = 0;
  params.samples = 0;
  EXPECT_THROW(ClvrLazy(p, part, params, std::vector<double>(6, 0.0), std::vector<double>(4)),
               ParameterError);
}

TEST(ClvrLazyInit, UniformWeightsWithoutStrongConvexity) {
  std::mt19937_64 rng(2);
  const GlpInstance p = RandomLp(6, 8, 0.4, rng);
  const BlockPartition part = PartitionRows(p.a(), 2);
  LazyParams params;
  params.iterations = 50;
  params.samples = 10;
  ClvrLazy s(p, part, params, std::vector<double>(8, 0.0), std::vector<double>(6, 0.0));
  for (Index k = 2; k <= 50; ++k) EXPECT_EQ(s.table().a[k], s.table().a[1]);
  ASSERT_EQ(s.sample_plan().size(), 10u);
  for (Index k = 1; k < 10; ++k) EXPECT_LE(s.sample_plan()[k - 1], s.sample_plan()[k]);
  for (Index idx : s.sample_plan()) {
    EXPECT_GE(idx, 1u);
    EXPECT_LE(idx, 50u);
  }
}

TEST(ClvrLazyInit, SampleFrequenciesFollowStepWeights) {
  std::mt19937_64 rng(3);
  const GlpInstance p = StronglyConvexGlp(4, 5, 0.6, 5.0, rng);
  const BlockPartition part = PartitionRows(p.a(), 1);
  const SparseMatrix at = p.a().Transpose();
  const Index k_max = 16;
  const Index plans = 6250;  // 10^5 draws in total
  std::vector<double> counts(k_max + 1, 0.0);
  ScheduleTable table;
  for (Index t = 0; t < plans; ++t) {
    LazyParams params;
    params.iterations = k_max;
    params.samples = k_max;
    params.plan_seed = 1000 + t;
    params.transpose = &at;
    params.gamma = 0.2;
    ClvrLazy s(p, part, params, std::vector<double>(5, 0.0), std::vector<double>(4, 0.0));
    for (Index idx : s.sample_plan()) counts[idx] += 1.0;
    if (t == 0) table = s.table();
  }
  const double draws = static_cast<double>(plans * k_max);
  // Weights must be visibly non-uniform for the check to mean anything.
  ASSERT_GT(table.a[k_max] / table.a[1], 1.5);
  for (Index k = 1; k <= k_max; ++k) {
    const double prob = table.a[k] / table.big_a[k_max];
    const double band = 3.0 * std::sqrt(draws * prob * (1.0 - prob));
    EXPECT_NEAR(counts[k], draws * prob, band) << "k=" << k;
  }
}

TEST(SamplePlanTest, UniformDrawsAreSortedOrderStatistics) {
  const StepSchedule schedule(1.0, 0.0, 1.0, 4);
  const Index k_max = 1000000, samples = 500;
  const double n = static_cast<double>(samples);
  // Kolmogorov-Smirnov critical value at the 1% level.
  const double critical = 1.63 / std::sqrt(n);
  const int plans = 200;
  int rejected = 0;
  for (int seed = 0; seed < plans; ++seed) {
    SamplePlan plan(schedule, k_max, samples, 700 + seed);
    std::vector<Index> drawn;
    for (Index k = plan.Next(); k != 0; k = plan.Next()) drawn.push_back(k);
    ASSERT_EQ(drawn.size(), samples);
    double ks = 0.0;
    for (Index i = 0; i < samples; ++i) {
      if (i > 0) ASSERT_LE(drawn[i - 1], drawn[i]);
      ASSERT_GE(drawn[i], 1u);
      ASSERT_LE(drawn[i], k_max);
      const double cdf = static_cast<double>(drawn[i]) / static_cast<double>(k_max);
      ks = std::max({ks, std::abs(cdf - static_cast<double>(i) / n),
                     std::abs(cdf - static_cast<double>(i + 1) / n)});
    }
    rejected += ks > critical;
  }
  // Two expected rejections; eight or more has probability below 0.1%.
  EXPECT_LT(rejected, 8);
}

TEST(SamplePlanTest, PrefixOfAHugeHorizonIsCheap) {
  const StepSchedule schedule(1.0, 0.0, 1.0, 4);
  const Index k_max = Index{1} << 40, samples = Index{1} << 30;
  SamplePlan plan(schedule, k_max, samples, 5);
  Index last = 0;
  for (int i = 0; i < 1000; ++i) {
    const Index k = plan.Next();
    EXPECT_GE(k, last);
    last = k;
  }
  // About 1000 K / K^ indices are spanned; walking all of K would take hours.
  EXPECT_LT(last, Index{4} << 20);
}

TEST(SamplePlanTest, FullUniformPlanVisitsEveryIndexOnce) {
  const StepSchedule schedule(1.0, 0.0, 1.0, 2);
  SamplePlan plan(schedule, 7, 7, 3);
  for (Index k = 1; k <= 7; ++k) EXPECT_EQ(plan.Next(), k);
  EXPECT_EQ(plan.Next(), 0u);
}

TEST(ClvrLazyIterate, SingleNonzeroRowsTouchOneCoordinate) {
  std::vector<Triplet> t;
  for (Index i = 0; i < 10; ++i) t.push_back({i, (3 * i) % 7, 1.0 + static_cast<double>(i)});
  const SparseMatrix a = SparseMatrix::FromTriplets(10, 7, t);
  const GlpInstance p = GlpInstance::StandardLp(a, std::vector<double>(10, 1.0),
                                                std::vector<double>(7, 1.0));
  const BlockPartition part = PartitionRows(p.a(), 1);
  LazyParams params;
  params.iterations = 100;
  ClvrLazy s(p, part, params, std::vector<double>(7, 0.0), std::vector<double>(10, 0.0));
  for (int k = 0; k < 100; ++k) {
    const std::vector<Index> before = s.stamps();
    s.Iterate();
    EXPECT_EQ(s.touched_last(), 2u);
    Index changed = 0;
    for (Index i = 0; i < 7; ++i) changed += s.stamps()[i] != before[i];
    EXPECT_EQ(changed, 1u);
  }
}

TEST(ClvrLazyIterate, WorkIsSupportSized) {
  std::mt19937_64 rng(4);
  const GlpInstance p = RandomLp(60, 80, 0.05, rng);
  const BlockPartition part = PartitionRows(p.a(), 5);
  LazyParams params;
  params.iterations = 300;
  params.samples = 3;
  ClvrLazy s(p, part, params, std::vector<double>(80, 0.0), std::vector<double>(60, 0.0));
  for (int k = 0; k < 300; ++k) {
    s.Iterate();
    const Index j = s.last_block();
    ASSERT_EQ(s.touched_last(), part.support(j).size() + part.block_rows(j));
    ASSERT_LT(s.touched_last(), 80u + 60u);
  }
  EXPECT_THROW(s.Iterate(), Error);
}

TEST(ClvrLazyIterate, MatchesReferenceDualAfterManySteps) {
  std::mt19937_64 rng(5);
  const GlpInstance p = RandomLp(6, 9, 0.4, rng);
  const BlockPartition part = PartitionRows(p.a(), 2);
  ClvrParams rp;
  rp.seed = 77;
  LazyParams lp;
  lp.seed = 77;
  lp.iterations = 500;
  ClvrReference ref(p, part, rp, std::vector<double>(9, 0.0), std::vector<double>(6, 0.0));
  ClvrLazy lazy(p, part, lp, std::vector<double>(9, 0.0), std::vector<double>(6, 0.0));
  for (int k = 0; k < 500; ++k) {
    ref.Iterate();
    lazy.Iterate();
  }
  EXPECT_LE(RelDist(lazy.y(), ref.y()), 1e-9);
}

TEST(ClvrLazyIterate, BookkeepingMatchesReferenceEveryStep) {
  std::mt19937_64 rng(6);
  for (Index bs : {1u, 4u}) {
    const GlpInstance p = StronglyConvexGlp(20, 30, 0.15, 0.3, rng);
    const BlockPartition part = PartitionRows(p.a(), bs);
    const std::vector<double> y0 = RandomVector(20, -1.0, 1.0, rng);
    ClvrParams rp;
    rp.seed = 5;
    rp.gamma = 0.5;
    LazyParams lp;
    lp.seed = 5;
    lp.gamma = 0.5;
    lp.iterations = 400;
    ClvrReference ref(p, part, rp, std::vector<double>(30, 0.0), y0);
    ClvrLazy lazy(p, part, lp, std::vector<double>(30, 0.0), y0);
    const oracle::Dense ad = oracle::ToDense(p.a());
    for (int k = 0; k < 400; ++k) {
      ref.Iterate();
      lazy.Iterate();
      ASSERT_EQ(lazy.last_block(), ref.last_block());
      ASSERT_LE(RelDist(lazy.z(), oracle::DenseMultiplyTranspose(ad, lazy.y())), 1e-10);
      ASSERT_LE(RelDist(lazy.Q(), ref.q()), 1e-10) << "k=" << k;
      ASSERT_LE(RelDist(lazy.YTilde(), ref.YTilde()), 1e-10) << "k=" << k;
    }
  }
}

TEST(ClvrLazyFlush, TracksReferenceTrajectory) {
  std::mt19937_64 rng(7);
  const GlpInstance p = RandomLp(15, 25, 0.2, rng);
  const BlockPartition part = PartitionRows(p.a(), 3);
  ClvrParams rp;
  rp.seed = 8;
  LazyParams lp;
  lp.seed = 8;
  lp.iterations = 300;
  ClvrReference ref(p, part, rp, std::vector<double>(25, 0.0), std::vector<double>(15, 0.0));
  ClvrLazy lazy(p, part, lp, std::vector<double>(25, 0.0), std::vector<double>(15, 0.0));
  for (int k = 0; k < 300; ++k) {
    ref.Iterate();
    lazy.Iterate();
    ASSERT_LE(RelDist(lazy.FlushX(), ref.NextX()), 1e-9) << "k=" << k;
  }
}

TEST(ClvrLazyFlush, RightAfterInitIsFirstProxStep) {
  std::mt19937_64 rng(8);
  const GlpInstance p = RandomLp(5, 7, 0.5, rng);
  const BlockPartition part = PartitionRows(p.a(), 1);
  const std::vector<double> x0 = RandomVector(7, 0.0, 1.0, rng);
  const std::vector<double> y0 = RandomVector(5, -1.0, 1.0, rng);
  LazyParams lp;
  lp.gamma = 2.0;
  lp.iterations = 10;
  ClvrLazy lazy(p, part, lp, x0, y0);
  const double a1 = lazy.table().a[1];
  const auto z0 = oracle::DenseMultiplyTranspose(oracle::ToDense(p.a()), y0);
  std::vector<double> want(7);
  for (Index i = 0; i < 7; ++i) {
    want[i] = std::max(0.0, x0[i] - (a1 / 2.0) * (z0[i] + p.c()[i]));
  }
  const std::vector<double> first = lazy.FlushX();
  EXPECT_LE(oracle::Dist(first, want), 1e-14);
  EXPECT_EQ(lazy.FlushX(), first);
}

TEST(ClvrLazyFlush, StampedCoordinatesMatchTheirIterate) {
  std::mt19937_64 rng(9);
  const GlpInstance p = RandomLp(30, 40, 0.08, rng);
  const BlockPartition part = PartitionRows(p.a(), 2);
  ClvrParams rp;
  rp.seed = 3;
  LazyParams lp;
  lp.seed = 3;
  lp.iterations = 200;
  ClvrReference ref(p, part, rp, std::vector<double>(40, 0.0), std::vector<double>(30, 0.0));
  ClvrLazy lazy(p, part, lp, std::vector<double>(40, 0.0), std::vector<double>(30, 0.0));
  std::vector<std::vector<double>> xs{ref.x0()};
  for (int k = 0; k < 200; ++k) {
    ref.Iterate();
    lazy.Iterate();
    xs.push_back(ref.x());
    for (Index i = 0; i < 40; ++i) {
      const double want = xs[lazy.stamps()[i]][i];
      ASSERT_NEAR(lazy.x_cache()[i], want, 1e-9 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST(ClvrLazyDual, AverageBeforeAndAfterIterations) {
  std::mt19937_64 rng(10);
  const GlpInstance p = RandomLp(8, 10, 0.3, rng);
  LazyParams lp;
  lp.iterations = 60;
  {
    const BlockPartition part = PartitionRows(p.a(), 2);
    ClvrLazy lazy(p, part, lp, std::vector<double>(10, 0.0), std::vector<double>(8, 0.0));
    EXPECT_EQ(lazy.YTilde(), std::vector<double>(8, 0.0));
  }
  // One block: y~ is the a-weighted plain average of the dual iterates.
  const BlockPartition part = PartitionRows(p.a(), 8);
  ClvrLazy lazy(p, part, lp, std::vector<double>(10, 0.0), std::vector<double>(8, 0.0));
  std::vector<double> acc(8, 0.0);
  for (Index k = 1; k <= 60; ++k) {
    lazy.Iterate();
    for (Index i = 0; i < 8; ++i) acc[i] += lazy.table().a[k] * lazy.y()[i];
  }
  for (double& v : acc) v /= lazy.table().big_a[60];
  EXPECT_LE(RelDist(lazy.YTilde(), acc), 1e-12);
}

TEST(ClvrLazyRun, FullPlanWithUniformWeightsIsExactAverage) {
  std::mt19937_64 rng(11);
  const GlpInstance p = RandomLp(12, 16, 0.25, rng);
  const BlockPartition part = PartitionRows(p.a(), 3);
  ClvrParams rp;
  rp.seed = 21;
  LazyParams lp;
  lp.seed = 21;
  lp.iterations = 120;
  lp.samples = 120;
  ClvrReference ref(p, part, rp, std::vector<double>(16, 0.0), std::vector<double>(12, 0.0));
  ClvrLazy lazy(p, part, lp, std::vector<double>(16, 0.0), std::vector<double>(12, 0.0));
  const ClvrOutput ro = ref.Run(120);
  const ClvrOutput lo = lazy.Run();
  EXPECT_EQ(lazy.samples_taken(), 120u);
  EXPECT_LE(RelDist(lo.x, ro.x), 1e-12);
  EXPECT_LE(RelDist(lo.y, ro.y), 1e-10);
}

TEST(ClvrLazyRun, NoSamplesReturnsFlushedPoint) {
  std::mt19937_64 rng(12);
  const GlpInstance p = RandomLp(6, 9, 0.4, rng);
  const BlockPartition part = PartitionRows(p.a(), 2);
  ClvrParams rp;
  LazyParams lp;
  lp.iterations = 40;
  ClvrReference ref(p, part, rp, std::vector<double>(9, 0.0), std::vector<double>(6, 0.0));
  ClvrLazy lazy(p, part, lp, std::vector<double>(9, 0.0), std::vector<double>(6, 0.0));
  ref.Run(40);
  const ClvrOutput lo = lazy.Run();
  EXPECT_TRUE(lazy.XHat().empty());
  EXPECT_LE(RelDist(lo.x, ref.NextX()), 1e-9);
  EXPECT_LE(RelDist(lo.y, ref.YTilde()), 1e-10);
  // One record per m iterations plus the final one.
  EXPECT_EQ(lo.history.size(), (40u + part.num_blocks() - 1) / part.num_blocks());
}

TEST(ClvrLazyRun, SampledAverageIsUnbiased) {
  std::mt19937_64 rng(13);
  const GlpInstance p = StronglyConvexGlp(10, 12, 0.3, 1.0, rng);
  const BlockPartition part = PartitionRows(p.a(), 2);
  const SparseMatrix at = p.a().Transpose();
  ClvrParams rp;
  rp.seed = 4;
  ClvrReference ref(p, part, rp, std::vector<double>(12, 0.0), std::vector<double>(10, 0.0));
  const ClvrOutput ro = ref.Run(64);
  const int runs = 200;
  std::vector<double> sum(12, 0.0), sum_sq(12, 0.0);
  for (int t = 0; t < runs; ++t) {
    LazyParams lp;
    lp.seed = 4;
    lp.iterations = 64;
    lp.samples = 8;
    lp.plan_seed = 5000 + t;
    lp.transpose = &at;
    ClvrLazy lazy(p, part, lp, std::vector<double>(12, 0.0), std::vector<double>(10, 0.0));
    const ClvrOutput lo = lazy.Run();
    for (Index i = 0; i < 12; ++i) {
      sum[i] += lo.x[i];
      sum_sq[i] += lo.x[i] * lo.x[i];
    }
  }
  for (Index i = 0; i < 12; ++i) {
    const double mean = sum[i] / runs;
    const double var = std::max(0.0, sum_sq[i] / runs - mean * mean) * runs / (runs - 1.0);
    const double se = std::sqrt(var / runs);
    EXPECT_LE(std::abs(mean - ro.x[i]), 4.0 * se + 1e-12) << "coordinate " << i;
  }
}

TEST(ClvrLazyRun, DefaultSampleCount) {
  EXPECT_EQ(DefaultSampleCount(1000, 500, 10, 100), 500u);
  EXPECT_EQ(DefaultSampleCount(1000, 1, 10, 100), 1u);
  EXPECT_EQ(DefaultSampleCount(10, 5000, 1, 10), 10u);
  EXPECT_EQ(DefaultSampleCount(0, 5, 1, 1), 0u);
}

}  // namespace
}  // namespace clvr
