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

#include "clvr/sparse_matrix.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "clvr/error.hpp"
#include "oracles.hpp"

namespace clvr {
namespace {

using oracle::Dense;

TEST(FromTriplets, SingleEntry) {
  const std::vector<Triplet> t{{0, 0, 1.0}};
  const SparseMatrix a = SparseMatrix::FromTriplets(1, 1, t);
  EXPECT_EQ(a.nnz(), 1u);
  EXPECT_EQ(a.values()[0], 1.0);
}

TEST(FromTriplets, CancellingDuplicatesAreDropped) {
  const std::vector<Triplet> t{{0, 0, 2.0}, {0, 0, -2.0}};
  const SparseMatrix a = SparseMatrix::FromTriplets(1, 1, t);
  EXPECT_EQ(a.nnz(), 0u);
  EXPECT_EQ(a.n_rows(), 1u);
  EXPECT_EQ(a.n_cols(), 1u);
}

TEST(FromTriplets, MatchesDenseAccumulation) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<Index> row(0, 1), col(0, 2);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Triplet> t;
    for (int e = 0; e < 3; ++e) t.push_back({row(rng), col(rng), val(rng)});
    const SparseMatrix a = SparseMatrix::FromTriplets(2, 3, t);
    EXPECT_EQ(oracle::ToDense(a), oracle::Accumulate(2, 3, t));
  }
}

TEST(FromTriplets, OutOfRangeNamesTheEntry) {
  const std::vector<Triplet> t{{0, 0, 1.0}, {2, 0, 1.0}};
  try {
    SparseMatrix::FromTriplets(2, 2, t);
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("(2, 0)"), std::string::npos) << e.what();
  }
}

TEST(FromTriplets, CanonicalInvariants) {
  std::mt19937_64 rng(3);
  const SparseMatrix a = oracle::RandomSparse(30, 40, 0.2, rng);
  const auto rp = a.row_ptr();
  EXPECT_EQ(rp[0], 0u);
  EXPECT_EQ(rp[a.n_rows()], a.nnz());
  for (Index i = 0; i < a.n_rows(); ++i) {
    EXPECT_LE(rp[i], rp[i + 1]);
    const auto cols = a.row_cols(i);
    for (Index e = 0; e < cols.size(); ++e) {
      EXPECT_LT(cols[e], a.n_cols());
      if (e > 0) EXPECT_LT(cols[e - 1], cols[e]);
    }
  }
  for (double v : a.values()) EXPECT_NE(v, 0.0);
}

TEST(FromTriplets, RoundTripsThroughTriplets) {
  std::mt19937_64 rng(11);
  const SparseMatrix a = oracle::RandomSparse(12, 9, 0.3, rng);
  const std::vector<Triplet> t = a.ToTriplets();
  EXPECT_EQ(SparseMatrix::FromTriplets(12, 9, t), a);
}

TEST(FromCsr, RejectsBrokenInvariants) {
  EXPECT_THROW(SparseMatrix::FromCsr(1, 2, {0, 2}, {1, 0}, {1.0, 1.0}), DimensionError);
  EXPECT_THROW(SparseMatrix::FromCsr(1, 2, {0, 1}, {2}, {1.0}), DimensionError);
  EXPECT_THROW(SparseMatrix::FromCsr(1, 2, {0, 1}, {0}, {0.0}), Error);
  EXPECT_THROW(SparseMatrix::FromCsr(2, 2, {0, 1}, {0}, {1.0}), Error);
  EXPECT_NO_THROW(SparseMatrix::FromCsr(1, 2, {0, 2}, {0, 1}, {1.0, 2.0}));
}

TEST(Transpose, MatchesDense) {
  std::mt19937_64 rng(5);
  const SparseMatrix a = oracle::RandomSparse(8, 13, 0.3, rng);
  const Dense ad = oracle::ToDense(a);
  const Dense at = oracle::ToDense(a.Transpose());
  for (Index i = 0; i < 8; ++i) {
    for (Index j = 0; j < 13; ++j) EXPECT_EQ(ad[i][j], at[j][i]);
  }
}

TEST(Multiply, Identity) {
  const std::vector<Triplet> t{{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}};
  const SparseMatrix a = SparseMatrix::FromTriplets(3, 3, t);
  const std::vector<double> x{1.0, 2.0, 3.0};
  EXPECT_EQ(a.Multiply(x), x);
  EXPECT_EQ(a.MultiplyTranspose(x), x);
}

TEST(Multiply, MatchesDenseOracle) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  const SparseMatrix a = oracle::RandomSparse(5, 7, 0.4, rng);
  const Dense ad = oracle::ToDense(a);
  std::vector<double> x(7), y(5);
  for (double& v : x) v = val(rng);
  for (double& v : y) v = val(rng);
  const auto ax = a.Multiply(x);
  const auto ax_ref = oracle::DenseMultiply(ad, x);
  const auto aty = a.MultiplyTranspose(y);
  const auto aty_ref = oracle::DenseMultiplyTranspose(ad, y);
  for (Index i = 0; i < 5; ++i) EXPECT_NEAR(ax[i], ax_ref[i], 1e-14);
  for (Index j = 0; j < 7; ++j) EXPECT_NEAR(aty[j], aty_ref[j], 1e-14);
}

TEST(Multiply, DimensionMismatchThrows) {
  std::mt19937_64 rng(1);
  const SparseMatrix a = oracle::RandomSparse(3, 4, 0.5, rng);
  EXPECT_THROW(a.Multiply(std::vector<double>(3)), DimensionError);
  EXPECT_THROW(a.MultiplyTranspose(std::vector<double>(4)), DimensionError);
}

TEST(PartitionRows, CeilingBlockCount) {
  std::mt19937_64 rng(2);
  const SparseMatrix a = oracle::RandomSparse(5, 4, 0.5, rng);
  const BlockPartition part = PartitionRows(a, 2);
  ASSERT_EQ(part.num_blocks(), 3u);
  EXPECT_EQ(part.block_rows(0), 2u);
  EXPECT_EQ(part.block_rows(1), 2u);
  EXPECT_EQ(part.block_rows(2), 1u);
  for (Index i = 0; i < 5; ++i) EXPECT_EQ(part.block_of_row[i], i / 2);
  EXPECT_EQ(part.rows_of_block(2), std::vector<Index>{4});
}

TEST(PartitionRows, RejectsBadBlockSize) {
  std::mt19937_64 rng(2);
  const SparseMatrix a = oracle::RandomSparse(5, 4, 0.5, rng);
  EXPECT_THROW(PartitionRows(a, 0), ParameterError);
  EXPECT_THROW(PartitionRows(a, 6), ParameterError);
}

TEST(PartitionRows, UnitBlocksGiveRowNormBound) {
  std::mt19937_64 rng(9);
  const SparseMatrix a = oracle::RandomSparse(20, 15, 0.3, rng);
  const BlockPartition part = PartitionRows(a, 1);
  double r = 0.0;
  for (Index i = 0; i < 20; ++i) r = std::max(r, a.RowNorm(i));
  EXPECT_DOUBLE_EQ(part.max_row_norm, r);
  EXPECT_DOUBLE_EQ(part.l_hat, r);
}

TEST(PartitionRows, SingleBlockGivesSpectralNorm) {
  std::mt19937_64 rng(21);
  const SparseMatrix a = oracle::RandomSparse(4, 6, 0.7, rng);
  const BlockPartition part = PartitionRows(a, 4);
  const double sv = oracle::SpectralNorm(oracle::ToDense(a));
  EXPECT_GE(part.l_hat, sv * (1.0 - 1e-12));
  EXPECT_LE(part.l_hat, sv * (1.0 + kDefaultNormTolerance));
}

TEST(PartitionRows, SupportsAreExactlyTheNonzeroColumns) {
  std::mt19937_64 rng(4);
  const SparseMatrix a = oracle::RandomSparse(17, 23, 0.1, rng);
  const Dense ad = oracle::ToDense(a);
  const BlockPartition part = PartitionRows(a, 4);
  for (Index j = 0; j < part.num_blocks(); ++j) {
    std::vector<Index> expected;
    for (Index c = 0; c < 23; ++c) {
      bool any = false;
      for (Index r = part.row_begin(j); r < part.row_end(j); ++r) any |= ad[r][c] != 0.0;
      if (any) expected.push_back(c);
    }
    const auto sup = part.support(j);
    EXPECT_EQ(std::vector<Index>(sup.begin(), sup.end()), expected);
  }
}

TEST(PartitionRows, NormBracketAndRowDominance) {
  std::mt19937_64 rng(8);
  const SparseMatrix a = oracle::RandomSparse(40, 30, 0.2, rng);
  for (Index bs : {1u, 3u, 7u, 40u}) {
    const BlockPartition part = PartitionRows(a, bs);
    EXPECT_LE(part.max_row_norm, part.l_hat);
    EXPECT_LE(part.l_hat, std::sqrt(static_cast<double>(bs)) * part.max_row_norm * (1 + 1e-6));
    for (Index j = 0; j < part.num_blocks(); ++j) {
      for (Index r = part.row_begin(j); r < part.row_end(j); ++r) {
        EXPECT_GE(part.block_norms[j], a.RowNorm(r));
      }
    }
  }
}

TEST(BlockOperatorNorm, Identity) {
  const std::vector<Triplet> t{{0, 0, 1.0}, {1, 1, 1.0}};
  const SparseMatrix a = SparseMatrix::FromTriplets(2, 2, t);
  const std::vector<Index> rows{0, 1};
  EXPECT_NEAR(BlockOperatorNorm(a, rows), 1.0, 1e-6);
  EXPECT_GE(BlockOperatorNorm(a, rows), 1.0);
}

TEST(BlockOperatorNorm, SingleRowIsRowNorm) {
  const std::vector<Triplet> t{{0, 0, 3.0}, {0, 1, 4.0}};
  const SparseMatrix a = SparseMatrix::FromTriplets(1, 2, t);
  EXPECT_EQ(BlockOperatorNorm(a, std::vector<Index>{0}), 5.0);
}

TEST(BlockOperatorNorm, SmallBlockMatchesSvd) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const SparseMatrix a = oracle::RandomSparse(3, 3, 0.9, rng);
    const std::vector<Index> rows{0, 1, 2};
    const double sv = oracle::SpectralNorm(oracle::ToDense(a));
    const double est = BlockOperatorNorm(a, rows, 1e-8);
    EXPECT_GE(est, sv * (1.0 - 1e-13));
    EXPECT_LE(est, sv * (1.0 + 1e-8));
  }
}

TEST(BlockOperatorNorm, LargeBlockMatchesSvd) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 5; ++trial) {
    const SparseMatrix a = oracle::RandomSparse(60, 50, 0.1, rng);
    std::vector<Index> rows(60);
    for (Index i = 0; i < 60; ++i) rows[i] = i;
    const double sv = oracle::SpectralNorm(oracle::ToDense(a));
    const double est = BlockOperatorNorm(a, rows, 1e-6);
    EXPECT_GE(est, sv * (1.0 - 1e-9));
    EXPECT_LE(est, sv * (1.0 + 1e-6));
  }
}

TEST(BlockOperatorNorm, EmptyAndZeroBlocks) {
  const std::vector<Triplet> t{{1, 0, 2.0}};
  const SparseMatrix a = SparseMatrix::FromTriplets(2, 2, t);
  EXPECT_THROW(BlockOperatorNorm(a, std::vector<Index>{}), ParameterError);
  EXPECT_EQ(BlockOperatorNorm(a, std::vector<Index>{0}), 0.0);
}

TEST(BlockKernels, ScatterMatchesFullProducts) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  const SparseMatrix a = oracle::RandomSparse(11, 9, 0.3, rng);
  const BlockPartition part = PartitionRows(a, 3);
  std::vector<double> x(9);
  for (double& v : x) v = val(rng);
  const std::vector<double> ax = a.Multiply(x);
  for (Index j = 0; j < part.num_blocks(); ++j) {
    const auto sup = part.support(j);
    std::vector<double> xs(sup.size());
    for (Index t = 0; t < sup.size(); ++t) xs[t] = x[sup[t]];
    const std::vector<double> out = BlockMultiply(a, part, j, xs);
    ASSERT_EQ(out.size(), part.block_rows(j));
    for (Index t = 0; t < out.size(); ++t) EXPECT_EQ(out[t], ax[part.row_begin(j) + t]);

    std::vector<double> ys(part.block_rows(j));
    for (double& v : ys) v = val(rng);
    std::vector<double> y_full(11, 0.0);
    for (Index t = 0; t < ys.size(); ++t) y_full[part.row_begin(j) + t] = ys[t];
    const std::vector<double> full = a.MultiplyTranspose(y_full);
    const std::vector<double> blk = BlockMultiplyTranspose(a, part, j, ys);
    std::vector<double> scattered(9, 0.0);
    for (Index t = 0; t < sup.size(); ++t) scattered[sup[t]] = blk[t];
    for (Index c = 0; c < 9; ++c) EXPECT_NEAR(scattered[c], full[c], 1e-15);
  }
}

TEST(BlockKernels, DimensionMismatchThrows) {
  std::mt19937_64 rng(13);
  const SparseMatrix a = oracle::RandomSparse(6, 6, 0.5, rng);
  const BlockPartition part = PartitionRows(a, 2);
  EXPECT_THROW(BlockMultiply(a, part, 0, std::vector<double>(part.support(0).size() + 1)),
               DimensionError);
  EXPECT_THROW(BlockMultiplyTranspose(a, part, 0, std::vector<double>(3)), DimensionError);
}

TEST(NormalizeRows, ForcedScaling) {
  const std::vector<Triplet> t{{0, 0, 3.0}, {0, 1, 4.0}};
  const SparseMatrix a = SparseMatrix::FromTriplets(1, 2, t);
  const NormalizedSystem s = NormalizeRows(a, std::vector<double>{10.0});
  EXPECT_EQ(s.a.values()[0], 0.6);
  EXPECT_EQ(s.a.values()[1], 0.8);
  EXPECT_EQ(s.b[0], 2.0);
  EXPECT_DOUBLE_EQ(s.scale[0], 0.2);
}

TEST(NormalizeRows, UnitRowsUnchanged) {
  const std::vector<Triplet> t{{0, 0, 1.0}, {1, 1, -1.0}, {2, 0, 0.6}, {2, 2, 0.8}};
  const SparseMatrix a = SparseMatrix::FromTriplets(3, 3, t);
  const std::vector<double> b{1.0, 2.0, 3.0};
  const NormalizedSystem s = NormalizeRows(a, b);
  EXPECT_EQ(s.a, a);
  EXPECT_EQ(s.b, b);
}

TEST(NormalizeRows, KeepsFeasibleSetAndReportsZeroRows) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> val(-3.0, 3.0);
  std::vector<Triplet> t = oracle::RandomSparse(15, 10, 0.3, rng).ToTriplets();
  for (Triplet& e : t) e.value *= 7.0;
  std::vector<Triplet> kept;
  for (const Triplet& e : t) {
    if (e.row != 4) kept.push_back(e);
  }
  const SparseMatrix a = SparseMatrix::FromTriplets(15, 10, kept);
  std::vector<double> x(10);
  for (double& v : x) v = val(rng);
  const std::vector<double> b = a.Multiply(x);
  const NormalizedSystem s = NormalizeRows(a, b);
  EXPECT_EQ(s.zero_rows, std::vector<Index>{4});
  const std::vector<double> ax = s.a.Multiply(x);
  for (Index i = 0; i < 15; ++i) EXPECT_NEAR(ax[i], s.b[i], 1e-12);
  const BlockPartition part = PartitionRows(s.a, 1);
  EXPECT_NEAR(part.max_row_norm, 1.0, 1e-12);
  for (Index i = 0; i < 15; ++i) {
    if (i != 4) EXPECT_NEAR(s.a.RowNorm(i), 1.0, 1e-12);
  }
}

}  // namespace
}  // namespace clvr
