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

// Lazy-update CLVR solver.
//
// Produces the same iterates as ClvrReference for the same seed while doing
// O(nnz(A^{S_j})) work per iteration. The linear functional q is never
// stored; it is recovered on demand from
//
//   q_k = A_{k+1} (c + z_k) + r_k,   r_k = r_{k-1} + (m a_k - A_k)(z_k - z_{k-1}),
//
// and the affine dual average from
//
//   y~_k = y_k + s_k / A_k,          s_k = s_{k-1} + ((m - 1) a_k - A_{k-1})(y_k - y_{k-1}).
//
// Both corrections change only on the sampled block's support. The primal
// output is the average of full primal points at K^ iteration indices drawn
// with probabilities a_k / A_K, an unbiased estimate of x~_K. The schedule
// and the plan are produced as iterations advance, so a run stopped early
// costs nothing for the unused tail of the horizon.

#ifndef CLVR_CLVR_LAZY_HPP_
#define CLVR_CLVR_LAZY_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "clvr/clvr_reference.hpp"
#include "clvr/glp.hpp"
#include "clvr/rng.hpp"
#include "clvr/sparse_matrix.hpp"
#include "clvr/step_schedule.hpp"

namespace clvr {

struct LazyParams {
  double gamma = 1.0;
  std::uint64_t seed = 0;  // block sampling; matches ClvrParams::seed
  double l_hat = 0.0;      // 0 selects the partition's estimate
  Index iterations = 1;    // K
  Index samples = 0;       // K^, at most K
  // Seed of the output sample plan; defaults to a stream derived from seed.
  std::optional<std::uint64_t> plan_seed;
  // Optional precomputed A^T for the drift guard; must outlive the solver.
  const SparseMatrix* transpose = nullptr;
};

// K^ proportional to K nnz(A) / (m d), clamped to [1, K].
Index DefaultSampleCount(Index iterations, Index nnz, Index m, Index d);

// K^ i.i.d. draws from {1..K} with P(k) = a_k / A_K, emitted in nondecreasing
// order one at a time. Sorted uniforms come from the sequential order
// statistic recursion, so drawing a prefix costs time proportional to the
// indices it spans. With uniform weights and K^ = K every index is emitted
// once instead, which makes x^ equal to x~ exactly.
class SamplePlan {
 public:
  SamplePlan(const StepSchedule& schedule, Index iterations, Index samples,
             std::uint64_t seed);

  // Next index, or 0 once all K^ are drawn.
  Index Next();

 private:
  StepSchedule walk_;  // advanced to the last emitted index
  Index k_max_;
  Index remaining_;
  bool exhaustive_;
  double big_a_total_ = 0.0;
  double log_tail_ = 0.0;  // log(1 - u) of the last sorted uniform
  Rng rng_;
};

class ClvrLazy {
 public:
  // p and part must outlive the solver. Throws ParameterError for K = 0,
  // K^ > K or gamma <= 0.
  ClvrLazy(const GlpInstance& p, const BlockPartition& part,
           const LazyParams& params, std::vector<double> x0,
           std::vector<double> y0);

  // One iteration. Throws Error once K iterations have run.
  void Iterate();

  // Materializes every coordinate of x_{k+1}, the point the next iteration
  // would use, and refreshes the coordinate cache. O(d).
  std::vector<double> FlushX();

  // y + s / A_k (y_0 before the first iteration). O(n).
  std::vector<double> YTilde() const;

  // Average of the sampled primal points with index <= k; empty if none.
  std::vector<double> XHat() const;

  // Runs the remaining iterations and returns (x^, y~); with K^ = 0 the
  // primal output is the final flushed point.
  ClvrOutput Run(Index history_every = 0);

  Index iteration() const { return k_; }
  Index total_iterations() const { return k_max_; }
  Index samples_taken() const { return samples_taken_; }
  Index last_block() const { return last_block_; }

  const std::vector<double>& y() const { return y_; }
  const std::vector<double>& z() const { return z_; }
  const std::vector<double>& r() const { return r_; }
  const std::vector<double>& s() const { return s_; }
  const std::vector<double>& x_cache() const { return x_cache_; }
  const std::vector<Index>& stamps() const { return stamps_; }
  // The full plan and schedule over K. O(K) per call; for diagnostics.
  std::vector<Index> sample_plan() const;
  ScheduleTable table() const;

  // q_k rebuilt from z and r. O(d); for diagnostics.
  std::vector<double> Q() const;

  // Primal plus dual coordinates written by the last iteration, excluding
  // output flushes.
  Index touched_last() const { return touched_last_; }
  double touched_nnz() const { return touched_nnz_; }
  Index drift_repairs() const { return drift_repairs_; }

 private:
  double XCoord(Index i, double big_a_next) const;
  void FullPrimal(Index stamp, double big_a_next);
  void GuardDrift();
  // Extends the schedule table through index k (at most K + 1).
  void EnsureTable(Index k);

  const GlpInstance* p_;
  const BlockPartition* part_;
  SparseMatrix at_owned_;
  const SparseMatrix* at_;  // A^T for the drift guard
  double gamma_;
  Index k_max_;
  Index samples_;
  std::uint64_t plan_seed_;
  StepSchedule schedule_;  // unadvanced
  StepSchedule grow_;      // advanced to the end of table_
  ScheduleTable table_;
  Rng rng_;
  Rng guard_rng_;
  SamplePlan plan_;
  Index next_sample_ = 0;
  Index k_ = 0;

  std::vector<double> x0_, y_, z_, r_, s_;
  std::vector<double> x_cache_;
  std::vector<Index> stamps_;
  std::vector<double> x_hat_acc_;
  Index samples_taken_ = 0;

  std::vector<double> buf_rows_, buf_cols_, buf_dy_;
  Index last_block_ = 0;
  Index touched_last_ = 0;
  double touched_nnz_ = 0.0;
  Index drift_repairs_ = 0;
};

}  // namespace clvr

#endif  // CLVR_CLVR_LAZY_HPP_
