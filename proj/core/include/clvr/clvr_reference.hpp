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

// Reference CLVR solver with dense bookkeeping.
//
// Every iteration samples one row block j uniformly, computes the full primal
// point by a dual-averaging prox step from the anchor x_0, moves the dual
// variables of block j and folds the change of z = A^T y into the running
// linear functional q with the extrapolation term m a_k (z_k - z_{k-1}).
// Averages are accumulated eagerly, which costs O(n + d) per iteration; use
// ClvrLazy for large problems.

#ifndef CLVR_CLVR_REFERENCE_HPP_
#define CLVR_CLVR_REFERENCE_HPP_

#include <cstdint>
#include <vector>

#include "clvr/glp.hpp"
#include "clvr/metrics.hpp"
#include "clvr/rng.hpp"
#include "clvr/sparse_matrix.hpp"
#include "clvr/step_schedule.hpp"

namespace clvr {

struct ClvrParams {
  double gamma = 1.0;
  std::uint64_t seed = 0;
  // Block norm bound used by the step schedule; 0 selects the partition's.
  double l_hat = 0.0;
};

// Averaged output of a run plus the checkpoint history.
struct ClvrOutput {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<MetricsRecord> history;
};

class ClvrReference {
 public:
  // p and part must outlive the solver. x0 must lie in X. Throws
  // ParameterError for gamma <= 0 and DimensionError on size mismatch.
  ClvrReference(const GlpInstance& p, const BlockPartition& part,
                const ClvrParams& params, std::vector<double> x0,
                std::vector<double> y0);

  void Iterate();

  // Runs that many more iterations and returns (x~, y~). A checkpoint
  // record is taken every history_every iterations (0 selects m).
  ClvrOutput Run(Index iterations, Index history_every = 0);

  Index iteration() const { return schedule_.k(); }
  const StepSchedule& schedule() const { return schedule_; }
  Index last_block() const { return last_block_; }

  const std::vector<double>& x0() const { return x0_; }
  const std::vector<double>& x() const { return x_; }  // x_k
  const std::vector<double>& y() const { return y_; }  // y_k
  const std::vector<double>& y_prev() const { return y_prev_; }
  const std::vector<double>& z() const { return z_; }
  const std::vector<double>& q() const { return q_; }

  // x_{k+1}, the point the next iteration will use.
  std::vector<double> NextX() const;
  // Weighted averages; x~_0 = x_0 and y~_0 = y_0 by convention.
  std::vector<double> XTilde() const;
  std::vector<double> YTilde() const;

  // Nonzeros of A read by the block products so far.
  double touched_nnz() const { return touched_nnz_; }

 private:
  const GlpInstance* p_;
  const BlockPartition* part_;
  double gamma_;
  StepSchedule schedule_;
  Rng rng_;
  std::vector<double> x0_, x_, y_, y_prev_, z_, q_;
  std::vector<double> x_acc_, y_acc_;
  std::vector<double> buf_rows_, buf_cols_;
  Index last_block_ = 0;
  double touched_nnz_ = 0.0;
};

// Block norm bound to use for a run: the override when positive, else the
// partition's estimate. Throws ParameterError if the result is not positive.
double EffectiveBlockNorm(const BlockPartition& part, double l_hat_override);

}  // namespace clvr

#endif  // CLVR_CLVR_REFERENCE_HPP_
