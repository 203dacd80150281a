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

// Restarted solver runs for standard-form LPs.
//
// A run proceeds in epochs. Each epoch starts a fresh solver from the previous
// epoch's averaged output and evaluates the LP metric of the solver's current
// averaged output at regular checkpoints. The adaptive scheme ends an epoch
// as soon as the metric falls to `factor` times its value at the epoch start;
// the fixed-frequency scheme ends epochs after a set number of iterations.

#ifndef CLVR_RESTART_HPP_
#define CLVR_RESTART_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "clvr/glp.hpp"
#include "clvr/metrics.hpp"
#include "clvr/pdhg.hpp"
#include "clvr/sparse_matrix.hpp"

namespace clvr {

enum class SolverKind { kClvrLazy, kClvrReference, kPdhg };

// "clvr", "clvr-ref" and "pdhg".
std::string_view SolverName(SolverKind kind);
std::optional<SolverKind> ParseSolverKind(std::string_view name);

struct SolverSettings {
  SolverKind kind = SolverKind::kClvrLazy;
  double gamma = 1.0;
  std::uint64_t seed = 0;
  double l_hat = 0.0;            // 0 selects the partition's estimate
  Index samples_per_epoch = 0;   // lazy output samples; 0 selects the default
  PdhgParams pdhg;
};

struct RestartConfig {
  double factor = 0.5;
  // Checkpoint cadence in iterations; 0 selects m for CLVR and 1 for PDHG,
  // one expected data pass either way.
  Index check_every = 0;
  // Iteration cap per epoch; 0 selects 1024 checkpoints.
  Index epoch_cap = 0;
  double max_passes = 1e4;
  double target = 1e-8;

  // Throws ParameterError on out-of-range values.
  void Validate() const;
};

struct EpochLog {
  Index epoch = 0;
  Index iterations = 0;
  double start_metric = 0.0;
  double end_metric = 0.0;
  double data_passes = 0.0;  // cumulative at the end of the epoch
  double wall_ms = 0.0;      // cumulative at the end of the epoch
  bool triggered = false;    // ended by the metric test, not the cap
};

enum class RunStatus { kTargetReached, kBudgetExhausted };

struct RestartResult {
  SaddlePoint solution;  // the final candidate, or the best one on budget exhaustion
  double final_metric = 0.0;
  RunStatus status = RunStatus::kBudgetExhausted;
  std::vector<EpochLog> epochs;
  std::vector<MetricsRecord> history;
  Index iterations = 0;
  double data_passes = 0.0;
};

// Receives every checkpoint record as it is produced.
using RecordSink = std::function<void(const MetricsRecord&)>;

// Adaptive restarts. Throws UnsupportedError unless p is a standard-form LP.
// The start defaults to (0, 0).
RestartResult RunWithRestarts(const GlpInstance& p, const BlockPartition& part,
                              const SolverSettings& solver,
                              const RestartConfig& config,
                              const std::optional<SaddlePoint>& start = {},
                              const RecordSink& sink = {});

// Unconditional restart every epoch_len iterations (>= 1); config.factor and
// config.epoch_cap are ignored.
RestartResult FixedFrequencyRestart(const GlpInstance& p,
                                    const BlockPartition& part,
                                    const SolverSettings& solver,
                                    const RestartConfig& config,
                                    Index epoch_len,
                                    const std::optional<SaddlePoint>& start = {},
                                    const RecordSink& sink = {});

}  // namespace clvr

#endif  // CLVR_RESTART_HPP_
