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

#include "clvr/restart.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <string>
#include <utility>

#include "clvr/clvr_lazy.hpp"
#include "clvr/clvr_reference.hpp"
#include "clvr/error.hpp"
#include "clvr/rng.hpp"

namespace clvr {
namespace {

constexpr Index kDefaultCheckpointsPerEpoch = 1024;

// Uniform view of the three solvers for the controller.
class EpochSolver {
 public:
  virtual ~EpochSolver() = default;
  virtual void Iterate() = 0;
  virtual SaddlePoint Candidate() = 0;
  virtual SaddlePoint LastIterate() = 0;
  virtual double touched_nnz() const = 0;
};

class LazyEpoch final : public EpochSolver {
 public:
  LazyEpoch(const GlpInstance& p, const BlockPartition& part,
            const LazyParams& params, SaddlePoint start)
      : solver_(p, part, params, std::move(start.x), std::move(start.y)) {}
  void Iterate() override { solver_.Iterate(); }
  SaddlePoint Candidate() override {
    std::vector<double> x = solver_.samples_taken() > 0 ? solver_.XHat() : solver_.FlushX();
    return {std::move(x), solver_.YTilde()};
  }
  SaddlePoint LastIterate() override { return {solver_.FlushX(), solver_.y()}; }
  double touched_nnz() const override { return solver_.touched_nnz(); }

 private:
  ClvrLazy solver_;
};

class ReferenceEpoch final : public EpochSolver {
 public:
  ReferenceEpoch(const GlpInstance& p, const BlockPartition& part,
                 const ClvrParams& params, SaddlePoint start)
      : solver_(p, part, params, std::move(start.x), std::move(start.y)) {}
  void Iterate() override { solver_.Iterate(); }
  SaddlePoint Candidate() override { return {solver_.XTilde(), solver_.YTilde()}; }
  SaddlePoint LastIterate() override { return {solver_.x(), solver_.y()}; }
  double touched_nnz() const override { return solver_.touched_nnz(); }

 private:
  ClvrReference solver_;
};

class PdhgEpoch final : public EpochSolver {
 public:
  PdhgEpoch(const GlpInstance& p, const PdhgParams& params, SaddlePoint start)
      : solver_(p, params, std::move(start.x), std::move(start.y)) {}
  void Iterate() override { solver_.Iterate(); }
  SaddlePoint Candidate() override { return {solver_.XAverage(), solver_.YAverage()}; }
  SaddlePoint LastIterate() override { return {solver_.x(), solver_.y()}; }
  double touched_nnz() const override { return solver_.touched_nnz(); }

 private:
  Pdhg solver_;
};

struct Schedule {
  bool adaptive = true;
  Index epoch_len = 0;
};

RestartResult Drive(const GlpInstance& p, const BlockPartition& part,
                    const SolverSettings& settings, const RestartConfig& config,
                    const Schedule& schedule,
                    const std::optional<SaddlePoint>& start,
                    const RecordSink& sink) {
  config.Validate();
  if (!p.IsStandardLp()) {
    throw UnsupportedError("restarts are driven by the LP metric and need a standard-form LP");
  }
  if (part.n_rows != p.n_rows() || part.n_cols != p.n_cols()) {
    throw DimensionError("partition does not match the problem dimensions");
  }
  const Index m = part.num_blocks();
  const bool is_pdhg = settings.kind == SolverKind::kPdhg;
  const Index check_every =
      config.check_every > 0 ? config.check_every : (is_pdhg ? 1 : m);
  const Index epoch_len =
      !schedule.adaptive ? schedule.epoch_len
                         : (config.epoch_cap > 0 ? config.epoch_cap
                                                 : kDefaultCheckpointsPerEpoch * check_every);
  const double nnz = static_cast<double>(p.a().nnz());

  // One-time setup shared by all epochs; excluded from the clock.
  std::optional<SparseMatrix> transpose;
  PdhgParams pdhg = settings.pdhg;
  if (settings.kind == SolverKind::kClvrLazy) transpose = p.a().Transpose();
  if (is_pdhg && pdhg.op_norm <= 0.0) pdhg.op_norm = OperatorNorm(p.a());

  const auto clock_start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&]() {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     clock_start)
        .count();
  };

  SaddlePoint point = start.value_or(SaddlePoint{});
  if (!start) {
    point.x.assign(p.n_cols(), 0.0);
    point.y.assign(p.n_rows(), 0.0);
  }
  if (point.x.size() != p.n_cols() || point.y.size() != p.n_rows()) {
    throw DimensionError("starting point has the wrong dimensions");
  }
  p.Project(point.x);

  RestartResult result;
  auto emit = [&](MetricsRecord rec) {
    if (sink) sink(rec);
    result.history.push_back(rec);
  };

  MetricsRecord first;
  Measure(p, point.x, point.y, first);
  first.wall_ms = elapsed_ms();
  emit(first);
  SaddlePoint best = point;
  double best_metric = first.lp_metric;
  if (first.lp_metric <= config.target) {
    result.solution = std::move(point);
    result.final_metric = first.lp_metric;
    result.status = RunStatus::kTargetReached;
    return result;
  }

  double passes_before = 0.0;
  for (Index epoch = 0;; ++epoch) {
    const std::uint64_t seed =
        epoch == 0 ? settings.seed : DeriveSeed(settings.seed, 16 + epoch);
    const double start_metric = LpMetric(p, point.x, point.y);

    std::unique_ptr<EpochSolver> solver;
    switch (settings.kind) {
      case SolverKind::kClvrLazy: {
        LazyParams lp;
        lp.gamma = settings.gamma;
        lp.seed = seed;
        lp.l_hat = settings.l_hat;
        lp.iterations = epoch_len;
        lp.samples = settings.samples_per_epoch > 0
                         ? std::min(settings.samples_per_epoch, epoch_len)
                         : DefaultSampleCount(epoch_len, p.a().nnz(), m, p.n_cols());
        lp.transpose = &*transpose;
        solver = std::make_unique<LazyEpoch>(p, part, lp, point);
        break;
      }
      case SolverKind::kClvrReference: {
        ClvrParams cp{settings.gamma, seed, settings.l_hat};
        solver = std::make_unique<ReferenceEpoch>(p, part, cp, point);
        break;
      }
      case SolverKind::kPdhg:
        solver = std::make_unique<PdhgEpoch>(p, pdhg, point);
        break;
    }

    EpochLog log;
    log.epoch = epoch;
    log.start_metric = start_metric;
    SaddlePoint candidate;
    double metric = start_metric;
    for (Index local = 1; local <= epoch_len; ++local) {
      solver->Iterate();
      ++result.iterations;
      if (local % check_every != 0 && local != epoch_len) continue;

      candidate = solver->Candidate();
      p.Project(candidate.x);
      MetricsRecord rec;
      rec.epoch = epoch;
      rec.iter = result.iterations;
      rec.data_passes = passes_before + (nnz > 0.0 ? solver->touched_nnz() / nnz : 0.0);
      Measure(p, candidate.x, candidate.y, rec);
      SaddlePoint last = solver->LastIterate();
      p.Project(last.x);
      rec.last_iterate_metric = LpMetric(p, last.x, last.y);
      rec.wall_ms = elapsed_ms();
      emit(rec);
      metric = rec.lp_metric;
      result.data_passes = rec.data_passes;
      log.iterations = local;

      if (metric < best_metric) {
        best_metric = metric;
        best = candidate;
      }
      if (metric <= config.target) {
        log.end_metric = metric;
        log.data_passes = rec.data_passes;
        log.wall_ms = rec.wall_ms;
        log.triggered = schedule.adaptive && metric <= config.factor * start_metric;
        result.epochs.push_back(log);
        result.solution = std::move(candidate);
        result.final_metric = metric;
        result.status = RunStatus::kTargetReached;
        return result;
      }
      if (rec.data_passes >= config.max_passes) {
        log.end_metric = metric;
        log.data_passes = rec.data_passes;
        log.wall_ms = rec.wall_ms;
        result.epochs.push_back(log);
        result.solution = std::move(best);
        result.final_metric = best_metric;
        result.status = RunStatus::kBudgetExhausted;
        return result;
      }
      if (schedule.adaptive && metric <= config.factor * start_metric) {
        log.triggered = true;
        break;
      }
    }
    log.end_metric = metric;
    log.data_passes = result.data_passes;
    log.wall_ms = elapsed_ms();
    result.epochs.push_back(log);
    passes_before = result.data_passes;
    point = std::move(candidate);
  }
}

}  // namespace

std::string_view SolverName(SolverKind kind) {
  switch (kind) {
    case SolverKind::kClvrLazy:
      return "clvr";
    case SolverKind::kClvrReference:
      return "clvr-ref";
    case SolverKind::kPdhg:
      return "pdhg";
  }
  return "";
}

std::optional<SolverKind> ParseSolverKind(std::string_view name) {
  for (SolverKind k : {SolverKind::kClvrLazy, SolverKind::kClvrReference, SolverKind::kPdhg}) {
    if (SolverName(k) == name) return k;
  }
  return std::nullopt;
}

void RestartConfig::Validate() const {
  if (!(factor > 0.0 && factor < 1.0)) {
    throw ParameterError("restart factor must lie in (0, 1)");
  }
  if (!(max_passes > 0.0)) throw ParameterError("pass budget must be positive");
  if (!(target >= 0.0)) throw ParameterError("target must be nonnegative");
}

RestartResult RunWithRestarts(const GlpInstance& p, const BlockPartition& part,
                              const SolverSettings& solver,
                              const RestartConfig& config,
                              const std::optional<SaddlePoint>& start,
                              const RecordSink& sink) {
  return Drive(p, part, solver, config, Schedule{true, 0}, start, sink);
}

RestartResult FixedFrequencyRestart(const GlpInstance& p,
                                    const BlockPartition& part,
                                    const SolverSettings& solver,
                                    const RestartConfig& config, Index epoch_len,
                                    const std::optional<SaddlePoint>& start,
                                    const RecordSink& sink) {
  if (epoch_len == 0) throw ParameterError("epoch length must be >= 1");
  return Drive(p, part, solver, config, Schedule{false, epoch_len}, start, sink);
}

}  // namespace clvr
