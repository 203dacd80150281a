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

// Kernel and solver microbenchmarks on random sparse standard-form LPs.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "clvr/clvr_lazy.hpp"
#include "clvr/clvr_reference.hpp"
#include "clvr/glp.hpp"
#include "clvr/pdhg.hpp"
#include "clvr/restart.hpp"
#include "clvr/sparse_matrix.hpp"

namespace {

using clvr::Index;

// min c^T x s.t. Ax = b, x >= 0 with b = A x_feas for a positive x_feas and
// c > 0, so the LP is feasible and bounded.
clvr::GlpInstance RandomLp(Index n, Index d, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::vector<clvr::Triplet> t;
  for (Index i = 0; i < n; ++i) {
    t.push_back({i, i % d, 1.0});
    for (Index j = 0; j < d; ++j) {
      if (j != i % d && unit(rng) < density) t.push_back({i, j, val(rng)});
    }
  }
  clvr::SparseMatrix a = clvr::SparseMatrix::FromTriplets(n, d, t);
  std::vector<double> x(d), c(d);
  for (Index j = 0; j < d; ++j) {
    x[j] = 0.5 + unit(rng);
    c[j] = 0.1 + unit(rng);
  }
  std::vector<double> b = a.Multiply(x);
  return clvr::GlpInstance::StandardLp(std::move(a), std::move(b), std::move(c));
}

const clvr::GlpInstance& KernelLp() {
  static const clvr::GlpInstance lp = RandomLp(2000, 4000, 0.005, 1);
  return lp;
}

const clvr::GlpInstance& SolverLp() {
  static const clvr::GlpInstance lp = RandomLp(100, 200, 0.05, 2);
  return lp;
}

void BM_Multiply(benchmark::State& state) {
  const clvr::GlpInstance& lp = KernelLp();
  std::vector<double> x(lp.n_cols(), 1.0), out(lp.n_rows());
  for (auto _ : state) {
    lp.a().Multiply(x, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * lp.a().nnz());
}
BENCHMARK(BM_Multiply);

void BM_MultiplyTranspose(benchmark::State& state) {
  const clvr::GlpInstance& lp = KernelLp();
  std::vector<double> y(lp.n_rows(), 1.0), out(lp.n_cols());
  for (auto _ : state) {
    lp.a().MultiplyTranspose(y, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * lp.a().nnz());
}
BENCHMARK(BM_MultiplyTranspose);

void BM_PartitionRows(benchmark::State& state) {
  const clvr::GlpInstance& lp = KernelLp();
  for (auto _ : state) {
    clvr::BlockPartition part = clvr::PartitionRows(lp.a(), state.range(0));
    benchmark::DoNotOptimize(part.l_hat);
  }
}
BENCHMARK(BM_PartitionRows)->Arg(1)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_LpMetric(benchmark::State& state) {
  const clvr::GlpInstance& lp = KernelLp();
  std::vector<double> x(lp.n_cols(), 1.0), y(lp.n_rows(), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(clvr::LpMetric(lp, x, y));
}
BENCHMARK(BM_LpMetric);

// Per-iteration cost of the lazy solver; proportional to the block's nonzeros.
void BM_LazyIterate(benchmark::State& state) {
  const clvr::GlpInstance& lp = KernelLp();
  const clvr::BlockPartition part = clvr::PartitionRows(lp.a(), state.range(0));
  const clvr::SparseMatrix at = lp.a().Transpose();
  clvr::LazyParams params;
  params.iterations = Index{1} << 24;
  params.samples = 1;
  params.transpose = &at;
  clvr::ClvrLazy solver(lp, part, params, std::vector<double>(lp.n_cols(), 0.0),
                        std::vector<double>(lp.n_rows(), 0.0));
  for (auto _ : state) solver.Iterate();
  state.counters["data_passes"] = solver.touched_nnz() / static_cast<double>(lp.a().nnz());
}
BENCHMARK(BM_LazyIterate)->Arg(1)->Arg(10)->Arg(100);

// The dense-update transcription touches every primal coordinate per step.
void BM_ReferenceIterate(benchmark::State& state) {
  const clvr::GlpInstance& lp = KernelLp();
  const clvr::BlockPartition part = clvr::PartitionRows(lp.a(), state.range(0));
  clvr::ClvrReference solver(lp, part, {}, std::vector<double>(lp.n_cols(), 0.0),
                             std::vector<double>(lp.n_rows(), 0.0));
  for (auto _ : state) solver.Iterate();
}
BENCHMARK(BM_ReferenceIterate)->Arg(1)->Arg(10)->Arg(100);

void BM_PdhgIterate(benchmark::State& state) {
  const clvr::GlpInstance& lp = KernelLp();
  clvr::Pdhg solver(lp, {}, std::vector<double>(lp.n_cols(), 0.0),
                    std::vector<double>(lp.n_rows(), 0.0));
  for (auto _ : state) solver.Iterate();
}
BENCHMARK(BM_PdhgIterate);

// Restarted solve of a 100 x 200 LP to LP metric 1e-4.
void BM_RestartedSolve(benchmark::State& state) {
  const clvr::GlpInstance& lp = SolverLp();
  const auto kind = static_cast<clvr::SolverKind>(state.range(0));
  const clvr::BlockPartition part = clvr::PartitionRows(lp.a(), state.range(1));
  clvr::SolverSettings settings;
  settings.kind = kind;
  clvr::RestartConfig config;
  config.target = 1e-4;
  config.max_passes = 1e5;
  clvr::RestartResult res;
  for (auto _ : state) {
    res = clvr::RunWithRestarts(lp, part, settings, config);
    benchmark::DoNotOptimize(res.final_metric);
  }
  state.SetLabel(std::string(clvr::SolverName(kind)));
  state.counters["data_passes"] = res.data_passes;
  state.counters["reached"] = res.status == clvr::RunStatus::kTargetReached ? 1.0 : 0.0;
}
BENCHMARK(BM_RestartedSolve)
    ->Args({static_cast<int>(clvr::SolverKind::kClvrLazy), 1})
    ->Args({static_cast<int>(clvr::SolverKind::kClvrLazy), 10})
    ->Args({static_cast<int>(clvr::SolverKind::kPdhg), 1})
    ->Unit(benchmark::kMillisecond)
    ->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
