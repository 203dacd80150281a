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

#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "clvr/dro.hpp"
#include "clvr/error.hpp"
#include "clvr/io.hpp"
#include "clvr/pdhg.hpp"
#include "clvr/restart.hpp"
#include "clvr/sparse_matrix.hpp"

namespace clvr::cli {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ReformulateOptions {
  std::string kind;
  std::string libsvm;
  std::string out;
  std::string divergence;
  double kappa = 0.1;
  double rho = 10.0;
  double alpha = 0.5;
  double m_bound = 1.0;
  bool normalize = false;
  Index dims = 0;
};

struct RunOptions {
  std::string input;
  Index block_size = 1;
  double max_passes = 1e4;
  double target = 1e-8;
  double restart_factor = 0.5;
  Index check_every = 0;
  Index epoch_cap = 0;
  Index samples = 0;
  double l_hat = 0.0;
};

struct SolveOptions {
  RunOptions run;
  std::string algo = "clvr";
  double gamma = 1.0;
  std::uint64_t seed = 0;
  std::string csv;
  std::string solution;
};

struct BenchOptions {
  RunOptions run;
  std::vector<std::string> algos{"clvr", "pdhg"};
  std::vector<std::uint64_t> seeds{0};
  std::vector<double> gammas{1.0};
  std::string out_dir = ".";
  unsigned threads = 0;
};

void AddRunOptions(CLI::App* app, RunOptions& o) {
  app->add_option("--input", o.input, "GLP file to solve")->required();
  app->add_option("--block-size", o.block_size, "rows per CLVR block")
      ->check(CLI::PositiveNumber);
  app->add_option("--max-passes", o.max_passes, "data-pass budget");
  app->add_option("--target", o.target, "stop once the LP metric is at most this");
  app->add_option("--restart-factor", o.restart_factor, "restart when the metric shrinks by this");
  app->add_option("--check-every", o.check_every, "iterations between metric checks (0: auto)");
  app->add_option("--epoch-cap", o.epoch_cap, "iteration cap per epoch (0: auto)");
  app->add_option("--samples", o.samples, "lazy output samples per epoch (0: auto)");
  app->add_option("--lhat-override", o.l_hat, "replace the partition's block-norm estimate");
}

// ------------------------------------------------------------------ reformulate

GlpInstance Normalized(const GlpInstance& p) {
  NormalizedSystem ns = NormalizeRows(p.a(), p.b());
  return GlpInstance(std::move(ns.a), std::move(ns.b), p.c(), p.coords());
}

int Reformulate(const ReformulateOptions& o, std::ostream& out, std::ostream& err) {
  const std::optional<Index> dims = o.dims > 0 ? std::optional<Index>(o.dims) : std::nullopt;
  std::string divergence = o.divergence;
  if (o.kind == "fdiv") {
    if (divergence.empty()) {
      err << "error: fdiv needs --divergence; the built-in divergence is 'cvar'\n";
      return kExitUsage;
    }
    if (divergence != "cvar") {
      err << "error: divergence '" << divergence
          << "' has no built-in perspective; supply one through the library API\n";
      return kExitUsage;
    }
  }
  const Dataset data = ParseLibsvmFile(o.libsvm, dims);
  GlpInstance lp;
  if (o.kind == "wasserstein") {
    lp = BuildWassersteinHingeLp(data, {o.rho, o.kappa, o.m_bound});
  } else {
    // The solvers take standard-form LPs, so free columns are split.
    lp = ToStandardForm(BuildCvarHingeLp(data, {o.alpha})).lp;
  }
  if (o.normalize) lp = Normalized(lp);
  WriteGlpFile(o.out, lp);
  out << "rows=" << lp.n_rows() << " cols=" << lp.n_cols() << " nnz=" << lp.a().nnz() << '\n';
  return kExitOk;
}

// ------------------------------------------------------------------------ solve

struct Instance {
  GlpInstance lp;
  BlockPartition part;
  double op_norm = 0.0;
};

Instance LoadInstance(const RunOptions& o, bool need_norm, std::ostream& err) {
  Instance inst;
  inst.lp = ReadGlpFile(o.input);
  if (!inst.lp.IsStandardLp()) {
    throw UnsupportedError("'" + o.input + "' is not a standard-form LP (x >= 0, r = 0)");
  }
  if (inst.lp.n_rows() == 0) throw UnsupportedError("the LP has no rows");
  Index bs = o.block_size;
  if (bs > inst.lp.n_rows()) {
    err << "warning: block size " << bs << " exceeds the row count " << inst.lp.n_rows()
        << "; using " << inst.lp.n_rows() << '\n';
    bs = inst.lp.n_rows();
  }
  inst.part = PartitionRows(inst.lp.a(), bs);
  if (need_norm) inst.op_norm = OperatorNorm(inst.lp.a());
  return inst;
}

// gamma weighs the primal proximal term for every solver: PDHG takes
// tau = f / (gamma ||A||) and sigma = f gamma / ||A||.
SolverSettings Settings(SolverKind kind, double gamma, std::uint64_t seed, const RunOptions& o,
                        const Instance& inst) {
  if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");
  SolverSettings s;
  s.kind = kind;
  s.gamma = gamma;
  s.seed = seed;
  s.l_hat = o.l_hat;
  s.samples_per_epoch = o.samples;
  if (kind == SolverKind::kPdhg && inst.op_norm > 0.0) {
    s.pdhg.op_norm = inst.op_norm;
    s.pdhg.tau = s.pdhg.step_factor / (gamma * inst.op_norm);
    s.pdhg.sigma = s.pdhg.step_factor * gamma / inst.op_norm;
  }
  return s;
}

RestartConfig Config(const RunOptions& o) {
  RestartConfig c;
  c.factor = o.restart_factor;
  c.check_every = o.check_every;
  c.epoch_cap = o.epoch_cap;
  c.max_passes = o.max_passes;
  c.target = o.target;
  c.Validate();
  return c;
}

std::string_view StatusName(RunStatus s) {
  return s == RunStatus::kTargetReached ? "target_reached" : "budget_exhausted";
}

int Solve(const SolveOptions& o, std::ostream& out, std::ostream& err) {
  const SolverKind kind = *ParseSolverKind(o.algo);
  const Instance inst = LoadInstance(o.run, kind == SolverKind::kPdhg, err);
  const SolverSettings settings = Settings(kind, o.gamma, o.seed, o.run, inst);
  const RestartConfig config = Config(o.run);

  std::ofstream csv_file;
  std::optional<CsvTraceWriter> csv;
  if (!o.csv.empty()) {
    csv_file.open(o.csv);
    if (!csv_file) throw Error("cannot open '" + o.csv + "' for writing");
    csv.emplace(csv_file);
    csv->WriteHeader();
  }
  RecordSink sink;
  if (csv) sink = [&](const MetricsRecord& r) { csv->Write(r); };
  const RestartResult res = RunWithRestarts(inst.lp, inst.part, settings, config, {}, sink);
  if (csv_file.is_open() && !csv_file.flush()) throw Error("write to '" + o.csv + "' failed");

  if (!o.solution.empty()) {
    std::ofstream sol(o.solution);
    if (!sol) throw Error("cannot open '" + o.solution + "' for writing");
    for (double v : res.solution.x) sol << FormatDouble(v) << '\n';
  }
  const ObjectiveAndResidual of = ObjectiveAndFeasibility(inst.lp, res.solution.x);
  out << "status=" << StatusName(res.status) << " epochs=" << res.epochs.size()
      << " iterations=" << res.iterations << " data_passes=" << FormatDouble(res.data_passes)
      << " lp_metric=" << FormatDouble(res.final_metric)
      << " objective=" << FormatDouble(of.objective)
      << " infeas=" << FormatDouble(of.infeasibility) << '\n';
  return res.status == RunStatus::kTargetReached ? kExitOk : kExitBudget;
}

// ------------------------------------------------------------------------ bench

struct Cell {
  SolverKind kind;
  std::uint64_t seed;
  double gamma;
  std::string csv_path;
  RestartResult result;
};

// Decades 1e-1, 1e-2, ... down to the first one at or below the target.
std::vector<double> Decades(double target) {
  std::vector<double> out;
  for (int k = 1; k <= 16; ++k) {
    const double thr = std::stod("1e-" + std::to_string(k));  // exact decimal
    out.push_back(thr);
    if (thr <= target) break;
  }
  return out;
}

// First checkpoint at or below thr, as (data passes, wall ms); infinite when
// never reached.
std::pair<double, double> FirstHit(const RestartResult& r, double thr) {
  for (const MetricsRecord& rec : r.history) {
    if (rec.lp_metric <= thr) return {rec.data_passes, rec.wall_ms};
  }
  return {kInf, kInf};
}

std::string Fmt(double v) { return std::isfinite(v) ? FormatDouble(v) : "inf"; }

int Bench(const BenchOptions& o, std::ostream& out, std::ostream& err) {
  bool need_norm = false;
  std::vector<SolverKind> kinds;
  for (const std::string& a : o.algos) {
    const auto k = ParseSolverKind(a);
    if (!k) {
      err << "error: unknown algorithm '" << a << "'\n";
      return kExitUsage;
    }
    kinds.push_back(*k);
    need_norm = need_norm || *k == SolverKind::kPdhg;
  }
  const Instance inst = LoadInstance(o.run, need_norm, err);
  const RestartConfig config = Config(o.run);
  std::filesystem::create_directories(o.out_dir);

  std::vector<Cell> cells;
  for (SolverKind k : kinds) {
    for (std::uint64_t seed : o.seeds) {
      for (double g : o.gammas) {
        if (!(g > 0.0)) throw ParameterError("gamma must be positive");
        const std::string name = std::string(SolverName(k)) + "_seed" + std::to_string(seed) +
                                 "_gamma" + FormatDouble(g) + ".csv";
        cells.push_back({k, seed, g, (std::filesystem::path(o.out_dir) / name).string(), {}});
      }
    }
  }

  // One solver per thread over a shared read-only instance; every cell owns
  // its CSV writer.
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      Cell& c = cells[i];
      try {
        std::ofstream file(c.csv_path);
        if (!file) throw Error("cannot open '" + c.csv_path + "' for writing");
        CsvTraceWriter csv(file);
        csv.WriteHeader();
        c.result = RunWithRestarts(inst.lp, inst.part, Settings(c.kind, c.gamma, c.seed, o.run, inst),
                                   config, {}, [&](const MetricsRecord& r) { csv.Write(r); });
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned n_threads = o.threads > 0 ? o.threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, cells.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const std::vector<double> decades = Decades(o.run.target);
  const std::string summary_path = (std::filesystem::path(o.out_dir) / "summary.csv").string();
  std::ofstream summary(summary_path);
  if (!summary) throw Error("cannot open '" + summary_path + "' for writing");
  summary << "algo,seed,gamma,threshold,data_passes,wall_ms\n";
  out << std::left << std::setw(10) << "algo" << std::setw(8) << "seed" << std::setw(10)
      << "gamma" << std::setw(18) << "status";
  for (double thr : decades) out << ' ' << std::setw(13) << ("passes@" + FormatDouble(thr));
  out << '\n';
  bool all_reached = true;
  for (const Cell& c : cells) {
    all_reached = all_reached && c.result.status == RunStatus::kTargetReached;
    out << std::setw(10) << SolverName(c.kind) << std::setw(8) << c.seed << std::setw(10)
        << FormatDouble(c.gamma) << std::setw(18) << StatusName(c.result.status);
    for (double thr : decades) {
      const auto [passes, ms] = FirstHit(c.result, thr);
      summary << SolverName(c.kind) << ',' << c.seed << ',' << FormatDouble(c.gamma) << ','
              << FormatDouble(thr) << ',' << Fmt(passes) << ',' << Fmt(ms) << '\n';
      std::ostringstream cellv;
      cellv << std::setprecision(4) << passes;
      out << ' ' << std::setw(13) << (std::isfinite(passes) ? cellv.str() : "-");
    }
    out << '\n';
  }

  // Best gamma per algorithm: smallest median over seeds of the passes needed
  // to reach 1e-4 (or the target when it is looser).
  const double select_thr = std::max(1e-4, o.run.target);
  const std::string best_path = (std::filesystem::path(o.out_dir) / "best_gamma.csv").string();
  std::ofstream best(best_path);
  if (!best) throw Error("cannot open '" + best_path + "' for writing");
  best << "algo,gamma,threshold,median_passes\n";
  for (SolverKind k : kinds) {
    double best_gamma = o.gammas.front(), best_passes = kInf;
    for (double g : o.gammas) {
      std::vector<double> passes;
      for (const Cell& c : cells) {
        if (c.kind == k && c.gamma == g) passes.push_back(FirstHit(c.result, select_thr).first);
      }
      std::sort(passes.begin(), passes.end());
      const std::size_t h = passes.size() / 2;
      const double median =
          passes.size() % 2 == 1 ? passes[h] : 0.5 * (passes[h - 1] + passes[h]);
      if (median < best_passes) {
        best_passes = median;
        best_gamma = g;
      }
    }
    best << SolverName(k) << ',' << FormatDouble(best_gamma) << ',' << FormatDouble(select_thr)
         << ',' << Fmt(best_passes) << '\n';
    out << "best " << SolverName(k) << " gamma=" << FormatDouble(best_gamma) << " passes@"
        << FormatDouble(select_thr) << '=' << Fmt(best_passes) << '\n';
  }
  return all_reached ? kExitOk : kExitBudget;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coordinate linear variance reduction for generalized linear programs", "clvr"};
  app.require_subcommand(1);

  ReformulateOptions ref;
  CLI::App* reformulate =
      app.add_subcommand("reformulate", "Build a DRO hinge-loss LP from LibSVM data");
  reformulate->add_option("kind", ref.kind, "wasserstein, cvar or fdiv")
      ->required()
      ->check(CLI::IsMember({"wasserstein", "cvar", "fdiv"}));
  reformulate->add_option("--libsvm", ref.libsvm, "input dataset")->required();
  reformulate->add_option("--out", ref.out, "output GLP file")->required();
  reformulate->add_option("--kappa", ref.kappa, "label flip cost (wasserstein)");
  reformulate->add_option("--rho", ref.rho, "ambiguity radius (wasserstein)");
  reformulate->add_option("--m-bound", ref.m_bound, "loss conjugate bound (wasserstein)");
  reformulate->add_option("--alpha", ref.alpha, "CVaR level in (0, 1]");
  reformulate->add_option("--divergence", ref.divergence, "f-divergence name (fdiv)");
  reformulate->add_option("--dims", ref.dims, "feature dimension; larger indices are rejected");
  reformulate->add_flag("--normalize", ref.normalize, "scale LP rows to unit norm");

  SolveOptions sol;
  CLI::App* solve = app.add_subcommand("solve", "Solve a GLP file with restarts");
  AddRunOptions(solve, sol.run);
  solve->add_option("--algo", sol.algo, "clvr, clvr-ref or pdhg")
      ->check(CLI::IsMember({"clvr", "clvr-ref", "pdhg"}));
  solve->add_option("--gamma", sol.gamma, "primal weight");
  solve->add_option("--seed", sol.seed, "random seed");
  solve->add_option("--out", sol.csv, "CSV trace");
  solve->add_option("--solution", sol.solution, "write the primal solution, one value per line");

  BenchOptions bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Run an (algorithm, seed, gamma) grid");
  AddRunOptions(bench_cmd, bench.run);
  bench_cmd->add_option("--algos", bench.algos, "algorithms")->delimiter(',');
  bench_cmd->add_option("--seeds", bench.seeds, "seeds")->delimiter(',');
  bench_cmd->add_option("--gamma-sweep", bench.gammas, "gamma values")->delimiter(',');
  bench_cmd->add_option("--out-dir", bench.out_dir, "directory for the CSV files");
  bench_cmd->add_option("--threads", bench.threads, "worker threads (0: all cores)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (reformulate->parsed()) return Reformulate(ref, out, err);
    if (solve->parsed()) return Solve(sol, out, err);
    return Bench(bench, out, err);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const UnsupportedError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace clvr::cli
