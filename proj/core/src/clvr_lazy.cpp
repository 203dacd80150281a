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

#include <algorithm>
#include <cmath>
#include <utility>

#include "clvr/error.hpp"

namespace clvr {
namespace {

constexpr int kDriftProbes = 8;
constexpr double kDriftTol = 1e-8;

}  // namespace

Index DefaultSampleCount(Index iterations, Index nnz, Index m, Index d) {
  if (iterations == 0) return 0;
  const double ratio = static_cast<double>(nnz) /
                       (static_cast<double>(m) * static_cast<double>(std::max<Index>(d, 1)));
  const double k_hat = std::ceil(static_cast<double>(iterations) * ratio);
  return std::clamp<Index>(static_cast<Index>(k_hat), 1, iterations);
}

namespace {

StepSchedule MakeSchedule(const GlpInstance& p, const BlockPartition& part,
                          const LazyParams& params) {
  if (part.n_rows != p.n_rows() || part.n_cols != p.n_cols()) {
    throw DimensionError("partition does not match the problem dimensions");
  }
  return StepSchedule(params.gamma, p.sigma(), EffectiveBlockNorm(part, params.l_hat),
                      part.num_blocks());
}

}  // namespace

SamplePlan::SamplePlan(const StepSchedule& schedule, Index iterations, Index samples,
                       std::uint64_t seed)
    : walk_(schedule),
      k_max_(iterations),
      remaining_(samples),
      exhaustive_(samples == iterations && schedule.sigma() == 0.0),
      rng_(seed) {
  if (iterations == 0) throw ParameterError("iteration count must be >= 1");
  if (samples > iterations) {
    throw ParameterError("output sample count exceeds the iteration count");
  }
  if (exhaustive_ || samples == 0) return;
  if (schedule.sigma() == 0.0) {
    big_a_total_ = static_cast<double>(iterations) * schedule.base();
  } else {
    StepSchedule total(schedule);
    while (total.k() < iterations) total.Advance();
    big_a_total_ = total.big_a();
  }
  walk_.Advance();
}

Index SamplePlan::Next() {
  if (remaining_ == 0) return 0;
  if (exhaustive_) return k_max_ - --remaining_;
  // Smallest of the remaining uniforms on [u_prev, 1), then inverse CDF on A.
  log_tail_ += std::log1p(-rng_.Uniform()) / static_cast<double>(remaining_);
  --remaining_;
  const double u = -std::expm1(log_tail_) * big_a_total_;
  while (walk_.k() < k_max_ && walk_.big_a() <= u) walk_.Advance();
  return walk_.k();
}

ClvrLazy::ClvrLazy(const GlpInstance& p, const BlockPartition& part,
                   const LazyParams& params, std::vector<double> x0,
                   std::vector<double> y0)
    : p_(&p),
      part_(&part),
      at_owned_(params.transpose ? SparseMatrix() : p.a().Transpose()),
      at_(params.transpose ? params.transpose : &at_owned_),
      gamma_(params.gamma),
      k_max_(params.iterations),
      samples_(params.samples),
      plan_seed_(params.plan_seed.value_or(DeriveSeed(params.seed, 1))),
      schedule_(MakeSchedule(p, part, params)),
      grow_(schedule_),
      rng_(params.seed),
      guard_rng_(DeriveSeed(params.seed, 2)),
      plan_(schedule_, params.iterations, params.samples, plan_seed_),
      x0_(std::move(x0)),
      y_(std::move(y0)) {
  if (x0_.size() != p.n_cols() || y_.size() != p.n_rows()) {
    throw DimensionError("starting point has the wrong dimensions");
  }
  if (!p.IsFeasible(x0_)) throw InfeasiblePointError("x0 lies outside X");

  table_.a.assign(1, 0.0);
  table_.big_a.assign(1, 0.0);
  EnsureTable(1);
  next_sample_ = plan_.Next();

  bool y_zero = std::all_of(y_.begin(), y_.end(), [](double v) { return v == 0.0; });
  if (y_zero) {
    z_.assign(p.n_cols(), 0.0);
  } else {
    z_ = p.a().MultiplyTranspose(y_);
    touched_nnz_ += static_cast<double>(p.a().nnz());
  }
  r_.assign(p.n_cols(), 0.0);
  s_.assign(p.n_rows(), 0.0);
  x_cache_ = x0_;
  stamps_.assign(p.n_cols(), 0);
  x_hat_acc_.assign(p.n_cols(), 0.0);
}

void ClvrLazy::EnsureTable(Index k) {
  const Index have = table_.big_a.size();
  if (k < have) return;
  const Index last = std::min(k_max_ + 1, std::max({k, 2 * have, Index{1024}}));
  table_.a.resize(last + 1);
  table_.big_a.resize(last + 1);
  for (Index i = have; i <= last; ++i) {
    grow_.Advance();
    table_.a[i] = grow_.a();
    table_.big_a[i] = grow_.big_a();
  }
}

std::vector<Index> ClvrLazy::sample_plan() const {
  SamplePlan plan(schedule_, k_max_, samples_, plan_seed_);
  std::vector<Index> out;
  out.reserve(samples_);
  for (Index k = plan.Next(); k != 0; k = plan.Next()) out.push_back(k);
  return out;
}

ScheduleTable ClvrLazy::table() const { return PrecomputeSchedule(schedule_, k_max_ + 1); }

double ClvrLazy::XCoord(Index i, double big_a_next) const {
  const double q = big_a_next * (p_->c()[i] + z_[i]) + r_[i];
  return ProxCoord(p_->coords()[i], big_a_next / gamma_, x0_[i] - q / gamma_);
}

void ClvrLazy::FullPrimal(Index stamp, double big_a_next) {
  GuardDrift();
  for (Index i = 0; i < x_cache_.size(); ++i) {
    x_cache_[i] = XCoord(i, big_a_next);
    stamps_[i] = stamp;
  }
}

void ClvrLazy::GuardDrift() {
  const Index d = z_.size();
  if (d == 0) return;
  for (int t = 0; t < kDriftProbes; ++t) {
    const Index i = guard_rng_.Below(d);
    double exact = 0.0;
    double mag = 0.0;
    const auto rows = at_->row_cols(i);
    const auto vals = at_->row_values(i);
    for (Index e = 0; e < rows.size(); ++e) {
      exact += vals[e] * y_[rows[e]];
      mag += std::abs(vals[e] * y_[rows[e]]);
    }
    if (std::abs(z_[i] - exact) > kDriftTol * std::max(1.0, mag)) {
      z_ = p_->a().MultiplyTranspose(y_);
      ++drift_repairs_;
      return;
    }
  }
}

void ClvrLazy::Iterate() {
  if (k_ >= k_max_) throw Error("lazy solver ran past its iteration count");
  const GlpInstance& p = *p_;
  const BlockPartition& part = *part_;
  const double md = static_cast<double>(part.num_blocks());
  const Index k = ++k_;
  EnsureTable(k + 1);
  const double a_k = table_.a[k];
  const double big_a_k = table_.big_a[k];
  const double big_a_prev = table_.big_a[k - 1];

  const Index j = rng_.Below(part.num_blocks());
  last_block_ = j;
  const Index r0 = part.row_begin(j);
  const Index nr = part.block_rows(j);
  const std::span<const Index> cols = part.support(j);

  // x_k on C^j, or everywhere when k is in the output plan.
  Index hits = 0;
  while (next_sample_ == k) {
    ++hits;
    next_sample_ = plan_.Next();
  }
  buf_cols_.resize(cols.size());
  if (hits > 0) {
    FullPrimal(k, big_a_k);
    for (Index i = 0; i < x_hat_acc_.size(); ++i) {
      x_hat_acc_[i] += static_cast<double>(hits) * x_cache_[i];
    }
    samples_taken_ += hits;
    for (Index t = 0; t < cols.size(); ++t) buf_cols_[t] = x_cache_[cols[t]];
  } else {
    for (Index t = 0; t < cols.size(); ++t) {
      const Index col = cols[t];
      buf_cols_[t] = XCoord(col, big_a_k);
      x_cache_[col] = buf_cols_[t];
      stamps_[col] = k;
    }
  }

  buf_rows_.resize(nr);
  BlockMultiply(p.a(), part, j, buf_cols_, buf_rows_);
  buf_dy_.resize(nr);
  const double s_weight = (md - 1.0) * a_k - big_a_prev;
  for (Index t = 0; t < nr; ++t) {
    const Index row = r0 + t;
    const double dy = gamma_ * md * a_k * (buf_rows_[t] - p.b()[row]);
    y_[row] += dy;
    s_[row] += s_weight * dy;
    buf_dy_[t] = dy;
  }
  BlockMultiplyTranspose(p.a(), part, j, buf_dy_, buf_cols_);
  const double r_weight = md * a_k - big_a_k;
  for (Index t = 0; t < cols.size(); ++t) {
    const Index col = cols[t];
    z_[col] += buf_cols_[t];
    r_[col] += r_weight * buf_cols_[t];
  }
  touched_last_ = cols.size() + nr;
  touched_nnz_ += static_cast<double>(p.a().row_ptr()[r0 + nr] - p.a().row_ptr()[r0]);
}

std::vector<double> ClvrLazy::FlushX() {
  FullPrimal(k_ + 1, table_.big_a[k_ + 1]);
  return x_cache_;
}

std::vector<double> ClvrLazy::YTilde() const {
  if (k_ == 0) return y_;
  std::vector<double> out(y_);
  const double big_a = table_.big_a[k_];
  for (Index i = 0; i < out.size(); ++i) out[i] += s_[i] / big_a;
  return out;
}

std::vector<double> ClvrLazy::XHat() const {
  if (samples_taken_ == 0) return {};
  std::vector<double> out(x_hat_acc_);
  for (double& v : out) v /= static_cast<double>(samples_taken_);
  return out;
}

std::vector<double> ClvrLazy::Q() const {
  std::vector<double> q(z_.size());
  const double big_a_next = table_.big_a[k_ + 1];
  for (Index i = 0; i < q.size(); ++i) q[i] = big_a_next * (p_->c()[i] + z_[i]) + r_[i];
  return q;
}

ClvrOutput ClvrLazy::Run(Index history_every) {
  const Index every = history_every == 0 ? part_->num_blocks() : history_every;
  const double nnz = static_cast<double>(p_->a().nnz());
  ClvrOutput out;
  auto candidate = [&]() {
    std::vector<double> x = samples_taken_ > 0 ? XHat() : FlushX();
    p_->Project(x);
    return x;
  };
  Index done = 0;
  while (k_ < k_max_) {
    Iterate();
    ++done;
    if (done % every == 0 || k_ == k_max_) {
      MetricsRecord rec;
      rec.iter = k_;
      rec.data_passes = nnz > 0.0 ? touched_nnz_ / nnz : 0.0;
      Measure(*p_, candidate(), YTilde(), rec);
      out.history.push_back(rec);
    }
  }
  out.x = samples_ == 0 ? FlushX() : candidate();
  p_->Project(out.x);
  out.y = YTilde();
  return out;
}

}  // namespace clvr
