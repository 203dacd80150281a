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

#include "clvr/clvr_reference.hpp"

#include <string>
#include <utility>

#include "clvr/error.hpp"

namespace clvr {
namespace {

void CheckStart(const GlpInstance& p, const BlockPartition& part,
                const std::vector<double>& x0, const std::vector<double>& y0) {
  if (part.n_rows != p.n_rows() || part.n_cols != p.n_cols()) {
    throw DimensionError("partition does not match the problem dimensions");
  }
  if (x0.size() != p.n_cols() || y0.size() != p.n_rows()) {
    throw DimensionError("starting point has the wrong dimensions");
  }
  if (!p.IsFeasible(x0)) throw InfeasiblePointError("x0 lies outside X");
}

bool AllZero(const std::vector<double>& v) {
  for (double e : v) {
    if (e != 0.0) return false;
  }
  return true;
}

}  // namespace

double EffectiveBlockNorm(const BlockPartition& part, double l_hat_override) {
  const double l = l_hat_override > 0.0 ? l_hat_override : part.l_hat;
  if (!(l > 0.0)) {
    throw ParameterError("block norm bound is zero; the matrix has no nonzeros");
  }
  return l;
}

ClvrReference::ClvrReference(const GlpInstance& p, const BlockPartition& part,
                             const ClvrParams& params, std::vector<double> x0,
                             std::vector<double> y0)
    : p_(&p),
      part_(&part),
      gamma_(params.gamma),
      schedule_(params.gamma, p.sigma(), EffectiveBlockNorm(part, params.l_hat),
                part.num_blocks()),
      rng_(params.seed),
      x0_(std::move(x0)),
      y_(std::move(y0)) {
  CheckStart(p, part, x0_, y_);
  x_ = x0_;
  y_prev_ = y_;
  if (AllZero(y_)) {
    z_.assign(p.n_cols(), 0.0);
  } else {
    z_ = p.a().MultiplyTranspose(y_);
    touched_nnz_ += static_cast<double>(p.a().nnz());
  }
  q_.resize(p.n_cols());
  const double a1 = schedule_.next_a();
  for (Index i = 0; i < q_.size(); ++i) q_[i] = a1 * (z_[i] + p.c()[i]);
  x_acc_.assign(p.n_cols(), 0.0);
  y_acc_.assign(p.n_rows(), 0.0);
}

void ClvrReference::Iterate() {
  const GlpInstance& p = *p_;
  const BlockPartition& part = *part_;
  const Index m = part.num_blocks();
  const double md = static_cast<double>(m);

  schedule_.Advance();
  const double a_k = schedule_.a();
  const double big_a_k = schedule_.big_a();

  // x_k = prox_{(A_k / gamma) r}(x_0 - q_{k-1} / gamma)
  for (Index i = 0; i < x_.size(); ++i) {
    x_[i] = ProxCoord(p.coords()[i], big_a_k / gamma_, x0_[i] - q_[i] / gamma_);
  }

  const Index j = rng_.Below(m);
  last_block_ = j;
  const Index r0 = part.row_begin(j);
  const Index nr = part.block_rows(j);
  const std::span<const Index> cols = part.support(j);

  buf_cols_.resize(cols.size());
  for (Index t = 0; t < cols.size(); ++t) buf_cols_[t] = x_[cols[t]];
  buf_rows_.resize(nr);
  BlockMultiply(p.a(), part, j, buf_cols_, buf_rows_);

  y_prev_ = y_;
  for (Index t = 0; t < nr; ++t) {
    const Index row = r0 + t;
    y_[row] += gamma_ * md * a_k * (buf_rows_[t] - p.b()[row]);
    buf_rows_[t] = y_[row] - y_prev_[row];
  }
  BlockMultiplyTranspose(p.a(), part, j, buf_rows_, buf_cols_);
  touched_nnz_ += static_cast<double>(p.a().row_ptr()[r0 + nr] - p.a().row_ptr()[r0]);

  const double a_next = schedule_.next_a();
  // q_k = q_{k-1} + a_{k+1} (z_k + c) + m a_k (z_k - z_{k-1})
  for (Index t = 0; t < cols.size(); ++t) {
    const Index col = cols[t];
    z_[col] += buf_cols_[t];
    q_[col] += md * a_k * buf_cols_[t];
  }
  for (Index i = 0; i < q_.size(); ++i) q_[i] += a_next * (z_[i] + p.c()[i]);

  for (Index i = 0; i < x_.size(); ++i) x_acc_[i] += a_k * x_[i];
  for (Index i = 0; i < y_.size(); ++i) {
    y_acc_[i] += a_k * y_[i] + (md - 1.0) * a_k * (y_[i] - y_prev_[i]);
  }
}

std::vector<double> ClvrReference::NextX() const {
  const double scale = schedule_.next_big_a() / gamma_;
  std::vector<double> x(x0_.size());
  for (Index i = 0; i < x.size(); ++i) {
    x[i] = ProxCoord(p_->coords()[i], scale, x0_[i] - q_[i] / gamma_);
  }
  return x;
}

std::vector<double> ClvrReference::XTilde() const {
  if (schedule_.k() == 0) return x0_;
  std::vector<double> out(x_acc_);
  for (double& v : out) v /= schedule_.big_a();
  return out;
}

std::vector<double> ClvrReference::YTilde() const {
  if (schedule_.k() == 0) return y_;
  std::vector<double> out(y_acc_);
  for (double& v : out) v /= schedule_.big_a();
  return out;
}

ClvrOutput ClvrReference::Run(Index iterations, Index history_every) {
  const Index every = history_every == 0 ? part_->num_blocks() : history_every;
  const double nnz = static_cast<double>(p_->a().nnz());
  ClvrOutput out;
  for (Index t = 1; t <= iterations; ++t) {
    Iterate();
    if (t % every == 0 || t == iterations) {
      MetricsRecord rec;
      rec.iter = schedule_.k();
      rec.data_passes = nnz > 0.0 ? touched_nnz_ / nnz : 0.0;
      std::vector<double> xt = XTilde();
      p_->Project(xt);
      Measure(*p_, xt, YTilde(), rec);
      out.history.push_back(rec);
    }
  }
  out.x = XTilde();
  p_->Project(out.x);
  out.y = YTilde();
  return out;
}

}  // namespace clvr
