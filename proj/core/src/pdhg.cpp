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

#include "clvr/pdhg.hpp"

#include <cmath>
#include <numeric>
#include <utility>

#include "clvr/error.hpp"

namespace clvr {

double OperatorNorm(const SparseMatrix& a, double tol) {
  if (a.n_rows() == 0 || a.nnz() == 0) return 0.0;
  std::vector<Index> rows(a.n_rows());
  std::iota(rows.begin(), rows.end(), Index{0});
  return BlockOperatorNorm(a, rows, tol);
}

Pdhg::Pdhg(const GlpInstance& p, const PdhgParams& params,
           std::vector<double> x0, std::vector<double> y0, ProxOperator prox)
    : p_(&p), prox_(std::move(prox)), x_(std::move(x0)), y_(std::move(y0)) {
  if (x_.size() != p.n_cols() || y_.size() != p.n_rows()) {
    throw DimensionError("starting point has the wrong dimensions");
  }
  if (!prox_ && !p.IsFeasible(x_)) throw InfeasiblePointError("x0 lies outside X");
  if (!(params.step_factor > 0.0) || params.step_factor > 1.0) {
    throw ParameterError("step factor must lie in (0, 1]");
  }
  op_norm_ = params.op_norm > 0.0 ? params.op_norm : OperatorNorm(p.a());
  const double base = op_norm_ > 0.0 ? params.step_factor / op_norm_ : params.step_factor;
  tau_ = params.tau > 0.0 ? params.tau : base;
  sigma_ = params.sigma > 0.0 ? params.sigma : base;
  if (tau_ * sigma_ * op_norm_ * op_norm_ > 1.0 + 1e-12) {
    throw ParameterError("step sizes violate tau * sigma * ||A||^2 <= 1");
  }
  x_prev_ = x_;
  aty_ = p.a().MultiplyTranspose(y_);
  for (double v : y_) {
    if (v != 0.0) {
      touched_nnz_ = static_cast<double>(p.a().nnz());
      break;
    }
  }
  x_sum_.assign(x_.size(), 0.0);
  y_sum_.assign(y_.size(), 0.0);
}

void Pdhg::Iterate() {
  const GlpInstance& p = *p_;
  const Index d = x_.size();
  buf_x_.resize(d);
  for (Index i = 0; i < d; ++i) buf_x_[i] = x_[i] - tau_ * (p.c()[i] + aty_[i]);
  x_prev_ = x_;
  if (prox_) {
    prox_(tau_, buf_x_, x_);
  } else {
    p.Prox(tau_, buf_x_, x_);
  }
  for (Index i = 0; i < d; ++i) buf_x_[i] = 2.0 * x_[i] - x_prev_[i];
  buf_y_.resize(y_.size());
  p.a().Multiply(buf_x_, buf_y_);
  for (Index i = 0; i < y_.size(); ++i) y_[i] += sigma_ * (buf_y_[i] - p.b()[i]);
  p.a().MultiplyTranspose(y_, aty_);
  for (Index i = 0; i < d; ++i) x_sum_[i] += x_[i];
  for (Index i = 0; i < y_.size(); ++i) y_sum_[i] += y_[i];
  ++k_;
  touched_nnz_ += static_cast<double>(p.a().nnz());
}

std::vector<double> Pdhg::XAverage() const {
  if (k_ == 0) return x_;
  std::vector<double> out(x_sum_);
  for (double& v : out) v /= static_cast<double>(k_);
  return out;
}

std::vector<double> Pdhg::YAverage() const {
  if (k_ == 0) return y_;
  std::vector<double> out(y_sum_);
  for (double& v : out) v /= static_cast<double>(k_);
  return out;
}

}  // namespace clvr
