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

// Primal-dual hybrid gradient baseline:
//
//   x+ = prox_{tau r}(x - tau (c + A^T y))  over X
//   y+ = y + sigma (A (2 x+ - x) - b)
//
// The restart candidate is the uniform average of the iterates.

#ifndef CLVR_PDHG_HPP_
#define CLVR_PDHG_HPP_

#include <functional>
#include <span>
#include <vector>

#include "clvr/glp.hpp"
#include "clvr/sparse_matrix.hpp"

namespace clvr {

struct PdhgParams {
  // Both steps default to step_factor / ||A||.
  double tau = 0.0;
  double sigma = 0.0;
  double step_factor = 0.9;
  // Spectral norm of A; 0 computes it.
  double op_norm = 0.0;
};

// out = argmin_x 0.5 ||x - in||^2 + scale * r(x) over X. Lets callers plug in
// proximal maps that couple coordinates.
using ProxOperator =
    std::function<void(double scale, std::span<const double> in, std::span<double> out)>;

// Spectral norm of A via BlockOperatorNorm over all rows; 0 for A = 0.
double OperatorNorm(const SparseMatrix& a, double tol = kDefaultNormTolerance);

class Pdhg {
 public:
  // p must outlive the solver. Throws ParameterError if tau sigma ||A||^2 > 1.
  Pdhg(const GlpInstance& p, const PdhgParams& params, std::vector<double> x0,
       std::vector<double> y0, ProxOperator prox = {});

  void Iterate();

  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& x_prev() const { return x_prev_; }
  const std::vector<double>& y() const { return y_; }
  std::vector<double> XAverage() const;
  std::vector<double> YAverage() const;

  Index iteration() const { return k_; }
  double tau() const { return tau_; }
  double sigma() const { return sigma_; }
  double op_norm() const { return op_norm_; }
  double touched_nnz() const { return touched_nnz_; }

 private:
  const GlpInstance* p_;
  ProxOperator prox_;
  double tau_ = 0.0;
  double sigma_ = 0.0;
  double op_norm_ = 0.0;
  Index k_ = 0;
  std::vector<double> x_, x_prev_, y_, aty_;
  std::vector<double> x_sum_, y_sum_;
  std::vector<double> buf_x_, buf_y_;
  double touched_nnz_ = 0.0;
};

}  // namespace clvr

#endif  // CLVR_PDHG_HPP_
