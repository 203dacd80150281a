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

// Step-size sequence of the CLVR method:
//
//   a_1 = A_1 = 1 / (sqrt(2) L m)
//   a_{k+1} = sqrt(1 + sigma A_k / gamma) / (sqrt(2) L m),  A_{k+1} = A_k + a_{k+1}
//
// With sigma = 0 every a_k equals a_1 and A_k is stored as k * a_1 so that it
// carries no summation error.

#ifndef CLVR_STEP_SCHEDULE_HPP_
#define CLVR_STEP_SCHEDULE_HPP_

#include <vector>

#include "clvr/sparse_matrix.hpp"

namespace clvr {

class StepSchedule {
 public:
  // Throws ParameterError unless gamma > 0, sigma >= 0, l_hat > 0 (all
  // finite) and m >= 1.
  StepSchedule(double gamma, double sigma, double l_hat, Index m);

  // State after k advances: a() = a_k and big_a() = A_k, both 0 at k = 0.
  Index k() const { return k_; }
  double a() const { return a_; }
  double big_a() const { return big_a_; }

  // a_{k+1} and A_{k+1} without advancing.
  double next_a() const;
  double next_big_a() const;
  void Advance();

  double gamma() const { return gamma_; }
  double sigma() const { return sigma_; }
  double l_hat() const { return l_hat_; }
  Index m() const { return m_; }
  // 1 / (sqrt(2) L m), the value of a_1.
  double base() const { return base_; }

 private:
  double gamma_;
  double sigma_;
  double l_hat_;
  Index m_;
  double base_;
  Index k_ = 0;
  double a_ = 0.0;
  double big_a_ = 0.0;
};

// a[k] and big_a[k] for k = 0..k_max (index 0 holds zeros).
struct ScheduleTable {
  std::vector<double> a;
  std::vector<double> big_a;
};
ScheduleTable PrecomputeSchedule(const StepSchedule& params, Index k_max);

// Guaranteed growth of A_k: the linear bound k / (sqrt(2) L m), and for
// sigma > 0 and k > K_0 the quadratic bound
//   sigma / ((3 sqrt(2) L m)^2 gamma) * (k - K_0 + max(sqrt(9 sqrt(2) L m gamma / sigma), 1))^2
// with K_0 = ceil(sigma / (9 L m gamma)).
double LinearGrowthBound(const StepSchedule& params, Index k);
Index QuadraticGrowthStart(const StepSchedule& params);
double QuadraticGrowthBound(const StepSchedule& params, Index k);

}  // namespace clvr

#endif  // CLVR_STEP_SCHEDULE_HPP_
