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

#include "clvr/step_schedule.hpp"

#include <algorithm>
#include <cmath>

#include "clvr/error.hpp"

namespace clvr {

StepSchedule::StepSchedule(double gamma, double sigma, double l_hat, Index m)
    : gamma_(gamma), sigma_(sigma), l_hat_(l_hat), m_(m) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ParameterError("gamma must be positive and finite");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("sigma must be nonnegative and finite");
  }
  if (!(l_hat > 0.0) || !std::isfinite(l_hat)) {
    throw ParameterError("block norm bound must be positive and finite");
  }
  if (m == 0) throw ParameterError("block count must be at least 1");
  base_ = 1.0 / (std::sqrt(2.0) * l_hat * static_cast<double>(m));
}

double StepSchedule::next_a() const {
  if (sigma_ == 0.0) return base_;
  return std::sqrt(1.0 + sigma_ * big_a_ / gamma_) * base_;
}

double StepSchedule::next_big_a() const {
  if (sigma_ == 0.0) return static_cast<double>(k_ + 1) * base_;
  return big_a_ + next_a();
}

void StepSchedule::Advance() {
  const double a = next_a();
  big_a_ = next_big_a();
  a_ = a;
  ++k_;
}

ScheduleTable PrecomputeSchedule(const StepSchedule& params, Index k_max) {
  StepSchedule s(params.gamma(), params.sigma(), params.l_hat(), params.m());
  ScheduleTable t;
  t.a.assign(k_max + 1, 0.0);
  t.big_a.assign(k_max + 1, 0.0);
  for (Index k = 1; k <= k_max; ++k) {
    s.Advance();
    t.a[k] = s.a();
    t.big_a[k] = s.big_a();
  }
  return t;
}

double LinearGrowthBound(const StepSchedule& params, Index k) {
  return static_cast<double>(k) /
         (std::sqrt(2.0) * params.l_hat() * static_cast<double>(params.m()));
}

Index QuadraticGrowthStart(const StepSchedule& params) {
  const double lm = params.l_hat() * static_cast<double>(params.m());
  return static_cast<Index>(std::ceil(params.sigma() / (9.0 * lm * params.gamma())));
}

double QuadraticGrowthBound(const StepSchedule& params, Index k) {
  if (params.sigma() == 0.0) return 0.0;
  const Index k0 = QuadraticGrowthStart(params);
  if (k <= k0) return 0.0;
  const double lm = params.l_hat() * static_cast<double>(params.m());
  const double scale = 3.0 * std::sqrt(2.0) * lm;
  const double offset =
      std::max(std::sqrt(9.0 * std::sqrt(2.0) * lm * params.gamma() / params.sigma()), 1.0);
  const double t = static_cast<double>(k - k0) + offset;
  return params.sigma() / (scale * scale * params.gamma()) * t * t;
}

}  // namespace clvr
