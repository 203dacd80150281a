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

// Checkpoint records shared by the solvers, the restart controller and the
// CSV trace writer.

#ifndef CLVR_METRICS_HPP_
#define CLVR_METRICS_HPP_

#include <limits>
#include <span>

#include "clvr/glp.hpp"

namespace clvr {

struct MetricsRecord {
  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  Index epoch = 0;
  Index iter = 0;            // cumulative iterations
  double data_passes = 0.0;  // cumulative touched nnz / nnz(A)
  double wall_ms = 0.0;
  double lp_metric = kNaN;   // at the monitored candidate
  double primal_obj = kNaN;
  double infeas = kNaN;      // ||Ax - b||
  // LP metric at the raw last iterate. Logged in memory only.
  double last_iterate_metric = kNaN;
};

// Fills lp_metric (standard LPs only), primal_obj and infeas for (x, y).
// x must lie in X.
void Measure(const GlpInstance& p, std::span<const double> x,
             std::span<const double> y, MetricsRecord& record);

}  // namespace clvr

#endif  // CLVR_METRICS_HPP_
