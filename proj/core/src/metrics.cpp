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

#include "clvr/metrics.hpp"

namespace clvr {

void Measure(const GlpInstance& p, std::span<const double> x,
             std::span<const double> y, MetricsRecord& record) {
  const ObjectiveAndResidual obj = ObjectiveAndFeasibility(p, x);
  record.primal_obj = obj.objective;
  record.infeas = obj.infeasibility;
  record.lp_metric = p.IsStandardLp() ? LpMetric(p, x, y) : MetricsRecord::kNaN;
}

}  // namespace clvr
