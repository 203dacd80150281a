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

#include "clvr/glp.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "clvr/error.hpp"

namespace clvr {
namespace {

// Slack allowed when checking feasibility of averaged iterates.
constexpr double kFeasibilityTol = 1e-12;

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void RequireSize(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": expected length " +
                         std::to_string(want) + ", got " + std::to_string(got));
  }
}

}  // namespace

Constraint Constraint::Box(double lo, double hi) {
  if (std::isnan(lo) || std::isnan(hi) || lo > hi) {
    throw ParameterError("Box constraint requires lo <= hi");
  }
  return {ConstraintKind::kBox, lo, hi};
}

bool Constraint::Contains(double x, double tol) const {
  const double slack_lo = tol * std::max(1.0, std::abs(lo));
  const double slack_hi = tol * std::max(1.0, std::abs(hi));
  return x >= lo - slack_lo && x <= hi + slack_hi;
}

Regularizer Regularizer::Linear(double w) {
  if (!std::isfinite(w)) throw ParameterError("Linear weight must be finite");
  return {RegularizerKind::kLinear, w, nullptr};
}

Regularizer Regularizer::AbsValue(double w) {
  if (!std::isfinite(w) || w < 0.0) {
    throw ParameterError("AbsValue weight must be finite and >= 0");
  }
  return {RegularizerKind::kAbsValue, w, nullptr};
}

Regularizer Regularizer::Quadratic(double w) {
  if (!std::isfinite(w) || w < 0.0) {
    throw ParameterError("Quadratic weight must be finite and >= 0");
  }
  return {RegularizerKind::kQuadratic, w, nullptr};
}

Regularizer Regularizer::Custom(std::shared_ptr<const ScalarProx> prox) {
  if (!prox) throw ParameterError("Custom regularizer needs a prox map");
  return {RegularizerKind::kCustom, 0.0, std::move(prox)};
}

double Regularizer::Value(double x) const {
  switch (kind) {
    case RegularizerKind::kZero:
      return 0.0;
    case RegularizerKind::kLinear:
      return weight * x;
    case RegularizerKind::kAbsValue:
      return weight * std::abs(x);
    case RegularizerKind::kQuadratic:
      return 0.5 * weight * x * x;
    case RegularizerKind::kCustom:
      return custom->Value(x);
  }
  return 0.0;
}

double ProxCoord(const CoordSpec& spec, double scale, double xhat) {
  const Regularizer& r = spec.regularizer;
  double x = xhat;
  switch (r.kind) {
    case RegularizerKind::kZero:
      break;
    case RegularizerKind::kLinear:
      x = xhat - scale * r.weight;
      break;
    case RegularizerKind::kAbsValue: {
      const double t = scale * r.weight;
      x = xhat > t ? xhat - t : (xhat < -t ? xhat + t : 0.0);
      break;
    }
    case RegularizerKind::kQuadratic:
      x = xhat / (1.0 + scale * r.weight);
      break;
    case RegularizerKind::kCustom:
      x = r.custom->Prox(scale, xhat);
      break;
  }
  return spec.constraint.Project(x);
}

GlpInstance::GlpInstance(SparseMatrix a, std::vector<double> b,
                         std::vector<double> c, std::vector<CoordSpec> coords)
    : a_(std::move(a)),
      b_(std::move(b)),
      c_(std::move(c)),
      coords_(std::move(coords)) {
  RequireSize(b_.size(), a_.n_rows(), "GlpInstance b");
  RequireSize(c_.size(), a_.n_cols(), "GlpInstance c");
  RequireSize(coords_.size(), a_.n_cols(), "GlpInstance coordinate specs");
  double sigma = std::numeric_limits<double>::infinity();
  for (const CoordSpec& spec : coords_) {
    if (spec.constraint.lo > spec.constraint.hi) {
      throw ParameterError("coordinate box with lo > hi");
    }
    const Regularizer& r = spec.regularizer;
    if (r.kind == RegularizerKind::kCustom && !r.custom) {
      throw ParameterError("custom regularizer without prox map");
    }
    double modulus = 0.0;
    if (r.kind == RegularizerKind::kQuadratic) modulus = r.weight;
    if (r.kind == RegularizerKind::kCustom) modulus = r.custom->StrongConvexity();
    sigma = std::min(sigma, modulus);
  }
  sigma_ = coords_.empty() ? 0.0 : sigma;
}

GlpInstance GlpInstance::StandardLp(SparseMatrix a, std::vector<double> b,
                                    std::vector<double> c) {
  std::vector<CoordSpec> coords(a.n_cols(), CoordSpec::NonNegative());
  return GlpInstance(std::move(a), std::move(b), std::move(c),
                     std::move(coords));
}

bool GlpInstance::IsStandardLp() const {
  return std::all_of(coords_.begin(), coords_.end(), [](const CoordSpec& s) {
    return s.constraint.kind == ConstraintKind::kNonNegative &&
           s.regularizer.kind == RegularizerKind::kZero;
  });
}

double GlpInstance::RegularizerValue(std::span<const double> x) const {
  RequireSize(x.size(), n_cols(), "RegularizerValue x");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += coords_[i].regularizer.Value(x[i]);
  return s;
}

bool GlpInstance::IsFeasible(std::span<const double> x) const {
  RequireSize(x.size(), n_cols(), "IsFeasible x");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!coords_[i].constraint.Contains(x[i], kFeasibilityTol)) return false;
  }
  return true;
}

void GlpInstance::Project(std::span<double> x) const {
  RequireSize(x.size(), n_cols(), "Project x");
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = coords_[i].constraint.Project(x[i]);
}

void GlpInstance::Prox(double scale, std::span<const double> xhat,
                       std::span<double> out) const {
  RequireSize(xhat.size(), n_cols(), "Prox input");
  RequireSize(out.size(), n_cols(), "Prox output");
  for (std::size_t i = 0; i < xhat.size(); ++i) out[i] = ProxCoord(coords_[i], scale, xhat[i]);
}

GlpInstance GlpInstance::WithNormalizedRows() const {
  NormalizedSystem sys = NormalizeRows(a_, b_);
  return GlpInstance(std::move(sys.a), std::move(sys.b), c_, coords_);
}

double Lagrangian(const GlpInstance& p, std::span<const double> x,
                  std::span<const double> y) {
  RequireSize(y.size(), p.n_rows(), "Lagrangian y");
  if (!p.IsFeasible(x)) {
    throw InfeasiblePointError("Lagrangian evaluated at a point outside X");
  }
  const std::vector<double> ax = p.a().Multiply(x);
  double coupling = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) coupling += y[i] * (ax[i] - p.b()[i]);
  return Dot(p.c(), x) + p.RegularizerValue(x) + coupling;
}

double PrimalDualGap(const GlpInstance& p, std::span<const double> u,
                     std::span<const double> v, std::span<const double> xt,
                     std::span<const double> yt) {
  return Lagrangian(p, xt, v) - Lagrangian(p, u, yt);
}

double LpMetricTerms::Total() const {
  return std::sqrt(primal_violation + residual + dual_infeasibility +
                   gap_surplus);
}

LpMetricTerms LpMetricBreakdown(const GlpInstance& p, std::span<const double> x,
                                std::span<const double> y) {
  if (!p.IsStandardLp()) {
    throw UnsupportedError("LP metric needs a standard-form LP (r = 0, x >= 0)");
  }
  RequireSize(x.size(), p.n_cols(), "LpMetric x");
  RequireSize(y.size(), p.n_rows(), "LpMetric y");
  LpMetricTerms t;
  for (double xi : x) {
    if (xi < 0.0) t.primal_violation += xi * xi;
  }
  const std::vector<double> ax = p.a().Multiply(x);
  for (std::size_t i = 0; i < ax.size(); ++i) {
    const double r = ax[i] - p.b()[i];
    t.residual += r * r;
  }
  const std::vector<double> aty = p.a().MultiplyTranspose(y);
  for (std::size_t i = 0; i < aty.size(); ++i) {
    const double d = -aty[i] - p.c()[i];
    if (d > 0.0) t.dual_infeasibility += d * d;
  }
  const double gap = Dot(p.c(), x) + Dot(p.b(), y);
  if (gap > 0.0) t.gap_surplus = gap * gap;
  return t;
}

double LpMetric(const GlpInstance& p, std::span<const double> x,
                std::span<const double> y) {
  return LpMetricBreakdown(p, x, y).Total();
}

ObjectiveAndResidual ObjectiveAndFeasibility(const GlpInstance& p,
                                             std::span<const double> x) {
  if (!p.IsFeasible(x)) {
    throw InfeasiblePointError("objective evaluated at a point outside X");
  }
  const std::vector<double> ax = p.a().Multiply(x);
  double res = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    const double r = ax[i] - p.b()[i];
    res += r * r;
  }
  return {Dot(p.c(), x) + p.RegularizerValue(x), std::sqrt(res)};
}

std::vector<double> StandardForm::Recover(std::span<const double> x_std) const {
  RequireSize(x_std.size(), lp.n_cols(), "StandardForm::Recover");
  std::vector<double> x(plus_col.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = x_std[plus_col[i]];
    if (minus_col[i] != npos) x[i] -= x_std[minus_col[i]];
  }
  return x;
}

StandardForm ToStandardForm(const GlpInstance& p) {
  StandardForm out;
  const Index d = p.n_cols();
  out.plus_col.resize(d);
  out.minus_col.assign(d, StandardForm::npos);
  Index next = d;
  for (Index i = 0; i < d; ++i) {
    const CoordSpec& s = p.coords()[i];
    if (s.regularizer.kind != RegularizerKind::kZero) {
      throw UnsupportedError("ToStandardForm: coordinate " + std::to_string(i) +
                             " has a regularizer");
    }
    out.plus_col[i] = i;
    if (s.constraint.kind == ConstraintKind::kFree) {
      out.minus_col[i] = next++;
    } else if (s.constraint.kind != ConstraintKind::kNonNegative) {
      throw UnsupportedError("ToStandardForm: box constraints are not supported");
    }
  }
  std::vector<Triplet> entries = p.a().ToTriplets();
  const std::size_t original = entries.size();
  for (std::size_t e = 0; e < original; ++e) {
    const Index minus = out.minus_col[entries[e].col];
    if (minus != StandardForm::npos) {
      entries.push_back({entries[e].row, minus, -entries[e].value});
    }
  }
  std::vector<double> c(next, 0.0);
  for (Index i = 0; i < d; ++i) {
    c[i] = p.c()[i];
    if (out.minus_col[i] != StandardForm::npos) c[out.minus_col[i]] = -p.c()[i];
  }
  out.lp = GlpInstance::StandardLp(
      SparseMatrix::FromTriplets(p.n_rows(), next, entries), p.b(), std::move(c));
  return out;
}

}  // namespace clvr
