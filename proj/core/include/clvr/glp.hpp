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

// Generalized linear programs
//
//   min_x  c^T x + r(x)   s.t.  A x = b,  x in X
//
// with X and r separable over coordinates, and their saddle-point form
//
//   min_{x in X} max_y  L(x, y) = c^T x + r(x) + y^T A x - y^T b.
//
// Note the sign convention: the equality constraint enters as y^T (Ax - b),
// so for a standard-form LP the dual feasibility condition reads
// c + A^T y >= 0 and the dual objective is -b^T y.

#ifndef CLVR_GLP_HPP_
#define CLVR_GLP_HPP_

#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "clvr/sparse_matrix.hpp"

namespace clvr {

enum class ConstraintKind { kFree, kNonNegative, kBox };

struct Constraint {
  ConstraintKind kind = ConstraintKind::kFree;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  static Constraint Free() { return {}; }
  static Constraint NonNegative() {
    return {ConstraintKind::kNonNegative, 0.0,
            std::numeric_limits<double>::infinity()};
  }
  static Constraint Box(double lo, double hi);

  double Project(double x) const { return x < lo ? lo : (x > hi ? hi : x); }
  bool Contains(double x, double tol = 0.0) const;
};

// User-supplied one-dimensional regularizer. Prox must return the minimizer
// of 0.5 (x - xhat)^2 + scale * r(x) over the real line; the coordinate
// constraint is applied afterwards by clipping, which is exact in 1-D.
class ScalarProx {
 public:
  virtual ~ScalarProx() = default;
  virtual double Prox(double scale, double xhat) const = 0;
  virtual double Value(double x) const = 0;
  virtual double StrongConvexity() const { return 0.0; }
};

enum class RegularizerKind { kZero, kLinear, kAbsValue, kQuadratic, kCustom };

// r(x) = 0, w x, w |x|, (w/2) x^2, or a custom ScalarProx.
struct Regularizer {
  RegularizerKind kind = RegularizerKind::kZero;
  double weight = 0.0;
  std::shared_ptr<const ScalarProx> custom;

  static Regularizer Zero() { return {}; }
  static Regularizer Linear(double w);
  static Regularizer AbsValue(double w);
  static Regularizer Quadratic(double w);
  static Regularizer Custom(std::shared_ptr<const ScalarProx> prox);

  double Value(double x) const;
};

struct CoordSpec {
  Constraint constraint;
  Regularizer regularizer;

  static CoordSpec Free() { return {}; }
  static CoordSpec NonNegative() { return {Constraint::NonNegative(), {}}; }
};

// argmin_x 0.5 (x - xhat)^2 + scale * r(x) over the coordinate's constraint
// set. scale must be finite and >= 0; scale == 0 is the projection.
double ProxCoord(const CoordSpec& spec, double scale, double xhat);

class GlpInstance {
 public:
  GlpInstance() = default;
  // Validates dimensions and descriptors; throws DimensionError or
  // ParameterError.
  GlpInstance(SparseMatrix a, std::vector<double> b, std::vector<double> c,
              std::vector<CoordSpec> coords);

  // min c^T x s.t. Ax = b, x >= 0.
  static GlpInstance StandardLp(SparseMatrix a, std::vector<double> b,
                                std::vector<double> c);

  const SparseMatrix& a() const { return a_; }
  const std::vector<double>& b() const { return b_; }
  const std::vector<double>& c() const { return c_; }
  const std::vector<CoordSpec>& coords() const { return coords_; }
  Index n_rows() const { return a_.n_rows(); }
  Index n_cols() const { return a_.n_cols(); }

  // Strong convexity modulus of r: the smallest quadratic weight, or 0 when
  // some coordinate has no quadratic term.
  double sigma() const { return sigma_; }

  // r == 0 and every coordinate constrained to x >= 0.
  bool IsStandardLp() const;

  double RegularizerValue(std::span<const double> x) const;
  bool IsFeasible(std::span<const double> x) const;
  void Project(std::span<double> x) const;

  // out_i = ProxCoord(coord_i, scale, xhat_i).
  void Prox(double scale, std::span<const double> xhat,
            std::span<double> out) const;

  // Same instance with (A, b) replaced by a row-normalized copy.
  GlpInstance WithNormalizedRows() const;

 private:
  SparseMatrix a_;
  std::vector<double> b_;
  std::vector<double> c_;
  std::vector<CoordSpec> coords_;
  double sigma_ = 0.0;
};

struct SaddlePoint {
  std::vector<double> x;
  std::vector<double> y;
};

// c^T x + r(x) + y^T (Ax - b). Throws InfeasiblePointError if x leaves X.
double Lagrangian(const GlpInstance& p, std::span<const double> x,
                  std::span<const double> y);
inline double Lagrangian(const GlpInstance& p, const SaddlePoint& w) {
  return Lagrangian(p, w.x, w.y);
}

// L(xt, v) - L(u, yt).
double PrimalDualGap(const GlpInstance& p, std::span<const double> u,
                     std::span<const double> v, std::span<const double> xt,
                     std::span<const double> yt);

// Squared components of the LP residual metric.
struct LpMetricTerms {
  double primal_violation = 0.0;    // ||max(-x, 0)||^2
  double residual = 0.0;            // ||Ax - b||^2
  double dual_infeasibility = 0.0;  // ||max(-A^T y - c, 0)||^2
  double gap_surplus = 0.0;         // max(c^T x + b^T y, 0)^2

  double Total() const;
};

// sqrt of the sum of the four squared terms above; zero exactly at primal-dual
// optimal pairs. Throws UnsupportedError unless p.IsStandardLp().
double LpMetric(const GlpInstance& p, std::span<const double> x,
                std::span<const double> y);
LpMetricTerms LpMetricBreakdown(const GlpInstance& p, std::span<const double> x,
                                std::span<const double> y);

struct ObjectiveAndResidual {
  double objective = 0.0;      // c^T x + r(x)
  double infeasibility = 0.0;  // ||Ax - b||
};
ObjectiveAndResidual ObjectiveAndFeasibility(const GlpInstance& p,
                                             std::span<const double> x);

// A standard-form LP equivalent to a GLP whose coordinates are Free or
// NonNegative with r == 0. Free coordinates are split into x+ - x-.
struct StandardForm {
  GlpInstance lp;
  std::vector<Index> plus_col;   // original coordinate -> column of x+
  std::vector<Index> minus_col;  // original coordinate -> column of x-, or npos
  static constexpr Index npos = static_cast<Index>(-1);

  std::vector<double> Recover(std::span<const double> x_std) const;
};
StandardForm ToStandardForm(const GlpInstance& p);

}  // namespace clvr

#endif  // CLVR_GLP_HPP_
