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

// Reformulations of distributionally robust hinge-loss classification as
// generalized linear programs.
//
// Wasserstein ball (label flips cost kappa):
//   min_{w, lambda}  rho lambda + (1/n) sum_i s_i
//   s.t. hinge(b_i a_i^T w) <= s_i, hinge(-b_i a_i^T w) - 2 kappa lambda <= s_i,
//        ||w||_inf <= lambda / M,
// written as a standard-form LP over (s, u, v, t, w+, w-, s1, s2, lambda+, lambda-).
//
// CVaR at level alpha:
//   min_x  max { sum_i p_i hinge(b_i a_i^T x) : 0 <= p <= 1/(alpha n), 1^T p = 1 }.
//
// General f-divergence ball: a GLP whose perspective and epigraph terms are
// handled by user-supplied two-dimensional proximal hooks.

#ifndef CLVR_DRO_HPP_
#define CLVR_DRO_HPP_

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clvr/glp.hpp"
#include "clvr/sparse_matrix.hpp"

namespace clvr {

struct Dataset {
  SparseMatrix features;       // n samples x d features, row i = a_i^T
  std::vector<double> labels;  // b_i in {+1, -1}

  Index n_samples() const { return features.n_rows(); }
  Index n_features() const { return features.n_cols(); }
  // Throws DimensionError or ParameterError.
  void Validate() const;
};

inline double Hinge(double t) { return t < 1.0 ? 1.0 - t : 0.0; }

// ---------------------------------------------------------------- Wasserstein

struct WassersteinParams {
  double rho = 10.0;
  double kappa = 0.1;
  double m_bound = 1.0;  // sup |theta| over the conjugate domain; 1 for hinge
};

// Column and row positions of the Wasserstein LP.
struct WassersteinLayout {
  Index n = 0;
  Index d = 0;

  Index s(Index i) const { return i; }
  Index u(Index i) const { return n + i; }
  Index v(Index i) const { return 2 * n + i; }
  Index t(Index i) const { return 3 * n + i; }
  Index w_plus(Index j) const { return 4 * n + j; }
  Index w_minus(Index j) const { return 4 * n + d + j; }
  Index s1(Index j) const { return 4 * n + 2 * d + j; }
  Index s2(Index j) const { return 4 * n + 3 * d + j; }
  Index lambda_plus() const { return 4 * n + 4 * d; }
  Index lambda_minus() const { return 4 * n + 4 * d + 1; }
  Index cols() const { return 4 * n + 4 * d + 2; }
  Index rows() const { return 3 * n + 2 * d; }
};

GlpInstance BuildWassersteinHingeLp(const Dataset& data, const WassersteinParams& params);

// Optimal value over s for fixed (w, lambda); nullopt when ||w||_inf > lambda / M.
// Throws ParameterError for lambda < 0.
std::optional<double> WassersteinInnerOracle(const Dataset& data,
                                             const WassersteinParams& params,
                                             std::span<const double> w, double lambda);

// (w, lambda) read back from an LP solution.
struct WassersteinSolution {
  std::vector<double> w;
  double lambda = 0.0;
};
WassersteinSolution RecoverWasserstein(const WassersteinLayout& layout,
                                       std::span<const double> x);

// ----------------------------------------------------------------------- CVaR

struct CvarParams {
  double alpha = 0.5;  // in (0, 1]
};

// Column positions of the CVaR program over (x, u, v, w, mu, s, gamma).
struct CvarLayout {
  Index n = 0;
  Index d = 0;

  Index x(Index j) const { return j; }
  Index u(Index i) const { return d + i; }
  Index v(Index i) const { return d + n + i; }
  Index w(Index i) const { return d + 2 * n + i; }
  Index mu(Index i) const { return d + 3 * n + i; }
  Index s(Index i) const { return d + 4 * n + i; }
  Index gamma() const { return d + 5 * n; }
  Index cols() const { return d + 5 * n + 1; }
  Index rows() const { return 3 * n; }
};

// x, u and gamma are Free coordinates; ToStandardForm splits them when an LP
// in standard form is needed.
GlpInstance BuildCvarHingeLp(const Dataset& data, const CvarParams& params);

// max { p^T losses : 0 <= p_i <= 1/(alpha n), sum p = 1 } by greedy filling.
// Throws ParameterError unless 0 < alpha <= 1.
double CvarOracle(std::span<const double> losses, double alpha);

// -------------------------------------------------------------- f-divergence

// Proximal map of the perspective (mu, q) -> mu f*(q / mu) on
// {mu >= 0, q in mu dom f*}: minimizes
//   0.5 (mu - mu_hat)^2 + 0.5 (q - q_hat)^2 + scale * mu f*(q / mu).
class PerspectiveProx {
 public:
  virtual ~PerspectiveProx() = default;
  virtual void Prox(double scale, double mu_hat, double q_hat, double& mu,
                    double& q) const = 0;
  virtual double Value(double mu, double q) const = 0;
};

// Euclidean projection onto the epigraph {(u, w) : g(u) <= w} of a loss g.
class EpigraphProjection {
 public:
  virtual ~EpigraphProjection() = default;
  virtual void Project(double u_hat, double w_hat, double& u, double& w) const = 0;
  virtual double Loss(double u) const = 0;
};

// Epigraph of the hinge loss, {w >= 0, w >= 1 - u}.
std::shared_ptr<const EpigraphProjection> HingeEpigraph();

struct Divergence {
  enum class Kind { kCvar, kCustom };

  Kind kind = Kind::kCvar;
  std::string name = "cvar";
  double alpha = 1.0;
  std::shared_ptr<const PerspectiveProx> perspective;

  static Divergence Cvar(double alpha);
  static Divergence Custom(std::string name, std::shared_ptr<const PerspectiveProx> perspective);
};

// Column positions of the f-divergence program over (x, gamma, u, v, w, mu, q).
struct FdivLayout {
  Index n = 0;
  Index d = 0;

  Index x(Index j) const { return j; }
  Index gamma() const { return d; }
  Index u(Index i) const { return d + 1 + i; }
  Index v(Index i) const { return d + 1 + n + i; }
  Index w(Index i) const { return d + 1 + 2 * n + i; }
  Index mu(Index i) const { return d + 1 + 3 * n + i; }
  Index q(Index i) const { return d + 1 + 4 * n + i; }
  Index cols() const { return d + 1 + 5 * n; }
  Index rows() const { return 3 * n - 1; }
};

// A GLP plus the two-dimensional proximal hooks it needs. For the CVaR
// divergence the program is the CVaR LP and carries no hooks.
struct FdivProgram {
  GlpInstance glp;
  bool is_cvar = false;
  FdivLayout layout;
  double rho = 0.0;
  std::shared_ptr<const PerspectiveProx> perspective;
  std::shared_ptr<const EpigraphProjection> epigraph;

  // Full proximal map of r plus the indicator of X, hooks included.
  void Prox(double scale, std::span<const double> in, std::span<double> out) const;
  // c^T x plus the perspective terms.
  double Objective(std::span<const double> x) const;
  // sqrt(||x - Prox(1, x - c - A^T y)||^2 + ||Ax - b||^2); zero exactly at
  // saddle points.
  double KktResidual(std::span<const double> x, std::span<const double> y) const;
};

// Equality rows: w + v - q - gamma 1 = 0, u_i - b_i a_i^T x = 0 and
// mu_i - mu_{i+1} = 0. Cost: gamma + rho mu_1 / n, plus (1/n) sum of the
// perspective terms. Throws UnsupportedError for a custom divergence without
// a perspective hook.
FdivProgram BuildFdivGlp(const Dataset& data, const Divergence& divergence,
                         double rho,
                         std::shared_ptr<const EpigraphProjection> epigraph = HingeEpigraph());

}  // namespace clvr

#endif  // CLVR_DRO_HPP_
