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

#include "clvr/dro.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "clvr/error.hpp"

namespace clvr {
namespace {

void RequirePositive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ParameterError(std::string(what) + " must be positive and finite");
  }
}

class HingeEpigraphProjection final : public EpigraphProjection {
 public:
  void Project(double u_hat, double w_hat, double& u, double& w) const override {
    if (w_hat >= 0.0 && w_hat + u_hat >= 1.0) {
      u = u_hat;
      w = w_hat;
      return;
    }
    // Nearest point on the ray {(t, 0) : t >= 1} or on {(t, 1 - t) : t <= 1}.
    const double u1 = std::max(u_hat, 1.0);
    const double d1 = (u1 - u_hat) * (u1 - u_hat) + w_hat * w_hat;
    const double u2 = std::min(0.5 * (u_hat - w_hat + 1.0), 1.0);
    const double w2 = 1.0 - u2;
    const double d2 = (u2 - u_hat) * (u2 - u_hat) + (w2 - w_hat) * (w2 - w_hat);
    if (d1 <= d2) {
      u = u1;
      w = 0.0;
    } else {
      u = u2;
      w = w2;
    }
  }
  double Loss(double u) const override { return Hinge(u); }
};

}  // namespace

void Dataset::Validate() const {
  if (labels.size() != features.n_rows()) {
    throw DimensionError("dataset has " + std::to_string(features.n_rows()) +
                         " samples but " + std::to_string(labels.size()) + " labels");
  }
  for (Index i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1.0 && labels[i] != -1.0) {
      throw ParameterError("label of sample " + std::to_string(i) + " is not +1 or -1");
    }
  }
  if (labels.empty()) throw ParameterError("dataset has no samples");
}

GlpInstance BuildWassersteinHingeLp(const Dataset& data, const WassersteinParams& params) {
  data.Validate();
  RequirePositive(params.rho, "rho");
  RequirePositive(params.kappa, "kappa");
  RequirePositive(params.m_bound, "M");
  const WassersteinLayout L{data.n_samples(), data.n_features()};
  const Index n = L.n;
  const Index d = L.d;
  const SparseMatrix& x = data.features;
  const double k2 = 2.0 * params.kappa;
  const double inv_m = 1.0 / params.m_bound;

  std::vector<Index> row_ptr{0};
  std::vector<Index> cols;
  std::vector<double> vals;
  row_ptr.reserve(L.rows() + 1);
  cols.reserve(10 * n + 10 * d + 2 * x.nnz());
  vals.reserve(cols.capacity());
  auto put = [&](Index c, double v) {
    cols.push_back(c);
    vals.push_back(v);
  };
  auto end_row = [&]() { row_ptr.push_back(cols.size()); };
  std::vector<double> b(L.rows(), 0.0);

  for (Index i = 0; i < n; ++i) {  // -s_i + u_i - 2 kappa lambda = 0
    put(L.s(i), -1.0);
    put(L.u(i), 1.0);
    put(L.lambda_plus(), -k2);
    put(L.lambda_minus(), k2);
    end_row();
  }
  for (Index i = 0; i < n; ++i) {  // s_i - v_i + b_i a_i^T w = 1
    put(L.s(i), 1.0);
    put(L.v(i), -1.0);
    const auto fc = x.row_cols(i);
    const auto fv = x.row_values(i);
    for (Index e = 0; e < fc.size(); ++e) put(L.w_plus(fc[e]), data.labels[i] * fv[e]);
    for (Index e = 0; e < fc.size(); ++e) put(L.w_minus(fc[e]), -data.labels[i] * fv[e]);
    end_row();
    b[n + i] = 1.0;
  }
  for (Index i = 0; i < n; ++i) {  // s_i + u_i - v_i - t_i = 2
    put(L.s(i), 1.0);
    put(L.u(i), 1.0);
    put(L.v(i), -1.0);
    put(L.t(i), -1.0);
    end_row();
    b[2 * n + i] = 2.0;
  }
  for (Index j = 0; j < d; ++j) {  // w_j + lambda / M - s1_j = 0
    put(L.w_plus(j), 1.0);
    put(L.w_minus(j), -1.0);
    put(L.s1(j), -1.0);
    put(L.lambda_plus(), inv_m);
    put(L.lambda_minus(), -inv_m);
    end_row();
  }
  for (Index j = 0; j < d; ++j) {  // w_j - lambda / M + s2_j = 0
    put(L.w_plus(j), 1.0);
    put(L.w_minus(j), -1.0);
    put(L.s2(j), 1.0);
    put(L.lambda_plus(), -inv_m);
    put(L.lambda_minus(), inv_m);
    end_row();
  }

  std::vector<double> c(L.cols(), 0.0);
  for (Index i = 0; i < n; ++i) c[L.s(i)] = 1.0 / static_cast<double>(n);
  c[L.lambda_plus()] = params.rho;
  c[L.lambda_minus()] = -params.rho;
  return GlpInstance::StandardLp(
      SparseMatrix::FromCsr(L.rows(), L.cols(), std::move(row_ptr), std::move(cols),
                            std::move(vals)),
      std::move(b), std::move(c));
}

std::optional<double> WassersteinInnerOracle(const Dataset& data,
                                             const WassersteinParams& params,
                                             std::span<const double> w, double lambda) {
  data.Validate();
  if (!(lambda >= 0.0)) throw ParameterError("lambda must be nonnegative");
  if (w.size() != data.n_features()) throw DimensionError("w has the wrong length");
  double w_inf = 0.0;
  for (double v : w) w_inf = std::max(w_inf, std::abs(v));
  if (w_inf > lambda / params.m_bound) return std::nullopt;
  const std::vector<double> scores = data.features.Multiply(w);
  double sum = 0.0;
  for (Index i = 0; i < scores.size(); ++i) {
    const double u = data.labels[i] * scores[i];
    sum += std::max(Hinge(u), Hinge(-u) - 2.0 * params.kappa * lambda);
  }
  return params.rho * lambda + sum / static_cast<double>(scores.size());
}

WassersteinSolution RecoverWasserstein(const WassersteinLayout& layout,
                                       std::span<const double> x) {
  if (x.size() != layout.cols()) throw DimensionError("solution has the wrong length");
  WassersteinSolution out;
  out.w.resize(layout.d);
  for (Index j = 0; j < layout.d; ++j) out.w[j] = x[layout.w_plus(j)] - x[layout.w_minus(j)];
  out.lambda = x[layout.lambda_plus()] - x[layout.lambda_minus()];
  return out;
}

GlpInstance BuildCvarHingeLp(const Dataset& data, const CvarParams& params) {
  data.Validate();
  if (!(params.alpha > 0.0 && params.alpha <= 1.0)) {
    throw ParameterError("alpha must lie in (0, 1]");
  }
  const CvarLayout L{data.n_samples(), data.n_features()};
  const Index n = L.n;
  std::vector<Triplet> t;
  t.reserve(9 * n + data.features.nnz());
  std::vector<double> b(L.rows(), 0.0);
  for (Index i = 0; i < n; ++i) {  // w_i + v_i - mu_i - gamma = 0
    t.push_back({i, L.w(i), 1.0});
    t.push_back({i, L.v(i), 1.0});
    t.push_back({i, L.mu(i), -1.0});
    t.push_back({i, L.gamma(), -1.0});
  }
  for (Index i = 0; i < n; ++i) {  // u_i - b_i a_i^T x = 0
    t.push_back({n + i, L.u(i), 1.0});
    const auto fc = data.features.row_cols(i);
    const auto fv = data.features.row_values(i);
    for (Index e = 0; e < fc.size(); ++e) t.push_back({n + i, L.x(fc[e]), -data.labels[i] * fv[e]});
  }
  for (Index i = 0; i < n; ++i) {  // s_i - u_i - w_i = -1
    t.push_back({2 * n + i, L.s(i), 1.0});
    t.push_back({2 * n + i, L.u(i), -1.0});
    t.push_back({2 * n + i, L.w(i), -1.0});
    b[2 * n + i] = -1.0;
  }
  std::vector<double> c(L.cols(), 0.0);
  c[L.gamma()] = 1.0;
  for (Index i = 0; i < n; ++i) c[L.mu(i)] = 1.0 / (params.alpha * static_cast<double>(n));
  std::vector<CoordSpec> coords(L.cols(), CoordSpec::NonNegative());
  for (Index j = 0; j < L.d; ++j) coords[L.x(j)] = CoordSpec::Free();
  for (Index i = 0; i < n; ++i) coords[L.u(i)] = CoordSpec::Free();
  coords[L.gamma()] = CoordSpec::Free();
  return GlpInstance(SparseMatrix::FromTriplets(L.rows(), L.cols(), t), std::move(b),
                     std::move(c), std::move(coords));
}

double CvarOracle(std::span<const double> losses, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in (0, 1]");
  if (losses.empty()) throw ParameterError("no losses given");
  std::vector<double> sorted(losses.begin(), losses.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double cap = 1.0 / (alpha * static_cast<double>(sorted.size()));
  double budget = 1.0;
  double value = 0.0;
  for (double l : sorted) {
    if (budget <= 0.0) break;
    const double p = std::min(cap, budget);
    value += p * l;
    budget -= p;
  }
  return value;
}

std::shared_ptr<const EpigraphProjection> HingeEpigraph() {
  static const auto kInstance = std::make_shared<const HingeEpigraphProjection>();
  return kInstance;
}

Divergence Divergence::Cvar(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in (0, 1]");
  Divergence d;
  d.kind = Kind::kCvar;
  d.name = "cvar";
  d.alpha = alpha;
  return d;
}

Divergence Divergence::Custom(std::string name, std::shared_ptr<const PerspectiveProx> perspective) {
  Divergence d;
  d.kind = Kind::kCustom;
  d.name = std::move(name);
  d.perspective = std::move(perspective);
  return d;
}

FdivProgram BuildFdivGlp(const Dataset& data, const Divergence& divergence, double rho,
                         std::shared_ptr<const EpigraphProjection> epigraph) {
  data.Validate();
  FdivProgram out;
  const Index n = data.n_samples();
  out.layout = FdivLayout{n, data.n_features()};
  out.rho = rho;
  if (divergence.kind == Divergence::Kind::kCvar) {
    out.glp = BuildCvarHingeLp(data, CvarParams{divergence.alpha});
    out.is_cvar = true;
    return out;
  }
  if (!divergence.perspective) {
    throw UnsupportedError("divergence '" + divergence.name + "' has no perspective prox");
  }
  if (!epigraph) throw UnsupportedError("loss epigraph has no projection");
  RequirePositive(rho, "rho");
  out.perspective = divergence.perspective;
  out.epigraph = std::move(epigraph);

  const FdivLayout& L = out.layout;
  std::vector<Triplet> t;
  std::vector<double> b(L.rows(), 0.0);
  for (Index i = 0; i < n; ++i) {  // w_i + v_i - q_i - gamma = 0
    t.push_back({i, L.w(i), 1.0});
    t.push_back({i, L.v(i), 1.0});
    t.push_back({i, L.q(i), -1.0});
    t.push_back({i, L.gamma(), -1.0});
  }
  for (Index i = 0; i < n; ++i) {  // u_i - b_i a_i^T x = 0
    t.push_back({n + i, L.u(i), 1.0});
    const auto fc = data.features.row_cols(i);
    const auto fv = data.features.row_values(i);
    for (Index e = 0; e < fc.size(); ++e) t.push_back({n + i, L.x(fc[e]), -data.labels[i] * fv[e]});
  }
  for (Index i = 0; i + 1 < n; ++i) {  // mu_i - mu_{i+1} = 0
    t.push_back({2 * n + i, L.mu(i), 1.0});
    t.push_back({2 * n + i, L.mu(i + 1), -1.0});
  }
  std::vector<double> c(L.cols(), 0.0);
  c[L.gamma()] = 1.0;
  c[L.mu(0)] = rho / static_cast<double>(n);
  // Paired coordinates are marked Free here; FdivProgram::Prox handles them.
  std::vector<CoordSpec> coords(L.cols(), CoordSpec::Free());
  for (Index i = 0; i < n; ++i) coords[L.v(i)] = CoordSpec::NonNegative();
  out.glp = GlpInstance(SparseMatrix::FromTriplets(L.rows(), L.cols(), t), std::move(b),
                        std::move(c), std::move(coords));
  return out;
}

void FdivProgram::Prox(double scale, std::span<const double> in, std::span<double> out) const {
  glp.Prox(scale, in, out);
  if (is_cvar) return;
  const double inv_n = 1.0 / static_cast<double>(layout.n);
  for (Index i = 0; i < layout.n; ++i) {
    epigraph->Project(in[layout.u(i)], in[layout.w(i)], out[layout.u(i)], out[layout.w(i)]);
    perspective->Prox(scale * inv_n, in[layout.mu(i)], in[layout.q(i)], out[layout.mu(i)],
                      out[layout.q(i)]);
  }
}

double FdivProgram::Objective(std::span<const double> x) const {
  if (x.size() != glp.n_cols()) throw DimensionError("point has the wrong length");
  double v = glp.RegularizerValue(x);
  for (Index i = 0; i < x.size(); ++i) v += glp.c()[i] * x[i];
  if (is_cvar) return v;
  double sum = 0.0;
  for (Index i = 0; i < layout.n; ++i) sum += perspective->Value(x[layout.mu(i)], x[layout.q(i)]);
  return v + sum / static_cast<double>(layout.n);
}

double FdivProgram::KktResidual(std::span<const double> x, std::span<const double> y) const {
  if (x.size() != glp.n_cols() || y.size() != glp.n_rows()) {
    throw DimensionError("point has the wrong dimensions");
  }
  const std::vector<double> aty = glp.a().MultiplyTranspose(y);
  std::vector<double> step(x.size());
  for (Index i = 0; i < x.size(); ++i) step[i] = x[i] - glp.c()[i] - aty[i];
  std::vector<double> px(x.size());
  Prox(1.0, step, px);
  double sq = 0.0;
  for (Index i = 0; i < x.size(); ++i) sq += (x[i] - px[i]) * (x[i] - px[i]);
  const std::vector<double> ax = glp.a().Multiply(x);
  for (Index i = 0; i < ax.size(); ++i) sq += (ax[i] - glp.b()[i]) * (ax[i] - glp.b()[i]);
  return std::sqrt(sq);
}

}  // namespace clvr
