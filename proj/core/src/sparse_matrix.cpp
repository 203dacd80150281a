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

#include "clvr/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "clvr/error.hpp"

namespace clvr {
namespace {

void CheckSize(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": expected length " +
                         std::to_string(want) + ", got " +
                         std::to_string(got));
  }
}

double SparseDot(std::span<const Index> ca, std::span<const double> va,
                 std::span<const Index> cb, std::span<const double> vb) {
  double sum = 0.0;
  std::size_t p = 0;
  std::size_t q = 0;
  while (p < ca.size() && q < cb.size()) {
    if (ca[p] == cb[q]) {
      sum += va[p++] * vb[q++];
    } else if (ca[p] < cb[q]) {
      ++p;
    } else {
      ++q;
    }
  }
  return sum;
}

// Largest eigenvalue of a small dense symmetric matrix (row-major, size k),
// by cyclic Jacobi rotations.
double JacobiMaxEigenvalue(std::vector<double> g, std::size_t k) {
  auto at = [&](std::size_t r, std::size_t c) -> double& { return g[r * k + c]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    double total = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t c = 0; c < k; ++c) {
        total += at(r, c) * at(r, c);
        if (r != c) off += at(r, c) * at(r, c);
      }
    }
    if (off <= 1e-30 * total) break;
    for (std::size_t p = 0; p + 1 < k; ++p) {
      for (std::size_t q = p + 1; q < k; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t r = 0; r < k; ++r) {
          const double arp = at(r, p);
          const double arq = at(r, q);
          at(r, p) = c * arp - s * arq;
          at(r, q) = s * arp + c * arq;
        }
        for (std::size_t r = 0; r < k; ++r) {
          const double apr = at(p, r);
          const double aqr = at(q, r);
          at(p, r) = c * apr - s * aqr;
          at(q, r) = s * apr + c * aqr;
        }
      }
    }
  }
  double best = 0.0;
  for (std::size_t r = 0; r < k; ++r) best = std::max(best, at(r, r));
  return best;
}

constexpr std::size_t kJacobiMaxRows = 32;

}  // namespace

SparseMatrix SparseMatrix::FromTriplets(Index n_rows, Index n_cols,
                                        std::span<const Triplet> entries) {
  for (const Triplet& t : entries) {
    if (t.row >= n_rows || t.col >= n_cols) {
      throw DimensionError("triplet (" + std::to_string(t.row) + ", " +
                           std::to_string(t.col) + ") out of range for " +
                           std::to_string(n_rows) + "x" +
                           std::to_string(n_cols) + " matrix");
    }
  }
  // Counting sort by row, then sort each row by column and merge duplicates.
  std::vector<Index> count(n_rows + 1, 0);
  for (const Triplet& t : entries) ++count[t.row + 1];
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<std::pair<Index, double>> bucket(entries.size());
  {
    std::vector<Index> next(count.begin(), count.end() - 1);
    for (const Triplet& t : entries) bucket[next[t.row]++] = {t.col, t.value};
  }

  SparseMatrix m;
  m.n_rows_ = n_rows;
  m.n_cols_ = n_cols;
  m.row_ptr_.assign(n_rows + 1, 0);
  m.col_idx_.reserve(entries.size());
  m.values_.reserve(entries.size());
  for (Index i = 0; i < n_rows; ++i) {
    auto first = bucket.begin() + static_cast<std::ptrdiff_t>(count[i]);
    auto last = bucket.begin() + static_cast<std::ptrdiff_t>(count[i + 1]);
    std::stable_sort(first, last, [](const auto& l, const auto& r) {
      return l.first < r.first;
    });
    for (auto it = first; it != last;) {
      const Index col = it->first;
      double sum = 0.0;
      for (; it != last && it->first == col; ++it) sum += it->second;
      if (sum != 0.0) {
        m.col_idx_.push_back(col);
        m.values_.push_back(sum);
      }
    }
    m.row_ptr_[i + 1] = m.col_idx_.size();
  }
  return m;
}

SparseMatrix SparseMatrix::FromCsr(Index n_rows, Index n_cols,
                                   std::vector<Index> row_ptr,
                                   std::vector<Index> col_idx,
                                   std::vector<double> values) {
  CheckSize(row_ptr.size(), n_rows + 1, "row_ptr");
  CheckSize(values.size(), col_idx.size(), "values");
  if (row_ptr[0] != 0 || row_ptr[n_rows] != col_idx.size()) {
    throw DimensionError("row_ptr must start at 0 and end at nnz");
  }
  for (Index i = 0; i < n_rows; ++i) {
    if (row_ptr[i] > row_ptr[i + 1]) {
      throw DimensionError("row_ptr decreases at row " + std::to_string(i));
    }
    for (Index p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
      if (col_idx[p] >= n_cols) {
        throw DimensionError("column " + std::to_string(col_idx[p]) +
                             " out of range in row " + std::to_string(i));
      }
      if (p > row_ptr[i] && col_idx[p] <= col_idx[p - 1]) {
        throw DimensionError("columns not strictly increasing in row " +
                             std::to_string(i));
      }
      if (values[p] == 0.0) {
        throw DimensionError("explicit zero stored in row " +
                             std::to_string(i));
      }
    }
  }
  SparseMatrix m;
  m.n_rows_ = n_rows;
  m.n_cols_ = n_cols;
  m.row_ptr_ = std::move(row_ptr);
  m.col_idx_ = std::move(col_idx);
  m.values_ = std::move(values);
  return m;
}

double SparseMatrix::RowNorm(Index i) const {
  double s = 0.0;
  for (double v : row_values(i)) s += v * v;
  return std::sqrt(s);
}

std::vector<Triplet> SparseMatrix::ToTriplets() const {
  std::vector<Triplet> out;
  out.reserve(nnz());
  for (Index i = 0; i < n_rows_; ++i) {
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      out.push_back({i, col_idx_[p], values_[p]});
    }
  }
  return out;
}

SparseMatrix SparseMatrix::Transpose() const {
  SparseMatrix t;
  t.n_rows_ = n_cols_;
  t.n_cols_ = n_rows_;
  t.row_ptr_.assign(n_cols_ + 1, 0);
  for (Index c : col_idx_) ++t.row_ptr_[c + 1];
  std::partial_sum(t.row_ptr_.begin(), t.row_ptr_.end(), t.row_ptr_.begin());
  t.col_idx_.resize(nnz());
  t.values_.resize(nnz());
  std::vector<Index> next(t.row_ptr_.begin(), t.row_ptr_.end() - 1);
  for (Index i = 0; i < n_rows_; ++i) {
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      const Index dst = next[col_idx_[p]]++;
      t.col_idx_[dst] = i;
      t.values_[dst] = values_[p];
    }
  }
  return t;
}

SparseMatrix SparseMatrix::ScaleRows(std::span<const double> scale) const {
  CheckSize(scale.size(), n_rows_, "row scale");
  SparseMatrix out = *this;
  for (Index i = 0; i < n_rows_; ++i) {
    if (scale[i] == 0.0) {
      throw ParameterError("zero row scale would store explicit zeros");
    }
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      out.values_[p] *= scale[i];
    }
  }
  return out;
}

void SparseMatrix::Multiply(std::span<const double> x,
                            std::span<double> out) const {
  CheckSize(x.size(), n_cols_, "Multiply input");
  CheckSize(out.size(), n_rows_, "Multiply output");
  for (Index i = 0; i < n_rows_; ++i) {
    double s = 0.0;
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      s += values_[p] * x[col_idx_[p]];
    }
    out[i] = s;
  }
}

void SparseMatrix::MultiplyTranspose(std::span<const double> y,
                                     std::span<double> out) const {
  CheckSize(y.size(), n_rows_, "MultiplyTranspose input");
  CheckSize(out.size(), n_cols_, "MultiplyTranspose output");
  std::fill(out.begin(), out.end(), 0.0);
  for (Index i = 0; i < n_rows_; ++i) {
    const double yi = y[i];
    if (yi == 0.0) continue;
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      out[col_idx_[p]] += values_[p] * yi;
    }
  }
}

std::vector<double> SparseMatrix::Multiply(std::span<const double> x) const {
  std::vector<double> out(n_rows_);
  Multiply(x, out);
  return out;
}

std::vector<double> SparseMatrix::MultiplyTranspose(
    std::span<const double> y) const {
  std::vector<double> out(n_cols_);
  MultiplyTranspose(y, out);
  return out;
}

std::vector<Index> BlockPartition::rows_of_block(Index j) const {
  std::vector<Index> rows(block_rows(j));
  std::iota(rows.begin(), rows.end(), row_begin(j));
  return rows;
}

double BlockOperatorNorm(const SparseMatrix& a, std::span<const Index> rows,
                         double tol) {
  if (rows.empty()) throw ParameterError("BlockOperatorNorm: empty row set");
  if (!(tol > 0.0)) throw ParameterError("BlockOperatorNorm: tol must be > 0");
  for (Index r : rows) {
    if (r >= a.n_rows()) throw DimensionError("BlockOperatorNorm: row out of range");
  }
  if (rows.size() == 1) return a.RowNorm(rows[0]);

  const std::size_t k = rows.size();
  if (k <= kJacobiMaxRows) {
    std::vector<double> gram(k * k);
    for (std::size_t p = 0; p < k; ++p) {
      for (std::size_t q = p; q < k; ++q) {
        const double g = SparseDot(a.row_cols(rows[p]), a.row_values(rows[p]),
                                   a.row_cols(rows[q]), a.row_values(rows[q]));
        gram[p * k + q] = g;
        gram[q * k + p] = g;
      }
    }
    const double lambda = JacobiMaxEigenvalue(std::move(gram), k);
    if (lambda <= 0.0) return 0.0;
    // Rounding in the eigensolve is far below tol; nudge upward so the result
    // never under-estimates.
    return std::sqrt(lambda) * (1.0 + std::min(tol, 1e-12));
  }

  // Power iteration on B^T B over the support columns of B = A^{rows}.
  std::vector<Index> support;
  for (Index r : rows) {
    for (Index c : a.row_cols(r)) support.push_back(c);
  }
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  if (support.empty()) return 0.0;
  auto local = [&](Index c) {
    return static_cast<std::size_t>(
        std::lower_bound(support.begin(), support.end(), c) - support.begin());
  };
  std::vector<std::vector<std::size_t>> local_cols(k);
  for (std::size_t p = 0; p < k; ++p) {
    for (Index c : a.row_cols(rows[p])) local_cols[p].push_back(local(c));
  }

  std::vector<double> v(support.size(), 1.0 / std::sqrt(double(support.size())));
  std::vector<double> w(support.size());
  std::vector<double> bv(k);
  double sigma = 0.0;
  for (int it = 0; it < kMaxPowerIterations; ++it) {
    for (std::size_t p = 0; p < k; ++p) {
      const auto vals = a.row_values(rows[p]);
      double s = 0.0;
      for (std::size_t e = 0; e < vals.size(); ++e) s += vals[e] * v[local_cols[p][e]];
      bv[p] = s;
    }
    double bv_norm2 = 0.0;
    for (double x : bv) bv_norm2 += x * x;
    const double estimate = std::sqrt(bv_norm2);
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t p = 0; p < k; ++p) {
      const auto vals = a.row_values(rows[p]);
      for (std::size_t e = 0; e < vals.size(); ++e) w[local_cols[p][e]] += vals[e] * bv[p];
    }
    double w_norm = 0.0;
    for (double x : w) w_norm += x * x;
    w_norm = std::sqrt(w_norm);
    if (w_norm == 0.0) return 0.0;
    for (std::size_t e = 0; e < w.size(); ++e) v[e] = w[e] / w_norm;
    const bool converged = std::abs(estimate - sigma) <= 0.1 * tol * estimate;
    sigma = estimate;
    if (converged) break;
  }
  return sigma * (1.0 + 0.5 * tol);
}

BlockPartition PartitionRows(const SparseMatrix& a, Index block_size,
                             double norm_tol) {
  const Index n = a.n_rows();
  if (block_size == 0 || block_size > n) {
    throw ParameterError("PartitionRows: block_size must lie in [1, " +
                         std::to_string(n) + "], got " +
                         std::to_string(block_size));
  }
  BlockPartition part;
  part.n_rows = n;
  part.n_cols = a.n_cols();
  part.block_size = block_size;
  const Index m = (n + block_size - 1) / block_size;
  part.block_start.resize(m + 1);
  for (Index j = 0; j <= m; ++j) part.block_start[j] = std::min(n, j * block_size);
  part.block_of_row.resize(n);
  for (Index i = 0; i < n; ++i) part.block_of_row[i] = i / block_size;

  // Single scan: stamp columns per block, collect and sort the supports, then
  // map every stored entry to its local column position.
  std::vector<Index> stamp(a.n_cols(), static_cast<Index>(-1));
  std::vector<Index> position(a.n_cols(), 0);
  part.support_ptr.assign(m + 1, 0);
  part.local_col.resize(a.nnz());
  const auto row_ptr = a.row_ptr();
  const auto col_idx = a.col_idx();
  for (Index j = 0; j < m; ++j) {
    const Index first = part.support_cols.size();
    for (Index p = row_ptr[part.row_begin(j)]; p < row_ptr[part.row_end(j)]; ++p) {
      const Index c = col_idx[p];
      if (stamp[c] != j) {
        stamp[c] = j;
        part.support_cols.push_back(c);
      }
    }
    std::sort(part.support_cols.begin() + static_cast<std::ptrdiff_t>(first),
              part.support_cols.end());
    for (Index e = first; e < part.support_cols.size(); ++e) {
      position[part.support_cols[e]] = e - first;
    }
    for (Index p = row_ptr[part.row_begin(j)]; p < row_ptr[part.row_end(j)]; ++p) {
      part.local_col[p] = position[col_idx[p]];
    }
    part.support_ptr[j + 1] = part.support_cols.size();
  }

  part.block_norms.resize(m);
  for (Index i = 0; i < n; ++i) {
    part.max_row_norm = std::max(part.max_row_norm, a.RowNorm(i));
  }
  for (Index j = 0; j < m; ++j) {
    const auto rows = part.rows_of_block(j);
    part.block_norms[j] = BlockOperatorNorm(a, rows, norm_tol);
    part.l_hat = std::max(part.l_hat, part.block_norms[j]);
  }
  return part;
}

void BlockMultiply(const SparseMatrix& a, const BlockPartition& part, Index j,
                   std::span<const double> x_on_support, std::span<double> out) {
  if (j >= part.num_blocks()) throw DimensionError("BlockMultiply: block out of range");
  CheckSize(x_on_support.size(), part.support(j).size(), "BlockMultiply input");
  CheckSize(out.size(), part.block_rows(j), "BlockMultiply output");
  const auto row_ptr = a.row_ptr();
  const auto values = a.values();
  for (Index i = part.row_begin(j); i < part.row_end(j); ++i) {
    double s = 0.0;
    for (Index p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
      s += values[p] * x_on_support[part.local_col[p]];
    }
    out[i - part.row_begin(j)] = s;
  }
}

std::vector<double> BlockMultiply(const SparseMatrix& a,
                                  const BlockPartition& part, Index j,
                                  std::span<const double> x_on_support) {
  std::vector<double> out(part.block_rows(j));
  BlockMultiply(a, part, j, x_on_support, out);
  return out;
}

void BlockMultiplyTranspose(const SparseMatrix& a, const BlockPartition& part,
                            Index j, std::span<const double> y_on_rows,
                            std::span<double> out) {
  if (j >= part.num_blocks()) {
    throw DimensionError("BlockMultiplyTranspose: block out of range");
  }
  CheckSize(y_on_rows.size(), part.block_rows(j), "BlockMultiplyTranspose input");
  CheckSize(out.size(), part.support(j).size(), "BlockMultiplyTranspose output");
  std::fill(out.begin(), out.end(), 0.0);
  const auto row_ptr = a.row_ptr();
  const auto values = a.values();
  for (Index i = part.row_begin(j); i < part.row_end(j); ++i) {
    const double yi = y_on_rows[i - part.row_begin(j)];
    for (Index p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
      out[part.local_col[p]] += values[p] * yi;
    }
  }
}

std::vector<double> BlockMultiplyTranspose(const SparseMatrix& a,
                                           const BlockPartition& part, Index j,
                                           std::span<const double> y_on_rows) {
  std::vector<double> out(part.support(j).size());
  BlockMultiplyTranspose(a, part, j, y_on_rows, out);
  return out;
}

NormalizedSystem NormalizeRows(const SparseMatrix& a,
                               std::span<const double> b) {
  CheckSize(b.size(), a.n_rows(), "NormalizeRows rhs");
  NormalizedSystem out;
  out.scale.assign(a.n_rows(), 1.0);
  out.b.assign(b.begin(), b.end());
  std::vector<double> values(a.values().begin(), a.values().end());
  const auto row_ptr = a.row_ptr();
  for (Index i = 0; i < a.n_rows(); ++i) {
    const double norm = a.RowNorm(i);
    if (norm == 0.0) {
      out.zero_rows.push_back(i);
      continue;
    }
    out.scale[i] = 1.0 / norm;
    out.b[i] /= norm;
    for (Index p = row_ptr[i]; p < row_ptr[i + 1]; ++p) values[p] /= norm;
  }
  out.a = SparseMatrix::FromCsr(
      a.n_rows(), a.n_cols(),
      std::vector<Index>(row_ptr.begin(), row_ptr.end()),
      std::vector<Index>(a.col_idx().begin(), a.col_idx().end()),
      std::move(values));
  return out;
}

}  // namespace clvr
