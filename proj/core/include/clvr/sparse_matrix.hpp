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

// Compressed-row sparse matrices, row-block partitions and the matrix-vector
// kernels used by the solvers.
//
// A `SparseMatrix` is immutable after construction. A `BlockPartition` splits
// the rows into contiguous blocks S^1..S^m and records, for every block, the
// sorted list C^j of columns that carry at least one nonzero in that block.
// Block kernels exchange values only on those supports, so the work of one
// block product is proportional to the nonzeros of the block.

#ifndef CLVR_SPARSE_MATRIX_HPP_
#define CLVR_SPARSE_MATRIX_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace clvr {

using Index = std::size_t;

struct Triplet {
  Index row;
  Index col;
  double value;
};

class SparseMatrix {
 public:
  // An empty 0 x 0 matrix.
  SparseMatrix() : row_ptr_(1, 0) {}

  // Builds canonical CSR. Duplicate (row, col) pairs are summed and entries
  // summing to exactly zero are dropped. Throws DimensionError naming the
  // offending entry if an index is out of range.
  static SparseMatrix FromTriplets(Index n_rows, Index n_cols,
                                   std::span<const Triplet> entries);

  // Adopts CSR arrays after validating every invariant (monotone row_ptr,
  // strictly increasing in-range columns per row, no stored zeros).
  static SparseMatrix FromCsr(Index n_rows, Index n_cols,
                              std::vector<Index> row_ptr,
                              std::vector<Index> col_idx,
                              std::vector<double> values);

  Index n_rows() const { return n_rows_; }
  Index n_cols() const { return n_cols_; }
  Index nnz() const { return values_.size(); }

  std::span<const Index> row_ptr() const { return row_ptr_; }
  std::span<const Index> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  std::span<const Index> row_cols(Index i) const {
    return {col_idx_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  std::span<const double> row_values(Index i) const {
    return {values_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }

  // Euclidean norm of row i.
  double RowNorm(Index i) const;

  std::vector<Triplet> ToTriplets() const;
  SparseMatrix Transpose() const;

  // Row i multiplied by scale[i].
  SparseMatrix ScaleRows(std::span<const double> scale) const;

  // out = A x and out = A^T y. Sizes are checked; out is overwritten.
  void Multiply(std::span<const double> x, std::span<double> out) const;
  void MultiplyTranspose(std::span<const double> y,
                         std::span<double> out) const;
  std::vector<double> Multiply(std::span<const double> x) const;
  std::vector<double> MultiplyTranspose(std::span<const double> y) const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  Index n_rows_ = 0;
  Index n_cols_ = 0;
  std::vector<Index> row_ptr_;
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

// Contiguous row blocks S^j = [row_begin(j), row_end(j)) with column supports.
struct BlockPartition {
  Index n_rows = 0;
  Index n_cols = 0;
  Index block_size = 0;
  std::vector<Index> block_start;   // m + 1 offsets into the rows
  std::vector<Index> block_of_row;  // row -> block
  std::vector<Index> support_ptr;   // m + 1 offsets into support_cols
  std::vector<Index> support_cols;  // concatenated sorted C^j lists
  // For every stored entry of A (in CSR order), the position of its column
  // inside C^{block of its row}.
  std::vector<Index> local_col;
  std::vector<double> block_norms;  // ||A^{S_j}|| estimates
  double l_hat = 0.0;               // max block norm
  double max_row_norm = 0.0;        // R

  Index num_blocks() const { return block_start.size() - 1; }
  Index row_begin(Index j) const { return block_start[j]; }
  Index row_end(Index j) const { return block_start[j + 1]; }
  Index block_rows(Index j) const { return block_start[j + 1] - block_start[j]; }
  std::span<const Index> support(Index j) const {
    return {support_cols.data() + support_ptr[j],
            support_ptr[j + 1] - support_ptr[j]};
  }
  std::vector<Index> rows_of_block(Index j) const;
};

inline constexpr double kDefaultNormTolerance = 1e-6;
inline constexpr int kMaxPowerIterations = 1000;

// Splits the rows into ceil(n / block_size) contiguous blocks (the last one
// possibly shorter), computes the column supports with one CSR scan and the
// block operator norms. Throws ParameterError unless 1 <= block_size <= n.
BlockPartition PartitionRows(const SparseMatrix& a, Index block_size,
                             double norm_tol = kDefaultNormTolerance);

// Spectral norm of the submatrix made of `rows`, returned as
// sigma_max * (1 + delta) with 0 <= delta <= tol. Single rows are exact, small
// blocks use a Jacobi eigensolve of the row Gram matrix and larger blocks use
// power iteration on the support columns from the normalized all-ones vector.
// Throws ParameterError for an empty row set; an all-zero block gives 0.
double BlockOperatorNorm(const SparseMatrix& a, std::span<const Index> rows,
                         double tol = kDefaultNormTolerance);

// out = A^{S_j, C^j} x_on_support, with x indexed by position in C^j and out
// by position in S^j.
void BlockMultiply(const SparseMatrix& a, const BlockPartition& part, Index j,
                   std::span<const double> x_on_support, std::span<double> out);
std::vector<double> BlockMultiply(const SparseMatrix& a,
                                  const BlockPartition& part, Index j,
                                  std::span<const double> x_on_support);

// out = (A^{S_j, C^j})^T y_on_rows, with y indexed by position in S^j and out
// by position in C^j.
void BlockMultiplyTranspose(const SparseMatrix& a, const BlockPartition& part,
                            Index j, std::span<const double> y_on_rows,
                            std::span<double> out);
std::vector<double> BlockMultiplyTranspose(const SparseMatrix& a,
                                           const BlockPartition& part, Index j,
                                           std::span<const double> y_on_rows);

struct NormalizedSystem {
  SparseMatrix a;
  std::vector<double> b;
  std::vector<double> scale;      // row i of the result = scale[i] * row i
  std::vector<Index> zero_rows;   // rows left untouched
};

// Scales every nonzero row of A (and the matching entry of b) to unit
// Euclidean norm. The solution set of Ax = b is unchanged.
NormalizedSystem NormalizeRows(const SparseMatrix& a,
                               std::span<const double> b);

}  // namespace clvr

#endif  // CLVR_SPARSE_MATRIX_HPP_
