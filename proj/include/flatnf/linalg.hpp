#pragma once
#include <cstdint>
#include <optional>
#include <vector>

#include "flatnf/expr.hpp"

namespace flatnf {

class SymMatrix {
 public:
  SymMatrix() : rows_(0), cols_(0) {}
  SymMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(rows * cols) {}
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Expr& at(int i, int j) { return a_[i * cols_ + j]; }
  const Expr& at(int i, int j) const { return a_[i * cols_ + j]; }
  SymMatrix transposed() const;
  std::vector<Expr> row(int i) const;
  static SymMatrix from_rows(const std::vector<std::vector<Expr>>& rows);

 private:
  int rows_, cols_;
  std::vector<Expr> a_;
};

struct RrefResult {
  SymMatrix R;
  std::vector<int> pivot_cols;  // ascending
  int rank;
};

// Reduced row echelon form over the rational function field. Columns are processed left
// to right; within a column the pivot row is chosen by (constant first, lowest total
// degree, lowest row index). The result is the canonical RREF of the row space.
RrefResult rref(const SymMatrix& M);

int rank_symbolic(const SymMatrix& M);

// Exact evaluation at seeded random rational points (numerators in [-997, 997],
// denominators in [1, 997]); points hitting a pole are resampled. Returns the maximum
// rank observed over the trials.
int rank_numeric(const SymMatrix& M, uint64_t seed, int trials);

// Symbolic rank cross-checked against the randomized path; the symbolic result decides.
// A numeric rank exceeding the symbolic one is impossible for correct elimination and
// raises InvariantViolation. If agreement_out is given it receives the comparison.
int generic_rank(const SymMatrix& M, uint64_t seed = 0, int trials = 5,
                 bool* agreement_out = nullptr);

// Basis of { x : Mx = 0 } over the function field.
std::vector<std::vector<Expr>> nullspace(const SymMatrix& M);

struct LinearSolution {
  bool consistent;
  bool unique;
  std::vector<Expr> x;  // free variables set to zero
};
LinearSolution solve_linear(const SymMatrix& A, const std::vector<Expr>& b);

// Is v in the column span of M?
bool in_column_span(const SymMatrix& M, const std::vector<Expr>& v);

// Row space maintained in reduced echelon form. absorb() reduces the row against the
// pivots collected so far and reports whether it enlarged the span; building a span
// generator by generator this way costs one elimination overall instead of one full
// rref per candidate.
class RowSpace {
 public:
  explicit RowSpace(int cols) : cols_(cols) {}
  bool absorb(std::vector<Expr> row);
  int rank() const { return static_cast<int>(rows_.size()); }

 private:
  int cols_;
  std::vector<std::vector<Expr>> rows_;
  std::vector<int> pivots_;
};

// Dense exact kernel of a rational matrix (rows x cols), basis of right nullspace.
std::vector<std::vector<Rat>> rat_kernel(std::vector<std::vector<Rat>> m, int cols);

}  // namespace flatnf
