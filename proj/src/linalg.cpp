#include "flatnf/linalg.hpp"

#include <algorithm>
#include <random>

#include "flatnf/errors.hpp"

namespace flatnf {

SymMatrix SymMatrix::transposed() const {
  SymMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
  return t;
}

std::vector<Expr> SymMatrix::row(int i) const {
  std::vector<Expr> r(cols_);
  for (int j = 0; j < cols_; ++j) r[j] = at(i, j);
  return r;
}

SymMatrix SymMatrix::from_rows(const std::vector<std::vector<Expr>>& rows) {
  if (rows.empty()) return SymMatrix(0, 0);
  SymMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (int i = 0; i < m.rows(); ++i) {
    if (static_cast<int>(rows[i].size()) != m.cols())
      throw Error("from_rows: ragged rows");
    for (int j = 0; j < m.cols(); ++j) m.at(i, j) = rows[i][j];
  }
  return m;
}

namespace {
int entry_weight(const Expr& e) {
  return std::max(e.num().total_degree(), 0) + std::max(e.den().total_degree(), 0);
}
}  // namespace

RrefResult rref(const SymMatrix& M) {
  RrefResult res;
  res.R = M;
  SymMatrix& R = res.R;
  int r = 0;
  for (int c = 0; c < M.cols() && r < M.rows(); ++c) {
    int best = -1, best_w = 0;
    for (int i = r; i < M.rows(); ++i) {
      if (R.at(i, c).is_zero()) continue;
      int w = entry_weight(R.at(i, c));
      if (best < 0 || w < best_w) {
        best = i;
        best_w = w;
      }
    }
    if (best < 0) continue;
    if (best != r)
      for (int j = 0; j < M.cols(); ++j) std::swap(R.at(r, j), R.at(best, j));
    Expr piv = R.at(r, c);
    for (int j = c; j < M.cols(); ++j) R.at(r, j) = R.at(r, j) / piv;
    for (int i = 0; i < M.rows(); ++i) {
      if (i == r || R.at(i, c).is_zero()) continue;
      Expr factor = R.at(i, c);
      for (int j = c; j < M.cols(); ++j)
        R.at(i, j) = R.at(i, j) - factor * R.at(r, j);
    }
    res.pivot_cols.push_back(c);
    ++r;
  }
  res.rank = r;
  return res;
}

int rank_symbolic(const SymMatrix& M) { return rref(M).rank; }

namespace {
Rat random_rat(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-997, 997);
  std::uniform_int_distribution<long> den(1, 997);
  Rat r(num(rng), den(rng));
  r.canonicalize();
  return r;
}

int rat_matrix_rank(std::vector<std::vector<Rat>>& m) {
  if (m.empty()) return 0;
  int rows = static_cast<int>(m.size());
  int cols = static_cast<int>(m[0].size());
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int piv = -1;
    for (int i = r; i < rows; ++i)
      if (m[i][c] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(m[r], m[piv]);
    for (int i = r + 1; i < rows; ++i) {
      if (m[i][c] == 0) continue;
      Rat f = m[i][c] / m[r][c];
      for (int j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    ++r;
  }
  return r;
}
}  // namespace

int rank_numeric(const SymMatrix& M, uint64_t seed, int trials) {
  if (M.rows() == 0 || M.cols() == 0) return 0;
  std::set<Var> vs;
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) {
      auto v = M.at(i, j).vars();
      vs.insert(v.begin(), v.end());
    }
  int best = 0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * (t + 1));
    for (int attempt = 0; attempt < 40; ++attempt) {
      std::map<Var, Rat> point;
      for (Var v : vs) point[v] = random_rat(rng);
      std::vector<std::vector<Rat>> m(M.rows(), std::vector<Rat>(M.cols()));
      bool pole = false;
      for (int i = 0; i < M.rows() && !pole; ++i)
        for (int j = 0; j < M.cols(); ++j) {
          auto val = M.at(i, j).eval_q(point);
          if (!val) {
            pole = true;
            break;
          }
          m[i][j] = *val;
        }
      if (pole) continue;
      best = std::max(best, rat_matrix_rank(m));
      break;
    }
  }
  return best;
}

int generic_rank(const SymMatrix& M, uint64_t seed, int trials, bool* agreement_out) {
  int sym = rank_symbolic(M);
  int num = rank_numeric(M, seed, trials);
  if (num > sym)
    throw InvariantViolation("numeric rank " + std::to_string(num) +
                             " exceeds symbolic rank " + std::to_string(sym));
  if (agreement_out) *agreement_out = (num == sym);
  return sym;
}

std::vector<std::vector<Expr>> nullspace(const SymMatrix& M) {
  RrefResult rr = rref(M);
  std::vector<bool> is_pivot(M.cols(), false);
  for (int c : rr.pivot_cols) is_pivot[c] = true;
  std::vector<std::vector<Expr>> basis;
  for (int f = 0; f < M.cols(); ++f) {
    if (is_pivot[f]) continue;
    std::vector<Expr> v(M.cols());
    v[f] = Expr::integer(1);
    for (size_t r = 0; r < rr.pivot_cols.size(); ++r)
      v[rr.pivot_cols[r]] = -rr.R.at(static_cast<int>(r), f);
    basis.push_back(std::move(v));
  }
  return basis;
}

LinearSolution solve_linear(const SymMatrix& A, const std::vector<Expr>& b) {
  SymMatrix aug(A.rows(), A.cols() + 1);
  for (int i = 0; i < A.rows(); ++i) {
    for (int j = 0; j < A.cols(); ++j) aug.at(i, j) = A.at(i, j);
    aug.at(i, A.cols()) = b[i];
  }
  RrefResult rr = rref(aug);
  LinearSolution sol;
  sol.consistent = true;
  for (int c : rr.pivot_cols)
    if (c == A.cols()) sol.consistent = false;
  if (!sol.consistent) return sol;
  sol.unique = static_cast<int>(rr.pivot_cols.size()) == A.cols();
  sol.x.assign(A.cols(), Expr());
  for (size_t r = 0; r < rr.pivot_cols.size(); ++r)
    sol.x[rr.pivot_cols[r]] = rr.R.at(static_cast<int>(r), A.cols());
  return sol;
}

bool in_column_span(const SymMatrix& M, const std::vector<Expr>& v) {
  SymMatrix aug(M.rows(), M.cols() + 1);
  for (int i = 0; i < M.rows(); ++i) {
    for (int j = 0; j < M.cols(); ++j) aug.at(i, j) = M.at(i, j);
    aug.at(i, M.cols()) = v[i];
  }
  // v lies in the span exactly when the appended column picks up no pivot.
  for (int c : rref(aug).pivot_cols)
    if (c == M.cols()) return false;
  return true;
}

bool RowSpace::absorb(std::vector<Expr> row) {
  for (size_t r = 0; r < rows_.size(); ++r) {
    const Expr& f = row[pivots_[r]];
    if (f.is_zero()) continue;
    Expr factor = f;  // row[pivots_[r]] is overwritten below
    for (int j = 0; j < cols_; ++j)
      if (!rows_[r][j].is_zero()) row[j] = row[j] - factor * rows_[r][j];
  }
  int piv = -1, piv_w = 0;
  for (int j = 0; j < cols_; ++j) {
    if (row[j].is_zero()) continue;
    int w = entry_weight(row[j]);
    if (piv < 0 || w < piv_w) {
      piv = j;
      piv_w = w;
    }
  }
  if (piv < 0) return false;
  Expr p = row[piv];
  for (int j = 0; j < cols_; ++j)
    if (!row[j].is_zero()) row[j] = row[j] / p;
  for (auto& r : rows_) {
    const Expr& f = r[piv];
    if (f.is_zero()) continue;
    Expr factor = f;
    for (int j = 0; j < cols_; ++j)
      if (!row[j].is_zero()) r[j] = r[j] - factor * row[j];
  }
  rows_.push_back(std::move(row));
  pivots_.push_back(piv);
  return true;
}

std::vector<std::vector<Rat>> rat_kernel(std::vector<std::vector<Rat>> m, int cols) {
  int rows = static_cast<int>(m.size());
  std::vector<int> pivot_cols;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int piv = -1;
    for (int i = r; i < rows; ++i)
      if (m[i][c] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(m[r], m[piv]);
    Rat p = m[r][c];
    for (int j = c; j < cols; ++j) m[r][j] /= p;
    for (int i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      Rat f = m[i][c];
      for (int j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivot_cols.push_back(c);
    ++r;
  }
  std::vector<bool> is_pivot(cols, false);
  for (int c : pivot_cols) is_pivot[c] = true;
  std::vector<std::vector<Rat>> basis;
  for (int f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rat> v(cols, Rat(0));
    v[f] = 1;
    for (size_t k = 0; k < pivot_cols.size(); ++k)
      v[pivot_cols[k]] = -m[static_cast<int>(k)][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace flatnf
