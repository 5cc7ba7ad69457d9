#include "levijet/linalg.hpp"

#include <stdexcept>

namespace levijet {

Echelon reduced_echelon(const Mat& a) {
  const int rows = static_cast<int>(a.rows());
  const int cols = static_cast<int>(a.cols());
  Echelon e;
  e.rref = a;
  e.transform = Mat::Identity(rows, rows);
  int pivot_row = 0;
  for (int col = 0; col < cols && pivot_row < rows; ++col) {
    int sel = -1;
    for (int r = pivot_row; r < rows; ++r) {
      if (e.rref(r, col) != 0) {
        sel = r;
        break;
      }
    }
    if (sel < 0) continue;
    if (sel != pivot_row) {
      e.rref.row(sel).swap(e.rref.row(pivot_row));
      e.transform.row(sel).swap(e.transform.row(pivot_row));
    }
    const Rational inv = Rational(1) / e.rref(pivot_row, col);
    e.rref.row(pivot_row) *= inv;
    e.transform.row(pivot_row) *= inv;
    for (int r = 0; r < rows; ++r) {
      if (r == pivot_row) continue;
      const Rational factor = e.rref(r, col);
      if (factor == 0) continue;
      e.rref.row(r) -= factor * e.rref.row(pivot_row);
      e.transform.row(r) -= factor * e.transform.row(pivot_row);
    }
    e.pivot_cols.push_back(col);
    ++pivot_row;
  }
  e.rank = pivot_row;
  return e;
}

int rank_of(const Mat& a) { return reduced_echelon(a).rank; }

Mat kernel_basis(const Mat& a) {
  const int cols = static_cast<int>(a.cols());
  const Echelon e = reduced_echelon(a);
  std::vector<bool> is_pivot(cols, false);
  for (int c : e.pivot_cols) is_pivot[c] = true;
  const int dim = cols - e.rank;
  Mat basis = Mat::Zero(cols, dim);
  int out = 0;
  for (int free_col = 0; free_col < cols; ++free_col) {
    if (is_pivot[free_col]) continue;
    basis(free_col, out) = 1;
    for (int p = 0; p < e.rank; ++p) {
      basis(e.pivot_cols[p], out) = -e.rref(p, free_col);
    }
    ++out;
  }
  return basis;
}

Mat image_basis(const Mat& a) {
  const Echelon e = reduced_echelon(a);
  Mat basis(a.rows(), e.rank);
  for (int p = 0; p < e.rank; ++p) basis.col(p) = a.col(e.pivot_cols[p]);
  return basis;
}

LinearSolver::LinearSolver(const Mat& a)
    : ech_(reduced_echelon(a)),
      rows_(static_cast<int>(a.rows())),
      cols_(static_cast<int>(a.cols())) {}

std::optional<Vec> LinearSolver::solve(const Vec& b) const {
  if (static_cast<int>(b.size()) != rows_) {
    throw std::invalid_argument("LinearSolver::solve: size mismatch");
  }
  const Vec rb = ech_.transform * b;
  for (int r = ech_.rank; r < rows_; ++r) {
    if (rb(r) != 0) return std::nullopt;
  }
  Vec x = Vec::Zero(cols_);
  for (int p = 0; p < ech_.rank; ++p) x(ech_.pivot_cols[p]) = rb(p);
  return x;
}

Mat LinearSolver::solve_many(const Mat& b) const {
  if (static_cast<int>(b.rows()) != rows_) {
    throw std::invalid_argument("LinearSolver::solve_many: size mismatch");
  }
  Mat x(cols_, b.cols());
  for (int c = 0; c < static_cast<int>(b.cols()); ++c) {
    auto col = solve(b.col(c));
    if (!col) throw std::domain_error("LinearSolver: inconsistent system");
    x.col(c) = *col;
  }
  return x;
}

Mat inverse(const Mat& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("inverse: matrix not square");
  }
  const Echelon e = reduced_echelon(a);
  if (e.rank != a.rows()) throw std::domain_error("inverse: singular matrix");
  return e.transform;
}

Rational determinant(Mat a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("determinant: matrix not square");
  }
  const int n = static_cast<int>(a.rows());
  Rational det = 1;
  for (int col = 0; col < n; ++col) {
    int sel = -1;
    for (int r = col; r < n; ++r) {
      if (a(r, col) != 0) {
        sel = r;
        break;
      }
    }
    if (sel < 0) return Rational(0);
    if (sel != col) {
      a.row(sel).swap(a.row(col));
      det = -det;
    }
    det *= a(col, col);
    const Rational inv = Rational(1) / a(col, col);
    for (int r = col + 1; r < n; ++r) {
      if (a(r, col) == 0) continue;
      a.row(r) -= (a(r, col) * inv) * a.row(col);
    }
  }
  return det;
}

bool is_positive_definite_symmetric(const Mat& a) {
  if (a.rows() != a.cols()) return false;
  if (a != a.transpose().eval()) return false;
  const int n = static_cast<int>(a.rows());
  for (int k = 1; k <= n; ++k) {
    if (determinant(a.topLeftCorner(k, k)) <= 0) return false;
  }
  return true;
}

}  // namespace levijet
