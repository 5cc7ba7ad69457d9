#ifndef LEVIJET_LINALG_HPP
#define LEVIJET_LINALG_HPP

#include <optional>
#include <vector>

#include "levijet/rational.hpp"

namespace levijet {

/// Exact Gauss-Jordan elimination over the rationals. Pivoting picks the
/// first nonzero entry in column order: over an exact field no magnitude
/// pivoting is needed, and the fixed rule keeps every derived basis
/// deterministic across runs.
struct Echelon {
  Mat rref;                    // reduced row echelon form of A
  Mat transform;               // transform * A == rref
  std::vector<int> pivot_cols;
  int rank = 0;
};

Echelon reduced_echelon(const Mat& a);

int rank_of(const Mat& a);

/// Columns form a basis of ker(A); empty (rows x 0) matrix for trivial
/// kernel. Free variables are set to 1 one at a time in column order.
Mat kernel_basis(const Mat& a);

/// The pivot columns of A themselves (a basis of the column space).
Mat image_basis(const Mat& a);

/// Prefactored solver for repeated exact solves against a fixed matrix.
/// solve() returns nullopt on inconsistent systems; when the matrix does not
/// have full column rank the returned solution sets all free variables to
/// zero (the deterministic representative).
class LinearSolver {
 public:
  explicit LinearSolver(const Mat& a);

  int rank() const { return ech_.rank; }
  int cols() const { return cols_; }
  bool full_column_rank() const { return ech_.rank == cols_; }

  std::optional<Vec> solve(const Vec& b) const;

  /// Columnwise solve; throws on any inconsistent column.
  Mat solve_many(const Mat& b) const;

 private:
  Echelon ech_;
  int rows_ = 0;
  int cols_ = 0;
};

/// Exact inverse; throws std::domain_error when singular.
Mat inverse(const Mat& a);

/// Exact determinant by elimination (small matrices).
Rational determinant(Mat a);

/// Sylvester test: all leading principal minors positive.
bool is_positive_definite_symmetric(const Mat& a);

}  // namespace levijet

#endif
