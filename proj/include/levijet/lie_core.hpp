#ifndef LEVIJET_LIE_CORE_HPP
#define LEVIJET_LIE_CORE_HPP

#include <string>
#include <vector>

#include "levijet/linalg.hpp"
#include "levijet/rational.hpp"

namespace levijet {

/// Structure data for a Lie algebra l of dimension n containing a
/// distinguished subalgebra g of dimension m with an invariant complement:
///   [xi_i, xi_j]  = sum_k c[i][j][k] xi_k          (1 <= i,j,k <= m)
///   [xi_i, eta_a] = sum_b a[i][a][b] eta_b         (1 <= a,b <= n-m)
/// All indices 0-based in code.
struct StructureData {
  int n = 0;  // dim l
  int m = 0;  // dim g
  std::vector<std::vector<std::vector<Rational>>> c;  // m x m x m
  std::vector<std::vector<std::vector<Rational>>> a;  // m x (n-m) x (n-m)

  int complement_dim() const { return n - m; }
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string witness;  // empty on pass
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

/// Throws std::invalid_argument when the array shapes disagree with (n, m).
void require_shapes(const StructureData& data);

/// Adjoint matrices of g on itself: column j of ad_i holds the coordinates
/// of [xi_i, xi_j], i.e. ad_i(k, j) = c[i][j][k].
std::vector<Mat> adjoint_matrices(const StructureData& data);

/// Action of g on the complement as column-vector operators: column a of
/// rho_i holds the coordinates of [xi_i, eta_a], i.e. rho_i(b, a) =
/// a[i][a][b]. With this convention [rho_i, rho_j] = sum_k c_ij^k rho_k is
/// exactly the Jacobi identity of l.
std::vector<Mat> rho_matrices(const StructureData& data);

/// Checks antisymmetry of c, the Jacobi identity of c, the representation
/// property of a, and negative definiteness of the Killing form. Each check
/// reports pass/fail with a witness index tuple on failure.
ValidationReport validate_structure(const StructureData& data);

/// Killing form of g: B_ij = sum_{k,l} c_ik^l c_jl^k.
Mat killing_form(const StructureData& data);

/// The Casimir data of g: the Killing Gram matrix and the coefficients of
/// the B-dual basis, xi^i = sum_j dual_coeffs(i, j) xi_j.
struct CasimirElement {
  Mat gram;
  Mat dual_coeffs;  // inverse of gram
};

/// Throws std::domain_error when the Killing form is singular.
CasimirElement casimir_element(const StructureData& data);

/// Casimir operator on a module given by generator matrices rho(xi_i):
/// Gamma = sum_{i,j} dual_coeffs(i, j) rho_i rho_j. Commutes with every
/// rho_k and is invertible on the complement of its kernel.
Mat casimir_operator(const CasimirElement& cas, const std::vector<Mat>& generators);

}  // namespace levijet

#endif
