#ifndef LEVIJET_JET_ALGEBRA_HPP
#define LEVIJET_JET_ALGEBRA_HPP

#include <map>
#include <string>
#include <vector>

#include "levijet/multi_index.hpp"
#include "levijet/rational.hpp"

namespace levijet {

/// Vanishing order of the zero jet. Finite orders never get close to this.
inline constexpr int kOrderInfinity = 1 << 20;

/// Truncated multivariate polynomial over exact rationals. Every value
/// carries its own variable count and global degree cap; operations between
/// values with different (n_vars, cap) throw, so a mixed-cap bug cannot
/// silently produce a wrongly truncated result. Terms beyond the cap are
/// discarded on construction and after every operation, and zero
/// coefficients are never stored.
class JetPoly {
 public:
  using TermMap = std::map<Mono, Rational, GradedLex>;

  JetPoly() = default;
  JetPoly(int n_vars, int cap);

  static JetPoly constant(int n_vars, int cap, const Rational& c);
  static JetPoly variable(int n_vars, int cap, int i);
  static JetPoly monomial(int n_vars, int cap, const Mono& e, const Rational& c);

  int n_vars() const { return n_vars_; }
  int cap() const { return cap_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Coefficient of the monomial (zero when absent).
  Rational coeff(const Mono& e) const;

  /// Adds c * z^e, dropping the term if |e| exceeds the cap or the sum
  /// cancels.
  void add_term(const Mono& e, const Rational& c);

  /// Minimal total degree with a nonzero coefficient; kOrderInfinity for the
  /// zero jet.
  int vanishing_order() const;

  /// Maximal total degree with a nonzero coefficient; -1 for the zero jet.
  int top_degree() const;

  /// Copy with every term of total degree exceeding bound removed. The cap
  /// is unchanged: this is a cutoff, not a re-capping.
  JetPoly drop_above(int bound) const;

  /// Copy with every term of total degree below bound removed.
  JetPoly drop_below(int bound) const;

  /// Same coefficients under a lower cap (terms beyond it are discarded).
  JetPoly recapped(int new_cap) const;

  /// Degree-k homogeneous part.
  JetPoly homogeneous_part(int k) const;

  JetPoly& operator+=(const JetPoly& o);
  JetPoly& operator-=(const JetPoly& o);
  friend JetPoly operator+(JetPoly a, const JetPoly& b) { return a += b; }
  friend JetPoly operator-(JetPoly a, const JetPoly& b) { return a -= b; }
  JetPoly operator-() const;
  friend JetPoly operator*(const JetPoly& a, const JetPoly& b);
  JetPoly& operator*=(const Rational& s);
  friend JetPoly operator*(const Rational& s, JetPoly p) { return p *= s; }
  friend bool operator==(const JetPoly& a, const JetPoly& b);

  /// Partial derivative in variable i.
  JetPoly derivative(int i) const;

  std::string to_string() const;

 private:
  int n_vars_ = 0;
  int cap_ = 0;
  TermMap terms_;
};

void require_same_shape(const JetPoly& a, const JetPoly& b);

/// Vector field on n variables: one coefficient jet per coordinate
/// direction.
struct JetVectorField {
  std::vector<JetPoly> comps;

  int n_vars() const { return static_cast<int>(comps.size()); }
  int vanishing_order() const;

  /// Derivation applied to a function jet: sum_i comps[i] * dF/dz_i.
  JetPoly apply(const JetPoly& f) const;
};

/// Commutator [u, v] of vector fields.
JetVectorField vf_bracket(const JetVectorField& u, const JetVectorField& v);

/// Antisymmetric bivector; the upper triangle i < j is stored, component
/// (j, i) is read back negated.
class JetBivector {
 public:
  JetBivector() = default;
  JetBivector(int n_vars, int cap);

  int n_vars() const { return n_; }
  int cap() const { return cap_; }

  const JetPoly& upper(int i, int j) const;  // requires i < j
  JetPoly& upper(int i, int j);              // requires i < j
  JetPoly component(int i, int j) const;     // any i != j, signed

  int vanishing_order() const;
  JetBivector drop_above(int bound) const;
  JetBivector& operator+=(const JetBivector& o);
  JetBivector& operator-=(const JetBivector& o);
  friend JetBivector operator-(JetBivector a, const JetBivector& b) { return a -= b; }
  friend bool operator==(const JetBivector& a, const JetBivector& b);

  /// Homothety rescaling: each term of degree k in every component picks up
  /// the factor t^(1-k). Linear parts are fixed points; the operation is an
  /// exact change of scale that shrinks higher jets for t > 1.
  JetBivector homothety(const Rational& t) const;

 private:
  int n_ = 0;
  int cap_ = 0;
  std::vector<JetPoly> up_;  // index of (i,j), i<j: i*(2n-i-1)/2 + (j-i-1)
  int idx(int i, int j) const;
};

/// Totally antisymmetric trivector, upper triple i < j < k stored.
class JetTrivector {
 public:
  JetTrivector() = default;
  JetTrivector(int n_vars, int cap);

  int n_vars() const { return n_; }
  const JetPoly& upper(int i, int j, int k) const;
  JetPoly& upper(int i, int j, int k);
  bool is_zero() const;
  int vanishing_order() const;

 private:
  int n_ = 0;
  int cap_ = 0;
  std::vector<JetPoly> up_;
  std::vector<std::vector<int>> triples_;
  int idx(int i, int j, int k) const;
};

/// Local diffeomorphism jet theta = Id + chi with displacement chi of
/// vanishing order at least 2 (unipotent on jets, hence exactly invertible).
class JetDiffeo {
 public:
  JetDiffeo() = default;

  /// Identity on n variables.
  JetDiffeo(int n_vars, int cap);

  /// Id + chi; throws unless every displacement component has order >= 2.
  static JetDiffeo from_displacement(std::vector<JetPoly> chi);

  int n_vars() const { return static_cast<int>(chi_.size()); }
  int cap() const { return cap_; }
  const std::vector<JetPoly>& displacement() const { return chi_; }

  /// Component i as a jet: z_i + chi_i.
  JetPoly component(int i) const;

 private:
  int cap_ = 0;
  std::vector<JetPoly> chi_;
};

/// f(theta(z)): substitution of all variables, truncated at the shared cap.
JetPoly compose(const JetPoly& f, const JetDiffeo& theta);

/// (outer after inner)(z) = outer(inner(z)).
JetDiffeo compose(const JetDiffeo& outer, const JetDiffeo& inner);

/// Exact inverse of Id + chi by the fixed point xi <- -(chi o (Id + xi));
/// each sweep pins one more degree, so cap - 1 sweeps suffice. The count
/// is asserted by a two-sided check.
JetDiffeo invert(const JetDiffeo& theta);

/// Poisson bracket of two function jets under the bivector:
/// {F, G} = sum_{u<v} pi_uv (dF/du dG/dv - dF/dv dG/du).
JetPoly poisson_bracket(const JetBivector& pi, const JetPoly& f,
                        const JetPoly& g);

/// {z_i, F} = sum_u pi_iu dF/du. Cheaper special case used throughout the
/// normalization step.
JetPoly coordinate_bracket(const JetBivector& pi, int i, const JetPoly& f);

/// Jacobiator components J_ijk = sum over cyclic (i,j,k) of {z_i, pi_jk}.
/// Computed jets are reliable only to degree cap-1 (one derivative is taken),
/// so the result is truncated there; the input bivector is Poisson modulo
/// degree > cap-1 exactly when the result is zero.
JetTrivector schouten_jacobiator(const JetBivector& pi);

/// Pushforward (theta_* pi)_ij = {theta_i, theta_j} o theta^{-1}. The
/// second overload reuses a precomputed inverse so callers that need
/// theta^{-1} anyway (consistency checks) share one inversion.
JetBivector pushforward(const JetBivector& pi, const JetDiffeo& theta);
JetBivector pushforward(const JetBivector& pi, const JetDiffeo& theta,
                        const JetDiffeo& theta_inv);

}  // namespace levijet

#endif
