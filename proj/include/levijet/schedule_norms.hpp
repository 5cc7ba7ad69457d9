#pragma once

#include <optional>
#include <string>
#include <vector>

#include "levijet/jet_algebra.hpp"
#include "levijet/lie_core.hpp"

namespace levijet {

enum class PlanVariant { MainText, Appendix };
enum class NormFlavor { MajorantAbsolute, SpectralDegree };

/// The iteration constants. s is the Sobolev anchor floor(n/2)+1; A controls
/// the allowed growth of high norms; epsilon and l are chosen by a pinned
/// deterministic rule (half the supremum admissible for epsilon, smallest
/// admissible integer for l); L = 2l-1. tau is the degree, in its first
/// variable, of the remainder polynomial in the quadratic estimate of the
/// abstract iteration; it enters only the Appendix variant.
struct ScheduleConstants {
  PlanVariant variant = PlanVariant::MainText;
  int n = 0;
  int s = 0;
  int a_const = 0;
  Rational epsilon;
  Rational tau;
  long l = 0;
  long big_l = 0;
  Rational t0 = Rational(16);
};

/// One row per constants invariant, exact rational comparisons throughout.
std::vector<CheckResult> validate_constants(const ScheduleConstants& c);

/// Deterministic constants for ambient dimension n. tau is required for the
/// Appendix variant and must be >= 0.
ScheduleConstants plan_constants(int n, PlanVariant variant,
                                 std::optional<Rational> tau = std::nullopt);

/// t_d = t0^{(3/2)^d}, kept as the exact exponent pair (num = 3^d,
/// den = 2^d); the decimal rendering is informative only. cutoff_ok records
/// the exact check t_d^{-1/2} < 1/(d+2)^2.
struct ScheduleEntry {
  int d = 0;
  mpz_class exp_num;
  mpz_class exp_den;
  Rational r;
  std::string t_decimal;
  bool cutoff_ok = false;
};

struct ScheduleSequence {
  Rational t0;
  std::vector<ScheduleEntry> entries;
  int first_invalid_d = -1;
  bool t0_too_small() const { return first_invalid_d >= 0; }
};

/// Generates entries for d = 0..d_max. Throws std::invalid_argument unless
/// t0 > 1.
ScheduleSequence schedule(const ScheduleConstants& c, int d_max);

/// Compares x against base^{num/den} exactly (base > 1, den >= 1); returns
/// -1, 0 or +1. Uses integer power comparison when sizes permit, otherwise
/// an exact equality test followed by certified directed-rounding bounds.
int certified_compare(const Rational& x, const Rational& base,
                      const mpz_class& num, const mpz_class& den);

/// Exact floor of base^{num/den} for base > 1 and den >= 1. The candidate
/// comes from directed rounding and is then certified exactly, so integer
/// powers land on themselves.
mpz_class floor_power(const Rational& base, const mpz_class& num,
                      const mpz_class& den);

/// Decimal rendering of base^{num/den} (base > 0, den >= 1), for report
/// annotations only; never feeds a verdict.
std::string power_decimal(const Rational& base, const mpz_class& num,
                          const mpz_class& den);

/// Coefficient-sum upper bound for sup_{|beta| <= k} sup_{B_r} |D^beta f|:
/// max over beta of sum_alpha |coeff(D^beta f, alpha)| r^|alpha|. Exact and
/// monotone in k and r; an upper bound for the true sup-norm. Vector and
/// bivector overloads take the max over components.
Rational majorant_norm(const JetPoly& f, int k, const Rational& r);
Rational majorant_norm(const JetVectorField& f, int k, const Rational& r);
Rational majorant_norm(const JetBivector& f, int k, const Rational& r);

/// sum_alpha |c_alpha| max(1,|alpha|)^k r^|alpha| with 0 < r <= 1 (throws
/// std::invalid_argument otherwise). Total degree plays the frequency role,
/// which makes the degree-cutoff smoothing inequalities exact with C = 1.
Rational spectral_norm(const JetPoly& f, int k, const Rational& r);
Rational spectral_norm(const JetVectorField& f, int k, const Rational& r);
Rational spectral_norm(const JetBivector& f, int k, const Rational& r);

/// Low-pass cutoff: drops every term of total degree > t. Requires t > 1.
JetPoly smoothing(const JetPoly& f, const Rational& t);
JetVectorField smoothing(const JetVectorField& f, const Rational& t);
JetBivector smoothing(const JetBivector& f, const Rational& t);

struct AxiomCheck {
  std::string name;
  bool passed = false;
  Rational measured;
  std::string witness;
};

struct SCIReport {
  NormFlavor flavor = NormFlavor::SpectralDegree;
  std::vector<AxiomCheck> checks;
  bool all_passed() const;
};

/// Checks monotonicity, both smoothing inequalities, and the interpolation
/// inequality on the sample set over the given (order, radius, t) grid,
/// reporting the largest constant observed for each. For the spectral
/// flavor every constant must be <= 1 exactly; for the majorant flavor the
/// smoothing and interpolation rows report the measured constant and fail
/// only when no finite constant exists on the samples.
SCIReport check_sci_axioms(NormFlavor flavor,
                           const std::vector<JetPoly>& samples, int max_order,
                           const std::vector<Rational>& radii,
                           const std::vector<Rational>& ts);

}  // namespace levijet
