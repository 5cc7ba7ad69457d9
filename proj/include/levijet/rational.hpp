#ifndef LEVIJET_RATIONAL_HPP
#define LEVIJET_RATIONAL_HPP

#include <gmpxx.h>

#include <Eigen/Core>

#include <optional>
#include <string>

namespace levijet {

/// Exact rational scalar used everywhere in the library. No floating point
/// enters any computation that feeds a verdict; decimals appear only as
/// display annotations in reports.
using Rational = mpq_class;

/// Parses "p" or "p/q" with q > 0 (canonical external form). Returns nullopt
/// on any other shape, including "+1", "1/0", "1/-2", spaces, or hex.
std::optional<Rational> parse_rational(const std::string& text);

/// Canonical external form: "p" when the denominator is 1, else "p/q", q > 0.
std::string to_string(const Rational& value);

/// value^exponent for integer exponents; negative exponents require a
/// nonzero value.
Rational pow_rational(const Rational& value, long exponent);

/// Decimal approximation for report annotations only.
double to_double_approx(const Rational& value);

}  // namespace levijet

namespace Eigen {

/// Traits so dense Eigen types work over the exact scalar. epsilon() is zero:
/// rank decisions are exact, never threshold based.
template <>
struct NumTraits<mpq_class> : GenericNumTraits<mpq_class> {
  typedef mpq_class Real;
  typedef mpq_class NonInteger;
  typedef mpq_class Nested;
  static inline Real epsilon() { return Real(0); }
  static inline Real dummy_precision() { return Real(0); }
  static inline int digits10() { return 0; }
  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 6,
    AddCost = 30,
    MulCost = 30
  };
};

}  // namespace Eigen

namespace levijet {

using Mat = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using Vec = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;

}  // namespace levijet

#endif
