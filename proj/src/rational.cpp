#include "levijet/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace levijet {

std::optional<Rational> parse_rational(const std::string& text) {
  // Accepted grammar: -?[0-9]+(/[1-9][0-9]*)?
  std::size_t i = 0;
  const std::size_t n = text.size();
  if (i < n && text[i] == '-') ++i;
  std::size_t digits_start = i;
  while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
  if (i == digits_start) return std::nullopt;
  std::string num = text.substr(0, i);
  std::string den = "1";
  if (i < n) {
    if (text[i] != '/') return std::nullopt;
    ++i;
    if (i >= n || text[i] < '1' || text[i] > '9') return std::nullopt;
    std::size_t den_start = i;
    while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (i != n) return std::nullopt;
    den = text.substr(den_start);
  }
  Rational r{mpz_class(num), mpz_class(den)};
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& value) {
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

Rational pow_rational(const Rational& value, long exponent) {
  if (exponent == 0) return Rational(1);
  if (value == 0 && exponent < 0)
    throw std::domain_error("pow_rational: negative power of zero");
  const unsigned long e =
      exponent > 0 ? static_cast<unsigned long>(exponent)
                   : static_cast<unsigned long>(-exponent);
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), value.get_num().get_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), value.get_den().get_mpz_t(), e);
  Rational r = exponent > 0 ? Rational(num, den) : Rational(den, num);
  r.canonicalize();
  return r;
}

double to_double_approx(const Rational& value) { return value.get_d(); }

}  // namespace levijet
