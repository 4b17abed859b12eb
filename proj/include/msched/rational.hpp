#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>
#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>

namespace msched {

/// Exact arbitrary-precision rational. Expression templates are disabled so
/// the type composes cleanly with Eigen's own expression machinery.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixQ = Matrix<Rational>;
using VectorQ = Vector<Rational>;

class ParseError : public std::runtime_error {
public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

class DomainError : public std::domain_error {
public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Accepts "a/b", "a", and finite decimals such as "-1.25" or "3e-2".
Rational parse_rational(std::string_view text);

/// Always renders "num/den", including "2/1" and "0/1".
std::string to_fraction_string(const Rational& q);

/// Decimal rendering with the given number of significant digits.
std::string to_decimal_string(const Rational& q, int significant_digits = 12);

long double to_long_double(const Rational& q);

/// Exact value of a finite long double (which is always a dyadic rational).
Rational from_long_double(long double value);

Integer floor_integer(const Rational& q);
Integer ceil_integer(const Rational& q);

Rational pow_int(const Rational& base, unsigned exponent);

/// The exact k-th root when both numerator and denominator are perfect
/// k-th powers, otherwise nullopt. Requires q >= 0 and k >= 1.
std::optional<Rational> exact_root(const Rational& q, unsigned k);

/// Smallest-denominator rational within [lo, hi] (Stern-Brocot descent).
Rational simplest_between(const Rational& lo, const Rational& hi);

/// Speed regularizer p >= 1 used for effective speeds; nullopt is p = infinity.
struct SpeedNorm {
  std::optional<Rational> p = Rational(1);

  static SpeedNorm additive() { return SpeedNorm{}; }
  static SpeedNorm infinity() { return SpeedNorm{std::nullopt}; }
  static SpeedNorm finite(const Rational& value);

  bool is_additive() const { return p && *p == 1; }
  bool is_infinite() const { return !p.has_value(); }
  /// Positive integer value of p, if p is one.
  std::optional<unsigned> integer_exponent() const;

  friend bool operator==(const SpeedNorm&, const SpeedNorm&) = default;
};

SpeedNorm parse_norm(std::string_view text);
std::string to_string(const SpeedNorm& norm);

/// base^p for rational p >= 1: exact for integer p, long double otherwise.
Rational pow_norm(const Rational& base, const Rational& p);

}  // namespace msched
