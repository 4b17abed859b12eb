#include "msched/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

#include <gmp.h>

namespace msched {

namespace {

mpq_srcptr raw(const Rational& q) { return q.backend().data(); }

Integer pow10(unsigned e) {
  Integer r = 1;
  for (unsigned i = 0; i < e; ++i) r *= 10;
  return r;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

// Base-10 parse; the string constructor would read a leading 0 as octal.
Integer decimal_integer(std::string_view digits) {
  const auto nz = digits.find_first_not_of('0');
  return nz == std::string_view::npos ? Integer(0) : Integer(std::string(digits.substr(nz)));
}

// Top 64 bits of |z| as a long double scaled back by the dropped bit count.
long double mpz_to_long_double(mpz_srcptr z) {
  const std::size_t bits = mpz_sizeinbase(z, 2);
  mpz_t tmp;
  mpz_init(tmp);
  long shift = 0;
  if (bits > 64) {
    shift = static_cast<long>(bits - 64);
    mpz_tdiv_q_2exp(tmp, z, static_cast<mp_bitcnt_t>(shift));
  } else {
    mpz_set(tmp, z);
  }
  mpz_abs(tmp, tmp);
  // mpz_export to get an exact 64-bit value regardless of limb size.
  std::uint64_t word = 0;
  std::size_t count = 0;
  mpz_export(&word, &count, -1, sizeof(word), 0, 0, tmp);
  mpz_clear(tmp);
  long double v = std::ldexp(static_cast<long double>(word), static_cast<int>(shift));
  return mpz_sgn(z) < 0 ? -v : v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) throw ParseError("empty rational literal");

  bool negative = false;
  std::string_view body = s;
  if (body.front() == '-' || body.front() == '+') {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }

  const auto slash = body.find('/');
  if (slash != std::string_view::npos) {
    auto num = body.substr(0, slash);
    auto den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den))
      throw ParseError("malformed rational literal '" + std::string(text) + "'");
    Integer d = decimal_integer(den);
    if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    Rational q{decimal_integer(num), d};
    return negative ? Rational(-q) : q;
  }

  // Decimal with optional exponent.
  std::string_view mant = body;
  long exponent = 0;
  const auto epos = body.find_first_of("eE");
  if (epos != std::string_view::npos) {
    mant = body.substr(0, epos);
    auto exp_text = body.substr(epos + 1);
    bool exp_neg = false;
    if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
      exp_neg = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    if (!all_digits(exp_text) || exp_text.size() > 6)
      throw ParseError("malformed exponent in '" + std::string(text) + "'");
    exponent = std::stol(std::string(exp_text));
    if (exp_neg) exponent = -exponent;
  }
  std::string digits;
  long frac_digits = 0;
  const auto dot = mant.find('.');
  if (dot != std::string_view::npos) {
    auto ip = mant.substr(0, dot);
    auto fp = mant.substr(dot + 1);
    if ((!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)) ||
        (ip.empty() && fp.empty()))
      throw ParseError("malformed decimal literal '" + std::string(text) + "'");
    digits = std::string(ip) + std::string(fp);
    frac_digits = static_cast<long>(fp.size());
  } else {
    if (!all_digits(mant)) throw ParseError("malformed number '" + std::string(text) + "'");
    digits = std::string(mant);
  }
  Rational q{decimal_integer(digits)};
  const long scale = exponent - frac_digits;
  if (scale > 0) q *= Rational(pow10(static_cast<unsigned>(scale)));
  if (scale < 0) q /= Rational(pow10(static_cast<unsigned>(-scale)));
  return negative ? Rational(-q) : q;
}

std::string to_fraction_string(const Rational& q) {
  return boost::multiprecision::numerator(q).str() + "/" +
         boost::multiprecision::denominator(q).str();
}

std::string to_decimal_string(const Rational& q, int significant_digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*Lg", significant_digits, to_long_double(q));
  return buf;
}

long double to_long_double(const Rational& q) {
  const mpq_srcptr r = raw(q);
  if (mpq_sgn(r) == 0) return 0.0L;
  // Scale so that num/den keeps at least 64 significant bits.
  const long nb = static_cast<long>(mpz_sizeinbase(mpq_numref(r), 2));
  const long db = static_cast<long>(mpz_sizeinbase(mpq_denref(r), 2));
  const long shift = 72 - (nb - db);
  mpz_t scaled;
  mpz_init(scaled);
  if (shift >= 0)
    mpz_mul_2exp(scaled, mpq_numref(r), static_cast<mp_bitcnt_t>(shift));
  else
    mpz_tdiv_q_2exp(scaled, mpq_numref(r), static_cast<mp_bitcnt_t>(-shift));
  mpz_tdiv_q(scaled, scaled, mpq_denref(r));
  const long double v = mpz_to_long_double(scaled);
  mpz_clear(scaled);
  return std::ldexp(v, static_cast<int>(-shift));
}

Rational from_long_double(long double value) {
  if (!std::isfinite(value)) throw DomainError("non-finite value cannot be made rational");
  if (value == 0.0L) return Rational(0);
  int exp = 0;
  const long double frac = std::frexp(value, &exp);  // |frac| in [0.5, 1)
  const long double scaled = std::ldexp(std::fabs(frac), 64);
  const auto mantissa = static_cast<std::uint64_t>(scaled);
  mpz_t z;
  mpz_init(z);
  mpz_import(z, 1, -1, sizeof(mantissa), 0, 0, &mantissa);
  Integer m;
  mpz_set(m.backend().data(), z);
  mpz_clear(z);
  Rational q(m);
  const int e2 = exp - 64;
  Integer p2 = 1;
  p2 <<= static_cast<unsigned>(std::abs(e2));
  if (e2 >= 0)
    q *= Rational(p2);
  else
    q /= Rational(p2);
  return value < 0 ? Rational(-q) : q;
}

Integer floor_integer(const Rational& q) {
  Integer r;
  mpz_fdiv_q(r.backend().data(), mpq_numref(raw(q)), mpq_denref(raw(q)));
  return r;
}

Integer ceil_integer(const Rational& q) {
  Integer r;
  mpz_cdiv_q(r.backend().data(), mpq_numref(raw(q)), mpq_denref(raw(q)));
  return r;
}

Rational pow_int(const Rational& base, unsigned exponent) {
  Rational result = 1;
  Rational b = base;
  while (exponent) {
    if (exponent & 1u) result *= b;
    exponent >>= 1u;
    if (exponent) b *= b;
  }
  return result;
}

std::optional<Rational> exact_root(const Rational& q, unsigned k) {
  if (k == 0) throw DomainError("root of order zero");
  if (q < 0) throw DomainError("root of negative rational");
  if (k == 1) return q;
  Integer num, den;
  const int exact_num = mpz_root(num.backend().data(), mpq_numref(raw(q)), k);
  const int exact_den = mpz_root(den.backend().data(), mpq_denref(raw(q)), k);
  if (!exact_num || !exact_den) return std::nullopt;
  return Rational(num, den);
}

Rational simplest_between(const Rational& lo, const Rational& hi) {
  if (lo > hi) return simplest_between(hi, lo);
  if (lo <= 0 && hi >= 0) return Rational(0);
  if (hi < 0) return Rational(-simplest_between(Rational(-hi), Rational(-lo)));
  const Rational fl(floor_integer(lo));
  if (fl == lo) return lo;
  if (fl + 1 <= hi) return fl + 1;
  return fl + Rational(1) / simplest_between(Rational(1) / (hi - fl), Rational(1) / (lo - fl));
}

SpeedNorm SpeedNorm::finite(const Rational& value) {
  if (value < 1) throw DomainError("speed regularizer p must be >= 1");
  return SpeedNorm{value};
}

std::optional<unsigned> SpeedNorm::integer_exponent() const {
  if (!p) return std::nullopt;
  if (boost::multiprecision::denominator(*p) != 1) return std::nullopt;
  const Integer v = boost::multiprecision::numerator(*p);
  if (v > 4096) return std::nullopt;
  return v.convert_to<unsigned>();
}

SpeedNorm parse_norm(std::string_view text) {
  if (text == "inf" || text == "infinity" || text == "Infinity")
    return SpeedNorm::infinity();
  return SpeedNorm::finite(parse_rational(text));
}

std::string to_string(const SpeedNorm& norm) {
  return norm.p ? to_fraction_string(*norm.p) : std::string("inf");
}

Rational pow_norm(const Rational& base, const Rational& p) {
  if (boost::multiprecision::denominator(p) == 1 && p <= 4096)
    return pow_int(base, boost::multiprecision::numerator(p).convert_to<unsigned>());
  return from_long_double(std::pow(to_long_double(base), to_long_double(p)));
}

}  // namespace msched
