#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nearstable/errors.hpp"

namespace nearstable {

/// Exact rational number. GMP keeps values canonical (lowest terms, positive
/// denominator) as long as every constructed value goes through canonicalize().
using Rational = mpq_class;
using RationalVector = std::vector<Rational>;

inline Rational make_rational(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline bool is_integer(const Rational& r) { return r.get_den() == 1; }

inline mpz_class floor_of(const Rational& r) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

inline mpz_class ceil_of(const Rational& r) {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

/// Distance to the next integer above (0 when integral).
inline Rational up_gap(const Rational& r) { return Rational(ceil_of(r)) - r; }
/// Distance to the next integer below (0 when integral).
inline Rational down_gap(const Rational& r) { return r - Rational(floor_of(r)); }

inline std::string to_string(const Rational& r) { return r.get_str(10); }

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

}  // namespace detail

/// Parses "p/q", an integer literal, or a plain decimal literal ("-0.125",
/// "3e-2") exactly. Throws InputError on anything else.
inline Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  Rational result;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = s.substr(0, slash);
    auto den = s.substr(slash + 1);
    if (!detail::all_digits(num) || !detail::all_digits(den))
      throw InputError("malformed rational '" + std::string(text) + "'");
    mpz_class d(std::string(den), 10);
    if (d == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
    result = Rational(mpz_class(std::string(num), 10), d);
  } else {
    std::string_view mantissa = s;
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
      mantissa = s.substr(0, e);
      auto exp_text = std::string(s.substr(e + 1));
      std::string_view digits = exp_text;
      if (!digits.empty() && (digits.front() == '-' || digits.front() == '+'))
        digits.remove_prefix(1);
      if (!detail::all_digits(digits) || digits.size() > 6)
        throw InputError("malformed exponent in '" + std::string(text) + "'");
      exponent = std::stol(exp_text);
    }
    std::string int_part(mantissa);
    std::string frac_part;
    if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
      int_part = std::string(mantissa.substr(0, dot));
      frac_part = std::string(mantissa.substr(dot + 1));
      if (int_part.empty()) int_part = "0";
      if (frac_part.empty() || !detail::all_digits(frac_part))
        throw InputError("malformed decimal '" + std::string(text) + "'");
    }
    if (!detail::all_digits(int_part))
      throw InputError("malformed number '" + std::string(text) + "'");
    mpz_class num(int_part + frac_part, 10);
    exponent -= static_cast<long>(frac_part.size());
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    result = exponent < 0 ? Rational(num, scale) : Rational(num * scale);
  }
  result.canonicalize();
  return negative ? Rational(-result) : result;
}

inline Rational sum(const RationalVector& v) {
  Rational s = 0;
  for (const auto& x : v) s += x;
  return s;
}

inline bool all_integral(const RationalVector& v) {
  for (const auto& x : v)
    if (!is_integer(x)) return false;
  return true;
}

inline long to_long(const Rational& r) {
  if (!is_integer(r) || !r.get_num().fits_slong_p())
    throw InternalError("value " + to_string(r) + " is not a machine integer");
  return r.get_num().get_si();
}

}  // namespace nearstable
