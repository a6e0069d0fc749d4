#pragma once

// Exact rational scalars. Everything in the library is computed over Q; there
// is no floating point path.

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wzd {

using Rational = mpq_class;
using Integer = mpz_class;

/// Thrown for malformed input data (bad strings, schema violations).
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an operation's precondition is violated by otherwise
/// well-formed data.
class PreconditionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a geometric construction fails (non-fan after surgery,
/// singular systems, certificate failures).
class GeometryError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Parses "p", "-p", "p/q" into canonical form. Rejects zero denominators,
/// whitespace and anything that is not a plain integer ratio.
inline Rational parse_rational(std::string_view text) {
  if (text.empty()) throw InputError("empty rational literal");
  auto valid_int = [](std::string_view s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  const auto slash = text.find('/');
  std::string num(text.substr(0, slash));
  std::string den = slash == std::string_view::npos ? "1" : std::string(text.substr(slash + 1));
  if (!num.empty() && num[0] == '+') num.erase(0, 1);
  if (!valid_int(num) || !valid_int(den) || den[0] == '-' || den[0] == '+')
    throw InputError("malformed rational literal '" + std::string(text) + "'");
  Integer n(num, 10), d(den, 10);
  if (d == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
  Rational q(n, d);
  q.canonicalize();
  return q;
}

/// num/den in lowest terms (the two-argument mpq constructors do not reduce).
inline Rational ratio(const Integer& num, const Integer& den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

/// Canonical lowest-terms string: "p" for integers, "p/q" otherwise.
inline std::string to_string(const Rational& q) { return q.get_str(10); }

inline Integer floor_of(const Rational& q) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

inline Integer ceil_of(const Rational& q) {
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

inline Integer lcm_of(const Integer& a, const Integer& b) {
  Integer r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline Integer gcd_of(const Integer& a, const Integer& b) {
  Integer r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline std::int64_t to_int64(const Integer& z) {
  if (!z.fits_slong_p()) throw GeometryError("integer overflow converting " + z.get_str());
  return z.get_si();
}

inline int sign(const Rational& q) { return sgn(q); }

using RationalVector = std::vector<Rational>;
using IntVector = std::vector<std::int64_t>;

inline Rational dot(const RationalVector& a, const RationalVector& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Rational dot(const RationalVector& a, const IntVector& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * Rational(static_cast<long>(b[i]));
  return s;
}

inline RationalVector to_rational(const IntVector& v) {
  RationalVector r;
  r.reserve(v.size());
  for (auto x : v) r.emplace_back(static_cast<long>(x));
  return r;
}

/// Scales a nonzero rational vector to the primitive integer vector on the
/// same ray.
inline IntVector primitive_on_ray(const RationalVector& v) {
  Integer den = 1;
  for (const auto& x : v) den = lcm_of(den, x.get_den());
  std::vector<Integer> ints;
  ints.reserve(v.size());
  Integer g = 0;
  for (const auto& x : v) {
    Integer z = x.get_num() * (den / x.get_den());
    g = gcd_of(g, z);
    ints.push_back(z);
  }
  if (g == 0) throw GeometryError("primitive_on_ray: zero vector");
  IntVector out;
  out.reserve(v.size());
  for (auto& z : ints) out.push_back(to_int64(Integer(z / g)));
  return out;
}

inline std::int64_t content_of(const IntVector& v) {
  Integer g = 0;
  for (auto x : v) g = gcd_of(g, Integer(static_cast<long>(x)));
  return to_int64(g);
}

}  // namespace wzd
