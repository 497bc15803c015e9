#ifndef TAILCALC_CAS_RATIONAL_HPP
#define TAILCALC_CAS_RATIONAL_HPP

#include <gmpxx.h>

#include <cctype>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tailcalc::cas {

using Integer = mpz_class;
using Rational = mpq_class;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

inline Rational make_rational(long num, long den = 1) {
  if (den == 0) throw DomainError("zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline bool is_integer(const Rational& r) { return r.get_den() == 1; }

inline Integer floor_of(const Rational& r) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

inline Integer ceil_of(const Rational& r) {
  Integer q;
  mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

inline long to_long(const Integer& z) {
  if (!z.fits_slong_p()) throw DomainError("integer out of range");
  return z.get_si();
}

inline long to_long(const Rational& r) {
  if (!is_integer(r)) throw DomainError("expected an integer, got " + r.get_str());
  return to_long(r.get_num());
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

inline Rational pow_int(const Rational& base, long e) {
  if (e == 0) return 1;
  if (base == 0) {
    if (e < 0) throw DomainError("zero to a negative power");
    return 0;
  }
  Integer num, den;
  unsigned long ue = static_cast<unsigned long>(e < 0 ? -e : e);
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), ue);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), ue);
  Rational r = e > 0 ? Rational(num, den) : Rational(den, num);
  r.canonicalize();
  return r;
}

inline Rational factorial(long n) {
  if (n < 0) throw DomainError("factorial of a negative integer");
  Integer z;
  mpz_fac_ui(z.get_mpz_t(), static_cast<unsigned long>(n));
  return Rational(z);
}

// Generalized binomial coefficient x(x-1)...(x-k+1)/k!.
inline Rational binomial(const Rational& x, long k) {
  if (k < 0) return 0;
  Rational r = 1;
  for (long i = 0; i < k; ++i) r *= (x - i) / Rational(i + 1);
  return r;
}

// Exact k-th root when it exists.
inline std::optional<Integer> exact_root(const Integer& z, unsigned long k) {
  if (z < 0) {
    if (k % 2 == 0) return std::nullopt;
    auto r = exact_root(-z, k);
    if (!r) return std::nullopt;
    return Integer(-*r);
  }
  Integer r;
  if (mpz_root(r.get_mpz_t(), z.get_mpz_t(), k) == 0) return std::nullopt;
  return r;
}

inline std::optional<Rational> exact_pow(const Rational& base, const Rational& e) {
  if (is_integer(e)) return pow_int(base, to_long(e));
  unsigned long q = e.get_den().get_ui();
  auto n = exact_root(base.get_num(), q);
  auto d = exact_root(base.get_den(), q);
  if (!n || !d) return std::nullopt;
  return pow_int(Rational(*n, *d), to_long(e.get_num()));
}

// Accepts "p", "p/q", "-p/q" and finite decimals such as "1.25" or "2e-3".
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto fail = [&] { throw ParseError("not a rational literal: '" + s + "'"); };
  if (s.empty()) fail();
  if (auto slash = s.find('/'); slash != std::string::npos) {
    Rational a = parse_rational(s.substr(0, slash));
    Rational b = parse_rational(s.substr(slash + 1));
    if (b == 0) fail();
    return a / b;
  }
  std::size_t pos = 0;
  bool neg = false;
  if (s[pos] == '+' || s[pos] == '-') neg = s[pos++] == '-';
  std::string digits;
  long scale = 0;
  bool seen_point = false;
  bool any = false;
  for (; pos < s.size(); ++pos) {
    char ch = s[pos];
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      digits.push_back(ch);
      any = true;
      if (seen_point) ++scale;
    } else if (ch == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any) fail();
  long exp10 = 0;
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') fail();
    std::string rest = s.substr(pos + 1);
    if (rest.empty()) fail();
    std::size_t used = 0;
    try {
      exp10 = std::stol(rest, &used);
    } catch (const std::exception&) {
      fail();
    }
    if (used != rest.size()) fail();
  }
  Rational r(Integer(digits, 10));
  r *= pow_int(Rational(10), exp10 - scale);
  if (neg) r = -r;
  r.canonicalize();
  return r;
}

// Prime factorization by trial division; an unsplit cofactor is kept as-is.
inline std::vector<std::pair<Integer, long>> factorize(Integer n) {
  std::vector<std::pair<Integer, long>> out;
  if (n < 0) n = -n;
  if (n <= 1) return out;
  auto take = [&](const Integer& p) {
    long k = 0;
    while (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t()) != 0) {
      n /= p;
      ++k;
    }
    if (k > 0) out.emplace_back(p, k);
  };
  take(Integer(2));
  take(Integer(3));
  for (unsigned long p = 5; p <= 1000000UL; p += 6) {
    Integer a(p), b(p + 2);
    if (a * a > n) break;
    take(a);
    take(b);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

}  // namespace tailcalc::cas

#endif  // TAILCALC_CAS_RATIONAL_HPP
