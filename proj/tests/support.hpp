#ifndef TAILCALC_TESTS_SUPPORT_HPP
#define TAILCALC_TESTS_SUPPORT_HPP

#include <random>
#include <vector>

#include "tailcalc/engine.hpp"

namespace support {

using tailcalc::Rational;

// Seeded source of small rationals for property tests.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}

  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(g_); }

  Rational rational(long span = 9, long den = 6) {
    long num = integer(-span, span);
    return tailcalc::cas::make_rational(num, integer(1, den));
  }

  Rational nonzero(long span = 9, long den = 6) {
    Rational r(0);
    while (r == 0) r = rational(span, den);
    return r;
  }

  Rational positive(long span = 9, long den = 6) {
    long num = integer(1, span);
    return tailcalc::cas::make_rational(num, integer(1, den));
  }

  // mu_0 = 1; later entries arbitrary: the algebra does not need a distribution.
  tailcalc::MomentVector<Rational> moments(int m) {
    std::vector<Rational> mu{Rational(1)};
    for (int j = 1; j <= m; ++j) mu.push_back(rational());
    return tailcalc::MomentVector<Rational>(std::move(mu), true);
  }

  tailcalc::LaplaceCharacter<Rational> character(int m) {
    std::vector<Rational> c{nonzero()};
    for (int j = 1; j <= m; ++j) c.push_back(rational());
    return tailcalc::LaplaceCharacter<Rational>::from_coefficients(std::move(c));
  }

  // Finite law with rational atoms and probabilities.
  struct Atoms {
    std::vector<Rational> x, p;
  };
  Atoms atoms(int n) {
    Atoms a;
    std::vector<long> w;
    long total = 0;
    for (int i = 0; i < n; ++i) {
      w.push_back(integer(1, 5));
      total += w.back();
      a.x.push_back(rational(5, 3));
    }
    for (long v : w) a.p.push_back(tailcalc::cas::make_rational(v, total));
    return a;
  }

  std::mt19937_64& engine() { return g_; }

 private:
  std::mt19937_64 g_;
};

inline tailcalc::MomentVector<Rational> atom_moments(const Rng::Atoms& a, int m) {
  std::vector<Rational> mu;
  for (int k = 0; k <= m; ++k) {
    Rational s(0);
    for (std::size_t i = 0; i < a.x.size(); ++i) s += a.p[i] * tailcalc::power(a.x[i], k);
    mu.push_back(s);
  }
  return tailcalc::MomentVector<Rational>(std::move(mu));
}

// Law of X op Y for independent finite laws.
template <class Op>
Rng::Atoms combine(const Rng::Atoms& a, const Rng::Atoms& b, Op op) {
  Rng::Atoms out;
  for (std::size_t i = 0; i < a.x.size(); ++i) {
    for (std::size_t j = 0; j < b.x.size(); ++j) {
      out.x.push_back(op(a.x[i], b.x[j]));
      out.p.push_back(a.p[i] * b.p[j]);
    }
  }
  return out;
}

}  // namespace support

#endif  // TAILCALC_TESTS_SUPPORT_HPP
