#ifndef TAILCALC_FIELD_HPP
#define TAILCALC_FIELD_HPP

// Coefficient fields: double (float mode), Rational, and cas::Expr (exact mode).

#include <cmath>
#include <cstdio>
#include <string>

#include "tailcalc/cas/expr.hpp"

namespace tailcalc {

using cas::Exponent;
using cas::Expr;
using cas::Rational;

template <class T>
struct FieldTraits;

template <>
struct FieldTraits<double> {
  static constexpr bool exact = false;
  static double from_rational(const Rational& r) { return r.get_d(); }
  static double from_exponent(const Exponent& e) {
    if (!e.is_constant()) throw cas::DomainError("symbolic exponent in float mode: " + e.str());
    return e.constant().get_d();
  }
  static double from_expr(const Expr& e) {
    auto v = e.evaluate({});
    if (!v) throw cas::DomainError("symbolic value in float mode: " + e.str());
    return *v;
  }
  static bool is_zero(double x) { return x == 0.0; }
  static double pow(double b, const Exponent& e) { return std::pow(b, from_exponent(e)); }
  static double log(double x) {
    if (!(x > 0)) throw cas::DomainError("log of a non-positive value");
    return std::log(x);
  }
  static double gamma(const Exponent& z) { return std::tgamma(from_exponent(z)); }
  static double to_double(double x) { return x; }
  static std::string str(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }
};

template <>
struct FieldTraits<Rational> {
  static constexpr bool exact = true;
  static Rational from_rational(const Rational& r) { return r; }
  static Rational from_exponent(const Exponent& e) {
    if (!e.is_constant()) throw cas::DomainError("symbolic exponent over Q: " + e.str());
    return e.constant();
  }
  static Rational from_expr(const Expr& e) {
    auto r = e.as_rational();
    if (!r) throw cas::DomainError("value is not rational: " + e.str());
    return *r;
  }
  static bool is_zero(const Rational& x) { return x == 0; }
  static Rational pow(const Rational& b, const Exponent& e) {
    auto r = cas::exact_pow(b, from_exponent(e));
    if (!r) throw cas::DomainError("irrational power " + b.get_str() + "^(" + e.str() + ")");
    return *r;
  }
  static Rational log(const Rational& x) {
    if (x == 1) return 0;
    throw cas::DomainError("log(" + x.get_str() + ") is irrational");
  }
  static Rational gamma(const Exponent& z) {
    Rational c = from_exponent(z);
    if (!cas::is_integer(c) || c <= 0) throw cas::DomainError("Gamma(" + c.get_str() + ") is not rational");
    return cas::factorial(cas::to_long(c) - 1);
  }
  static double to_double(const Rational& x) { return x.get_d(); }
  static std::string str(const Rational& x) { return x.get_str(); }
};

template <>
struct FieldTraits<Expr> {
  static constexpr bool exact = true;
  static Expr from_rational(const Rational& r) { return Expr(r); }
  static Expr from_exponent(const Exponent& e) { return Expr::from_exponent(e); }
  static Expr from_expr(const Expr& e) { return e; }
  static bool is_zero(const Expr& x) { return x.is_zero(); }
  static Expr pow(const Expr& b, const Exponent& e) { return cas::pow(b, e); }
  static Expr log(const Expr& x) { return cas::log(x); }
  static Expr gamma(const Exponent& z) { return cas::gamma(z); }
  static double to_double(const Expr& x) {
    auto v = x.evaluate({});
    return v ? *v : std::nan("");
  }
  static std::string str(const Expr& x) { return x.str(); }
};

template <class T>
T from_rational(const Rational& r) {
  return FieldTraits<T>::from_rational(r);
}

template <class T>
T from_long(long v) {
  return FieldTraits<T>::from_rational(Rational(v));
}

template <class T>
bool is_zero(const T& x) {
  return FieldTraits<T>::is_zero(x);
}

template <class T>
T power(const T& x, long n) {
  T r = from_long<T>(1);
  T b = x;
  if (n < 0) {
    b = from_long<T>(1) / x;
    n = -n;
  }
  for (; n > 0; n >>= 1) {
    if (n & 1) r = r * b;
    if (n > 1) b = b * b;
  }
  return r;
}

}  // namespace tailcalc

#endif  // TAILCALC_FIELD_HPP
