#ifndef TAILCALC_SERIES_HPP
#define TAILCALC_SERIES_HPP

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tailcalc/field.hpp"

namespace tailcalc {

// Formal power series in one variable modulo u^(order+1).
template <class T>
class SeriesPoly {
 public:
  explicit SeriesPoly(int order = 0) : c_(static_cast<std::size_t>(order) + 1, from_long<T>(0)) {
    if (order < 0) throw std::invalid_argument("negative truncation order");
  }
  SeriesPoly(int order, std::vector<T> coeffs) : SeriesPoly(order) {
    for (std::size_t i = 0; i < coeffs.size() && i < c_.size(); ++i) c_[i] = std::move(coeffs[i]);
  }

  static SeriesPoly constant(int order, const T& v) {
    SeriesPoly s(order);
    s.c_[0] = v;
    return s;
  }
  static SeriesPoly variable(int order) {
    SeriesPoly s(order);
    if (order >= 1) s.c_[1] = from_long<T>(1);
    return s;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  const T& operator[](std::size_t i) const { return c_.at(i); }
  T& operator[](std::size_t i) { return c_.at(i); }
  const std::vector<T>& coeffs() const { return c_; }

  SeriesPoly& operator+=(const SeriesPoly& o) {
    check(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] = c_[i] + o.c_[i];
    return *this;
  }
  SeriesPoly& operator-=(const SeriesPoly& o) {
    check(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] = c_[i] - o.c_[i];
    return *this;
  }
  friend SeriesPoly operator+(SeriesPoly a, const SeriesPoly& b) { return a += b; }
  friend SeriesPoly operator-(SeriesPoly a, const SeriesPoly& b) { return a -= b; }
  SeriesPoly operator-() const {
    SeriesPoly r(order());
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = -c_[i];
    return r;
  }

  friend SeriesPoly operator*(const SeriesPoly& a, const SeriesPoly& b) {
    a.check(b);
    SeriesPoly r(a.order());
    const std::size_t n = a.c_.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (is_zero(a.c_[i])) continue;
      for (std::size_t j = 0; i + j < n; ++j) {
        if (is_zero(b.c_[j])) continue;
        r.c_[i + j] = r.c_[i + j] + a.c_[i] * b.c_[j];
      }
    }
    return r;
  }
  SeriesPoly scaled(const T& k) const {
    SeriesPoly r(order());
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = c_[i] * k;
    return r;
  }

  // The top coefficient of the derivative is unknown and set to zero.
  SeriesPoly derivative() const {
    SeriesPoly r(order());
    for (std::size_t i = 1; i < c_.size(); ++i) r.c_[i - 1] = c_[i] * from_long<T>(static_cast<long>(i));
    return r;
  }

  // Requires an invertible constant term.
  SeriesPoly reciprocal() const {
    if (is_zero(c_[0])) throw std::domain_error("series reciprocal needs a nonzero constant term");
    SeriesPoly r(order());
    T inv0 = from_long<T>(1) / c_[0];
    r.c_[0] = inv0;
    for (std::size_t n = 1; n < c_.size(); ++n) {
      T s = from_long<T>(0);
      for (std::size_t k = 1; k <= n; ++k) {
        if (!is_zero(c_[k])) s = s + c_[k] * r.c_[n - k];
      }
      r.c_[n] = -(s * inv0);
    }
    return r;
  }

  // Requires constant term 1.
  SeriesPoly log() const {
    if (c_[0] != from_long<T>(1)) throw std::domain_error("series log needs constant term 1");
    SeriesPoly r(order());
    // n r_n = n c_n - sum_{k=1}^{n-1} k r_k c_{n-k}
    for (std::size_t n = 1; n < c_.size(); ++n) {
      T s = c_[n] * from_long<T>(static_cast<long>(n));
      for (std::size_t k = 1; k < n; ++k) {
        if (!is_zero(r.c_[k]) && !is_zero(c_[n - k])) s = s - r.c_[k] * c_[n - k] * from_long<T>(static_cast<long>(k));
      }
      r.c_[n] = s / from_long<T>(static_cast<long>(n));
    }
    return r;
  }

  // Requires constant term 0.
  SeriesPoly exp() const {
    if (!is_zero(c_[0])) throw std::domain_error("series exp needs constant term 0");
    SeriesPoly r(order());
    r.c_[0] = from_long<T>(1);
    // n r_n = sum_{k=1}^{n} k c_k r_{n-k}
    for (std::size_t n = 1; n < c_.size(); ++n) {
      T s = from_long<T>(0);
      for (std::size_t k = 1; k <= n; ++k) {
        if (!is_zero(c_[k]) && !is_zero(r.c_[n - k])) s = s + c_[k] * r.c_[n - k] * from_long<T>(static_cast<long>(k));
      }
      r.c_[n] = s / from_long<T>(static_cast<long>(n));
    }
    return r;
  }

  // this(inner(u)); inner must have zero constant term.
  SeriesPoly compose(const SeriesPoly& inner) const {
    check(inner);
    if (!is_zero(inner.c_[0])) throw std::domain_error("series composition needs an inner series without constant term");
    SeriesPoly r(order());
    for (std::size_t i = c_.size(); i-- > 0;) {
      r = r * inner;
      r.c_[0] = r.c_[0] + c_[i];
    }
    return r;
  }

  SeriesPoly pow(long n) const {
    if (n < 0) return reciprocal().pow(-n);
    SeriesPoly r = constant(order(), from_long<T>(1));
    SeriesPoly b = *this;
    for (; n > 0; n >>= 1) {
      if (n & 1) r = r * b;
      if (n > 1) b = b * b;
    }
    return r;
  }

  friend bool operator==(const SeriesPoly& a, const SeriesPoly& b) { return a.c_ == b.c_; }
  friend bool operator!=(const SeriesPoly& a, const SeriesPoly& b) { return !(a == b); }

 private:
  void check(const SeriesPoly& o) const {
    if (o.c_.size() != c_.size()) throw std::invalid_argument("series truncation orders differ");
  }

  std::vector<T> c_;
};

}  // namespace tailcalc

#endif  // TAILCALC_SERIES_HPP
