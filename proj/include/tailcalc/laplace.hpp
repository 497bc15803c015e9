#ifndef TAILCALC_LAPLACE_HPP
#define TAILCALC_LAPLACE_HPP

// The truncated operator ring R_m[D] and the Laplace characters living in it.

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include "tailcalc/field.hpp"
#include "tailcalc/series.hpp"

namespace tailcalc {

struct LaplaceError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// mu_0..mu_m of a law. Synthetic vectors skip the distributional checks.
template <class T>
struct MomentVector {
  std::vector<T> mu;
  bool synthetic = false;

  MomentVector() = default;
  explicit MomentVector(std::vector<T> values, bool synth = false) : mu(std::move(values)), synthetic(synth) {
    if (mu.empty()) throw LaplaceError("moment vector needs mu_0");
    if (!synthetic && mu[0] != from_long<T>(1)) throw LaplaceError("mu_0 must be 1");
    if constexpr (!FieldTraits<T>::exact) {
      if (!synthetic && mu.size() > 2 && variance() < -1e-12 * (mu[2] < 0 ? -mu[2] : mu[2])) {
        throw LaplaceError("negative variance in a distributional moment vector");
      }
    } else if constexpr (std::is_same_v<T, Rational>) {
      if (!synthetic && mu.size() > 2 && variance() < 0) throw LaplaceError("negative variance in a distributional moment vector");
    }
  }

  static MomentVector point_mass(int m, const T& at) {
    std::vector<T> v;
    T p = from_long<T>(1);
    for (int j = 0; j <= m; ++j) {
      v.push_back(p);
      p = p * at;
    }
    return MomentVector(std::move(v));
  }

  int order() const { return static_cast<int>(mu.size()) - 1; }
  const T& operator[](std::size_t j) const { return mu.at(j); }

  MomentVector truncated(int m) const {
    if (m > order()) throw LaplaceError("moment vector too short");
    return MomentVector(std::vector<T>(mu.begin(), mu.begin() + m + 1), synthetic);
  }

  T variance() const { return mu.at(2) - mu.at(1) * mu.at(1); }
  T kappa3() const {
    const T &m1 = mu.at(1), &m2 = mu.at(2), &m3 = mu.at(3);
    return m3 - from_long<T>(3) * m1 * m2 + from_long<T>(2) * m1 * m1 * m1;
  }
  T kappa4() const {
    const T &m1 = mu.at(1), &m2 = mu.at(2), &m3 = mu.at(3), &m4 = mu.at(4);
    return m4 - from_long<T>(4) * m1 * m3 + from_long<T>(6) * m1 * m1 * m2 - from_long<T>(3) * m1 * m1 * m1 * m1;
  }

  friend bool operator==(const MomentVector& a, const MomentVector& b) { return a.mu == b.mu; }
};

template <class T>
T factorial_in(long n) {
  return from_rational<T>(cas::factorial(n));
}

// Element sum_j coeff[j] D^j of R_m[D]; moments are kept alongside (mu_j = (-1)^j j! l_j).
template <class T>
class LaplaceCharacter {
 public:
  LaplaceCharacter() = default;

  static LaplaceCharacter from_coefficients(std::vector<T> coeff) {
    if (coeff.empty()) throw LaplaceError("empty character");
    LaplaceCharacter c;
    c.coeff_ = std::move(coeff);
    c.mu_.reserve(c.coeff_.size());
    for (std::size_t j = 0; j < c.coeff_.size(); ++j) {
      T v = c.coeff_[j] * factorial_in<T>(static_cast<long>(j));
      c.mu_.push_back(j % 2 == 0 ? v : T(-v));
    }
    return c;
  }

  static LaplaceCharacter identity(int m) {
    std::vector<T> v(static_cast<std::size_t>(m) + 1, from_long<T>(0));
    v[0] = from_long<T>(1);
    return from_coefficients(std::move(v));
  }

  int order() const { return static_cast<int>(coeff_.size()) - 1; }
  const std::vector<T>& coeff() const { return coeff_; }
  const T& operator[](std::size_t j) const { return coeff_.at(j); }
  // Moments encoded by the coefficients; mu_0 = l_0.
  const std::vector<T>& moments() const { return mu_; }

  SeriesPoly<T> as_series() const { return SeriesPoly<T>(order(), coeff_); }
  static LaplaceCharacter from_series(const SeriesPoly<T>& s) { return from_coefficients(s.coeffs()); }

  friend bool operator==(const LaplaceCharacter& a, const LaplaceCharacter& b) { return a.coeff_ == b.coeff_; }
  friend bool operator!=(const LaplaceCharacter& a, const LaplaceCharacter& b) { return !(a == b); }

  friend LaplaceCharacter operator+(const LaplaceCharacter& a, const LaplaceCharacter& b) {
    return from_series(a.as_series() + b.as_series());
  }
  friend LaplaceCharacter operator-(const LaplaceCharacter& a, const LaplaceCharacter& b) {
    return from_series(a.as_series() - b.as_series());
  }
  LaplaceCharacter scaled(const T& k) const { return from_series(as_series().scaled(k)); }

 private:
  std::vector<T> coeff_;
  std::vector<T> mu_;
};

template <class T>
LaplaceCharacter<T> character_from_moments(const MomentVector<T>& mv) {
  std::vector<T> coeff;
  coeff.reserve(mv.mu.size());
  for (std::size_t j = 0; j < mv.mu.size(); ++j) {
    T v = mv.mu[j] / factorial_in<T>(static_cast<long>(j));
    coeff.push_back(j % 2 == 0 ? v : T(-v));
  }
  return LaplaceCharacter<T>::from_coefficients(std::move(coeff));
}

template <class T>
MomentVector<T> moments_of(const LaplaceCharacter<T>& c, bool synthetic = true) {
  return MomentVector<T>(c.moments(), synthetic);
}

template <class T>
LaplaceCharacter<T> compose(const LaplaceCharacter<T>& a, const LaplaceCharacter<T>& b) {
  if (a.order() != b.order()) throw LaplaceError("character orders differ");
  return LaplaceCharacter<T>::from_series(a.as_series() * b.as_series());
}

template <class T>
MomentVector<T> convolve_moments(const MomentVector<T>& a, const MomentVector<T>& b) {
  if (a.order() != b.order()) throw LaplaceError("moment orders differ");
  std::vector<T> out;
  for (int k = 0; k <= a.order(); ++k) {
    T s = from_long<T>(0);
    for (int i = 0; i <= k; ++i) s = s + from_rational<T>(cas::binomial(Rational(k), i)) * a.mu[i] * b.mu[k - i];
    out.push_back(s);
  }
  return MomentVector<T>(std::move(out), a.synthetic || b.synthetic);
}

namespace detail {

// Visits partitions p_1 >= ... >= p_k > 0 of n with k <= max_parts.
inline void for_each_partition(int n, int max_parts, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> p;
  std::function<void(int, int)> rec = [&](int rest, int cap) {
    if (rest == 0) {
      f(p);
      return;
    }
    if (static_cast<int>(p.size()) == max_parts) return;
    for (int v = std::min(rest, cap); v >= 1; --v) {
      p.push_back(v);
      rec(rest - v, v);
      p.pop_back();
    }
  };
  rec(n, n);
}

}  // namespace detail

// Inverse by summation over partitions; for l_0 != 1 the character is first normalized.
template <class T>
LaplaceCharacter<T> invert_partitions(const LaplaceCharacter<T>& a) {
  const int m = a.order();
  if (is_zero(a[0])) throw LaplaceError("character with zero constant term is not invertible");
  const T inv0 = from_long<T>(1) / a[0];
  // x_k plays the role of mu_k / k! for the normalized character.
  std::vector<T> x(static_cast<std::size_t>(m) + 1, from_long<T>(0));
  for (int k = 1; k <= m; ++k) x[k] = (k % 2 == 0 ? a[k] : T(-a[k])) * inv0;
  std::vector<T> out(static_cast<std::size_t>(m) + 1, from_long<T>(0));
  for (int n = 0; n <= m; ++n) {
    T total = from_long<T>(0);
    detail::for_each_partition(n, m, [&](const std::vector<int>& p) {
      const int p1 = p.empty() ? 0 : p[0];
      Rational coef = cas::factorial(p1);
      T prod = from_long<T>(1);
      for (int k = 1; k <= m; ++k) {
        int pk = k <= static_cast<int>(p.size()) ? p[k - 1] : 0;
        int pk1 = k < static_cast<int>(p.size()) ? p[k] : 0;
        int d = pk - pk1;
        if (d == 0) continue;
        coef /= cas::factorial(d);
        prod = prod * power(x[k], d);
      }
      if ((n + p1) % 2 != 0) coef = -coef;
      total = total + from_rational<T>(coef) * prod;
    });
    out[n] = total * inv0;
  }
  return LaplaceCharacter<T>::from_coefficients(std::move(out));
}

// Inverse as sum_{k<=m} (Id - a)^k; needs l_0 = 1 so that Id - a is nilpotent.
template <class T>
LaplaceCharacter<T> invert_nilpotent(const LaplaceCharacter<T>& a) {
  if (a[0] != from_long<T>(1)) throw LaplaceError("nilpotent inversion needs l_0 = 1");
  const int m = a.order();
  SeriesPoly<T> n = SeriesPoly<T>::constant(m, from_long<T>(1)) - a.as_series();
  SeriesPoly<T> term = SeriesPoly<T>::constant(m, from_long<T>(1));
  SeriesPoly<T> sum = term;
  for (int k = 1; k <= m; ++k) {
    term = term * n;
    sum += term;
  }
  return LaplaceCharacter<T>::from_series(sum);
}

template <class T>
LaplaceCharacter<T> mellin_character(const MomentVector<T>& a, const MomentVector<T>& b) {
  if (a.order() != b.order()) throw LaplaceError("moment orders differ");
  std::vector<T> mu;
  for (int j = 0; j <= a.order(); ++j) mu.push_back(a.mu[j] * b.mu[j]);
  return character_from_moments(MomentVector<T>(std::move(mu), a.synthetic || b.synthetic));
}

// Character of order m of the equilibrium law H(t) = mu_1^{-1} int_0^t Bbar, from B-moments of order m+1.
template <class T>
LaplaceCharacter<T> equilibrium_character(const MomentVector<T>& b) {
  const int m = b.order() - 1;
  if (m < 0) throw LaplaceError("equilibrium character needs at least the first moment");
  if (is_zero(b.mu[1])) throw LaplaceError("equilibrium law of a zero-mean law");
  if constexpr (!FieldTraits<T>::exact) {
    if (!(b.mu[1] > 0)) throw LaplaceError("equilibrium law needs a positive mean");
  }
  LaplaceCharacter<T> lb = character_from_moments(b);
  std::vector<T> out;
  const T k = from_long<T>(-1) / b.mu[1];
  for (int j = 0; j <= m; ++j) out.push_back(k * lb[j + 1]);
  return LaplaceCharacter<T>::from_coefficients(std::move(out));
}

template <class T>
MomentVector<T> scale_moments(const MomentVector<T>& mv, const T& c) {
  std::vector<T> out;
  T p = from_long<T>(1);
  for (const T& v : mv.mu) {
    out.push_back(p * v);
    p = p * c;
  }
  return MomentVector<T>(std::move(out), mv.synthetic);
}

// char(K * H) expanded as sum_j (-1)^j mu_{H,j}/j! shift_j(char_{m-j}(K)).
template <class T>
LaplaceCharacter<T> laplace_binomial(const MomentVector<T>& k, const MomentVector<T>& h) {
  const int m = k.order();
  std::vector<T> out(static_cast<std::size_t>(m) + 1, from_long<T>(0));
  for (int j = 0; j <= m; ++j) {
    T w = h.mu[j] / factorial_in<T>(j);
    if (j % 2 != 0) w = -w;
    LaplaceCharacter<T> kc = character_from_moments(k.truncated(m - j));
    for (int i = 0; i <= m - j; ++i) out[i + j] = out[i + j] + w * kc[i];
  }
  return LaplaceCharacter<T>::from_coefficients(std::move(out));
}

}  // namespace tailcalc

#endif  // TAILCALC_LAPLACE_HPP
