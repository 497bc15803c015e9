#ifndef TAILCALC_SCALE_HPP
#define TAILCALC_SCALE_HPP

// Star-asymptotic scales t^{-a} (log t)^b and their matrix representations.

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "tailcalc/field.hpp"
#include "tailcalc/laplace.hpp"
#include "tailcalc/matrix.hpp"

namespace tailcalc {

struct ScaleError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// t^{-a} (log t)^b
struct ScaleElement {
  Exponent a;
  Rational b = 0;

  friend bool operator==(const ScaleElement& x, const ScaleElement& y) { return x.a == y.a && x.b == y.b; }

  std::string str() const {
    std::string s = "t^(-(" + a.str() + "))";
    if (b != 0) s += "*log(t)^(" + b.get_str() + ")";
    return s;
  }
};

// Symbolic exponents are ordered through a witness valuation of their symbols.
class ScaleBasis {
 public:
  ScaleBasis() = default;

  static ScaleBasis close_under_derivative(const std::vector<ScaleElement>& seed, const Exponent& cutoff,
                                           cas::Valuation witness = {}) {
    if (seed.empty()) throw ScaleError("empty scale seed");
    ScaleBasis s;
    s.cutoff_ = cutoff;
    s.witness_ = std::move(witness);
    std::vector<ScaleElement> pending;
    for (const auto& e : seed) {
      if (s.compare(e.a, Exponent(0)) <= 0) throw ScaleError("scale exponents must be positive: " + e.a.str());
      if (s.compare(e.a, cutoff) <= 0) pending.push_back(e);
    }
    while (!pending.empty()) {
      ScaleElement e = pending.back();
      pending.pop_back();
      if (s.find(e)) continue;
      s.insert(e);
      ScaleElement next{e.a + Exponent(1), e.b};
      if (s.compare(next.a, cutoff) <= 0) pending.push_back(next);
    }
    if (s.items_.empty()) throw ScaleError("every seed element lies beyond the cutoff");
    return s;
  }

  std::size_t size() const { return items_.size(); }
  const ScaleElement& operator[](std::size_t i) const { return items_.at(i); }
  const std::vector<ScaleElement>& items() const { return items_; }
  const Exponent& cutoff() const { return cutoff_; }
  const cas::Valuation& witness() const { return witness_; }

  bool is_pure_power() const {
    return std::all_of(items_.begin(), items_.end(), [](const ScaleElement& e) { return e.b == 0; });
  }

  std::optional<std::size_t> find(const ScaleElement& e) const {
    for (std::size_t i = 0; i < items_.size(); ++i) {
      if (items_[i] == e) return i;
    }
    return std::nullopt;
  }

  // Sign of x - y; symbolic differences are decided by the witness.
  int compare(const Exponent& x, const Exponent& y) const {
    Exponent d = x - y;
    Rational v;
    if (d.is_constant()) {
      v = d.constant();
    } else {
      if (!d.evaluable(witness_)) throw ScaleError("cannot order symbolic exponents " + x.str() + " and " + y.str());
      v = d.evaluate(witness_);
      if (v == 0) throw ScaleError("witness does not separate " + x.str() + " and " + y.str());
    }
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
  }

  friend bool operator==(const ScaleBasis& x, const ScaleBasis& y) {
    return x.items_ == y.items_ && x.cutoff_ == y.cutoff_;
  }

  // Same basis with a possibly lower cutoff.
  ScaleBasis restricted(const Exponent& cutoff) const {
    ScaleBasis s = *this;
    s.cutoff_ = cutoff;
    s.items_.clear();
    for (const auto& e : items_) {
      if (compare(e.a, cutoff) <= 0) s.items_.push_back(e);
    }
    return s;
  }

 private:
  // Dominance order: a ascending, then b descending.
  bool precedes(const ScaleElement& x, const ScaleElement& y) const {
    int c = x.a == y.a ? 0 : compare(x.a, y.a);
    if (c != 0) return c < 0;
    return x.b > y.b;
  }

  void insert(const ScaleElement& e) {
    for (const auto& it : items_) {
      if (it.a != e.a) compare(it.a, e.a);
    }
    auto pos = std::find_if(items_.begin(), items_.end(), [&](const ScaleElement& x) { return precedes(e, x); });
    items_.insert(pos, e);
  }

  std::vector<ScaleElement> items_;
  Exponent cutoff_;
  cas::Valuation witness_;
};

// Coefficients of an expansion in a scale.
template <class T>
struct TailVector {
  ScaleBasis basis;
  std::vector<T> p;

  TailVector() = default;
  TailVector(ScaleBasis b, std::vector<T> v) : basis(std::move(b)), p(std::move(v)) {
    if (p.size() != basis.size()) throw ScaleError("tail vector length differs from the basis");
  }
  static TailVector zero(const ScaleBasis& b) { return TailVector(b, std::vector<T>(b.size(), from_long<T>(0))); }

  friend bool operator==(const TailVector& x, const TailVector& y) { return x.basis == y.basis && x.p == y.p; }
  friend bool operator!=(const TailVector& x, const TailVector& y) { return !(x == y); }

  std::size_t nonzero_count() const {
    return static_cast<std::size_t>(std::count_if(p.begin(), p.end(), [](const T& v) { return !is_zero(v); }));
  }
};

// One term of a series expansion before it is placed in a basis.
template <class T>
struct ExpansionTerm {
  ScaleElement element;
  T coef;
};

// Places terms in the basis; terms beyond the cutoff are dropped, duplicates are summed.
template <class T>
TailVector<T> embed(const std::vector<ExpansionTerm<T>>& terms, const ScaleBasis& basis) {
  TailVector<T> tv = TailVector<T>::zero(basis);
  for (const auto& t : terms) {
    if (basis.compare(t.element.a, basis.cutoff()) > 0) continue;
    auto idx = basis.find(t.element);
    if (!idx) throw ScaleError("expansion term " + t.element.str() + " is not in the scale");
    tv.p[*idx] = tv.p[*idx] + t.coef;
  }
  return tv;
}

// Rebases onto a larger basis containing every element of the source.
template <class T>
TailVector<T> rebase(const TailVector<T>& v, const ScaleBasis& target) {
  TailVector<T> out = TailVector<T>::zero(target);
  for (std::size_t i = 0; i < v.basis.size(); ++i) {
    auto idx = target.find(v.basis[i]);
    if (!idx) {
      if (target.compare(v.basis[i].a, target.cutoff()) > 0) continue;
      throw ScaleError("element " + v.basis[i].str() + " missing from target scale");
    }
    out.p[*idx] = out.p[*idx] + v.p[i];
  }
  return out;
}

// Derivative couplings that fall inside the cutoff but outside the basis.
inline std::vector<std::string> derivative_truncations(const ScaleBasis& basis) {
  std::vector<std::string> out;
  for (const auto& e : basis.items()) {
    ScaleElement up{e.a + Exponent(1), e.b};
    if (basis.compare(up.a, basis.cutoff()) <= 0 && !basis.find(up)) out.push_back("dropped " + up.str());
    if (e.b != 0) {
      ScaleElement low{e.a + Exponent(1), e.b - 1};
      if (basis.compare(low.a, basis.cutoff()) <= 0 && !basis.find(low)) out.push_back("dropped " + low.str());
    }
  }
  return out;
}

// D t^{-a}(log t)^b = -a t^{-a-1}(log t)^b + b t^{-a-1}(log t)^{b-1}; absent targets are dropped.
template <class T>
Matrix<T> derivative_matrix(const ScaleBasis& basis) {
  Matrix<T> d(basis.size(), basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const ScaleElement& e = basis[i];
    if (auto j = basis.find({e.a + Exponent(1), e.b})) d(*j, i) = d(*j, i) - FieldTraits<T>::from_exponent(e.a);
    if (e.b != 0) {
      if (auto j = basis.find({e.a + Exponent(1), e.b - 1})) d(*j, i) = d(*j, i) + from_rational<T>(e.b);
    }
  }
  return d;
}

// M_c f(t) = f(t/c): t^{-a}(log t)^b maps to c^a sum_k binom(b,k) (-log c)^k t^{-a}(log t)^{b-k}.
template <class T>
Matrix<T> scaling_matrix(const ScaleBasis& basis, const T& c) {
  if constexpr (!FieldTraits<T>::exact) {
    if (!(c > 0)) throw ScaleError("scaling needs c > 0");
  } else if constexpr (std::is_same_v<T, Rational>) {
    if (c <= 0) throw ScaleError("scaling needs c > 0");
  }
  Matrix<T> m(basis.size(), basis.size());
  std::optional<T> logc;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const ScaleElement& e = basis[j];
    T ca = FieldTraits<T>::pow(c, e.a);
    m(j, j) = ca;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if (i == j || basis[i].a != e.a) continue;
      Rational k = e.b - basis[i].b;
      if (k <= 0 || !cas::is_integer(k)) continue;
      if (!logc) logc = FieldTraits<T>::log(c);
      long kk = cas::to_long(k);
      Rational coef = cas::binomial(e.b, kk);
      if (kk % 2 != 0) coef = -coef;
      m(i, j) = from_rational<T>(coef) * ca * power(*logc, kk);
    }
  }
  return m;
}

// sum_j (-1)^j mu_j / j! D^j
template <class T>
Matrix<T> character_matrix(const LaplaceCharacter<T>& ch, const Matrix<T>& d) {
  Matrix<T> out(d.rows(), d.cols());
  Matrix<T> pw = Matrix<T>::identity(d.rows());
  for (int j = 0; j <= ch.order(); ++j) {
    if (!is_zero(ch[j])) out = out + pw.scaled(ch[j]);
    if (j < ch.order()) {
      pw = pw * d;
      if (pw.is_zero_matrix()) break;
    }
  }
  return out;
}

template <class T>
Matrix<T> character_matrix(const MomentVector<T>& mv, const Matrix<T>& d) {
  return character_matrix(character_from_moments(mv), d);
}

}  // namespace tailcalc

#endif  // TAILCALC_SCALE_HPP
