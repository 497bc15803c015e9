#ifndef TAILCALC_WEIGHTS_HPP
#define TAILCALC_WEIGHTS_HPP

// Weight sequences c_i and their power sums C_p = sum c_i^p.

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "tailcalc/field.hpp"

namespace tailcalc {

using cas::Branch;

struct WeightError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Exact description of c_i. Entries that are not rational are taken to be positive.
struct WeightSequence {
  enum class Kind { explicit_list, ar1, maq, generic };

  Kind kind = Kind::explicit_list;
  std::vector<Expr> values;  // explicit list or MA coefficients
  Expr a;                    // AR(1) coefficient, c_i = a^i
  bool generic_negative = false;

  static WeightSequence explicit_list(std::vector<Expr> v) {
    WeightSequence w;
    w.kind = Kind::explicit_list;
    w.values = std::move(v);
    return w;
  }
  static WeightSequence ar1(Expr coef) {
    WeightSequence w;
    w.kind = Kind::ar1;
    w.a = std::move(coef);
    if (auto r = w.a.as_rational(); r && abs(*r) >= 1) throw WeightError("AR(1) weights need |a| < 1");
    return w;
  }
  static WeightSequence maq(std::vector<Expr> phi) {
    WeightSequence w;
    w.kind = Kind::maq;
    w.values = std::move(phi);
    return w;
  }
  // Unspecified weights; power sums stay as symbols.
  static WeightSequence generic(bool with_negative = false) {
    WeightSequence w;
    w.kind = Kind::generic;
    w.generic_negative = with_negative;
    return w;
  }

  bool is_finite() const { return kind == Kind::explicit_list || kind == Kind::maq; }

  // Sign of an exact entry; symbolic entries count as positive.
  static int sign_of(const Expr& v) {
    if (auto r = v.as_rational()) return sgn(*r);
    return 1;
  }

  bool has_negative() const {
    switch (kind) {
      case Kind::explicit_list:
      case Kind::maq:
        return std::any_of(values.begin(), values.end(), [](const Expr& v) { return sign_of(v) < 0; });
      case Kind::ar1:
        return sign_of(a) < 0;
      case Kind::generic:
        return generic_negative;
    }
    return false;
  }

  std::string describe() const {
    auto list = [](const std::vector<Expr>& v) {
      std::string s = "[";
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i].str();
      return s + "]";
    };
    switch (kind) {
      case Kind::explicit_list:
        return "explicit" + list(values);
      case Kind::maq:
        return "maq" + list(values);
      case Kind::ar1:
        return "ar1(" + a.str() + ")";
      case Kind::generic:
        return generic_negative ? "generic(signed)" : "generic(nonnegative)";
    }
    return "?";
  }
};

namespace detail {

// Numerators P_s with sum_{i>=0} i^s x^i = P_s(x) / (1-x)^{s+1}; P_{s+1} = x (P_s' (1-x) + (s+1) P_s).
inline std::vector<Rational> polylog_numerator(long s) {
  std::vector<Rational> p{Rational(1)};
  for (long k = 0; k < s; ++k) {
    std::vector<Rational> d(p.size() + 1, Rational(0));
    for (std::size_t i = 0; i < p.size(); ++i) {
      d[i] += p[i] * (k + 1);
      if (i >= 1) {
        d[i - 1] += p[i] * static_cast<long>(i);
        d[i] -= p[i] * static_cast<long>(i);
      }
    }
    std::vector<Rational> n(d.size() + 1, Rational(0));
    for (std::size_t i = 0; i < d.size(); ++i) n[i + 1] = d[i];
    while (n.size() > 1 && n.back() == 0) n.pop_back();
    p = std::move(n);
  }
  return p;
}

// sum_{i>=0, i = parity mod 2 or any} i^s x^i
template <class T>
T polylog_sum(const T& x, long s, int parity) {
  auto whole = [&](const T& y) -> T {
    std::vector<Rational> num = polylog_numerator(s);
    T n = from_long<T>(0);
    T pw = from_long<T>(1);
    for (const auto& c : num) {
      if (c != 0) n = n + from_rational<T>(c) * pw;
      pw = pw * y;
    }
    return n / power(T(from_long<T>(1) - y), s + 1);
  };
  if (parity < 0) return whole(x);
  T plus = whole(x);
  T minus = whole(T(-x));
  T half = from_rational<T>(Rational(1, 2));
  return parity == 0 ? T((plus + minus) * half) : T((plus - minus) * half);
}

}  // namespace detail

// Power sums over one sign class of the weights, in a coefficient field.
template <class T>
class PowerSums {
 public:
  explicit PowerSums(WeightSequence w) : w_(std::move(w)) {
    if (w_.kind == WeightSequence::Kind::generic && !std::is_same_v<T, Expr>) {
      throw WeightError("generic weights need the exact symbolic field");
    }
  }

  const WeightSequence& weights() const { return w_; }
  bool has_negative() const { return w_.has_negative(); }

  // sum over c_i of the branch of |c_i|^e (log |c_i|)^s.
  T sum(const Exponent& e, long s = 0, Branch branch = Branch::positive) const {
    switch (w_.kind) {
      case WeightSequence::Kind::generic:
        if constexpr (std::is_same_v<T, Expr>) {
          if (branch == Branch::negative && !w_.generic_negative) return from_long<T>(0);
          return Expr::power_sum(e, s, branch);
        } else {
          throw WeightError("generic weights need the exact symbolic field");
        }
      case WeightSequence::Kind::explicit_list:
      case WeightSequence::Kind::maq: {
        T total = from_long<T>(0);
        for (const auto& v : w_.values) {
          int sg = WeightSequence::sign_of(v);
          if (sg == 0 || (sg > 0) != (branch == Branch::positive)) continue;
          T mag = FieldTraits<T>::from_expr(sg > 0 ? v : Expr(-v));
          T term = FieldTraits<T>::pow(mag, e);
          if (s > 0) term = term * power(FieldTraits<T>::log(mag), s);
          total = total + term;
        }
        return total;
      }
      case WeightSequence::Kind::ar1: {
        int sg = WeightSequence::sign_of(w_.a);
        T mag = FieldTraits<T>::from_expr(sg >= 0 ? w_.a : Expr(-w_.a));
        if (sg == 0) {
          // c_0 = 1, all later weights vanish.
          return branch == Branch::positive && s == 0 ? from_long<T>(1) : from_long<T>(0);
        }
        T x = FieldTraits<T>::pow(mag, e);
        T lg = s > 0 ? power(FieldTraits<T>::log(mag), s) : from_long<T>(1);
        int parity = -1;
        if (sg < 0) parity = branch == Branch::positive ? 0 : 1;
        else if (branch == Branch::negative) return from_long<T>(0);
        return lg * detail::polylog_sum(x, s, parity);
      }
    }
    throw WeightError("unknown weight kind");
  }

  // Signed integer power sum C_k = sum c_i^k.
  T signed_sum(long k) const {
    T pos = sum(Exponent(k), 0, Branch::positive);
    if (!has_negative()) return pos;
    T neg = sum(Exponent(k), 0, Branch::negative);
    return k % 2 == 0 ? T(pos + neg) : T(pos - neg);
  }

  // |C|_p = sum |c_i|^p
  T abs_sum(const Exponent& p) const {
    T pos = sum(p, 0, Branch::positive);
    if (!has_negative()) return pos;
    return pos + sum(p, 0, Branch::negative);
  }

  // sum |c_i|^p sign(c_i)
  T sign_sum(const Exponent& p) const {
    T pos = sum(p, 0, Branch::positive);
    if (!has_negative()) return pos;
    return pos - sum(p, 0, Branch::negative);
  }

  // C_{p;q} = C_{p+q} - C_p C_q over the positive branch.
  T cross(const Exponent& p, const Exponent& q) const { return sum(p + q) - sum(p) * sum(q); }

 private:
  WeightSequence w_;
};

// Numeric access to |c_i|; AR(1) sequences are infinite.
inline std::vector<double> numeric_weights(const WeightSequence& w, std::size_t count_if_infinite) {
  auto val = [](const Expr& e) { return FieldTraits<double>::from_expr(e); };
  std::vector<double> out;
  switch (w.kind) {
    case WeightSequence::Kind::explicit_list:
    case WeightSequence::Kind::maq:
      for (const auto& v : w.values) out.push_back(val(v));
      break;
    case WeightSequence::Kind::ar1: {
      double a = val(w.a);
      double c = 1;
      for (std::size_t i = 0; i < count_if_infinite; ++i, c *= a) out.push_back(c);
      break;
    }
    case WeightSequence::Kind::generic:
      throw WeightError("generic weights have no numeric values");
  }
  return out;
}

// max(|c|_r, 2^{alpha/(alpha+omega)} |c|_inf) with r = gamma * min(alpha/(alpha+omega), 1/2).
inline double norm_N(const WeightSequence& w, double alpha, double gamma, double omega) {
  if (!(alpha > 0) || !(omega > 0) || !(gamma > 0)) throw WeightError("norm_N needs positive alpha, gamma, omega");
  const double r = gamma * std::min(alpha / (alpha + omega), 0.5);
  double lp = 0;
  double sup = 0;
  if (w.kind == WeightSequence::Kind::ar1) {
    double a = std::fabs(FieldTraits<double>::from_expr(w.a));
    if (a >= 1) throw WeightError("divergent weight sequence");
    lp = std::pow(1.0 / (1.0 - std::pow(a, r)), 1.0 / r);
    sup = 1.0;
  } else {
    double s = 0;
    for (double c : numeric_weights(w, 0)) {
      if (c == 0) continue;
      s += std::pow(std::fabs(c), r);
      sup = std::max(sup, std::fabs(c));
    }
    lp = std::pow(s, 1.0 / r);
  }
  return std::max(lp, std::pow(2.0, alpha / (alpha + omega)) * sup);
}

}  // namespace tailcalc

#endif  // TAILCALC_WEIGHTS_HPP
