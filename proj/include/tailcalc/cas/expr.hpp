#ifndef TAILCALC_CAS_EXPR_HPP
#define TAILCALC_CAS_EXPR_HPP

// Exact coefficient field: rational functions over Q in a set of atoms.
// Atoms are symbols, rational radicals p^e (e affine, constant part in [0,1)),
// Gamma values (argument constant part in (0,1]), logarithms and weight power
// sums. Distinct canonical atoms are treated as algebraically independent.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tailcalc/cas/exponent.hpp"
#include "tailcalc/cas/rational.hpp"

namespace tailcalc::cas {

enum class AtomKind : std::uint8_t { symbol, radical, gamma, log_radical, log_symbol, power_sum };

// Which weights a power sum runs over: c_i > 0, or |c_i| with c_i < 0.
enum class Branch : std::uint8_t { positive, negative };

struct AtomKey {
  AtomKind kind = AtomKind::symbol;
  SymbolId sym = 0;
  Integer base = 0;
  Exponent arg;
  long logpow = 0;
  Branch branch = Branch::positive;
};

// Low three bits carry the kind.
using AtomId = std::uint32_t;

inline AtomKind kind_of(AtomId id) { return static_cast<AtomKind>(id & 7u); }

class Atoms {
 public:
  static AtomId intern(const AtomKey& key) {
    auto& s = state();
    {
      std::shared_lock lock(s.mutex);
      if (auto it = s.index.find(key); it != s.index.end()) return it->second;
    }
    std::unique_lock lock(s.mutex);
    if (auto it = s.index.find(key); it != s.index.end()) return it->second;
    auto id = static_cast<AtomId>((s.keys.size() << 3) | static_cast<std::uint32_t>(key.kind));
    s.keys.push_back(key);
    s.names.push_back(render(key));
    s.index.emplace(key, id);
    return id;
  }

  static const AtomKey& key(AtomId id) {
    auto& s = state();
    std::shared_lock lock(s.mutex);
    return s.keys.at(id >> 3);
  }

  static const std::string& name(AtomId id) {
    auto& s = state();
    std::shared_lock lock(s.mutex);
    return s.names.at(id >> 3);
  }

 private:
  struct KeyLess {
    bool operator()(const AtomKey& a, const AtomKey& b) const {
      if (a.kind != b.kind) return a.kind < b.kind;
      if (a.sym != b.sym) return a.sym < b.sym;
      if (int c = cmp(a.base, b.base); c != 0) return c < 0;
      if (int c = a.arg.lex_compare(b.arg); c != 0) return c < 0;
      if (a.logpow != b.logpow) return a.logpow < b.logpow;
      return a.branch < b.branch;
    }
  };

  static std::string render(const AtomKey& k) {
    switch (k.kind) {
      case AtomKind::symbol:
        return Symbols::name(k.sym);
      case AtomKind::radical:
        return k.base.get_str();
      case AtomKind::gamma:
        return "Gamma(" + k.arg.str() + ")";
      case AtomKind::log_radical:
        return "log(" + k.base.get_str() + ")";
      case AtomKind::log_symbol:
        return "log(" + Symbols::name(k.sym) + ")";
      case AtomKind::power_sum: {
        std::string tag = k.branch == Branch::positive ? "" : "neg";
        if (k.logpow == 0) return "C" + tag + "(" + k.arg.str() + ")";
        return "ClogC" + tag + "(" + k.arg.str() + "," + std::to_string(k.logpow) + ")";
      }
    }
    return "?";
  }

  struct State {
    std::shared_mutex mutex;
    std::deque<AtomKey> keys;
    std::deque<std::string> names;
    std::map<AtomKey, AtomId, KeyLess> index;
  };
  static State& state() {
    static State s;
    return s;
  }
};

// Sorted by atom id; exponents never zero.
using Monomial = std::vector<std::pair<AtomId, Exponent>>;

namespace detail {

inline int mono_compare(const Monomial& a, const Monomial& b) {
  auto x = a.begin();
  auto y = b.begin();
  while (x != a.end() || y != b.end()) {
    if (y == b.end() || (x != a.end() && x->first < y->first)) return x->second.lex_compare(Exponent());
    if (x == a.end() || y->first < x->first) return Exponent().lex_compare(y->second);
    if (int c = x->second.lex_compare(y->second); c != 0) return c;
    ++x;
    ++y;
  }
  return 0;
}

// Moves the integer part of a radical exponent into the coefficient.
inline void fold_radical(AtomId id, Exponent& e, Rational& coef) {
  if (kind_of(id) != AtomKind::radical) return;
  Integer fl = floor_of(e.constant());
  if (fl == 0) return;
  coef *= pow_int(Rational(Atoms::key(id).base), to_long(fl));
  e -= Exponent(Rational(fl));
}

inline Monomial mono_mul(const Monomial& a, const Monomial& b, Rational& coef) {
  Monomial out;
  out.reserve(a.size() + b.size());
  auto x = a.begin();
  auto y = b.begin();
  while (x != a.end() || y != b.end()) {
    if (y == b.end() || (x != a.end() && x->first < y->first)) {
      out.push_back(*x++);
    } else if (x == a.end() || y->first < x->first) {
      out.push_back(*y++);
    } else {
      Exponent e = x->second + y->second;
      fold_radical(x->first, e, coef);
      if (!e.is_zero()) out.emplace_back(x->first, std::move(e));
      ++x;
      ++y;
    }
  }
  return out;
}

inline Monomial mono_inverse(const Monomial& a, Rational& coef) {
  Monomial out;
  out.reserve(a.size());
  for (const auto& [id, e] : a) {
    Exponent ne = -e;
    fold_radical(id, ne, coef);
    if (!ne.is_zero()) out.emplace_back(id, std::move(ne));
  }
  return out;
}

inline std::string exponent_suffix(const Exponent& e) {
  if (e == Exponent(1)) return "";
  if (e.is_integer() && e.constant() > 0) return "^" + e.constant().get_str();
  return "^(" + e.str() + ")";
}

inline std::string mono_str(const Monomial& m) {
  std::vector<std::string> parts;
  parts.reserve(m.size());
  for (const auto& [id, e] : m) parts.push_back(Atoms::name(id) + exponent_suffix(e));
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += "*";
    out += p;
  }
  return out;
}

}  // namespace detail

struct Term {
  Monomial mono;
  Rational coef;
};

// Sparse Laurent polynomial; terms sorted ascending by monomial order, no zero coefficients.
class Poly {
 public:
  Poly() = default;
  explicit Poly(const Rational& c) {
    if (c != 0) terms_.push_back({{}, c});
  }
  static Poly atom(AtomId id, const Exponent& e) {
    Rational c = 1;
    Exponent ee = e;
    detail::fold_radical(id, ee, c);
    Monomial m;
    if (!ee.is_zero()) m.emplace_back(id, ee);
    Poly p;
    p.terms_.push_back({std::move(m), c});
    return p;
  }
  static Poly from_terms(std::vector<Term> ts) {
    Poly p;
    p.terms_ = std::move(ts);
    p.canonicalize();
    return p;
  }

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_monomial() const { return terms_.size() == 1; }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.empty()); }
  Rational constant_value() const { return terms_.empty() ? Rational(0) : terms_[0].coef; }
  bool is_one() const { return terms_.size() == 1 && terms_[0].mono.empty() && terms_[0].coef == 1; }

  friend bool operator==(const Poly& a, const Poly& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i) {
      if (a.terms_[i].coef != b.terms_[i].coef) return false;
      if (detail::mono_compare(a.terms_[i].mono, b.terms_[i].mono) != 0) return false;
    }
    return true;
  }

  Poly operator-() const {
    Poly p = *this;
    for (auto& t : p.terms_) t.coef = -t.coef;
    return p;
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    Poly out;
    out.terms_.reserve(a.terms_.size() + b.terms_.size());
    auto x = a.terms_.begin();
    auto y = b.terms_.begin();
    while (x != a.terms_.end() || y != b.terms_.end()) {
      int c = 0;
      if (x == a.terms_.end()) c = 1;
      else if (y == b.terms_.end()) c = -1;
      else c = detail::mono_compare(x->mono, y->mono);
      if (c < 0) {
        out.terms_.push_back(*x++);
      } else if (c > 0) {
        out.terms_.push_back(*y++);
      } else {
        Rational s = x->coef + y->coef;
        if (s != 0) out.terms_.push_back({x->mono, s});
        ++x;
        ++y;
      }
    }
    return out;
  }
  friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Term> ts;
    ts.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& x : a.terms_) {
      for (const auto& y : b.terms_) {
        Rational c = x.coef * y.coef;
        Monomial m = detail::mono_mul(x.mono, y.mono, c);
        ts.push_back({std::move(m), std::move(c)});
      }
    }
    return from_terms(std::move(ts));
  }

  Poly scaled(const Rational& k) const {
    if (k == 0) return {};
    Poly p = *this;
    for (auto& t : p.terms_) t.coef *= k;
    return p;
  }

  Poly times_term(const Term& t) const {
    std::vector<Term> ts;
    ts.reserve(terms_.size());
    for (const auto& x : terms_) {
      Rational c = x.coef * t.coef;
      Monomial m = detail::mono_mul(x.mono, t.mono, c);
      ts.push_back({std::move(m), std::move(c)});
    }
    return from_terms(std::move(ts));
  }

  static Term inverse(const Term& t) {
    Rational c = 1 / t.coef;
    Monomial m = detail::mono_inverse(t.mono, c);
    return {std::move(m), std::move(c)};
  }

  static Term term_mul(const Term& a, const Term& b) {
    Rational c = a.coef * b.coef;
    Monomial m = detail::mono_mul(a.mono, b.mono, c);
    return {std::move(m), std::move(c)};
  }

  // Exact quotient a / b when b divides a within the bounded search.
  static std::optional<Poly> try_divide(const Poly& a, const Poly& b) {
    if (b.is_zero()) return std::nullopt;
    if (a.is_zero()) return Poly();
    if (b.is_monomial()) return a.times_term(inverse(b.terms_[0]));
    const Term lb_inv = inverse(b.terms_.back());
    const Term low = term_mul(a.terms_.front(), inverse(b.terms_.front()));
    Poly q;
    Poly r = a;
    const std::size_t limit = 64 + 8 * (a.terms_.size() + b.terms_.size());
    for (std::size_t iter = 0; iter < limit; ++iter) {
      if (r.is_zero()) return q;
      Term t = term_mul(r.terms_.back(), lb_inv);
      if (detail::mono_compare(t.mono, low.mono) < 0) return std::nullopt;
      Monomial lead = r.terms_.back().mono;
      Poly tp;
      tp.terms_.push_back(t);
      q = q + tp;
      r = r - b.times_term(t);
      if (!r.is_zero() && detail::mono_compare(r.terms_.back().mono, lead) >= 0) return std::nullopt;
      if (r.terms_.size() > 4 * (a.terms_.size() + b.terms_.size()) + 64) return std::nullopt;
    }
    return std::nullopt;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::vector<std::pair<std::string, Rational>> parts;
    parts.reserve(terms_.size());
    for (const auto& t : terms_) parts.emplace_back(detail::mono_str(t.mono), t.coef);
    std::sort(parts.begin(), parts.end(), [](const auto& x, const auto& y) {
      if (x.first.size() != y.first.size()) return x.first.size() < y.first.size();
      return x.first < y.first;
    });
    std::string out;
    for (const auto& [m, c] : parts) {
      Rational ac = abs(c);
      if (out.empty()) {
        if (c < 0) out += "-";
      } else {
        out += c < 0 ? " - " : " + ";
      }
      if (m.empty()) {
        out += ac.get_str();
      } else {
        if (ac != 1) out += ac.get_str() + "*";
        out += m;
      }
    }
    return out;
  }

 private:
  void canonicalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& x, const Term& y) { return detail::mono_compare(x.mono, y.mono) < 0; });
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (auto& t : terms_) {
      if (!out.empty() && detail::mono_compare(out.back().mono, t.mono) == 0) {
        out.back().coef += t.coef;
      } else {
        out.push_back(std::move(t));
      }
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const Term& t) { return t.coef == 0; }), out.end());
    terms_ = std::move(out);
  }

  std::vector<Term> terms_;
};

// Numeric values for atoms; missing entries make evaluation fail.
struct EvalContext {
  std::map<std::string, double> symbols;
  std::function<std::optional<double>(double exponent, long logpow, Branch branch)> power_sum;
};

class Expr {
 public:
  Expr() : den_(Rational(1)) {}
  Expr(const Rational& c) : num_(c), den_(Rational(1)) {}  // NOLINT(google-explicit-constructor)
  Expr(long c) : Expr(Rational(c)) {}                       // NOLINT(google-explicit-constructor)
  Expr(int c) : Expr(Rational(c)) {}                        // NOLINT(google-explicit-constructor)

  static Expr symbol(std::string_view name) {
    AtomKey k;
    k.kind = AtomKind::symbol;
    k.sym = Symbols::intern(name);
    return from_atom(Atoms::intern(k), 1);
  }

  static Expr from_atom(AtomId id, const Exponent& e) {
    Expr x;
    x.num_ = Poly::atom(id, e);
    return x;
  }

  // sum of c^e (log c)^logpow over the weights of one sign.
  static Expr power_sum(const Exponent& e, long logpow = 0, Branch branch = Branch::positive) {
    AtomKey k;
    k.kind = AtomKind::power_sum;
    k.arg = e;
    k.logpow = logpow;
    k.branch = branch;
    return from_atom(Atoms::intern(k), 1);
  }

  static Expr from_exponent(const Exponent& e) {
    Expr r(e.constant());
    for (const auto& [id, c] : e.linear()) r += symbol(Symbols::name(id)) * Expr(c);
    return r;
  }

  const Poly& numerator() const { return num_; }
  const Poly& denominator() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_rational() const { return num_.is_constant() && den_.is_constant(); }
  std::optional<Rational> as_rational() const {
    if (!is_rational()) return std::nullopt;
    return num_.constant_value() / den_.constant_value();
  }

  // Affine form when the value is a rational combination of plain symbols.
  std::optional<Exponent> as_exponent() const {
    if (!den_.is_constant()) return std::nullopt;
    Rational d = den_.constant_value();
    Exponent out;
    for (const auto& t : num_.terms()) {
      Rational c = t.coef / d;
      if (t.mono.empty()) {
        out += Exponent(c);
        continue;
      }
      if (t.mono.size() != 1 || kind_of(t.mono[0].first) != AtomKind::symbol || t.mono[0].second != Exponent(1)) {
        return std::nullopt;
      }
      out += Exponent::symbol(Symbols::name(Atoms::key(t.mono[0].first).sym), c);
    }
    return out;
  }

  Expr operator-() const {
    Expr r = *this;
    r.num_ = -r.num_;
    return r;
  }

  Expr& operator+=(const Expr& o) { return *this = add(*this, o); }
  Expr& operator-=(const Expr& o) { return *this = add(*this, -o); }
  Expr& operator*=(const Expr& o) { return *this = mul(*this, o); }
  Expr& operator/=(const Expr& o) { return *this = mul(*this, o.inverse()); }

  friend Expr operator+(const Expr& a, const Expr& b) { return add(a, b); }
  friend Expr operator-(const Expr& a, const Expr& b) { return add(a, -b); }
  friend Expr operator*(const Expr& a, const Expr& b) { return mul(a, b); }
  friend Expr operator/(const Expr& a, const Expr& b) { return mul(a, b.inverse()); }

  friend bool operator==(const Expr& a, const Expr& b) {
    if (a.den_ == b.den_) return a.num_ == b.num_;
    return (a.num_ * b.den_ - b.num_ * a.den_).is_zero();
  }
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  Expr inverse() const {
    if (num_.is_zero()) throw DomainError("division by zero");
    Expr r;
    r.num_ = den_;
    r.den_ = num_;
    r.normalize();
    return r;
  }

  std::string str() const {
    if (den_.is_one()) return num_.str();
    auto wrap = [](const Poly& p) {
      std::string s = p.str();
      return p.terms().size() > 1 ? "(" + s + ")" : s;
    };
    return wrap(num_) + "/" + wrap(den_);
  }

  std::optional<double> evaluate(const EvalContext& ctx) const {
    auto n = eval_poly(num_, ctx);
    auto d = eval_poly(den_, ctx);
    if (!n || !d) return std::nullopt;
    return *n / *d;
  }

 private:
  static Expr add(const Expr& a, const Expr& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    Expr r;
    if (a.den_ == b.den_) {
      r.num_ = a.num_ + b.num_;
      r.den_ = a.den_;
    } else if (a.den_.is_one()) {
      r.num_ = a.num_ * b.den_ + b.num_;
      r.den_ = b.den_;
    } else if (b.den_.is_one()) {
      r.num_ = a.num_ + b.num_ * a.den_;
      r.den_ = a.den_;
    } else if (auto q = Poly::try_divide(a.den_, b.den_)) {
      r.num_ = a.num_ + b.num_ * *q;
      r.den_ = a.den_;
    } else if (auto q2 = Poly::try_divide(b.den_, a.den_)) {
      r.num_ = a.num_ * *q2 + b.num_;
      r.den_ = b.den_;
    } else {
      r.num_ = a.num_ * b.den_ + b.num_ * a.den_;
      r.den_ = a.den_ * b.den_;
    }
    r.normalize();
    return r;
  }

  static Expr mul(const Expr& a, const Expr& b) {
    if (a.is_zero() || b.is_zero()) return Expr();
    Poly an = a.num_, ad = a.den_, bn = b.num_, bd = b.den_;
    if (!bd.is_one()) {
      if (auto q = Poly::try_divide(an, bd)) {
        an = *q;
        bd = Poly(Rational(1));
      }
    }
    if (!ad.is_one()) {
      if (auto q = Poly::try_divide(bn, ad)) {
        bn = *q;
        ad = Poly(Rational(1));
      }
    }
    Expr r;
    r.num_ = an * bn;
    r.den_ = ad * bd;
    r.normalize();
    return r;
  }

  void normalize() {
    if (den_.is_zero()) throw DomainError("division by zero");
    if (num_.is_zero()) {
      den_ = Poly(Rational(1));
      return;
    }
    if (den_.is_monomial()) {
      num_ = num_.times_term(Poly::inverse(den_.terms()[0]));
      den_ = Poly(Rational(1));
      return;
    }
    if (auto q = Poly::try_divide(num_, den_)) {
      num_ = *q;
      den_ = Poly(Rational(1));
      return;
    }
    Rational lead = 1 / den_.terms().back().coef;
    num_ = num_.scaled(lead);
    den_ = den_.scaled(lead);
  }

  static std::optional<double> eval_atom(AtomId id, const Exponent& e, const EvalContext& ctx) {
    auto expo = eval_exponent(e, ctx);
    if (!expo) return std::nullopt;
    const AtomKey& k = Atoms::key(id);
    std::optional<double> base;
    switch (k.kind) {
      case AtomKind::symbol: {
        auto it = ctx.symbols.find(Symbols::name(k.sym));
        if (it != ctx.symbols.end()) base = it->second;
        break;
      }
      case AtomKind::radical:
        base = k.base.get_d();
        break;
      case AtomKind::gamma: {
        auto z = eval_exponent(k.arg, ctx);
        if (z) base = std::tgamma(*z);
        break;
      }
      case AtomKind::log_radical:
        base = std::log(k.base.get_d());
        break;
      case AtomKind::log_symbol: {
        auto it = ctx.symbols.find(Symbols::name(k.sym));
        if (it != ctx.symbols.end()) base = std::log(it->second);
        break;
      }
      case AtomKind::power_sum: {
        auto z = eval_exponent(k.arg, ctx);
        if (z && ctx.power_sum) base = ctx.power_sum(*z, k.logpow, k.branch);
        break;
      }
    }
    if (!base) return std::nullopt;
    return std::pow(*base, *expo);
  }

  static std::optional<double> eval_exponent(const Exponent& e, const EvalContext& ctx) {
    double v = e.constant().get_d();
    for (const auto& [id, c] : e.linear()) {
      auto it = ctx.symbols.find(Symbols::name(id));
      if (it == ctx.symbols.end()) return std::nullopt;
      v += c.get_d() * it->second;
    }
    return v;
  }

  static std::optional<double> eval_poly(const Poly& p, const EvalContext& ctx) {
    double s = 0;
    for (const auto& t : p.terms()) {
      double v = t.coef.get_d();
      for (const auto& [id, e] : t.mono) {
        auto a = eval_atom(id, e, ctx);
        if (!a) return std::nullopt;
        v *= *a;
      }
      s += v;
    }
    return s;
  }

  Poly num_;
  Poly den_;
};

// Integer powers of arbitrary values; other exponents need a monomial base with positive coefficient.
inline Expr pow(const Expr& base, const Exponent& e) {
  if (e.is_integer()) {
    long n = to_long(e.constant());
    Expr b = n < 0 ? base.inverse() : base;
    Expr r(1);
    for (long k = n < 0 ? -n : n; k > 0; k >>= 1) {
      if (k & 1) r *= b;
      if (k > 1) b *= b;
    }
    return r;
  }
  const Poly& num = base.numerator();
  const Poly& den = base.denominator();
  if (!den.is_constant() || !num.is_monomial()) {
    throw DomainError("non-integer power of a sum: (" + base.str() + ")^(" + e.str() + ")");
  }
  Rational c = num.terms()[0].coef / den.constant_value();
  if (c < 0) throw DomainError("non-integer power of a negative value");
  Expr r(1);
  for (const auto& [id, ae] : num.terms()[0].mono) {
    Exponent ne;
    if (ae.is_constant()) {
      ne = e * ae.constant();
    } else if (e.is_constant()) {
      ne = ae * e.constant();
    } else {
      throw DomainError("exponent is not affine: (" + ae.str() + ")*(" + e.str() + ")");
    }
    AtomKind k = kind_of(id);
    if (k != AtomKind::symbol && k != AtomKind::radical && !ne.is_integer()) {
      throw DomainError("non-integer power of " + Atoms::name(id));
    }
    r *= Expr::from_atom(id, ne);
  }
  if (c != 1) {
    if (e.is_constant()) {
      if (auto exact = exact_pow(c, e.constant())) {
        r *= Expr(*exact);
        return r;
      }
    }
    for (const Integer* part : {&c.get_num(), &c.get_den()}) {
      bool inverse = part == &c.get_den();
      for (const auto& [p, k] : factorize(*part)) {
        AtomKey key;
        key.kind = AtomKind::radical;
        key.base = p;
        Exponent pe = e * Rational(inverse ? -k : k);
        r *= Expr::from_atom(Atoms::intern(key), pe);
      }
    }
  }
  return r;
}

inline Expr pow(const Expr& base, long n) { return pow(base, Exponent(n)); }

// Logarithm of a monomial with positive coefficient.
inline Expr log(const Expr& x) {
  const Poly& num = x.numerator();
  const Poly& den = x.denominator();
  if (!den.is_constant() || !num.is_monomial()) throw DomainError("log of a sum: " + x.str());
  Rational c = num.terms()[0].coef / den.constant_value();
  if (c <= 0) throw DomainError("log of a non-positive value");
  Expr r;
  for (const Integer* part : {&c.get_num(), &c.get_den()}) {
    bool inverse = part == &c.get_den();
    for (const auto& [p, k] : factorize(*part)) {
      AtomKey key;
      key.kind = AtomKind::log_radical;
      key.base = p;
      r += Expr::from_atom(Atoms::intern(key), 1) * Expr(inverse ? -k : k);
    }
  }
  for (const auto& [id, e] : num.terms()[0].mono) {
    AtomKey key;
    if (kind_of(id) == AtomKind::symbol) {
      key.kind = AtomKind::log_symbol;
      key.sym = Atoms::key(id).sym;
    } else if (kind_of(id) == AtomKind::radical) {
      key.kind = AtomKind::log_radical;
      key.base = Atoms::key(id).base;
    } else {
      throw DomainError("log of " + Atoms::name(id));
    }
    r += Expr::from_atom(Atoms::intern(key), 1) * Expr::from_exponent(e);
  }
  return r;
}

// Gamma(z) with the argument shifted so its constant part lies in (0,1].
inline Expr gamma(const Exponent& z) {
  Integer shift = ceil_of(z.constant()) - 1;
  Exponent base = z - Exponent(Rational(shift));
  long n = to_long(shift);
  Expr factor(1);
  if (n > 0) {
    for (long k = 1; k <= n; ++k) factor *= Expr::from_exponent(z - Exponent(k));
  } else {
    for (long k = 0; k < -n; ++k) {
      Expr v = Expr::from_exponent(z + Exponent(k));
      if (v.is_zero()) throw DomainError("Gamma pole at " + z.str());
      factor /= v;
    }
  }
  if (base.is_constant() && base.constant() == 1) return factor;
  AtomKey key;
  key.kind = AtomKind::gamma;
  key.arg = base;
  return factor * Expr::from_atom(Atoms::intern(key), 1);
}

}  // namespace tailcalc::cas

#endif  // TAILCALC_CAS_EXPR_HPP
