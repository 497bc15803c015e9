#ifndef TAILCALC_CAS_EXPONENT_HPP
#define TAILCALC_CAS_EXPONENT_HPP

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tailcalc/cas/rational.hpp"

namespace tailcalc::cas {

using SymbolId = std::uint32_t;

// Process-wide symbol interning; ids are stable for the lifetime of the process.
class Symbols {
 public:
  static SymbolId intern(std::string_view name) {
    auto& s = state();
    {
      std::shared_lock lock(s.mutex);
      if (auto it = s.index.find(std::string(name)); it != s.index.end()) return it->second;
    }
    std::unique_lock lock(s.mutex);
    if (auto it = s.index.find(std::string(name)); it != s.index.end()) return it->second;
    auto id = static_cast<SymbolId>(s.names.size());
    s.names.emplace_back(name);
    s.index.emplace(std::string(name), id);
    return id;
  }

  static const std::string& name(SymbolId id) {
    auto& s = state();
    std::shared_lock lock(s.mutex);
    return s.names.at(id);
  }

 private:
  struct State {
    std::shared_mutex mutex;
    std::deque<std::string> names;
    std::unordered_map<std::string, SymbolId> index;
  };
  static State& state() {
    static State s;
    return s;
  }
};

// Values assigned to symbols, keyed by name.
using Valuation = std::map<std::string, Rational>;

// Affine form r0 + sum r_k * s_k over symbols s_k with rational coefficients.
class Exponent {
 public:
  using Linear = std::vector<std::pair<SymbolId, Rational>>;

  Exponent() = default;
  Exponent(Rational c) : constant_(std::move(c)) {}  // NOLINT(google-explicit-constructor)
  Exponent(long c) : constant_(c) {}                 // NOLINT(google-explicit-constructor)
  Exponent(int c) : constant_(c) {}                  // NOLINT(google-explicit-constructor)

  static Exponent symbol(std::string_view name, const Rational& coef = 1) {
    Exponent e;
    if (coef != 0) e.linear_.emplace_back(Symbols::intern(name), coef);
    return e;
  }

  const Rational& constant() const { return constant_; }
  const Linear& linear() const { return linear_; }
  bool is_constant() const { return linear_.empty(); }
  bool is_zero() const { return linear_.empty() && constant_ == 0; }
  bool is_integer() const { return is_constant() && cas::is_integer(constant_); }

  Exponent& operator+=(const Exponent& o) {
    constant_ += o.constant_;
    Linear out;
    out.reserve(linear_.size() + o.linear_.size());
    auto a = linear_.begin();
    auto b = o.linear_.begin();
    while (a != linear_.end() || b != o.linear_.end()) {
      if (b == o.linear_.end() || (a != linear_.end() && a->first < b->first)) {
        out.push_back(*a++);
      } else if (a == linear_.end() || b->first < a->first) {
        out.push_back(*b++);
      } else {
        Rational c = a->second + b->second;
        if (c != 0) out.emplace_back(a->first, c);
        ++a;
        ++b;
      }
    }
    linear_ = std::move(out);
    return *this;
  }
  Exponent& operator-=(const Exponent& o) { return *this += -o; }
  Exponent& operator*=(const Rational& k) {
    if (k == 0) {
      *this = Exponent();
      return *this;
    }
    constant_ *= k;
    for (auto& [id, c] : linear_) c *= k;
    return *this;
  }

  friend Exponent operator+(Exponent a, const Exponent& b) { return a += b; }
  friend Exponent operator-(Exponent a, const Exponent& b) { return a -= b; }
  friend Exponent operator*(Exponent a, const Rational& k) { return a *= k; }
  friend Exponent operator*(const Rational& k, Exponent a) { return a *= k; }
  Exponent operator-() const {
    Exponent e = *this;
    e *= Rational(-1);
    return e;
  }

  friend bool operator==(const Exponent& a, const Exponent& b) {
    return a.constant_ == b.constant_ && a.linear_ == b.linear_;
  }
  friend bool operator!=(const Exponent& a, const Exponent& b) { return !(a == b); }

  // Lexicographic order on (constant, coefficients by symbol id); compatible with addition.
  int lex_compare(const Exponent& o) const {
    if (int c = cmp(constant_, o.constant_); c != 0) return c;
    auto a = linear_.begin();
    auto b = o.linear_.begin();
    while (a != linear_.end() || b != o.linear_.end()) {
      if (b == o.linear_.end() || (a != linear_.end() && a->first < b->first)) return sgn(a->second);
      if (a == linear_.end() || b->first < a->first) return -sgn(b->second);
      if (int c = cmp(a->second, b->second); c != 0) return c;
      ++a;
      ++b;
    }
    return 0;
  }
  friend bool operator<(const Exponent& a, const Exponent& b) { return a.lex_compare(b) < 0; }

  bool evaluable(const Valuation& v) const {
    return std::all_of(linear_.begin(), linear_.end(),
                       [&](const auto& t) { return v.count(Symbols::name(t.first)) != 0; });
  }

  Rational evaluate(const Valuation& v) const {
    Rational r = constant_;
    for (const auto& [id, c] : linear_) {
      auto it = v.find(Symbols::name(id));
      if (it == v.end()) throw DomainError("no value for symbol '" + Symbols::name(id) + "'");
      r += c * it->second;
    }
    return r;
  }

  // Substitutes symbols by affine forms.
  Exponent substitute(const std::map<std::string, Exponent>& s) const {
    Exponent r(constant_);
    for (const auto& [id, c] : linear_) {
      auto it = s.find(Symbols::name(id));
      if (it == s.end()) {
        r += Exponent::symbol(Symbols::name(id), c);
      } else {
        r += it->second * c;
      }
    }
    return r;
  }

  std::string str() const {
    std::vector<std::pair<std::string, Rational>> terms;
    for (const auto& [id, c] : linear_) terms.emplace_back(Symbols::name(id), c);
    std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::string out;
    for (const auto& [name, c] : terms) {
      if (!out.empty()) out += c < 0 ? "-" : "+";
      else if (c < 0) out += "-";
      Rational ac = abs(c);
      if (ac != 1) out += ac.get_str() + "*";
      out += name;
    }
    if (out.empty()) return constant_.get_str();
    if (constant_ > 0) out += "+" + constant_.get_str();
    if (constant_ < 0) out += "-" + Rational(-constant_).get_str();
    return out;
  }

  std::size_t hash() const {
    std::size_t h = std::hash<std::string>()(constant_.get_str());
    for (const auto& [id, c] : linear_) h = h * 1000003u ^ (id * 7919u + std::hash<std::string>()(c.get_str()));
    return h;
  }

 private:
  static int sgn(const Rational& r) { return r > 0 ? 1 : (r < 0 ? -1 : 0); }

  Rational constant_{0};
  Linear linear_;
};

}  // namespace tailcalc::cas

#endif  // TAILCALC_CAS_EXPONENT_HPP
