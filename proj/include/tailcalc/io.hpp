#ifndef TAILCALC_IO_HPP
#define TAILCALC_IO_HPP

// JSON problem descriptions and report rendering.

#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tailcalc/engine.hpp"

namespace tailcalc::io {

using json = nlohmann::json;
using cas::ParseError;

enum class Mode { exact, floating };

// Numeric symbol values: witness for ordering in exact mode, substitution in float mode.
struct Context {
  Mode mode = Mode::exact;
  cas::Valuation symbols;
};

namespace detail {

// Infix expressions over rationals and symbols: + - * / ^, parentheses, gamma(), log(), sqrt().
class ExprParser {
 public:
  ExprParser(std::string_view text, const Context& ctx) : s_(text), ctx_(ctx) {}

  Expr parse() {
    Expr e = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  std::string_view s_;
  const Context& ctx_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("expression '" + std::string(s_) + "': " + what);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr sum() {
    Expr e = product();
    for (;;) {
      if (eat('+')) e = e + product();
      else if (eat('-')) e = e - product();
      else return e;
    }
  }
  Expr product() {
    Expr e = unary();
    for (;;) {
      if (eat('*')) {
        e = e * unary();
      } else if (eat('/')) {
        Expr d = unary();
        if (d.is_zero()) fail("division by zero");
        e = e / d;
      } else {
        return e;
      }
    }
  }
  Expr unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }
  Expr power() {
    Expr base = atom();
    if (!eat('^')) return base;
    Expr ex = unary();
    auto e = ex.as_exponent();
    if (!e) fail("exponent must be affine in symbols: " + ex.str());
    return cas::pow(base, *e);
  }
  Expr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = sum();
      if (!eat(')')) fail("missing ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string name(s_.substr(start, pos_ - start));
      if (eat('(')) {
        Expr arg = sum();
        if (name == "C") return power_sum(arg);
        if (!eat(')')) fail("missing ')'");
        return call(name, arg);
      }
      if (ctx_.mode == Mode::floating) {
        auto it = ctx_.symbols.find(name);
        if (it == ctx_.symbols.end()) fail("symbol '" + name + "' needs a value in float mode");
        return Expr(it->second);
      }
      return Expr::symbol(name);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }
  Expr number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    Rational v = cas::parse_rational(s_.substr(start, pos_ - start).empty() ? "0" : s_.substr(start, pos_ - start));
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      Rational scale(1);
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        scale /= 10;
        v += scale * (s_[pos_] - '0');
        ++pos_;
      }
    }
    return Expr(v);
  }
  // C(p) = sum c_i^p and C(p;q) = C(p+q) - C(p) C(q), over symbolic weights.
  Expr power_sum(const Expr& first) {
    auto exponent = [&](const Expr& e) {
      auto x = e.as_exponent();
      if (!x) fail("power-sum index must be affine");
      return *x;
    };
    Exponent p = exponent(first);
    if (eat(';') || eat(',')) {
      Exponent q = exponent(sum());
      if (!eat(')')) fail("missing ')'");
      return Expr::power_sum(p + q, 0, Branch::positive) -
             Expr::power_sum(p, 0, Branch::positive) * Expr::power_sum(q, 0, Branch::positive);
    }
    if (!eat(')')) fail("missing ')'");
    return Expr::power_sum(p, 0, Branch::positive);
  }

  Expr call(const std::string& f, const Expr& arg) {
    if (f == "log") return cas::log(arg);
    if (f == "sqrt") return cas::pow(arg, Exponent(Rational(1, 2)));
    if (f == "gamma") {
      auto e = arg.as_exponent();
      if (!e) fail("gamma needs an affine argument");
      return cas::gamma(*e);
    }
    fail("unknown function '" + f + "'");
  }
};

}  // namespace detail

inline Expr parse_expr(std::string_view text, const Context& ctx) { return detail::ExprParser(text, ctx).parse(); }

// Strings are parsed; integers are exact; non-integer JSON numbers are accepted in float mode only.
inline Expr value_of(const json& v, const Context& ctx, const std::string& what) {
  if (v.is_string()) return parse_expr(v.get<std::string>(), ctx);
  if (v.is_number_integer()) return Expr(Rational(v.get<long>()));
  if (v.is_number_float()) {
    if (ctx.mode == Mode::exact) throw ParseError(what + ": non-integer numbers must be quoted strings in exact mode");
    return Expr(Rational(v.get<double>()));
  }
  throw ParseError(what + ": expected a number or expression string");
}

inline const json& require(const json& obj, const std::string& key) {
  if (!obj.is_object() || !obj.contains(key)) throw ParseError("missing field '" + key + "'");
  return obj.at(key);
}

inline int int_field(const json& obj, const std::string& key, std::optional<int> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ParseError("missing field '" + key + "'");
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long>() < 0) throw ParseError("'" + key + "' must be a non-negative integer");
  return v.get<int>();
}

inline Exponent exponent_of(const json& v, const Context& ctx, const std::string& what) {
  Expr e = value_of(v, ctx, what);
  auto x = e.as_exponent();
  if (!x) throw ParseError(what + " must be affine in symbols");
  return *x;
}

inline Context parse_context(const json& in, Mode mode) {
  Context ctx;
  ctx.mode = mode;
  if (in.contains("symbols")) {
    for (const auto& [name, v] : in.at("symbols").items()) {
      Context plain;
      Expr e = value_of(v, plain, "symbols." + name);
      auto r = e.as_rational();
      if (!r) throw ParseError("symbols." + name + " must be rational");
      ctx.symbols[name] = *r;
    }
  }
  return ctx;
}

inline std::vector<Expr> expr_list(const json& v, const Context& ctx, const std::string& what) {
  if (!v.is_array()) throw ParseError(what + " must be an array");
  std::vector<Expr> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(value_of(v[i], ctx, what + "[" + std::to_string(i) + "]"));
  return out;
}

inline WeightSequence parse_weights(const json& v, const Context& ctx) {
  const std::string kind = require(v, "kind").get<std::string>();
  if (kind == "explicit") return WeightSequence::explicit_list(expr_list(require(v, "values"), ctx, "weights.values"));
  if (kind == "maq") return WeightSequence::maq(expr_list(require(v, "phi"), ctx, "weights.phi"));
  if (kind == "ar1") return WeightSequence::ar1(value_of(require(v, "a"), ctx, "weights.a"));
  if (kind == "generic") {
    if (ctx.mode == Mode::floating) throw ParseError("generic weights need exact mode");
    return WeightSequence::generic(v.value("signed", false));
  }
  throw ParseError("unknown weight kind '" + kind + "'");
}

inline std::vector<ExpansionTerm<Expr>> parse_terms(const json& v, const Context& ctx, const std::string& what) {
  if (!v.is_array()) throw ParseError(what + " must be an array");
  std::vector<ExpansionTerm<Expr>> out;
  for (const auto& t : v) {
    ScaleElement el{exponent_of(require(t, "a"), ctx, what + ".a"), Rational(0)};
    if (t.contains("b")) {
      auto r = value_of(t.at("b"), ctx, what + ".b").as_rational();
      if (!r) throw ParseError(what + ".b must be rational");
      el.b = *r;
    }
    out.push_back({el, value_of(require(t, "coef"), ctx, what + ".coef")});
  }
  return out;
}

inline Support parse_support(const std::string& s) {
  if (s == "nonnegative") return Support::nonnegative;
  if (s == "symmetric") return Support::symmetric;
  if (s == "two_sided") return Support::two_sided;
  throw ParseError("unknown support '" + s + "'");
}

inline DistributionSpec parse_distribution(const json& v, const Context& ctx) {
  static const std::map<std::string, std::pair<Family, std::vector<std::string>>> families{
      {"burr", {Family::burr, {"beta", "tau", "gamma"}}},
      {"hall_weissman", {Family::hall_weissman, {"a", "b", "alpha", "beta"}}},
      {"frechet", {Family::frechet, {"alpha"}}},
      {"pareto", {Family::pareto, {"alpha"}}},
      {"student", {Family::student, {"alpha"}}},
      {"log_gamma", {Family::log_gamma, {"lambda", "alpha"}}},
      {"exponential", {Family::exponential, {"theta"}}},
      {"point_mass", {Family::point_mass, {"at"}}},
      {"power_series", {Family::power_series, {}}},
  };
  const std::string name = require(v, "family").get<std::string>();
  auto it = families.find(name);
  if (it == families.end()) throw ParseError("unknown family '" + name + "'");
  DistributionSpec d;
  d.family = it->second.first;
  d.support = d.family == Family::student ? Support::symmetric : Support::nonnegative;
  const json params = v.value("params", json::object());
  for (const auto& p : it->second.second) d.params[p] = value_of(require(params, p), ctx, name + "." + p);
  if (v.contains("support")) d.support = parse_support(v.at("support").get<std::string>());
  if (v.contains("upper")) d.upper_terms = parse_terms(v.at("upper"), ctx, name + ".upper");
  if (v.contains("lower")) d.lower_terms = parse_terms(v.at("lower"), ctx, name + ".lower");
  if (v.contains("moments")) d.moments = expr_list(v.at("moments"), ctx, name + ".moments");
  if (v.contains("tail_index")) d.tail_index_override = exponent_of(v.at("tail_index"), ctx, name + ".tail_index");
  if (v.contains("log_terms")) d.log_terms = int_field(v, "log_terms");
  if (d.family == Family::power_series && d.upper_terms.empty() && !d.tail_index_override && !d.moments) {
    throw ParseError("power_series needs upper terms, a tail index or moments");
  }
  return d;
}

// Float rendering of exact values through the symbol values and numeric power sums.
inline std::optional<double> to_float(const Expr& e, const Context& ctx, const WeightSequence* w) {
  cas::EvalContext ec;
  for (const auto& [k, v] : ctx.symbols) ec.symbols[k] = v.get_d();
  if (w && w->kind != WeightSequence::Kind::generic) {
    std::vector<double> c = numeric_weights(*w, 4000);
    ec.power_sum = [c](double p, long s, Branch br) -> std::optional<double> {
      double total = 0;
      for (double x : c) {
        if (x == 0 || (x > 0) != (br == Branch::positive)) continue;
        double mag = std::fabs(x);
        total += std::pow(mag, p) * std::pow(std::log(mag), static_cast<double>(s));
      }
      return total;
    };
  }
  auto v = e.evaluate(ec);
  if (v && !std::isfinite(*v)) return std::nullopt;
  return v;
}

template <class T>
json render(const T& x, const Context& ctx, const WeightSequence* w = nullptr) {
  json j;
  if constexpr (std::is_same_v<T, double>) {
    j["exact"] = nullptr;
    j["float"] = std::isfinite(x) ? json(x) : json(nullptr);
  } else if constexpr (std::is_same_v<T, Rational>) {
    j["exact"] = x.get_str();
    j["float"] = x.get_d();
  } else {
    j["exact"] = x.str();
    auto f = to_float(x, ctx, w);
    j["float"] = f ? json(*f) : json(nullptr);
  }
  return j;
}

template <class T>
json render_list(const std::vector<T>& xs, const Context& ctx, const WeightSequence* w = nullptr) {
  json a = json::array();
  for (const auto& x : xs) a.push_back(render(x, ctx, w));
  return a;
}

inline json render_basis(const ScaleBasis& b) {
  json a = json::array();
  for (const auto& e : b.items()) a.push_back({{"a", e.a.str()}, {"b", e.b.get_str()}, {"term", e.str()}});
  return a;
}

template <class T>
json render_tail(const TailVector<T>& tv, const Context& ctx, const WeightSequence* w = nullptr) {
  return {{"basis", render_basis(tv.basis)}, {"coefficients", render_list(tv.p, ctx, w)}};
}

}  // namespace tailcalc::io

#endif  // TAILCALC_IO_HPP
