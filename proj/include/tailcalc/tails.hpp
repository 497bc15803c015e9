#ifndef TAILCALC_TAILS_HPP
#define TAILCALC_TAILS_HPP

// Distribution families: tail expansions, moments and survival functions.

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tailcalc/field.hpp"
#include "tailcalc/laplace.hpp"
#include "tailcalc/scale.hpp"

namespace tailcalc {

struct TailError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class Family { burr, hall_weissman, frechet, pareto, student, log_gamma, exponential, power_series, point_mass };

// Where the law lives; two-sided laws carry the expansion of the lower tail P(X < -t).
enum class Support { nonnegative, symmetric, two_sided };

inline std::string family_name(Family f) {
  switch (f) {
    case Family::burr: return "burr";
    case Family::hall_weissman: return "hall_weissman";
    case Family::frechet: return "frechet";
    case Family::pareto: return "pareto";
    case Family::student: return "student";
    case Family::log_gamma: return "log_gamma";
    case Family::exponential: return "exponential";
    case Family::power_series: return "power_series";
    case Family::point_mass: return "point_mass";
  }
  return "?";
}

struct DistributionSpec {
  Family family = Family::pareto;
  std::map<std::string, Expr> params;
  Support support = Support::nonnegative;
  std::vector<ExpansionTerm<Expr>> upper_terms;  // power_series only
  std::vector<ExpansionTerm<Expr>> lower_terms;  // two-sided laws
  std::optional<std::vector<Expr>> moments;      // overrides closed forms, mu_0 first
  std::optional<Exponent> tail_index_override;   // power_series without terms
  long log_terms = 0;                            // log-gamma terms; 0 = all when lambda is an integer

  const Expr& param(const std::string& name) const {
    auto it = params.find(name);
    if (it == params.end()) throw TailError(family_name(family) + ": missing parameter '" + name + "'");
    return it->second;
  }

  // Affine view of a parameter that appears in an exponent.
  Exponent exponent_param(const std::string& name) const {
    auto e = param(name).as_exponent();
    if (!e) throw TailError(family_name(family) + ": parameter '" + name + "' must be affine in symbols");
    return *e;
  }

  Rational rational_param(const std::string& name) const {
    auto r = param(name).as_rational();
    if (!r) throw TailError(family_name(family) + ": parameter '" + name + "' must be rational");
    return *r;
  }

  bool heavy_tailed() const { return family != Family::exponential && family != Family::point_mass; }

  // alpha with Fbar regularly varying of index -alpha.
  Exponent tail_index() const {
    switch (family) {
      case Family::burr:
        return Exponent(rational_param("tau") * rational_param("gamma"));
      case Family::hall_weissman:
      case Family::frechet:
      case Family::pareto:
      case Family::student:
      case Family::log_gamma:
        return exponent_param("alpha");
      case Family::power_series:
        if (tail_index_override) return *tail_index_override;
        if (upper_terms.empty()) throw TailError("power_series: no terms and no tail index");
        return upper_terms.front().element.a;
      case Family::exponential:
      case Family::point_mass:
        throw TailError(family_name(family) + " is not heavy tailed");
    }
    throw TailError("unknown family");
  }

  static DistributionSpec make(Family f, std::map<std::string, Expr> p, Support s = Support::nonnegative) {
    DistributionSpec d;
    d.family = f;
    d.params = std::move(p);
    d.support = s;
    return d;
  }
  static DistributionSpec burr(Expr beta, Expr tau, Expr gamma) {
    return make(Family::burr, {{"beta", std::move(beta)}, {"tau", std::move(tau)}, {"gamma", std::move(gamma)}});
  }
  static DistributionSpec hall_weissman(Expr a, Expr b, Expr alpha, Expr beta) {
    return make(Family::hall_weissman,
                {{"a", std::move(a)}, {"b", std::move(b)}, {"alpha", std::move(alpha)}, {"beta", std::move(beta)}});
  }
  static DistributionSpec frechet(Expr alpha) { return make(Family::frechet, {{"alpha", std::move(alpha)}}); }
  static DistributionSpec pareto(Expr alpha) { return make(Family::pareto, {{"alpha", std::move(alpha)}}); }
  static DistributionSpec student(Expr alpha) {
    return make(Family::student, {{"alpha", std::move(alpha)}}, Support::symmetric);
  }
  static DistributionSpec log_gamma(Expr lambda, Expr alpha) {
    return make(Family::log_gamma, {{"lambda", std::move(lambda)}, {"alpha", std::move(alpha)}});
  }
  static DistributionSpec exponential(Expr theta) { return make(Family::exponential, {{"theta", std::move(theta)}}); }
  static DistributionSpec point_mass(Expr at) { return make(Family::point_mass, {{"at", std::move(at)}}); }
  static DistributionSpec power_series(std::vector<ExpansionTerm<Expr>> upper, std::vector<Expr> mu,
                                       Support s = Support::nonnegative,
                                       std::vector<ExpansionTerm<Expr>> lower = {}) {
    DistributionSpec d;
    d.family = Family::power_series;
    d.upper_terms = std::move(upper);
    d.lower_terms = std::move(lower);
    d.moments = std::move(mu);
    d.support = s;
    return d;
  }
};

namespace detail {

inline ScaleElement power_element(const Exponent& a) { return ScaleElement{a, 0}; }

// Rising factorial x(x+1)...(x+k-1).
inline Expr rising(const Expr& x, long k) {
  Expr r(1);
  for (long i = 0; i < k; ++i) r *= x + Expr(i);
  return r;
}

}  // namespace detail

// Terms of the upper-tail series in their natural order; generation stops after max_terms
// or once the exponent passes the cutoff (ordered through the witness).
inline std::vector<ExpansionTerm<Expr>> tail_series(const DistributionSpec& spec, std::size_t max_terms,
                                                    const std::optional<Exponent>& cutoff = std::nullopt,
                                                    const cas::Valuation& witness = {}) {
  auto beyond = [&](const Exponent& a) {
    if (!cutoff) return false;
    Exponent d = a - *cutoff;
    Rational v = d.is_constant() ? d.constant() : d.evaluate(witness);
    return v > 0;
  };
  std::vector<ExpansionTerm<Expr>> out;
  auto push = [&](const ScaleElement& e, const Expr& c) {
    if (!c.is_zero()) out.push_back({e, c});
  };
  switch (spec.family) {
    case Family::burr: {
      const Expr& beta = spec.param("beta");
      Rational tau = spec.rational_param("tau");
      Rational gam = spec.rational_param("gamma");
      // beta^{gamma+k} (-1)^k (gamma)_k / k! t^{-tau(gamma+k)}
      for (long k = 0; out.size() < max_terms; ++k) {
        Exponent a(tau * (gam + k));
        if (beyond(a)) break;
        Expr c = cas::pow(beta, Exponent(gam + k)) * detail::rising(Expr(gam), k) / Expr(cas::factorial(k));
        if (k % 2 != 0) c = -c;
        push(detail::power_element(a), c);
      }
      break;
    }
    case Family::hall_weissman: {
      const Expr& a = spec.param("a");
      const Expr& b = spec.param("b");
      Exponent al = spec.exponent_param("alpha");
      Exponent be = spec.exponent_param("beta");
      Expr total = a + b;
      std::vector<ExpansionTerm<Expr>> two{{detail::power_element(al), a / total}, {detail::power_element(be), b / total}};
      if (al == be) two = {{detail::power_element(al), Expr(1)}};
      for (auto& t : two) {
        if (out.size() < max_terms && !beyond(t.element.a)) push(t.element, t.coef);
      }
      break;
    }
    case Family::frechet: {
      Exponent al = spec.exponent_param("alpha");
      for (long k = 1; out.size() < max_terms; ++k) {
        Exponent a = al * Rational(k);
        if (beyond(a)) break;
        Expr c = Expr(1) / Expr(cas::factorial(k));
        if (k % 2 == 0) c = -c;
        push(detail::power_element(a), c);
      }
      break;
    }
    case Family::pareto: {
      Exponent al = spec.exponent_param("alpha");
      Expr ae = Expr::from_exponent(al);
      // (1+t)^{-alpha} = sum_k binom(-alpha,k) t^{-alpha-k}
      for (long k = 0; out.size() < max_terms; ++k) {
        Exponent a = al + Exponent(k);
        if (beyond(a)) break;
        Expr c = detail::rising(ae, k) / Expr(cas::factorial(k));
        if (k % 2 != 0) c = -c;
        push(detail::power_element(a), c);
      }
      break;
    }
    case Family::student: {
      Exponent al = spec.exponent_param("alpha");
      Expr ae = Expr::from_exponent(al);
      // K alpha^{(alpha+1)/2} sum_j binom(-(alpha+1)/2, j) alpha^j t^{-alpha-2j} / (alpha+2j)
      Exponent half_up = (al + Exponent(1)) * Rational(1, 2);
      Expr k_alpha = cas::gamma(half_up) /
                     (cas::gamma(Exponent(Rational(1, 2))) * cas::pow(ae, Exponent(Rational(1, 2))) *
                      cas::gamma(al * Rational(1, 2)));
      Expr lead = k_alpha * cas::pow(ae, half_up);
      Expr nu = Expr::from_exponent(half_up);
      for (long j = 0; out.size() < max_terms; ++j) {
        Exponent a = al + Exponent(2 * j);
        if (beyond(a)) break;
        Expr c = lead * detail::rising(nu, j) / Expr(cas::factorial(j)) * cas::pow(ae, j) / (ae + Expr(2 * j));
        if (j % 2 != 0) c = -c;
        push(detail::power_element(a), c);
      }
      break;
    }
    case Family::log_gamma: {
      Exponent al = spec.exponent_param("alpha");
      Expr ae = Expr::from_exponent(al);
      Rational lam = spec.rational_param("lambda");
      long n = spec.log_terms;
      if (n <= 0) {
        if (!cas::is_integer(lam) || lam < 1) throw TailError("log_gamma: non-integer lambda needs an explicit term count");
        n = cas::to_long(lam);
      }
      // Gamma(lambda)^{-1} sum_k (lambda-1)_k alpha^{lambda-1-k} t^{-alpha} (log t)^{lambda-1-k}
      Expr inv_gamma = Expr(1) / cas::gamma(Exponent(lam));
      Expr falling(1);
      for (long k = 0; k < n && out.size() < max_terms; ++k) {
        if (beyond(al)) break;
        Rational b = lam - 1 - k;
        push(ScaleElement{al, b}, inv_gamma * falling * cas::pow(ae, Exponent(b)));
        falling *= Expr(lam - 1 - k);
      }
      break;
    }
    case Family::power_series:
      for (const auto& t : spec.upper_terms) {
        if (out.size() < max_terms && !beyond(t.element.a)) push(t.element, t.coef);
      }
      break;
    case Family::exponential:
    case Family::point_mass:
      break;
  }
  return out;
}

// First n nonzero terms of the upper tail.
inline std::vector<ExpansionTerm<Expr>> expand_tail(const DistributionSpec& spec, std::size_t n_terms) {
  if (n_terms < 1) throw TailError("expand_tail needs at least one term");
  if (!spec.heavy_tailed()) throw TailError("expand_tail: " + family_name(spec.family) + " has no power-scale expansion");
  return tail_series(spec, n_terms);
}

// Upper-tail terms with exponent up to the cutoff.
inline std::vector<ExpansionTerm<Expr>> expand_tail_to(const DistributionSpec& spec, const Exponent& cutoff,
                                                       const cas::Valuation& witness = {}) {
  if (!spec.heavy_tailed()) return {};
  return tail_series(spec, static_cast<std::size_t>(-1), cutoff, witness);
}

// Terms of P(X < -t); empty when the law vanishes near minus infinity.
inline std::vector<ExpansionTerm<Expr>> expand_lower_tail_to(const DistributionSpec& spec, const Exponent& cutoff,
                                                             const cas::Valuation& witness = {}) {
  switch (spec.support) {
    case Support::nonnegative:
      return {};
    case Support::symmetric:
      return expand_tail_to(spec, cutoff, witness);
    case Support::two_sided: {
      std::vector<ExpansionTerm<Expr>> out;
      for (const auto& t : spec.lower_terms) {
        Exponent d = t.element.a - cutoff;
        Rational v = d.is_constant() ? d.constant() : d.evaluate(witness);
        if (v <= 0) out.push_back(t);
      }
      return out;
    }
  }
  return {};
}

// Exact moments mu_0..mu_m.
inline MomentVector<Expr> moments(const DistributionSpec& spec, int m) {
  if (m < 0) throw TailError("negative moment order");
  if (spec.moments) {
    if (static_cast<int>(spec.moments->size()) < m + 1) throw TailError("not enough user-supplied moments");
    return MomentVector<Expr>(std::vector<Expr>(spec.moments->begin(), spec.moments->begin() + m + 1));
  }
  if (spec.heavy_tailed() && spec.family != Family::power_series) {
    Exponent al = spec.tail_index();
    if (al.is_constant() && Rational(m) >= al.constant()) {
      throw TailError("moment of order " + std::to_string(m) + " does not exist (tail index " + al.str() + ")");
    }
  }
  std::vector<Expr> mu{Expr(1)};
  for (long k = 1; k <= m; ++k) {
    Expr v;
    switch (spec.family) {
      case Family::burr: {
        const Expr& beta = spec.param("beta");
        Rational tau = spec.rational_param("tau");
        Rational gam = spec.rational_param("gamma");
        Rational s = Rational(k) / tau;
        v = cas::pow(beta, Exponent(s)) * cas::gamma(Exponent(gam - s)) * cas::gamma(Exponent(1 + s)) /
            cas::gamma(Exponent(gam));
        break;
      }
      case Family::hall_weissman: {
        const Expr& a = spec.param("a");
        const Expr& b = spec.param("b");
        Expr al = spec.param("alpha");
        Expr be = spec.param("beta");
        v = Expr(1) + Expr(k) / (a + b) * (a / (al - Expr(k)) + b / (be - Expr(k)));
        break;
      }
      case Family::frechet: {
        auto r = spec.param("alpha").as_rational();
        if (!r) throw TailError("frechet: moments need a rational alpha");
        v = cas::gamma(Exponent(1 - Rational(k) / *r));
        break;
      }
      case Family::pareto: {
        Expr al = spec.param("alpha");
        v = Expr(cas::factorial(k));
        for (long i = 1; i <= k; ++i) v /= al - Expr(i);
        break;
      }
      case Family::student: {
        if (k % 2 != 0) {
          v = Expr(0);
          break;
        }
        Expr al = spec.param("alpha");
        v = cas::pow(al, k / 2);
        for (long i = 1; i <= k / 2; ++i) v *= Expr(2 * i - 1) / (al - Expr(2 * i));
        break;
      }
      case Family::log_gamma: {
        Expr al = spec.param("alpha");
        Rational lam = spec.rational_param("lambda");
        v = cas::pow(al / (al - Expr(k)), Exponent(lam));
        break;
      }
      case Family::exponential:
        v = Expr(cas::factorial(k)) * cas::pow(spec.param("theta"), k);
        break;
      case Family::point_mass:
        v = cas::pow(spec.param("at"), k);
        break;
      case Family::power_series:
        throw TailError("power_series laws need explicit moments");
    }
    mu.push_back(v);
  }
  return MomentVector<Expr>(std::move(mu));
}

// E[M^s] for the Mellin transforms used by the implicit renewal solver.
inline Expr mellin_moment(const DistributionSpec& spec, const Exponent& s) {
  switch (spec.family) {
    case Family::exponential:
      return cas::pow(spec.param("theta"), s) * cas::gamma(s + Exponent(1));
    case Family::point_mass: {
      const Expr& c = spec.param("at");
      if (c.is_zero()) return Expr(0);
      return cas::pow(c, s);
    }
    case Family::pareto:
      // (1+t)^{-alpha} law: E X^s = Gamma(1+s) Gamma(alpha-s) / Gamma(alpha)
      return cas::gamma(s + Exponent(1)) * cas::gamma(spec.exponent_param("alpha") - s) /
             cas::gamma(spec.exponent_param("alpha"));
    default:
      throw TailError("no fractional moments available for " + family_name(spec.family));
  }
}

template <class T>
MomentVector<T> convert_moments(const MomentVector<Expr>& mv) {
  std::vector<T> out;
  for (const auto& v : mv.mu) out.push_back(FieldTraits<T>::from_expr(v));
  return MomentVector<T>(std::move(out), mv.synthetic);
}

template <class T>
std::vector<ExpansionTerm<T>> convert_terms(const std::vector<ExpansionTerm<Expr>>& terms) {
  std::vector<ExpansionTerm<T>> out;
  for (const auto& t : terms) out.push_back({t.element, FieldTraits<T>::from_expr(t.coef)});
  return out;
}

// Numeric parameter view for the float-only routines.
inline double numeric_param(const DistributionSpec& spec, const std::string& name) {
  return FieldTraits<double>::from_expr(spec.param(name));
}

// P(X > t) in double precision.
inline double survival(const DistributionSpec& spec, double t) {
  switch (spec.family) {
    case Family::burr: {
      if (t <= 0) return 1;
      double beta = numeric_param(spec, "beta"), tau = numeric_param(spec, "tau"), gam = numeric_param(spec, "gamma");
      return std::pow(1 + std::pow(t, tau) / beta, -gam);
    }
    case Family::hall_weissman: {
      if (t <= 1) return 1;
      double a = numeric_param(spec, "a"), b = numeric_param(spec, "b");
      double al = numeric_param(spec, "alpha"), be = numeric_param(spec, "beta");
      return (a * std::pow(t, -al) + b * std::pow(t, -be)) / (a + b);
    }
    case Family::frechet:
      if (t <= 0) return 1;
      return -std::expm1(-std::pow(t, -numeric_param(spec, "alpha")));
    case Family::pareto:
      if (t <= 0) return 1;
      return std::pow(1 + t, -numeric_param(spec, "alpha"));
    case Family::student: {
      boost::math::students_t dist(numeric_param(spec, "alpha"));
      return boost::math::cdf(boost::math::complement(dist, t));
    }
    case Family::log_gamma: {
      if (t <= 1) return 1;
      return boost::math::gamma_q(numeric_param(spec, "lambda"), numeric_param(spec, "alpha") * std::log(t));
    }
    case Family::exponential:
      if (t <= 0) return 1;
      return std::exp(-t / numeric_param(spec, "theta"));
    case Family::point_mass:
      return t < numeric_param(spec, "at") ? 1 : 0;
    case Family::power_series:
      break;
  }
  throw TailError("no survival function for " + family_name(spec.family));
}

// Moments by quadrature of k t^{k-1} Fbar(t); float-only oracle for the closed forms.
inline std::vector<double> numeric_moments(const DistributionSpec& spec, int m) {
  std::vector<double> mu{1.0};
  boost::math::quadrature::exp_sinh<double> integrator;
  for (int k = 1; k <= m; ++k) {
    if (spec.support == Support::symmetric && k % 2 != 0) {
      mu.push_back(0);
      continue;
    }
    auto f = [&](double t) {
      double s = survival(spec, t);
      return s == 0 ? 0.0 : k * std::pow(t, k - 1) * s;
    };
    // Split at 1: piecewise families have a kink there.
    double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 15, 1e-13) +
               integrator.integrate([&](double u) { return f(1 + u); }, 1e-13);
    if (spec.support == Support::symmetric) v *= 2;
    mu.push_back(v);
  }
  return mu;
}

}  // namespace tailcalc

#endif  // TAILCALC_TAILS_HPP
