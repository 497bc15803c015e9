#ifndef TAILCALC_APPS_HPP
#define TAILCALC_APPS_HPP

// Applications of the character algebra: stopped sums, M/G/1 waiting time, branching,
// infinitely divisible laws, renewal equations, second-order classification.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tailcalc/engine.hpp"

namespace tailcalc {

namespace detail {

// exp(u) truncated at the given order.
template <class T>
SeriesPoly<T> exp_series(int order, const T& scale) {
  std::vector<T> c;
  T pw = from_long<T>(1);
  for (int j = 0; j <= order; ++j) {
    c.push_back(pw / factorial_in<T>(j));
    pw = pw * scale;
  }
  return SeriesPoly<T>(order, std::move(c));
}

template <class T>
MomentVector<T> moments_from_mgf(const SeriesPoly<T>& mgf) {
  std::vector<T> mu;
  for (int j = 0; j <= mgf.order(); ++j) mu.push_back(mgf[j] * factorial_in<T>(j));
  return MomentVector<T>(std::move(mu));
}

// Decides x < y when both sides are known numbers; nullopt for symbolic values.
template <class T>
std::optional<bool> known_less(const T& x, const T& y) {
  if constexpr (std::is_same_v<T, Expr>) {
    auto a = x.as_rational();
    auto b = y.as_rational();
    if (!a || !b) return std::nullopt;
    return *a < *b;
  } else {
    return x < y;
  }
}

template <class T>
T abs_value(const T& x) {
  if constexpr (std::is_same_v<T, Expr>) {
    auto r = x.as_rational();
    if (r && *r < 0) return -x;
    return x;
  } else {
    return x < 0 ? T(-x) : x;
  }
}

}  // namespace detail

// Moments of a counting variable N, from its moment generating function.
template <class T>
MomentVector<T> deterministic_count_moments(long n, int order) {
  return MomentVector<T>::point_mass(order, from_long<T>(n));
}

template <class T>
MomentVector<T> poisson_moments(const T& a, int order) {
  SeriesPoly<T> e = detail::exp_series<T>(order, from_long<T>(1));
  SeriesPoly<T> inner = (e - SeriesPoly<T>::constant(order, from_long<T>(1))).scaled(a);
  return detail::moments_from_mgf(inner.exp());
}

// P(N = n) = (1-a) a^n, n >= 0.
template <class T>
MomentVector<T> geometric_moments(const T& a, int order) {
  SeriesPoly<T> e = detail::exp_series<T>(order, from_long<T>(1));
  SeriesPoly<T> den = SeriesPoly<T>::constant(order, from_long<T>(1)) - e.scaled(a);
  return detail::moments_from_mgf(den.reciprocal().scaled(from_long<T>(1) - a));
}

// Coefficients of D^j in E N L_{F^{*(N-1)}}: the series of E[N Lambda_X(u)^{N-1}],
// i.e. -Lambda_N'(-log Lambda_X(u)) / Lambda_X(u), with Lambda_X(u) = sum_j l_j u^j.
template <class T>
LaplaceCharacter<T> stopped_sum_operator(const MomentVector<T>& n_moments, const MomentVector<T>& fm, int m) {
  if (n_moments.order() < m + 1) throw LaplaceError("stopped sum needs moments of N up to order m+1");
  SeriesPoly<T> lx = character_from_moments(fm.truncated(m)).as_series();
  if (is_zero(lx[0])) throw LaplaceError("Laplace transform with zero constant term");
  // -Lambda_N'(s) = sum_k E N^{k+1} (-s)^k / k!, evaluated at s = -log Lambda_X.
  std::vector<T> outer;
  for (int k = 0; k <= m; ++k) outer.push_back(n_moments.mu[k + 1] / factorial_in<T>(k));
  SeriesPoly<T> value = SeriesPoly<T>(m, std::move(outer)).compose(lx.log());
  return LaplaceCharacter<T>::from_series(value * lx.reciprocal());
}

// Moments of the compound Poisson law: its j-th cumulant is a mu_{F,j}.
template <class T>
MomentVector<T> compound_poisson_moments(const T& a, const MomentVector<T>& fm, int m) {
  std::vector<T> c{from_long<T>(0)};
  for (int j = 1; j <= m; ++j) c.push_back(a * fm.mu.at(j) / factorial_in<T>(j));
  return detail::moments_from_mgf(SeriesPoly<T>(m, std::move(c)).exp());
}

// Kbar = a L_K Fbar.
template <class T>
TailVector<T> compound_poisson(const T& a, const MomentVector<T>& fm, int m, const TailVector<T>& p_f) {
  // K has an atom at 0 but its moments are those of a probability law.
  MomentVector<T> km = compound_poisson_moments(a, fm, m);
  Matrix<T> d = derivative_matrix<T>(p_f.basis);
  return TailVector<T>(p_f.basis, scale_vector(character_matrix(km, d).apply(p_f.p), a));
}

// Applies an operator sum_j op_j D^j to a tail vector.
template <class T>
TailVector<T> apply_operator(const LaplaceCharacter<T>& op, const TailVector<T>& p) {
  return TailVector<T>(p.basis, character_matrix(op, derivative_matrix<T>(p.basis)).apply(p.p));
}

template <class T>
struct QueueResult {
  T load;                  // a = beta / mu
  MomentVector<T> h;       // equilibrium service law
  LaplaceCharacter<T> op;  // coefficients of D^j applied to Hbar
};

// Wbar = a(1-a) sum_j (1/j!) d^j/du^j (1 - a Lambda_H(u))^{-2} |_0 D^j Hbar.
template <class T>
QueueResult<T> mg1_waiting_tail(const MomentVector<T>& b, const T& mean_interarrival, int m) {
  if (b.order() < m + 1) throw LaplaceError("queue needs service moments up to order m+1");
  QueueResult<T> r;
  r.load = b.mu[1] / mean_interarrival;
  if (auto ok = detail::known_less(r.load, from_long<T>(1)); ok && !*ok) {
    throw PreconditionError("unstable queue: load " + FieldTraits<T>::str(r.load) + " is not below 1");
  }
  if (auto pos = detail::known_less(from_long<T>(0), b.mu[1]); pos && !*pos) {
    throw PreconditionError("service time must have positive mean");
  }
  LaplaceCharacter<T> hc = equilibrium_character(b.truncated(m + 1));
  r.h = moments_of(hc, false);
  SeriesPoly<T> one = SeriesPoly<T>::constant(m, from_long<T>(1));
  SeriesPoly<T> inv = (one - hc.as_series().scaled(r.load)).reciprocal();
  T front = r.load * (from_long<T>(1) - r.load);
  r.op = LaplaceCharacter<T>::from_series((inv * inv).scaled(front));
  return r;
}

// Hbar(t) = beta^{-1} int_t^inf Bbar for pure-power terms of Bbar.
inline std::vector<ExpansionTerm<Expr>> equilibrium_tail_terms(const std::vector<ExpansionTerm<Expr>>& b_terms,
                                                               const Expr& beta) {
  std::vector<ExpansionTerm<Expr>> out;
  for (const auto& t : b_terms) {
    if (t.element.b != 0) throw PreconditionError("equilibrium tail supports pure powers only");
    Exponent a1 = t.element.a - Exponent(1);
    Expr den = Expr::from_exponent(a1);
    if (den.is_zero()) throw PreconditionError("service tail index must exceed 1");
    out.push_back({ScaleElement{a1, 0}, t.coef / (den * beta)});
  }
  return out;
}

// nu = rho^{-1} E N L_{F^{*(N-1)}} 1{N >= 1} Fbar with N geometric(rho); equals (1-rho)/(1-rho Lambda)^2.
template <class T>
LaplaceCharacter<T> branching_intensity(const MomentVector<T>& fm, const T& rho, int m) {
  if (auto lo = detail::known_less(from_long<T>(0), rho); lo && !*lo) throw PreconditionError("rho must lie in (0,1)");
  if (auto hi = detail::known_less(rho, from_long<T>(1)); hi && !*hi) throw PreconditionError("rho must lie in (0,1)");
  LaplaceCharacter<T> op = stopped_sum_operator(geometric_moments(rho, m + 1), fm, m);
  return op.scaled(from_long<T>(1) / rho);
}

// Gbar_nu = L_{G_nu} nubar.
template <class T>
TailVector<T> infdiv_tail(const TailVector<T>& nu_tail, const MomentVector<T>& g, int m) {
  return TailVector<T>(nu_tail.basis,
                       character_matrix(g.truncated(m), derivative_matrix<T>(nu_tail.basis)).apply(nu_tail.p));
}

template <class T>
struct RenewalResult {
  LaplaceCharacter<T> f;  // L_F = (Id - a L_H)^{-1} L_K; l_0 = 1/(1-a)
  MomentVector<T> g;      // moments of G = (1-a) F
  TailVector<T> g_tail;   // p_Gbar
};

// F - a F*H = K; p_G = (I - a L_H)^{-1} ((1-a) p_K + a L_G p_H).
template <class T>
RenewalResult<T> renewal_solve(const MomentVector<T>& h, const TailVector<T>& p_h, const MomentVector<T>& k,
                               const TailVector<T>& p_k, const T& a, int m) {
  if (!(p_h.basis == p_k.basis)) throw PreconditionError("renewal: H and K expansions need a common scale");
  if (auto ok = detail::known_less(detail::abs_value(a), from_long<T>(1)); ok && !*ok) {
    throw PreconditionError("renewal: |a| must be below 1");
  }
  RenewalResult<T> r;
  LaplaceCharacter<T> lh = character_from_moments(h.truncated(m));
  LaplaceCharacter<T> lk = character_from_moments(k.truncated(m));
  LaplaceCharacter<T> op = LaplaceCharacter<T>::identity(m) - lh.scaled(a);
  r.f = compose(invert_partitions(op), lk);
  std::vector<T> gm;
  for (const auto& v : r.f.moments()) gm.push_back((from_long<T>(1) - a) * v);
  // a < 0 makes G a signed measure.
  const bool positive = detail::known_less(from_long<T>(0), a).value_or(false);
  r.g = MomentVector<T>(std::move(gm), h.synthetic || k.synthetic || !positive);
  Matrix<T> d = derivative_matrix<T>(p_k.basis);
  Matrix<T> lhs = Matrix<T>::identity(d.rows()) - character_matrix(lh, d).scaled(a);
  std::vector<T> rhs = add_vectors(scale_vector(p_k.p, T(from_long<T>(1) - a)),
                                   scale_vector(character_matrix(r.g, d).apply(p_h.p), a));
  r.g_tail = TailVector<T>(p_k.basis, solve_lower(lhs, rhs));
  return r;
}

template <class T>
struct ImplicitRenewalResult {
  MomentVector<T> f;
  TailVector<T> p;
  Matrix<T> mellin;                 // int M_x dH(x) in the scale
  std::optional<bool> contraction;  // E M^{2(alpha+m+1)} < 1; nullopt when symbolic
  std::vector<std::string> warnings;
};

// mu_{F,k} (1 - mu_{H,k}) = sum_{j>=1} binom(k,j) mu_{K,j} mu_{H,k-j} mu_{F,k-j}.
template <class T>
MomentVector<T> implicit_renewal_moments(const MomentVector<T>& h, const MomentVector<T>& k, int m) {
  std::vector<T> f{from_long<T>(1)};
  for (int n = 1; n <= m; ++n) {
    T s = from_long<T>(0);
    for (int j = 1; j <= n; ++j) {
      s = s + from_rational<T>(cas::binomial(Rational(n), j)) * k.mu[j] * h.mu[n - j] * f[n - j];
    }
    T den = from_long<T>(1) - h.mu[n];
    if (is_zero(den)) throw PreconditionError("implicit renewal: E M^" + std::to_string(n) + " = 1");
    f.push_back(s / den);
  }
  return MomentVector<T>(std::move(f), h.synthetic || k.synthetic);
}

// R = Q + M R with M ~ H, Q ~ K independent and nonnegative:
// p_F = (I - L_K int M_x dH)^{-1} L_{H (Mellin) F} p_K on a pure-power scale.
template <class T>
ImplicitRenewalResult<T> implicit_renewal_solve(const DistributionSpec& h_spec, const MomentVector<T>& k,
                                                const TailVector<T>& p_k, int m) {
  const ScaleBasis& basis = p_k.basis;
  if (!basis.is_pure_power()) throw PreconditionError("implicit renewal supports pure-power scales only");
  ImplicitRenewalResult<T> r;
  MomentVector<T> h = convert_moments<T>(moments(h_spec, m));
  r.f = implicit_renewal_moments(h, k, m);
  Matrix<T> d = derivative_matrix<T>(basis);
  r.mellin = Matrix<T>(basis.size(), basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    r.mellin(i, i) = FieldTraits<T>::from_expr(mellin_moment(h_spec, basis[i].a));
  }
  Exponent alpha = basis[0].a;
  Expr contraction = mellin_moment(h_spec, (alpha + Exponent(m + 1)) * Rational(2));
  if (auto v = contraction.evaluate({})) {
    r.contraction = *v < 1;
    if (!*r.contraction) throw PreconditionError("implicit renewal: E M^{2(alpha+m+1)} is not below 1");
  } else {
    r.warnings.push_back("contraction E M^{2(alpha+m+1)} < 1 assumed: " + contraction.str());
  }
  Matrix<T> lk = character_matrix(k.truncated(m), d);
  Matrix<T> lhs = Matrix<T>::identity(basis.size()) - lk * r.mellin;
  LaplaceCharacter<T> lhf = mellin_character(h.truncated(m), r.f);
  std::vector<T> rhs = character_matrix(lhf, d).apply(p_k.p);
  r.p = TailVector<T>(basis, solve_lower(lhs, rhs));
  return r;
}

// Second-order regular variation of Fbar_* = Fbar + Fbar(-.): ratio remainder lambda^{-alpha} k(lambda) g(t),
// g(t) ~ g_coef t^{rho}, a = lim t^xi g(t).
template <class T>
struct SecondOrderSpec {
  Exponent alpha;
  Exponent rho;
  T g_coef;
  std::optional<T> a;  // nullopt: infinite
  T p;                 // tail balance, q = 1 - p
};

enum class SecondOrderStatus { classified, higher_order_needed };

template <class T>
struct SecondOrderResult {
  int regime = 0;  // 1: a infinite; 2: a finite, mu_1 != 0; 3: a finite, mu_1 = 0
  int xi = 1;
  SecondOrderStatus status = SecondOrderStatus::classified;
  std::string condition;  // which nondegeneracy condition was checked
  T condition_value;
  std::optional<T> coefficient;  // withheld when the condition fails
  std::string g_order;           // "g" or "t^-xi"
};

namespace detail {

// Exact fields test exact zero; floats use a relative band against the summand scale.
template <class T>
bool vanishes(const T& value, const std::vector<T>& parts) {
  if constexpr (std::is_same_v<T, double>) {
    double scale = 0;
    for (double x : parts) scale = std::max(scale, std::fabs(x));
    return std::fabs(value) <= 1e-9 * scale;
  } else {
    return is_zero(value);
  }
}

}  // namespace detail

template <class T>
SecondOrderResult<T> second_order_classify(const SecondOrderSpec<T>& so, const WeightSequence& w,
                                           const MomentVector<T>& fm) {
  if (fm.order() < 2) throw LaplaceError("classification needs moments up to order 2");
  if (!so.rho.is_constant() || so.rho.constant() > 0) throw PreconditionError("second-order index must be a rational <= 0");
  PowerSums<T> ps(w);
  const Exponent& al = so.alpha;
  const bool signed_w = w.has_negative();
  auto abs_sum = [&](const Exponent& e) { return ps.abs_sum(e); };
  T u = abs_sum(al);
  // rho V = |C|_{alpha-rho} - |C|_alpha for rho < 0, and 0 when rho = 0 (k = log).
  T rho_v = from_long<T>(0);
  T v;
  Rational rho = so.rho.constant();
  if (rho != 0) {
    rho_v = abs_sum(al - so.rho) - u;
    v = rho_v / from_rational<T>(rho);
  } else {
    v = -(ps.sum(al, 1, Branch::positive) + (signed_w ? ps.sum(al, 1, Branch::negative) : from_long<T>(0)));
  }
  const T& mu1 = fm.mu[1];
  const T& mu2 = fm.mu[2];
  SecondOrderResult<T> r;
  r.xi = is_zero(mu1) ? 2 : 1;
  T ae = FieldTraits<T>::from_exponent(al);
  std::vector<T> parts;
  if (!so.a) {
    r.regime = 1;
    r.condition = "TailCondA";
    r.condition_value = u + rho_v;
    parts = {u, rho_v};
    if (!detail::vanishes(r.condition_value, parts)) r.coefficient = v;
  } else {
    const T& a = *so.a;
    T head = a * u + a * rho_v;
    if (r.xi == 1) {
      r.regime = 2;
      r.condition = "TailCondB";
      T q = from_long<T>(1) - so.p;
      T tail = ae * from_rational<T>(rho) * mu1 * (so.p - q) * (ps.signed_sum(1) * ps.sign_sum(al) - abs_sum(al + Exponent(1)));
      r.condition_value = head + tail;
      parts = {a * u, a * rho_v, tail};
    } else {
      r.regime = 3;
      r.condition = "TailCondC";
      T tail = ae * (ae + from_long<T>(1)) * mu2 * (ps.signed_sum(2) * u - abs_sum(al + Exponent(2)));
      r.condition_value = head - tail;
      parts = {a * u, a * rho_v, tail};
    }
    if (!detail::vanishes(r.condition_value, parts)) r.coefficient = r.condition_value;
  }
  if (!r.coefficient) r.status = SecondOrderStatus::higher_order_needed;
  bool a_zero = so.a && is_zero(*so.a);
  r.g_order = a_zero ? "t^-" + std::to_string(r.xi) : "g";
  return r;
}

// Reads the second-order structure off a two-term power expansion p0 t^{-alpha} + p1 t^{-alpha-delta}:
// rho = -delta and g(t) = -delta (p1/p0) t^{-delta}.
template <class T>
SecondOrderSpec<T> second_order_from_tail(const DistributionSpec& spec, const MomentVector<T>& fm,
                                          const cas::Valuation& witness = {}) {
  std::vector<ExpansionTerm<Expr>> up = expand_tail(spec, 2);
  std::vector<ExpansionTerm<Expr>> lo;
  if (spec.support == Support::symmetric) lo = up;
  if (spec.support == Support::two_sided) lo = spec.lower_terms;
  // Merge upper and lower into the expansion of Fbar_*.
  std::vector<ExpansionTerm<Expr>> star = up;
  for (const auto& t : lo) {
    auto it = std::find_if(star.begin(), star.end(), [&](const auto& s) { return s.element == t.element; });
    if (it != star.end()) it->coef += t.coef;
    else star.push_back(t);
  }
  for (const auto& t : star) {
    if (t.element.b != 0) throw PreconditionError("second-order extraction supports pure powers only");
  }
  auto order_key = [&](const Exponent& e) {
    auto v = witness_value(e, witness);
    if (!v) throw PreconditionError("cannot order exponent " + e.str() + " without a witness");
    return *v;
  };
  std::sort(star.begin(), star.end(),
            [&](const auto& x, const auto& y) { return order_key(x.element.a) < order_key(y.element.a); });
  while (star.size() > 2) star.pop_back();
  SecondOrderSpec<T> so;
  so.alpha = star.front().element.a;
  Expr upper_lead = up.front().element == star.front().element ? up.front().coef : Expr(0);
  so.p = FieldTraits<T>::from_expr(upper_lead / star.front().coef);
  int xi = is_zero(fm.mu.at(1)) ? 2 : 1;
  if (star.size() < 2) {
    so.rho = Exponent(-xi);
    so.g_coef = from_long<T>(0);
    so.a = from_long<T>(0);
    return so;
  }
  Exponent delta = star[1].element.a - so.alpha;
  if (!delta.is_constant()) throw PreconditionError("second-order gap must be rational");
  Rational dl = delta.constant();
  so.rho = Exponent(-dl);
  so.g_coef = FieldTraits<T>::from_expr(Expr(-dl) * star[1].coef / star[0].coef);
  if (dl < xi) so.a = std::nullopt;
  else if (dl == xi) so.a = so.g_coef;
  else so.a = from_long<T>(0);
  return so;
}

// lambda = alpha^{-2} (1 + 2 sum_{j>=1} sum_{k>=0} min(|c_k|^alpha, |c_{j+k}|^alpha) / sum_k |c_k|^alpha).
// Infinite AR(1) sequences are cut where sum_{i>n} i |c_i|^alpha < 1e-12.
inline double hill_variance(const WeightSequence& w, double alpha) {
  if (!(alpha > 0)) throw PreconditionError("hill_variance needs alpha > 0");
  std::vector<double> c;
  if (w.kind == WeightSequence::Kind::ar1) {
    double x = std::pow(std::fabs(FieldTraits<double>::from_expr(w.a)), alpha);
    if (x >= 1) throw WeightError("divergent weight sequence");
    std::size_t n = 1;
    // sum_{i>n} i x^i = x^{n+1} ((n+1) - n x) / (1-x)^2
    while (n < 10000000) {
      double tail = std::pow(x, n + 1.0) * ((n + 1.0) - n * x) / ((1 - x) * (1 - x));
      if (tail < 1e-12) break;
      n *= 2;
    }
    c = numeric_weights(w, n + 1);
  } else {
    c = numeric_weights(w, 0);
  }
  std::vector<double> p;
  for (double v : c) p.push_back(std::pow(std::fabs(v), alpha));
  double total = 0;
  for (double v : p) total += v;
  if (total == 0) throw WeightError("all weights vanish");
  double cross = 0;
  for (std::size_t j = 1; j < p.size(); ++j) {
    for (std::size_t k = 0; k + j < p.size(); ++k) cross += std::min(p[k], p[k + j]);
  }
  return (1 + 2 * cross / total) / (alpha * alpha);
}

}  // namespace tailcalc

#endif  // TAILCALC_APPS_HPP
