#ifndef TAILCALC_ENGINE_HPP
#define TAILCALC_ENGINE_HPP

// Tail expansion of the weighted sum G_c = law of sum c_i X_i.
//
// The convolution route evaluates L_G sum_i L_{M_{c_i}F}^{-1} D^k M_{c_i} p, either term by term
// (finite weight lists) or by collecting powers of c_i into power sums (infinite families).
// The direct route evaluates sum_i L_{G # M_{c_i}F} D^k M_{c_i} p without any inversion.

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tailcalc/field.hpp"
#include "tailcalc/laplace.hpp"
#include "tailcalc/matrix.hpp"
#include "tailcalc/scale.hpp"
#include "tailcalc/series.hpp"
#include "tailcalc/tails.hpp"
#include "tailcalc/weights.hpp"

namespace tailcalc {

// A violated precondition of the expansion theorem.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kMaxScaleSize = 4096;

struct ExpansionRequest {
  int m = 0;
  int k = 0;
  std::optional<Rational> omega;  // smoothness order; defaults to m + k + 1
  Rational gamma = Rational(1, 2);
  std::optional<Exponent> cutoff;  // defaults to alpha + m + k
  cas::Valuation witness;          // orders symbolic exponents

  Rational omega_value() const { return omega ? *omega : Rational(m + k + 1); }
};

// Evaluates an exponent through the witness; nullopt when a symbol is missing.
inline std::optional<Rational> witness_value(const Exponent& e, const cas::Valuation& w) {
  if (e.is_constant()) return e.constant();
  if (!e.evaluable(w)) return std::nullopt;
  return e.evaluate(w);
}

// Checks m < alpha, m + k < omega and 0 < gamma < min(1, omega - m - k).
// Returns the assumptions that could not be decided because alpha is symbolic.
inline std::vector<std::string> validate_request(const ExpansionRequest& req, const Exponent& alpha) {
  std::vector<std::string> assumed;
  if (req.m < 0 || req.k < 0) throw PreconditionError("m and k must be non-negative");
  if (auto a = witness_value(alpha, req.witness)) {
    if (*a <= 0) throw PreconditionError("tail index must be positive");
    if (Rational(req.m) >= *a) {
      throw PreconditionError("m = " + std::to_string(req.m) + " must be below the tail index " + alpha.str());
    }
  } else {
    assumed.push_back("assumed m < " + alpha.str());
  }
  Rational omega = req.omega_value();
  if (Rational(req.m + req.k) >= omega) throw PreconditionError("m + k must be below omega");
  Rational cap = omega - req.m - req.k;
  if (cap > 1) cap = 1;
  if (req.gamma <= 0 || req.gamma >= cap) throw PreconditionError("gamma must lie in (0, min(1, omega - m - k))");
  return assumed;
}

// Moments of a law whose j-th cumulant is weight(j) times the j-th cumulant of fm.
template <class T>
MomentVector<T> reweight_cumulants(const MomentVector<T>& fm, int m, const std::function<T(long)>& weight) {
  if (fm.order() < m) throw LaplaceError("moment vector shorter than the requested order");
  std::vector<T> c;
  for (int j = 0; j <= m; ++j) c.push_back(fm.mu[j] / factorial_in<T>(j));
  SeriesPoly<T> lg = SeriesPoly<T>(m, std::move(c)).log();
  std::vector<T> w(static_cast<std::size_t>(m) + 1, from_long<T>(0));
  for (int j = 1; j <= m; ++j) {
    if (!is_zero(lg[j])) w[j] = lg[j] * weight(j);
  }
  SeriesPoly<T> e = SeriesPoly<T>(m, std::move(w)).exp();
  std::vector<T> mu;
  for (int j = 0; j <= m; ++j) mu.push_back(e[j] * factorial_in<T>(j));
  return MomentVector<T>(std::move(mu), fm.synthetic);
}

// Moments of sum c_i X_i: the j-th cumulant is C_j times that of X.
template <class T>
MomentVector<T> g_moments(const WeightSequence& w, const MomentVector<T>& fm, int m) {
  PowerSums<T> ps(w);
  return reweight_cumulants<T>(fm, m, [&](long j) { return ps.signed_sum(j); });
}

// i-th weight as a field element; AR(1) weights are a^i.
template <class T>
T weight_at(const WeightSequence& w, std::size_t i) {
  switch (w.kind) {
    case WeightSequence::Kind::explicit_list:
    case WeightSequence::Kind::maq:
      if (i >= w.values.size()) throw WeightError("weight index out of range");
      return FieldTraits<T>::from_expr(w.values[i]);
    case WeightSequence::Kind::ar1:
      return power(FieldTraits<T>::from_expr(w.a), static_cast<long>(i));
    case WeightSequence::Kind::generic:
      break;
  }
  throw WeightError("generic weights have no individual entries");
}

// Moments of G with the i-th summand removed: C_j becomes C_j - c_i^j.
template <class T>
MomentVector<T> residual_moments(const WeightSequence& w, std::size_t i, const MomentVector<T>& fm, int m) {
  PowerSums<T> ps(w);
  T ci = weight_at<T>(w, i);
  return reweight_cumulants<T>(fm, m, [&](long j) { return T(ps.signed_sum(j) - power(ci, j)); });
}

template <class T>
T power_sum(const WeightSequence& w, const Exponent& p) {
  return PowerSums<T>(w).sum(p);
}

template <class T>
T cross_sum(const WeightSequence& w, const Exponent& p, const Exponent& q) {
  return PowerSums<T>(w).cross(p, q);
}

// Innovation law in a closed scale: upper tail, lower tail P(X < -t), moments.
template <class T>
struct Innovation {
  TailVector<T> upper;
  TailVector<T> lower;
  bool has_lower = false;  // false: the law vanishes near minus infinity
  MomentVector<T> mu;
  Exponent alpha;
};

template <class T>
struct ExpansionResult {
  TailVector<T> tail;
  MomentVector<T> g;
  std::vector<std::string> warnings;
  std::optional<double> norm;
};

namespace detail {

inline Exponent lower_index(const DistributionSpec& spec) {
  if (spec.support == Support::symmetric) return spec.tail_index();
  if (spec.lower_terms.empty()) throw PreconditionError("two-sided law without a lower-tail expansion");
  return spec.lower_terms.front().element.a;
}

template <class T>
MomentVector<T> reflected(const MomentVector<T>& mv) {
  std::vector<T> mu = mv.mu;
  for (std::size_t j = 1; j < mu.size(); j += 2) mu[j] = -mu[j];
  return MomentVector<T>(std::move(mu), mv.synthetic);
}

// Column (a,b) maps to row (a, b-l) with binom(b,l)(-1)^l sum |c|^{a+n} (log|c|)^l over one branch.
template <class T>
Matrix<T> power_sum_matrix(const PowerSums<T>& ps, const ScaleBasis& basis, int n, Branch branch) {
  Matrix<T> out(basis.size(), basis.size());
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const ScaleElement& e = basis[j];
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if (basis[i].a != e.a) continue;
      Rational l = e.b - basis[i].b;
      if (l < 0 || !cas::is_integer(l)) continue;
      long ll = cas::to_long(l);
      Rational coef = cas::binomial(e.b, ll);
      if (ll % 2 != 0) coef = -coef;
      T s = ps.sum(e.a + Exponent(n), ll, branch);
      if (!is_zero(s)) out(i, j) = from_rational<T>(coef) * s;
    }
  }
  return out;
}

inline std::optional<double> try_norm(const WeightSequence& w, const Exponent& alpha, const ExpansionRequest& req) {
  if (w.kind == WeightSequence::Kind::generic || !alpha.is_constant()) return std::nullopt;
  try {
    return norm_N(w, alpha.constant().get_d(), req.gamma.get_d(), req.omega_value().get_d());
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace detail

// Closed scale for the request: seeds from both tails, cutoff alpha + m + k unless overridden.
inline ScaleBasis request_scale(const DistributionSpec& spec, const ExpansionRequest& req, Exponent* alpha_out = nullptr) {
  Exponent alpha = spec.tail_index();
  ScaleBasis probe = ScaleBasis::close_under_derivative({ScaleElement{alpha, 0}}, alpha, req.witness);
  if (spec.support != Support::nonnegative) {
    Exponent lo = detail::lower_index(spec);
    if (probe.compare(lo, alpha) < 0) alpha = lo;
  }
  Exponent cutoff = req.cutoff ? *req.cutoff : alpha + Exponent(req.m + req.k);
  std::vector<ScaleElement> seed;
  for (const auto& t : expand_tail_to(spec, cutoff, req.witness)) seed.push_back(t.element);
  for (const auto& t : expand_lower_tail_to(spec, cutoff, req.witness)) seed.push_back(t.element);
  if (seed.empty()) throw PreconditionError("no tail terms below the cutoff " + cutoff.str());
  ScaleBasis basis = ScaleBasis::close_under_derivative(seed, cutoff, req.witness);
  if (basis.size() > kMaxScaleSize) throw PreconditionError("scale closure exceeds " + std::to_string(kMaxScaleSize));
  if (alpha_out) *alpha_out = alpha;
  return basis;
}

template <class T>
Innovation<T> make_innovation(const DistributionSpec& spec, const ExpansionRequest& req) {
  Innovation<T> inn;
  ScaleBasis basis = request_scale(spec, req, &inn.alpha);
  inn.upper = embed(convert_terms<T>(expand_tail_to(spec, basis.cutoff(), req.witness)), basis);
  inn.has_lower = spec.support != Support::nonnegative;
  inn.lower = inn.has_lower ? embed(convert_terms<T>(expand_lower_tail_to(spec, basis.cutoff(), req.witness)), basis)
                            : TailVector<T>::zero(basis);
  inn.mu = convert_moments<T>(moments(spec, req.m));
  return inn;
}

// Convolution route in a fixed scale.
template <class T>
TailVector<T> expand_vector(const WeightSequence& w, const Innovation<T>& inn, int m, int k) {
  const ScaleBasis& basis = inn.upper.basis;
  Matrix<T> d = derivative_matrix<T>(basis);
  MomentVector<T> g = g_moments(w, inn.mu, m);
  std::vector<T> acc(basis.size(), from_long<T>(0));
  if (w.is_finite()) {
    Matrix<T> dk = d.pow(static_cast<unsigned>(k));
    for (const auto& cv : w.values) {
      int sg = WeightSequence::sign_of(cv);
      if (sg == 0 || (sg < 0 && !inn.has_lower)) continue;
      T c = FieldTraits<T>::from_expr(cv);
      T mag = FieldTraits<T>::from_expr(sg > 0 ? cv : Expr(-cv));
      const TailVector<T>& sel = sg > 0 ? inn.upper : inn.lower;
      auto inv = invert_nilpotent(character_from_moments(scale_moments(inn.mu.truncated(m), c)));
      acc = add_vectors(acc, character_matrix(inv, d).apply(dk.apply(scaling_matrix(basis, mag).apply(sel.p))));
    }
  } else {
    PowerSums<T> ps(w);
    for (Branch br : {Branch::positive, Branch::negative}) {
      if (br == Branch::negative && (!w.has_negative() || !inn.has_lower)) continue;
      const TailVector<T>& sel = br == Branch::positive ? inn.upper : inn.lower;
      MomentVector<T> mu = br == Branch::positive ? inn.mu.truncated(m) : detail::reflected(inn.mu.truncated(m));
      auto inv = invert_nilpotent(character_from_moments(mu));
      Matrix<T> dpow = d.pow(static_cast<unsigned>(k));
      for (int n = 0; n <= m; ++n) {
        if (!is_zero(inv[n])) {
          auto v = dpow.apply(detail::power_sum_matrix(ps, basis, n, br).apply(sel.p));
          acc = add_vectors(acc, scale_vector(v, inv[n]));
        }
        dpow = dpow * d;
      }
    }
  }
  return TailVector<T>(basis, character_matrix(g, d).apply(acc));
}

// Direct route in a fixed scale; finite weight lists only.
template <class T>
TailVector<T> expand_direct_vector(const WeightSequence& w, const Innovation<T>& inn, int m, int k) {
  if (!w.is_finite()) throw PreconditionError("the direct route needs a finite weight list");
  const ScaleBasis& basis = inn.upper.basis;
  Matrix<T> d = derivative_matrix<T>(basis);
  Matrix<T> dk = d.pow(static_cast<unsigned>(k));
  std::vector<T> acc(basis.size(), from_long<T>(0));
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    const Expr& cv = w.values[i];
    int sg = WeightSequence::sign_of(cv);
    if (sg == 0 || (sg < 0 && !inn.has_lower)) continue;
    T mag = FieldTraits<T>::from_expr(sg > 0 ? cv : Expr(-cv));
    const TailVector<T>& sel = sg > 0 ? inn.upper : inn.lower;
    MomentVector<T> res = residual_moments(w, i, inn.mu, m);
    acc = add_vectors(acc, character_matrix(res, d).apply(dk.apply(scaling_matrix(basis, mag).apply(sel.p))));
  }
  return TailVector<T>(basis, std::move(acc));
}

template <class T>
ExpansionResult<T> expand_convolution(const WeightSequence& w, const DistributionSpec& spec, const ExpansionRequest& req) {
  ExpansionResult<T> out;
  out.warnings = validate_request(req, spec.tail_index());
  Innovation<T> inn = make_innovation<T>(spec, req);
  if (w.has_negative() && spec.support == Support::nonnegative) {
    out.warnings.push_back("negative weights ignored: the law vanishes near minus infinity");
  }
  for (auto& s : derivative_truncations(inn.upper.basis)) out.warnings.push_back(s);
  out.norm = detail::try_norm(w, inn.alpha, req);
  out.g = g_moments(w, inn.mu, req.m);
  out.tail = expand_vector(w, inn, req.m, req.k);
  return out;
}

template <class T>
ExpansionResult<T> expand_direct(const WeightSequence& w, const DistributionSpec& spec, const ExpansionRequest& req) {
  ExpansionResult<T> out;
  out.warnings = validate_request(req, spec.tail_index());
  Innovation<T> inn = make_innovation<T>(spec, req);
  for (auto& s : derivative_truncations(inn.upper.basis)) out.warnings.push_back(s);
  out.norm = detail::try_norm(w, inn.alpha, req);
  out.g = g_moments(w, inn.mu, req.m);
  out.tail = expand_direct_vector(w, inn, req.m, req.k);
  return out;
}

// Tail p on {t^{-alpha-j}}_{j<=m} whose m-order expansion is t^{-alpha} alone.
// The system matrix is lower triangular with diagonal C_alpha, ..., C_{alpha+m}.
template <class T>
TailVector<T> degenerate_tail(const WeightSequence& w, const Exponent& alpha, int m, const MomentVector<T>& fm,
                              const cas::Valuation& witness = {}) {
  ScaleBasis basis = ScaleBasis::close_under_derivative({ScaleElement{alpha, 0}}, alpha + Exponent(m), witness);
  Innovation<T> inn;
  inn.mu = fm.truncated(m);
  inn.alpha = alpha;
  inn.lower = TailVector<T>::zero(basis);
  Matrix<T> a(basis.size(), basis.size());
  for (std::size_t j = 0; j < basis.size(); ++j) {
    inn.upper = TailVector<T>::zero(basis);
    inn.upper.p[j] = from_long<T>(1);
    TailVector<T> col = expand_vector(w, inn, m, 0);
    for (std::size_t i = 0; i < basis.size(); ++i) a(i, j) = col.p[i];
  }
  std::vector<T> e0(basis.size(), from_long<T>(0));
  e0[0] = from_long<T>(1);
  try {
    return TailVector<T>(basis, solve_lower(a, e0));
  } catch (const std::domain_error& e) {
    throw PreconditionError(std::string("degenerate construction: ") + e.what());
  }
}

}  // namespace tailcalc

#endif  // TAILCALC_ENGINE_HPP
