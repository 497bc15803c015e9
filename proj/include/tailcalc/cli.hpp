#ifndef TAILCALC_CLI_HPP
#define TAILCALC_CLI_HPP

// Batch jobs: one command, one JSON problem, one JSON report.

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tailcalc/apps.hpp"
#include "tailcalc/io.hpp"
#include "tailcalc/oracle.hpp"

namespace tailcalc::cli {

using io::Context;
using io::json;
using io::Mode;

enum ExitCode { ok = 0, parse_error = 1, precondition = 2, indeterminate = 3, internal = 4 };

// A self-check of a solver failed; never expected.
struct InvariantError : std::logic_error {
  using std::logic_error::logic_error;
};

struct Outcome {
  int code = ok;
  json report;
  std::string error;
  std::string csv;  // validate only
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"expand",  "stopped-sum", "queue",        "branching",   "infdiv",
                                          "renewal", "implicit-renewal", "classify-2rv", "validate"};
  return c;
}

namespace detail {

struct Job {
  const json& in;
  Context ctx;
  json params = json::object();  // provenance of every parameter

  void note(const std::string& key, const json& value, const std::string& source) {
    params[key] = {{"value", value}, {"source", source}};
  }
  json raw(const std::string& key) const { return in.contains(key) ? in.at(key) : json(nullptr); }
};

inline std::string mode_name(Mode m) { return m == Mode::exact ? "exact" : "float"; }

inline DistributionSpec distribution(Job& job, const std::string& key) {
  DistributionSpec d = io::parse_distribution(io::require(job.in, key), job.ctx);
  job.note(key, job.in.at(key), "input");
  return d;
}

template <class T>
MomentVector<T> law_moments(Job& job, const DistributionSpec& d, const std::string& key, int m) {
  job.note(key + ".moments", d.moments ? "input" : "closed form", d.moments ? "input" : "derived");
  return convert_moments<T>(moments(d, m));
}

inline ExpansionRequest request(Job& job, int m) {
  ExpansionRequest r;
  r.m = m;
  r.k = io::int_field(job.in, "k", 0);
  job.note("k", r.k, job.in.contains("k") ? "input" : "default");
  if (job.in.contains("omega")) {
    auto v = io::value_of(job.in.at("omega"), job.ctx, "omega").as_rational();
    if (!v) throw cas::ParseError("omega must be rational");
    r.omega = *v;
  }
  job.note("omega", r.omega_value().get_str(), job.in.contains("omega") ? "input" : "default: m+k+1");
  if (job.in.contains("gamma")) {
    auto v = io::value_of(job.in.at("gamma"), job.ctx, "gamma").as_rational();
    if (!v) throw cas::ParseError("gamma must be rational");
    r.gamma = *v;
  }
  job.note("gamma", r.gamma.get_str(), job.in.contains("gamma") ? "input" : "default");
  if (job.in.contains("cutoff")) r.cutoff = io::exponent_of(job.in.at("cutoff"), job.ctx, "cutoff");
  job.note("cutoff", r.cutoff ? json(r.cutoff->str()) : json("alpha+m+k"), r.cutoff ? "input" : "default");
  r.witness = job.ctx.symbols;
  return r;
}

inline int order(Job& job) {
  int m = io::int_field(job.in, "m");
  job.note("m", m, "input");
  return m;
}

// Scale for the expansion of one law with cutoff lead + m.
template <class T>
TailVector<T> law_tail(const DistributionSpec& d, int m, const Context& ctx) {
  ExpansionRequest r;
  r.m = m;
  r.witness = ctx.symbols;
  return make_innovation<T>(d, r).upper;
}

template <class T>
json character_json(const LaplaceCharacter<T>& c, const Context& ctx) {
  std::vector<T> v;
  for (int j = 0; j <= c.order(); ++j) v.push_back(c[j]);
  return io::render_list(v, ctx);
}

template <class T>
json expand(Job& job) {
  const int m = order(job);
  WeightSequence w = io::parse_weights(io::require(job.in, "weights"), job.ctx);
  job.note("weights", job.in.at("weights"), "input");
  DistributionSpec d = distribution(job, "distribution");
  ExpansionRequest req = request(job, m);
  const std::string route = job.in.value("route", "convolution");
  job.note("route", route, job.in.contains("route") ? "input" : "default");
  job.note("distribution.moments", d.moments ? "input" : "closed form", d.moments ? "input" : "derived");
  ExpansionResult<T> r;
  if (route == "convolution") r = expand_convolution<T>(w, d, req);
  else if (route == "direct") r = expand_direct<T>(w, d, req);
  else throw cas::ParseError("unknown route '" + route + "'");
  json out = io::render_tail(r.tail, job.ctx, &w);
  out["g_moments"] = io::render_list(r.g.mu, job.ctx, &w);
  out["norm"] = r.norm ? json(*r.norm) : json(nullptr);
  out["warnings"] = r.warnings;
  if (job.in.contains("expected")) {
    // Exact comparison against reference coefficients, by basis index.
    json diff = json::array();
    for (const auto& e : job.in.at("expected")) {
      const std::size_t i = io::int_field(e, "index");
      if (i >= r.tail.p.size()) throw cas::ParseError("expected.index out of range");
      Expr want = io::value_of(io::require(e, "value"), job.ctx, "expected.value");
      json row{{"index", i}, {"label", e.value("label", "")}, {"expected", want.str()}};
      if constexpr (std::is_same_v<T, Expr>) {
        Expr delta = r.tail.p[i] - want;
        row["computed"] = r.tail.p[i].str();
        row["difference"] = delta.str();
        row["match"] = delta.is_zero();
      } else {
        double wv = FieldTraits<double>::from_expr(want);
        row["computed"] = r.tail.p[i];
        row["difference"] = r.tail.p[i] - wv;
        row["match"] = std::fabs(r.tail.p[i] - wv) <= 1e-9 * std::max(1.0, std::fabs(wv));
      }
      diff.push_back(row);
    }
    out["diff"] = diff;
  }
  return out;
}

template <class T>
MomentVector<T> counting(Job& job, int order_needed) {
  const json& c = io::require(job.in, "counting");
  job.note("counting", c, "input");
  const std::string kind = io::require(c, "kind").get<std::string>();
  if (kind == "deterministic") return deterministic_count_moments<T>(io::int_field(c, "n"), order_needed);
  if (kind == "poisson" || kind == "geometric") {
    T a = FieldTraits<T>::from_expr(io::value_of(io::require(c, "a"), job.ctx, "counting.a"));
    return kind == "poisson" ? poisson_moments(a, order_needed) : geometric_moments(a, order_needed);
  }
  if (kind == "moments") {
    std::vector<T> v;
    for (const auto& e : io::expr_list(io::require(c, "values"), job.ctx, "counting.values")) {
      v.push_back(FieldTraits<T>::from_expr(e));
    }
    return MomentVector<T>(std::move(v), true);
  }
  throw cas::ParseError("unknown counting kind '" + kind + "'");
}

// Applies an operator to the law's own tail expansion when it is heavy tailed.
template <class T>
void attach_tail(json& out, const LaplaceCharacter<T>& op, const DistributionSpec& d, int m, const Context& ctx,
                 const T& factor) {
  if (!d.heavy_tailed()) return;
  TailVector<T> p = law_tail<T>(d, m, ctx);
  TailVector<T> r = apply_operator(op, p);
  out["tail"] = io::render_tail(TailVector<T>(r.basis, scale_vector(r.p, factor)), ctx);
}

template <class T>
json stopped_sum(Job& job) {
  const int m = order(job);
  DistributionSpec d = distribution(job, "distribution");
  MomentVector<T> fm = law_moments<T>(job, d, "distribution", m);
  MomentVector<T> nm = counting<T>(job, m + 1);
  LaplaceCharacter<T> op = stopped_sum_operator(nm, fm, m);
  json out{{"operator", character_json(op, job.ctx)}};
  attach_tail(out, op, d, m, job.ctx, from_long<T>(1));
  return out;
}

template <class T>
json queue(Job& job) {
  const int m = order(job);
  DistributionSpec b = distribution(job, "service");
  MomentVector<T> bm = law_moments<T>(job, b, "service", m + 1);
  Expr mu = io::value_of(io::require(job.in, "mean_interarrival"), job.ctx, "mean_interarrival");
  job.note("mean_interarrival", mu.str(), "input");
  QueueResult<T> q = mg1_waiting_tail(bm, FieldTraits<T>::from_expr(mu), m);
  json out{{"load", io::render(q.load, job.ctx)},
           {"operator", character_json(q.op, job.ctx)},
           {"equilibrium_moments", io::render_list(q.h.mu, job.ctx)}};
  if (b.heavy_tailed()) {
    // Hbar from the pure-power expansion of Bbar.
    ExpansionRequest r;
    r.m = m + 1;
    r.witness = job.ctx.symbols;
    Exponent alpha;
    ScaleBasis bb = request_scale(b, r, &alpha);
    auto h_terms = equilibrium_tail_terms(expand_tail_to(b, bb.cutoff(), r.witness), moments(b, 1).mu[1]);
    std::vector<ScaleElement> seed;
    for (const auto& t : h_terms) seed.push_back(t.element);
    ScaleBasis hb = ScaleBasis::close_under_derivative(seed, alpha - Exponent(1) + Exponent(m), r.witness);
    TailVector<T> ph = embed(convert_terms<T>(h_terms), hb);
    out["equilibrium_tail"] = io::render_tail(ph, job.ctx);
    out["tail"] = io::render_tail(apply_operator(q.op, ph), job.ctx);
  }
  return out;
}

template <class T>
json branching(Job& job) {
  const int m = order(job);
  DistributionSpec d = distribution(job, "distribution");
  MomentVector<T> fm = law_moments<T>(job, d, "distribution", m);
  Expr rho = io::value_of(io::require(job.in, "rho"), job.ctx, "rho");
  job.note("rho", rho.str(), "input");
  LaplaceCharacter<T> op = branching_intensity(fm, FieldTraits<T>::from_expr(rho), m);
  json out{{"operator", character_json(op, job.ctx)}};
  attach_tail(out, op, d, m, job.ctx, from_long<T>(1));
  return out;
}

template <class T>
json infdiv(Job& job) {
  const int m = order(job);
  auto terms = io::parse_terms(io::require(job.in, "nu"), job.ctx, "nu");
  job.note("nu", job.in.at("nu"), "input");
  if (terms.empty()) throw cas::ParseError("nu needs at least one term");
  std::vector<T> g;
  for (const auto& e : io::expr_list(io::require(job.in, "g_moments"), job.ctx, "g_moments")) {
    g.push_back(FieldTraits<T>::from_expr(e));
  }
  job.note("g_moments", job.in.at("g_moments"), "input");
  std::vector<ScaleElement> seed;
  for (const auto& t : terms) seed.push_back(t.element);
  ScaleBasis probe = ScaleBasis::close_under_derivative(seed, terms.front().element.a + Exponent(4096), job.ctx.symbols);
  ScaleBasis basis = ScaleBasis::close_under_derivative(seed, probe[0].a + Exponent(m), job.ctx.symbols);
  TailVector<T> nu = embed(convert_terms<T>(terms), basis);
  return {{"tail", io::render_tail(infdiv_tail(nu, MomentVector<T>(std::move(g)), m), job.ctx)}};
}

// Common closed scale for two laws: cutoff min(alpha_H, alpha_K) + m.
inline ScaleBasis joint_scale(const std::vector<const DistributionSpec*>& laws, int m, const cas::Valuation& wit) {
  std::vector<Exponent> idx;
  std::vector<ScaleElement> seed;
  for (const auto* d : laws) idx.push_back(d->tail_index());
  ScaleBasis probe = ScaleBasis::close_under_derivative({ScaleElement{idx[0], 0}}, idx[0], wit);
  Exponent lead = idx[0];
  for (const auto& a : idx) {
    if (probe.compare(a, lead) < 0) lead = a;
  }
  Exponent cutoff = lead + Exponent(m);
  for (const auto* d : laws) {
    for (const auto& t : expand_tail_to(*d, cutoff, wit)) seed.push_back(t.element);
  }
  return ScaleBasis::close_under_derivative(seed, cutoff, wit);
}

template <class T>
json renewal(Job& job) {
  const int m = order(job);
  DistributionSpec h = distribution(job, "H");
  DistributionSpec k = distribution(job, "K");
  Expr a = io::value_of(io::require(job.in, "a"), job.ctx, "a");
  job.note("a", a.str(), "input");
  MomentVector<T> hm = law_moments<T>(job, h, "H", m);
  MomentVector<T> km = law_moments<T>(job, k, "K", m);
  ScaleBasis basis = joint_scale({&h, &k}, m, job.ctx.symbols);
  TailVector<T> ph = embed(convert_terms<T>(expand_tail_to(h, basis.cutoff(), job.ctx.symbols)), basis);
  TailVector<T> pk = embed(convert_terms<T>(expand_tail_to(k, basis.cutoff(), job.ctx.symbols)), basis);
  T av = FieldTraits<T>::from_expr(a);
  RenewalResult<T> r = renewal_solve(hm, ph, km, pk, av, m);
  if constexpr (FieldTraits<T>::exact) {
    LaplaceCharacter<T> lh = character_from_moments(hm);
    LaplaceCharacter<T> back = compose(LaplaceCharacter<T>::identity(m) - lh.scaled(av), r.f);
    LaplaceCharacter<T> lk = character_from_moments(km);
    for (int j = 0; j <= m; ++j) {
      if (!is_zero(T(back[j] - lk[j]))) throw InvariantError("renewal round trip failed at order " + std::to_string(j));
    }
  }
  return {{"f_character", character_json(r.f, job.ctx)},
          {"g_moments", io::render_list(r.g.mu, job.ctx)},
          {"tail", io::render_tail(r.g_tail, job.ctx)}};
}

template <class T>
json implicit_renewal(Job& job) {
  const int m = order(job);
  DistributionSpec h = distribution(job, "multiplier");
  DistributionSpec k = distribution(job, "forcing");
  MomentVector<T> km = law_moments<T>(job, k, "forcing", m);
  TailVector<T> pk = law_tail<T>(k, m, job.ctx);
  ImplicitRenewalResult<T> r = implicit_renewal_solve(h, km, pk, m);
  if constexpr (FieldTraits<T>::exact) {
    // Residual of the linear system in the scale.
    Matrix<T> d = derivative_matrix<T>(pk.basis);
    MomentVector<T> hm = convert_moments<T>(moments(h, m));
    std::vector<T> lhs = (Matrix<T>::identity(pk.basis.size()) - character_matrix(km, d) * r.mellin).apply(r.p.p);
    std::vector<T> rhs = character_matrix(mellin_character(hm, r.f), d).apply(pk.p);
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      if (!is_zero(T(lhs[i] - rhs[i]))) throw InvariantError("implicit renewal residual is not zero");
    }
  }
  std::vector<T> diag;
  for (std::size_t i = 0; i < r.mellin.rows(); ++i) diag.push_back(r.mellin(i, i));
  return {{"f_moments", io::render_list(r.f.mu, job.ctx)},
          {"tail", io::render_tail(r.p, job.ctx)},
          {"mellin_diagonal", io::render_list(diag, job.ctx)},
          {"contraction", r.contraction ? json(*r.contraction) : json("unverified")},
          {"warnings", r.warnings}};
}

template <class T>
json classify(Job& job, int& code) {
  WeightSequence w = io::parse_weights(io::require(job.in, "weights"), job.ctx);
  job.note("weights", job.in.at("weights"), "input");
  SecondOrderSpec<T> so;
  MomentVector<T> fm;
  if (job.in.contains("second_order")) {
    const json& s = job.in.at("second_order");
    job.note("second_order", s, "input");
    std::vector<T> mu;
    for (const auto& e : io::expr_list(io::require(job.in, "moments"), job.ctx, "moments")) {
      mu.push_back(FieldTraits<T>::from_expr(e));
    }
    fm = MomentVector<T>(std::move(mu));
    so.alpha = io::exponent_of(io::require(s, "alpha"), job.ctx, "second_order.alpha");
    so.rho = io::exponent_of(io::require(s, "rho"), job.ctx, "second_order.rho");
    const json& a = io::require(s, "a");
    if (!(a.is_string() && (a.get<std::string>() == "inf" || a.get<std::string>() == "infinity"))) {
      so.a = FieldTraits<T>::from_expr(io::value_of(a, job.ctx, "second_order.a"));
    }
    so.p = FieldTraits<T>::from_expr(s.contains("p") ? io::value_of(s.at("p"), job.ctx, "second_order.p") : Expr(1));
    so.g_coef = from_long<T>(0);
  } else {
    DistributionSpec d = distribution(job, "distribution");
    fm = law_moments<T>(job, d, "distribution", 2);
    so = second_order_from_tail<T>(d, fm, job.ctx.symbols);
    job.note("second_order", "read from the two leading tail terms", "derived");
  }
  SecondOrderResult<T> r = second_order_classify(so, w, fm);
  const bool stuck = r.status == SecondOrderStatus::higher_order_needed;
  if (stuck) code = indeterminate;
  return {{"regime", r.regime},
          {"xi", r.xi},
          {"alpha", so.alpha.str()},
          {"rho", so.rho.str()},
          {"a", so.a ? io::render(*so.a, job.ctx, &w) : json("inf")},
          {"p", io::render(so.p, job.ctx, &w)},
          {"condition", r.condition},
          {"condition_value", io::render(r.condition_value, job.ctx, &w)},
          {"status", stuck ? "higher order needed" : "classified"},
          {"coefficient", r.coefficient ? io::render(*r.coefficient, job.ctx, &w) : json(nullptr)},
          {"g_order", r.g_order}};
}

// Monte Carlo against partial sums of the float expansion.
inline json validate(Job& job, std::string& csv) {
  Context fctx = job.ctx;
  fctx.mode = Mode::floating;
  Job fjob{job.in, fctx, job.params};
  json out = expand<double>(fjob);
  job.params = fjob.params;
  WeightSequence w = io::parse_weights(io::require(job.in, "weights"), fctx);
  DistributionSpec d = io::parse_distribution(io::require(job.in, "distribution"), fctx);
  const json& mc = io::require(job.in, "mc");
  job.note("mc", mc, "input");
  McConfig cfg;
  cfg.samples = mc.value("samples", cfg.samples);
  cfg.truncation = mc.value("truncation", cfg.truncation);
  cfg.seed = mc.value("seed", cfg.seed);
  cfg.shards = mc.value("shards", cfg.shards);
  cfg.thresholds = io::require(mc, "thresholds").get<std::vector<double>>();
  std::vector<McPoint> pts = mc_tail(w, d, cfg);
  // j-term predictions: partial sums over the first j nonzero basis terms.
  std::vector<std::pair<ScaleElement, double>> terms;
  for (std::size_t i = 0; i < out["coefficients"].size(); ++i) {
    const json& c = out["coefficients"][i]["float"];
    if (c.is_null() || c.get<double>() == 0) continue;
    ScaleElement e{io::exponent_of(out["basis"][i]["a"], fctx, "basis.a"), 0};
    e.b = *io::value_of(out["basis"][i]["b"], fctx, "basis.b").as_rational();
    terms.push_back({e, c.get<double>()});
  }
  std::vector<std::vector<double>> preds(terms.size(), std::vector<double>(pts.size(), 0));
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double t = pts[k].threshold;
    double acc = 0;
    for (std::size_t j = 0; j < terms.size(); ++j) {
      const ScaleElement& e = terms[j].first;
      acc += terms[j].second * std::pow(t, -FieldTraits<double>::from_exponent(e.a)) * std::pow(std::log(t), e.b.get_d());
      preds[j][k] = acc;
    }
  }
  json table = json::array();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    json row{{"threshold", pts[k].threshold}, {"hits", pts[k].hits},        {"estimate", pts[k].estimate},
             {"ci_lo", pts[k].ci_lo},         {"ci_hi", pts[k].ci_hi},      {"truncation_bias_bound", pts[k].bias_bound}};
    json ex = json::array();
    for (const auto& p : preds) ex.push_back(p[k]);
    row["expansions"] = ex;
    json inside = json::array();
    for (const auto& p : preds) inside.push_back(p[k] >= pts[k].ci_lo && p[k] <= pts[k].ci_hi);
    row["inside_ci"] = inside;
    table.push_back(row);
  }
  out["comparison"] = table;
  std::ostringstream os;
  write_mc_csv(os, pts, preds);
  csv = os.str();
  return out;
}

template <class T>
json dispatch(const std::string& command, Job& job, int& code, std::string& csv) {
  if (command == "expand") return expand<T>(job);
  if (command == "stopped-sum") return stopped_sum<T>(job);
  if (command == "queue") return queue<T>(job);
  if (command == "branching") return branching<T>(job);
  if (command == "infdiv") return infdiv<T>(job);
  if (command == "renewal") return renewal<T>(job);
  if (command == "implicit-renewal") return implicit_renewal<T>(job);
  if (command == "classify-2rv") return classify<T>(job, code);
  if (command == "validate") return validate(job, csv);
  throw cas::ParseError("unknown command '" + command + "'");
}

}  // namespace detail

// Runs one job; the report is complete whenever code is ok or indeterminate.
inline Outcome run(const std::string& command, const json& in, Mode mode) {
  Outcome o;
  try {
    if (!in.is_object()) throw cas::ParseError("problem description must be a JSON object");
    detail::Job job{in, io::parse_context(in, mode)};
    json body = mode == Mode::exact ? detail::dispatch<Expr>(command, job, o.code, o.csv)
                                    : detail::dispatch<double>(command, job, o.code, o.csv);
    o.report = {{"command", command}, {"mode", detail::mode_name(mode)}, {"parameters", job.params}};
    if (!job.ctx.symbols.empty()) {
      json s = json::object();
      for (const auto& [k, v] : job.ctx.symbols) s[k] = v.get_str();
      o.report["symbols"] = s;
    }
    o.report["result"] = std::move(body);
  } catch (const cas::ParseError& e) {
    o = {parse_error, nullptr, e.what(), {}};
  } catch (const json::exception& e) {
    o = {parse_error, nullptr, std::string("malformed input: ") + e.what(), {}};
  } catch (const InvariantError& e) {
    o = {internal, nullptr, e.what(), {}};
  } catch (const std::invalid_argument& e) {
    // PreconditionError, TailError, LaplaceError, ScaleError, WeightError
    o = {precondition, nullptr, e.what(), {}};
  } catch (const std::domain_error& e) {
    o = {precondition, nullptr, e.what(), {}};
  } catch (const OracleError& e) {
    o = {precondition, nullptr, e.what(), {}};
  } catch (const std::exception& e) {
    o = {internal, nullptr, e.what(), {}};
  }
  return o;
}

}  // namespace tailcalc::cli

#endif  // TAILCALC_CLI_HPP
