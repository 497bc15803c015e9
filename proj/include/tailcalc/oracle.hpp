#ifndef TAILCALC_ORACLE_HPP
#define TAILCALC_ORACLE_HPP

// Ground truth independent of the character algebra: Monte Carlo tails, brute-force moments,
// grid convolution.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "tailcalc/tails.hpp"
#include "tailcalc/weights.hpp"

namespace tailcalc {

struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Philox4x32-10 counter-based generator (Salmon et al. constants).
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block generate(Block ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

  // Uniform in (0,1) on the midpoints of a 2^-52 grid: 53 bits would round the top cell up to 1.
  static double to_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 12;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
  }
};

// Draws X from two independent uniforms.
using Sampler = std::function<double(double u1, double u2)>;

inline Sampler make_sampler(const DistributionSpec& spec) {
  auto p = [&](const char* name) { return numeric_param(spec, name); };
  switch (spec.family) {
    case Family::pareto: {
      const double inv = -1.0 / p("alpha");
      return [inv](double u, double) { return std::pow(u, inv) - 1; };
    }
    case Family::burr: {
      // Fbar = (1 + t^tau / beta)^{-gamma}
      const double beta = p("beta"), tau = p("tau"), gam = p("gamma");
      return [=](double u, double) { return std::pow(beta * (std::pow(u, -1.0 / gam) - 1), 1.0 / tau); };
    }
    case Family::frechet: {
      const double al = p("alpha");
      return [al](double u, double) { return std::pow(-std::log1p(-u), -1.0 / al); };
    }
    case Family::exponential: {
      const double th = p("theta");
      return [th](double u, double) { return -th * std::log(u); };
    }
    case Family::student: {
      boost::math::students_t dist(p("alpha"));
      return [dist](double u, double) { return boost::math::quantile(boost::math::complement(dist, u)); };
    }
    case Family::log_gamma: {
      // log X ~ Gamma(lambda, rate alpha)
      const double lam = p("lambda"), al = p("alpha");
      return [=](double u, double) { return std::exp(boost::math::gamma_q_inv(lam, u) / al); };
    }
    case Family::hall_weissman: {
      // Mixture of t^{-alpha} and t^{-beta} on (1, inf) with weights a, b.
      const double a = p("a"), b = p("b"), al = p("alpha"), be = p("beta");
      const double pa = a / (a + b);
      return [=](double u1, double u2) { return std::pow(u2, -1.0 / (u1 < pa ? al : be)); };
    }
    case Family::point_mass: {
      const double at = p("at");
      return [at](double, double) { return at; };
    }
    case Family::power_series:
      break;
  }
  throw OracleError("no sampler for " + family_name(spec.family));
}

struct McConfig {
  std::uint64_t samples = 1'000'000;
  std::size_t truncation = 40;  // terms kept from infinite weight families
  std::vector<double> thresholds;
  std::uint64_t seed = 1;
  unsigned shards = 64;
  double bias_delta = 0.01;  // share of t granted to the truncated remainder in the bias estimate
};

struct McPoint {
  double threshold = 0;
  std::uint64_t hits = 0;
  double estimate = 0;
  double ci_lo = 0;
  double ci_hi = 0;
  double bias_bound = 0;  // sum_{i>n} Fbar(delta t / |c_i|); zero for finite weights
};

// Clopper-Pearson interval at the given confidence.
inline std::pair<double, double> clopper_pearson(std::uint64_t k, std::uint64_t n, double level = 0.99) {
  if (n == 0) throw OracleError("no samples");
  const double a = (1 - level) / 2;
  const double kd = static_cast<double>(k), nd = static_cast<double>(n);
  double lo = k == 0 ? 0.0 : boost::math::ibeta_inv(kd, nd - kd + 1, a);
  double hi = k == n ? 1.0 : boost::math::ibeta_inv(kd + 1, nd - kd, 1 - a);
  return {lo, hi};
}

inline unsigned oracle_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("TAILCALC_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return n;
}

namespace detail {

// Each uniform is keyed by (seed, shard, sample index, draw index), so the thread layout never matters.
inline void run_shard(const std::vector<double>& c, const Sampler& draw, const std::vector<double>& thresholds,
                      std::uint64_t seed, unsigned shard, std::uint64_t begin, std::uint64_t end,
                      std::vector<std::uint64_t>& hits) {
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  hits.assign(thresholds.size(), 0);
  for (std::uint64_t s = begin; s < end; ++s) {
    double sum = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const Philox4x32::Block ctr{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32), shard,
                                  static_cast<std::uint32_t>(i)};
      const auto r = Philox4x32::generate(ctr, key);
      sum += c[i] * draw(Philox4x32::to_unit(r[0], r[1]), Philox4x32::to_unit(r[2], r[3]));
    }
    for (std::size_t k = 0; k < thresholds.size() && sum > thresholds[k]; ++k) ++hits[k];
  }
}

}  // namespace detail

// Estimates P(sum c_i X_i > t) at each threshold with 99% Clopper-Pearson intervals.
inline std::vector<McPoint> mc_tail(const WeightSequence& w, const DistributionSpec& spec, const McConfig& cfg) {
  if (cfg.samples == 0 || cfg.shards == 0) throw OracleError("empty Monte Carlo configuration");
  if (!std::is_sorted(cfg.thresholds.begin(), cfg.thresholds.end())) throw OracleError("thresholds must be ascending");
  const Sampler draw = make_sampler(spec);
  const std::vector<double> c = numeric_weights(w, cfg.truncation);
  std::vector<std::vector<std::uint64_t>> shard_hits(cfg.shards);
  const unsigned threads = std::min(oracle_threads(), cfg.shards);
  auto work = [&](unsigned first) {
    for (unsigned sh = first; sh < cfg.shards; sh += threads) {
      const std::uint64_t begin = cfg.samples * sh / cfg.shards, end = cfg.samples * (sh + 1) / cfg.shards;
      detail::run_shard(c, draw, cfg.thresholds, cfg.seed, sh, begin, end, shard_hits[sh]);
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  std::vector<McPoint> out;
  for (std::size_t k = 0; k < cfg.thresholds.size(); ++k) {
    McPoint pt;
    pt.threshold = cfg.thresholds[k];
    for (unsigned sh = 0; sh < cfg.shards; ++sh) pt.hits += shard_hits[sh][k];
    pt.estimate = static_cast<double>(pt.hits) / static_cast<double>(cfg.samples);
    std::tie(pt.ci_lo, pt.ci_hi) = clopper_pearson(pt.hits, cfg.samples);
    if (w.kind == WeightSequence::Kind::ar1) {
      const double a = std::fabs(FieldTraits<double>::from_expr(w.a));
      double ai = std::pow(a, static_cast<double>(cfg.truncation));
      for (std::size_t i = cfg.truncation; i < cfg.truncation + 4096 && ai > 0; ++i, ai *= a) {
        pt.bias_bound += survival(spec, cfg.bias_delta * pt.threshold / ai);
      }
    }
    out.push_back(pt);
  }
  return out;
}

// CSV with one column per supplied expansion (1-term, 2-term, ...).
inline void write_mc_csv(std::ostream& os, const std::vector<McPoint>& pts,
                         const std::vector<std::vector<double>>& expansions) {
  os << "threshold,estimate,ci_lo,ci_hi";
  for (std::size_t j = 0; j < expansions.size(); ++j) os << ",expansion_" << j + 1 << "term";
  os << "\n";
  os.precision(17);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    os << pts[k].threshold << ',' << pts[k].estimate << ',' << pts[k].ci_lo << ',' << pts[k].ci_hi;
    for (const auto& e : expansions) os << ',' << e.at(k);
    os << "\n";
  }
}

// E (sum c_i X_i)^j by expanding the multinomial over independent factors.
template <class T>
T brute_moments(const std::vector<T>& c, const MomentVector<T>& fm, int j) {
  if (c.size() > 6 || j > 6) throw OracleError("brute_moments is limited to n <= 6, j <= 6");
  if (fm.order() < j) throw OracleError("moment vector too short");
  const std::size_t n = c.size();
  std::vector<int> k(n, 0);
  T total = from_long<T>(0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i + 1 == n || n == 0) {
      if (n == 0) {
        if (left == 0) total = total + from_long<T>(1);
        return;
      }
      k[i] = left;
      T term = factorial_in<T>(j);
      for (std::size_t r = 0; r < n; ++r) {
        term = term / factorial_in<T>(k[r]) * power(c[r], k[r]) * fm.mu[k[r]];
      }
      total = total + term;
      return;
    }
    for (int v = 0; v <= left; ++v) {
      k[i] = v;
      rec(i + 1, left - v);
    }
  };
  rec(0, j);
  return total;
}

// Tail of a nonnegative law on the grid t_k = k h.
struct TailGrid {
  double h = 0;
  std::vector<double> tail;
};

inline TailGrid tail_grid(const DistributionSpec& spec, double h, std::size_t points) {
  TailGrid g{h, {}};
  for (std::size_t k = 0; k < points; ++k) g.tail.push_back(survival(spec, h * static_cast<double>(k)));
  return g;
}

// P(X + Y > t_k) = Fbar_X(t_k) + Fbar_Y(t_k) F_X(0) + int_(0, t_k] Fbar_Y(t_k - s) dF_X(s), Stieltjes trapezoid; O(h^2).
inline double convolved_tail_at(const TailGrid& x, const TailGrid& y, std::size_t k) {
  if (x.h != y.h || x.tail.size() != y.tail.size()) throw OracleError("grid mismatch");
  if (k >= x.tail.size()) throw OracleError("grid index out of range");
  double s = x.tail[k] + y.tail[k] * (1 - x.tail[0]);
  for (std::size_t i = 0; i < k; ++i) {
    const double dF = x.tail[i] - x.tail[i + 1];
    s += 0.5 * (y.tail[k - i] + y.tail[k - i - 1]) * dF;
  }
  return s;
}

inline TailGrid numeric_convolution(const TailGrid& x, const TailGrid& y) {
  TailGrid out{x.h, {}};
  for (std::size_t k = 0; k < x.tail.size(); ++k) out.tail.push_back(convolved_tail_at(x, y, k));
  return out;
}

}  // namespace tailcalc

#endif  // TAILCALC_ORACLE_HPP
