#pragma once

// Weighted Chebyshev problems on [-1,1]: min over monic p of max w(x)|p(x)|.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "errors.hpp"
#include "poly.hpp"
#include "potential.hpp"

namespace widomlab {

/// |x - center|^exponent. A centre on [-1,1] is a genuine zero/pole of the
/// weight; any other centre (real or complex) gives a smooth positive factor.
struct WeightFactor {
  cplx center{0.0};
  double exponent = 0.0;

  bool on_interval() const { return center.imag() == 0.0 && std::abs(center.real()) <= 1.0; }
};

/// w(x) = w0(x) * prod |x - b_k|^{alpha_k} on [-1,1], with 1/M <= w0 <= M.
struct Weight {
  std::function<double(double)> smooth;  // w0; empty means 1
  double bound = 1.0;                    // M
  std::vector<WeightFactor> factors;

  static Weight unit() { return {}; }
  static Weight power(cplx center, double exponent) { return {{}, 1.0, {{center, exponent}}}; }
  static Weight constant(double c) {
    return {[c](double) { return c; }, std::max(c, 1.0 / c), {}};
  }

  Weight& times(cplx center, double exponent) {
    factors.push_back({center, exponent});
    return *this;
  }

  double smooth_at(double x) const { return smooth ? smooth(x) : 1.0; }

  double operator()(double x) const {
    double v = smooth_at(x);
    for (const auto& f : factors) v *= std::pow(std::abs(x - f.center), f.exponent);
    return v;
  }
};

struct Extremum {
  double x = 0.0;
  double value = 0.0;  // signed w(x) p(x)
};

struct MinimaxSolution {
  Poly poly;                      // monic T_n^w in the monomial basis
  double norm = 0.0;              // max over [-1,1] of w |p|
  std::vector<Extremum> extrema;  // alternating reference of the free factor
  double gap = 0.0;               // levelled-error ratio minus one
  int iterations = 0;
  int degree = 0;
  Poly forced = Poly::constant(1.0);  // zero factor forced by negative integer exponents

  // Barycentric representation of the free factor.
  std::vector<double> nodes, values, bary;

  double eval(double x) const {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double d = x - nodes[i];
      if (d == 0.0) return values[i] * forced(x).real();
      const double t = bary[i] / d;
      num += t * values[i];
      den += t;
    }
    const double free = nodes.size() == 1 ? values[0] : num / den;
    return free * forced(x).real();
  }
};

struct ReducedWeight {
  Weight weight;
  Poly forced;
  int removed = 0;
};

/// Strips every factor |x-b|^{-m}, b in [-1,1], m a positive integer: the
/// minimiser then carries the factor (x-b)^m and the remaining problem has
/// nonnegative exponents on the interval.
inline ReducedWeight reduce_negative(const Weight& w) {
  ReducedWeight out{w, Poly::constant(1.0), 0};
  out.weight.factors.clear();
  for (const auto& f : w.factors) {
    if (f.on_interval() && f.exponent < 0.0) {
      const double m = -f.exponent;
      if (std::abs(m - std::round(m)) > 1e-12)
        throw UnsupportedWeight("reduce_negative: non-integer negative exponent on [-1,1]");
      const int k = static_cast<int>(std::lround(m));
      for (int i = 0; i < k; ++i) out.forced = out.forced * Poly{-f.center.real(), 1.0};
      out.removed += k;
      continue;
    }
    out.weight.factors.push_back(f);
  }
  return out;
}

namespace detail {

// Barycentric weights 1/prod 2(x_i - x_j), scaled to stay O(1) on [-1,1].
inline std::vector<double> bary_weights(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> b(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    double p = 1.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) p *= 2.0 * (x[i] - x[j]);
    b[i] = 1.0 / p;
  }
  return b;
}

struct LevelledPoly {
  std::vector<double> nodes, values, bary;
  double level = 0.0;

  double eval(double x) const {
    if (nodes.size() == 1) return values[0];
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double d = x - nodes[i];
      if (d == 0.0) return values[i];
      const double t = bary[i] / d;
      num += t * values[i];
      den += t;
    }
    return num / den;
  }
};

// Monic p of degree n = nodes.size()-1 with w(x_i) p(x_i) = (-1)^{n-i} E.
inline LevelledPoly levelled_solve(const Weight& w, const std::vector<double>& x) {
  LevelledPoly lp;
  lp.nodes = x;
  lp.bary = bary_weights(x);
  const int n = static_cast<int>(x.size()) - 1;
  double s = 0.0;
  std::vector<double> wx(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    wx[i] = w(x[i]);
    s += std::abs(lp.bary[i]) / wx[i];
  }
  // Leading coefficient of the interpolant is 2^n sum(bary_i v_i).
  lp.level = std::ldexp(1.0, -n) / s;
  lp.values.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double sigma = ((n - static_cast<int>(i)) % 2 == 0) ? 1.0 : -1.0;
    lp.values[i] = sigma * lp.level / wx[i];
  }
  return lp;
}

// Ascending real coefficients of the interpolant (degree n).
inline Poly to_monomial(const LevelledPoly& lp) {
  const std::size_t n1 = lp.nodes.size();
  const int n = static_cast<int>(n1) - 1;
  std::vector<double> omega{1.0};
  for (const double xi : lp.nodes) {
    omega.push_back(0.0);
    for (std::size_t k = omega.size() - 1; k > 0; --k) omega[k] = omega[k - 1] - xi * omega[k];
    omega[0] = -xi * omega[0];
  }
  std::vector<double> acc(n1, 0.0);
  const double scale = std::ldexp(1.0, n);
  for (std::size_t i = 0; i < n1; ++i) {
    // omega / (x - x_i) by synthetic division.
    std::vector<double> q(n1, 0.0);
    double carry = omega.back();
    for (std::size_t k = n1; k-- > 0;) {
      q[k] = carry;
      carry = omega[k] + lp.nodes[i] * carry;
    }
    const double f = lp.values[i] * lp.bary[i] * scale;
    for (std::size_t k = 0; k < n1; ++k) acc[k] += f * q[k];
  }
  acc.back() = 1.0;
  return Poly(std::vector<cplx>(acc.begin(), acc.end()));
}

struct Candidate {
  double x, e;
};

// Local maxima of |w p| over [-1,1]: a cosine-spaced scan followed by Brent
// refinement of each bracketed peak.
inline std::vector<Candidate> local_extrema(const Weight& w, const LevelledPoly& lp) {
  const int n = static_cast<int>(lp.nodes.size()) - 1;
  const int k = std::max(2001, 64 * (n + 1));
  std::vector<double> xs(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) xs[static_cast<std::size_t>(j)] = -std::cos(std::numbers::pi * j / (k - 1));
  xs.front() = -1.0;
  xs.back() = 1.0;
  xs.insert(xs.end(), lp.nodes.begin(), lp.nodes.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  auto err = [&](double x) {
    const double v = w(x) * lp.eval(x);
    return std::isfinite(v) ? v : 0.0;
  };
  std::vector<double> es(xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) es[j] = err(xs[j]);

  std::vector<Candidate> out;
  const std::size_t m = xs.size();
  for (std::size_t j = 0; j < m; ++j) {
    const double a = std::abs(es[j]);
    if (a == 0.0) continue;
    const double left = j > 0 ? std::abs(es[j - 1]) : -1.0;
    const double right = j + 1 < m ? std::abs(es[j + 1]) : -1.0;
    if (a < left || a < right) continue;
    if (a == left && j > 0) continue;  // plateau: keep the first point only
    const double lo = xs[j > 0 ? j - 1 : 0];
    const double hi = xs[j + 1 < m ? j + 1 : m - 1];
    auto neg = [&](double x) { return -std::abs(err(x)); };
    const auto r = boost::math::tools::brent_find_minima(neg, lo, hi, 50);
    Candidate c{xs[j], es[j]};
    if (-r.second > a) c = {r.first, err(r.first)};
    out.push_back(c);
  }
  return out;
}

// Merge same-sign neighbours, then trim to n+1 alternating points keeping the
// global maximum.
inline std::optional<std::vector<Candidate>> alternating_reference(std::vector<Candidate> c, int n) {
  std::vector<Candidate> alt;
  for (const auto& p : c) {
    if (!alt.empty() && std::signbit(alt.back().e) == std::signbit(p.e)) {
      if (std::abs(p.e) > std::abs(alt.back().e)) alt.back() = p;
    } else {
      alt.push_back(p);
    }
  }
  if (static_cast<int>(alt.size()) < n + 1) return std::nullopt;
  while (static_cast<int>(alt.size()) > n + 1) {
    if (std::abs(alt.front().e) < std::abs(alt.back().e)) alt.erase(alt.begin());
    else alt.pop_back();
  }
  return alt;
}

// Classical single-point exchange of the global maximiser into the reference.
inline std::vector<double> single_exchange(const std::vector<double>& x, const LevelledPoly& lp, const Candidate& g) {
  std::vector<double> out = x;
  const auto sgn = [](double v) { return !std::signbit(v); };
  const std::size_t n1 = x.size();
  auto val = [&](std::size_t i) { return lp.values[i]; };
  if (g.x < x.front()) {
    if (sgn(g.e) == sgn(val(0))) out[0] = g.x;
    else {
      out.pop_back();
      out.insert(out.begin(), g.x);
    }
  } else if (g.x > x.back()) {
    if (sgn(g.e) == sgn(val(n1 - 1))) out.back() = g.x;
    else {
      out.erase(out.begin());
      out.push_back(g.x);
    }
  } else {
    for (std::size_t i = 0; i + 1 < n1; ++i)
      if (x[i] <= g.x && g.x <= x[i + 1]) {
        if (sgn(g.e) == sgn(val(i))) out[i] = g.x;
        else out[i + 1] = g.x;
        break;
      }
  }
  return out;
}

inline void check_tol(double tol) {
  if (!(tol > 0.0 && tol <= 1e-2)) throw DomainError("tolerance must lie in (0, 1e-2]");
}

} // namespace detail

struct RemezOptions {
  int max_iterations = 200;
};

/// Monic minimiser of max_{[-1,1]} w|p| by multi-point Remez exchange in
/// barycentric form. Converged when the levelled error on the reference is
/// within tol of the global maximum.
inline MinimaxSolution remez_weighted(const Weight& w, int n, double tol, const RemezOptions& opt = {}) {
  detail::check_tol(tol);
  if (n < 0) throw DomainError("remez_weighted: negative degree");
  for (const auto& f : w.factors)
    if (f.on_interval() && f.exponent < 0.0 && std::abs(f.exponent - std::round(f.exponent)) > 1e-12)
      throw UnsupportedWeight("remez_weighted: non-integer negative exponent on [-1,1]");

  const ReducedWeight red = reduce_negative(w);
  const int free_degree = n - red.removed;
  if (free_degree < 0) throw DomainError("remez_weighted: degree below the forced zero order");
  const Weight& ww = red.weight;

  // Chebyshev extreme points, nudged off zeros of the weight.
  std::vector<double> x(static_cast<std::size_t>(free_degree) + 1);
  if (free_degree == 0) x[0] = 0.0;
  for (int i = 0; i <= free_degree && free_degree > 0; ++i)
    x[static_cast<std::size_t>(i)] = -std::cos(std::numbers::pi * i / free_degree);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double wi = ww(x[i]);
    if (wi > 0.0 && std::isfinite(wi)) continue;
    const double h = x.size() > 1 ? (i + 1 < x.size() ? x[i + 1] - x[i] : x[i] - x[i - 1]) : 0.5;
    x[i] += (i + 1 < x.size() ? 0.5 : -0.5) * h;
  }

  MinimaxSolution sol;
  sol.degree = n;
  sol.forced = red.forced;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    const auto lp = detail::levelled_solve(ww, x);
    const auto cands = detail::local_extrema(ww, lp);
    if (cands.empty()) throw NonConvergence("remez_weighted: no extrema found");
    const auto gmax = *std::max_element(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
      return std::abs(a.e) < std::abs(b.e);
    });
    const double norm = std::abs(gmax.e);
    auto ref = detail::alternating_reference(cands, free_degree);

    std::vector<double> next;
    double levelled_min = 0.0;
    if (ref) {
      levelled_min = std::abs(ref->front().e);
      for (const auto& c : *ref) levelled_min = std::min(levelled_min, std::abs(c.e));
      for (const auto& c : *ref) next.push_back(c.x);
    } else {
      next = detail::single_exchange(x, lp, gmax);
    }
    const double gap = ref ? norm / levelled_min - 1.0 : std::numeric_limits<double>::infinity();

    if (ref && gap <= tol) {
      sol.norm = norm;
      sol.gap = gap;
      sol.iterations = it;
      sol.nodes = lp.nodes;
      sol.values = lp.values;
      sol.bary = lp.bary;
      for (const auto& c : *ref) sol.extrema.push_back({c.x, c.e});
      sol.poly = detail::to_monomial(lp) * red.forced;
      return sol;
    }
    // Guard against a stalled exchange (identical reference twice).
    if (next == x) {
      if (ref && gap <= 10.0 * tol) {
        sol.norm = norm;
        sol.gap = gap;
        sol.iterations = it;
        sol.nodes = lp.nodes;
        sol.values = lp.values;
        sol.bary = lp.bary;
        for (const auto& c : *ref) sol.extrema.push_back({c.x, c.e});
        sol.poly = detail::to_monomial(lp) * red.forced;
        return sol;
      }
      throw NonConvergence("remez_weighted: exchange stalled with gap " + std::to_string(gap));
    }
    x = std::move(next);
  }
  throw NonConvergence("remez_weighted: iteration budget exhausted");
}

/// Checks the equioscillation certificate of a solution: free_degree + 1
/// alternating extrema, all within the gap of the norm.
inline bool audit_equioscillation(const MinimaxSolution& s, std::string* why = nullptr) {
  auto fail = [why](std::string m) {
    if (why) *why = std::move(m);
    return false;
  };
  const int free_degree = s.degree - s.forced.degree();
  if (static_cast<int>(s.extrema.size()) != free_degree + 1) return fail("wrong extrema count");
  for (std::size_t i = 1; i < s.extrema.size(); ++i) {
    if (!(s.extrema[i].x > s.extrema[i - 1].x)) return fail("extrema not ordered");
    if (std::signbit(s.extrema[i].value) == std::signbit(s.extrema[i - 1].value)) return fail("signs do not alternate");
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& e : s.extrema) {
    lo = std::min(lo, std::abs(e.value));
    hi = std::max(hi, std::abs(e.value));
  }
  if (hi > s.norm * (1.0 + 1e-12)) return fail("extremum above norm");
  if ((hi - lo) / s.norm > s.gap + 1e-12) return fail("levelled error exceeds gap");
  if (lo < s.norm * (1.0 - s.gap) * (1.0 - 1e-12)) return fail("extremum below norm*(1-gap)");
  return true;
}

/// (1/pi) int_{-1}^{1} log w0(x) / sqrt(1-x^2) dx by the midpoint rule in
/// x = cos(theta), 2048 nodes.
inline double smooth_log_mean(const Weight& w) {
  if (!w.smooth) return 0.0;
  constexpr int nodes = 2048;
  double s = 0.0;
  for (int j = 0; j < nodes; ++j) s += std::log(w.smooth(std::cos(std::numbers::pi * (j + 0.5) / nodes)));
  return s / nodes;
}

/// Bernstein's asymptotic value 2^{1-n} exp{(1/pi) int log w / sqrt(1-x^2)}.
inline double bernstein_predict(const Weight& w, int n) {
  double log_mean = smooth_log_mean(w);
  for (const auto& f : w.factors) log_mean += f.exponent * log_potential_interval(f.center);
  return std::ldexp(std::exp(log_mean), 1 - n);
}

// ---------------------------------------------------------------------------
// Achieser's weights w(x) = prod_{k=1}^{2m} (1 - x/a_k)^{-1/2}, a_k outside
// [-1,1] or infinite.

namespace detail {

inline std::vector<double> padded_poles(std::vector<double> a) {
  for (const double ak : a)
    if (!std::isinf(ak) && std::abs(ak) <= 1.0) throw DomainError("achieser: pole inside [-1,1]");
  if (a.size() % 2 == 1) a.push_back(std::numeric_limits<double>::infinity());
  return a;
}

} // namespace detail

inline Weight achieser_weight(const std::vector<double>& poles) {
  Weight w;
  double c = 1.0;
  for (const double a : detail::padded_poles(poles)) {
    if (std::isinf(a)) continue;
    c *= std::sqrt(std::abs(a));
    w.factors.push_back({cplx{a}, -0.5});
  }
  w.smooth = [c](double) { return c; };
  w.bound = std::max(c, 1.0 / c);
  return w;
}

inline double achieser_norm(const std::vector<double>& poles, int n) {
  const auto a = detail::padded_poles(poles);
  const int m = static_cast<int>(a.size()) / 2;
  if (n <= m) throw DomainError("achieser_norm: need n > m");
  double s = 0.0;
  for (const double ak : a)
    if (!std::isinf(ak)) s -= 0.5 * (log_potential_interval(ak) - std::log(std::abs(ak)));
  return std::ldexp(std::exp(s), 1 - n);
}

/// w(x) T_n^w(x) from the two-term closed form on the unit circle.
inline double achieser_eval(const std::vector<double>& poles, int n, double x) {
  const auto a = detail::padded_poles(poles);
  const int m = static_cast<int>(a.size()) / 2;
  if (n <= m) throw DomainError("achieser_eval: need n > m");
  if (x < -1.0 || x > 1.0) throw DomainError("achieser_eval: x outside [-1,1]");
  const cplx z{x, std::sqrt(std::max(0.0, 1.0 - x * x))};
  cplx f = std::pow(z, -n);
  double scale = std::ldexp(1.0, -n);
  for (const double ak : a) {
    const double rho = std::isinf(ak) ? 0.0 : ak - std::copysign(std::sqrt(ak * ak - 1.0), ak);
    scale *= std::sqrt(1.0 + rho * rho);
    f *= std::sqrt(1.0 - z * rho) / std::sqrt(1.0 - rho / z);
  }
  return scale * (f + 1.0 / f).real();
}

} // namespace widomlab
