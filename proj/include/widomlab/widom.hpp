#pragma once

// Widom factors: sup-norm series over the exact, Remez and discrete routes,
// their closed-form limits, and the L2 factors of stars via Gamma ratios.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "cheb_complex.hpp"
#include "errors.hpp"
#include "potential.hpp"
#include "sets.hpp"

namespace widomlab {

// ---------------------------------------------------------------------------
// Log-gamma.

namespace detail {

// Stirling remainder sum B_{2k} / (2k (2k-1) x^{2k-1}), accurate to 1e-17 for x >= 20.
inline double stirling_tail(double x) {
  static constexpr double b[] = {1.0 / 12.0,          -1.0 / 360.0,      1.0 / 1260.0,        -1.0 / 1680.0,
                                 1.0 / 1188.0,        -691.0 / 360360.0, 1.0 / 156.0,         -3617.0 / 122400.0};
  const double inv = 1.0 / x, inv2 = inv * inv;
  double acc = 0.0, p = inv;
  for (const double c : b) {
    acc += c * p;
    p *= inv2;
  }
  return acc;
}

constexpr double kStirlingMin = 20.0;

} // namespace detail

/// log Gamma(x) for x > 0.
inline double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: need x > 0");
  double shift = 0.0;
  while (x < detail::kStirlingMin) {
    shift += std::log(x);
    x += 1.0;
  }
  return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) + detail::stirling_tail(x) - shift;
}

/// log Gamma(u) - log Gamma(v) without cancellation for large u, v.
inline double log_gamma_diff(double u, double v) {
  if (!(u > 0.0 && v > 0.0)) throw DomainError("log_gamma_diff: need u, v > 0");
  const double d = u - v;
  double shift = 0.0;
  while (std::min(u, v) < detail::kStirlingMin) {
    shift += std::log1p(d / v);  // log u - log v
    u += 1.0;
    v += 1.0;
  }
  const double main = (u - 0.5) * std::log1p(d / v) + d * std::log(v) - d;
  return main + (detail::stirling_tail(u) - detail::stirling_tail(v)) - shift;
}

/// gamma_n(s) = 2 Gamma(2n+1) Gamma(2n+2s) / ((2n+s) Gamma(2n+s)^2), the squared
/// L2 Widom factor of E_m at degree 2nm + l with s = l/m.
inline double gamma_ratio(int n, double s) {
  if (n < 1 || s < 0.0) throw DomainError("gamma_ratio: need n >= 1, s >= 0");
  const double a = 2.0 * n;
  const double lg = log_gamma_diff(a + 1.0, a + s) + log_gamma_diff(a + 2.0 * s, a + s);
  return 2.0 * std::exp(lg) / (a + s);
}

/// gamma_{n+1}(s) / gamma_n(s).
inline double gamma_step(int n, double s) {
  if (n < 1) throw DomainError("gamma_step: need n >= 1");
  const double a = 2.0 * n;
  const double num = (a + 1.0) * (a + 2.0) * (a + 2.0 * s) * (a + 2.0 * s + 1.0);
  const double den = (a + s) * (a + s + 1.0) * (a + s + 1.0) * (a + s + 2.0);
  return num / den;
}

/// Squared L2(mu_{E_m}) norm of the monic orthogonal polynomial of degree
/// 2nm + l, from the monic Jacobi recurrence for (alpha, beta) = (-1/2, s - 1/2)
/// carried to [0, 4]: (1/pi) 4^n 2^s mu_0 prod beta_k.
inline double ortho_norm_direct(int m, int degree) {
  if (m < 1 || degree < 0) throw DomainError("ortho_norm_direct: need m >= 1, degree >= 0");
  const int n = degree / (2 * m);
  const double s = static_cast<double>(degree % (2 * m)) / m;
  const double al = -0.5, be = s - 0.5, ab = al + be;
  // mu_0 = int (1-x)^alpha (1+x)^beta dx = 2^s Gamma(1/2) Gamma(s+1/2) / Gamma(s+1).
  double log_norm = s * std::numbers::ln2 + 0.5 * std::log(std::numbers::pi) + log_gamma_diff(s + 0.5, s + 1.0);
  for (int k = 1; k <= n; ++k) {
    double bk;
    if (k == 1) {
      bk = 4.0 * (1.0 + al) * (1.0 + be) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      const double t = 2.0 * k + ab;
      bk = 4.0 * k * (k + al) * (k + be) * (k + ab) / (t * t * (t + 1.0) * (t - 1.0));
    }
    log_norm += std::log(bk);
  }
  log_norm += 2.0 * n * std::numbers::ln2 + s * std::numbers::ln2 - std::log(std::numbers::pi);
  return std::exp(log_norm);
}

// ---------------------------------------------------------------------------
// Widom records.

enum class Flavor { Sup, L2Squared };

struct WidomRecord {
  int degree = 0;
  double norm = std::numeric_limits<double>::quiet_NaN();
  double capacity = std::numeric_limits<double>::quiet_NaN();
  double factor = std::numeric_limits<double>::quiet_NaN();
  Flavor flavor = Flavor::Sup;
  Route route = Route::Error;
  double gap = std::numeric_limits<double>::quiet_NaN();
  std::string error;  // nonempty iff route == Error

  bool ok() const { return route != Route::Error; }
};

enum class RoutePolicy { Auto, Discrete };

struct SeriesOptions {
  RoutePolicy policy = RoutePolicy::Auto;
  int per_edge = 0;          // 0: default_per_edge per degree
  int per_edge_factor = 60;  // used by the default
  int threads = 1;
  std::uint64_t seed = 0;
};

namespace detail {

inline WidomRecord discrete_record(const SetSpec& spec, int degree, double tol, const SeriesOptions& opt,
                                   double cap) {
  const int pe = opt.per_edge > 0 ? opt.per_edge : default_per_edge(spec, degree, opt.per_edge_factor);
  const DiscreteSet set = discretize(spec, pe, Clustering::Arcsine, opt.seed);
  const auto sol = solve_discrete_minimax(set, degree, tol);
  WidomRecord r;
  r.degree = degree;
  r.norm = sol.norm;
  r.capacity = cap;
  r.factor = sol.norm / std::pow(cap, degree);
  r.route = Route::Discrete;
  r.gap = sol.gap;
  return r;
}

inline WidomRecord widom_record(const SetSpec& spec, int degree, double tol, const SeriesOptions& opt) {
  if (degree < 1) throw DomainError("widom: degree must be >= 1");
  const double cap = capacity(spec).value;
  auto from = [&](const ReducedNorm& rn) {
    WidomRecord r;
    r.degree = degree;
    r.norm = rn.norm;
    r.capacity = cap;
    r.factor = rn.norm / std::pow(cap, degree);
    r.route = rn.route;
    r.gap = rn.gap;
    return r;
  };
  if (opt.policy == RoutePolicy::Discrete) return discrete_record(spec, degree, tol, opt, cap);
  if (const auto* iv = std::get_if<Interval>(&spec)) {
    const double norm = 2.0 * std::pow((iv->b - iv->a) / 4.0, degree);
    return from({norm, std::nullopt, Route::Exact, 0.0, std::nullopt});
  }
  if (const auto* st = std::get_if<StarEven>(&spec)) return from(star_norm(st->m, degree, tol));
  if (const auto* so = std::get_if<StarOdd>(&spec)) return from(star_odd_norm(so->m, degree, tol));
  if (const auto* q = std::get_if<QuadraticPreimage>(&spec)) return from(quadratic_norm(*q, degree, tol));
  return discrete_record(spec, degree, tol, opt, cap);
}

} // namespace detail

/// Sup-norm Widom factors, one record per degree in input order. Failures are
/// recorded per degree (route Error) instead of aborting the series.
inline std::vector<WidomRecord> widom_inf_series(const SetSpec& spec, const std::vector<int>& degrees, double tol,
                                                 const SeriesOptions& opt = {}) {
  if (degrees.empty()) throw DomainError("widom_inf_series: no degrees");
  validate(spec);
  std::vector<WidomRecord> out(degrees.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < degrees.size(); i = next++) {
      try {
        out[i] = detail::widom_record(spec, degrees[i], tol, opt);
      } catch (const std::exception& e) {
        out[i] = WidomRecord{};
        out[i].degree = degrees[i];
        out[i].error = e.what();
        if (out[i].error.empty()) out[i].error = "unknown error";
      }
    }
  };
  const int threads = std::clamp(opt.threads, 1, static_cast<int>(degrees.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return out;
}

/// Squared L2 Widom factors of E_m (capacity 1), W_{d,2}^2 = gamma_n(l/m).
inline std::vector<WidomRecord> widom_l2_series(int m, const std::vector<int>& degrees) {
  if (m < 1) throw DomainError("widom_l2_series: need m >= 1");
  std::vector<WidomRecord> out;
  for (const int d : degrees) {
    WidomRecord r;
    r.degree = d;
    r.capacity = 1.0;
    r.flavor = Flavor::L2Squared;
    r.gap = 0.0;
    const int n = d / (2 * m);
    const double s = static_cast<double>(d % (2 * m)) / m;
    r.norm = n >= 1 ? gamma_ratio(n, s) : ortho_norm_direct(m, d);
    r.route = Route::GammaFormula;
    r.factor = r.norm;
    out.push_back(r);
  }
  return out;
}

struct WidomLimit {
  double even = 0.0;  // limit along even degrees (or the full sequence)
  double odd = 0.0;   // limit along odd degrees
  bool split = false;  // even and odd limits are stated separately
  bool conjectural = false;
};

/// Closed-form limits of the sup-norm Widom factors.
inline WidomLimit widom_limit(const SetSpec& spec) {
  validate(spec);
  if (std::holds_alternative<Interval>(spec) || std::holds_alternative<StarEven>(spec) ||
      std::holds_alternative<StarOdd>(spec))
    return {2.0, 2.0, false, false};
  if (const auto* arc = std::get_if<CircularArc>(&spec)) {
    const double c = std::cos(arc->alpha / 4.0);
    return {2.0 * c * c, 2.0 * c * c, false, false};
  }
  if (const auto* q = std::get_if<QuadraticPreimage>(&spec)) {
    const double odd = std::sqrt(2.0 * std::abs(joukowski_exterior(q->c())));
    return {2.0, odd, true, false};
  }
  if (std::holds_alternative<PolyPreimage>(spec)) return {2.0, 2.0, false, true};
  throw Unsupported("widom_limit: no closed-form limit for this set");
}

} // namespace widomlab
