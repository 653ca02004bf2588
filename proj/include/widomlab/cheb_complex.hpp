#pragma once

// Chebyshev polynomials of compact sets in the plane: a discrete complex
// minimax solver and the exact reductions (composition, stars, quadratic
// preimages) that avoid discretisation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cheb_real.hpp"
#include "errors.hpp"
#include "poly.hpp"
#include "sets.hpp"

namespace widomlab {

enum class Route { Exact, Remez, Discrete, GammaFormula, Quadrature, Error };

inline const char* route_name(Route r) {
  switch (r) {
    case Route::Exact: return "exact";
    case Route::Remez: return "remez";
    case Route::Discrete: return "discrete";
    case Route::GammaFormula: return "gamma-formula";
    case Route::Quadrature: return "quadrature";
    case Route::Error: return "error";
  }
  return "error";
}

struct ActivePoint {
  cplx z;
  double modulus = 0.0;
};

struct DualWeight {
  std::size_t index = 0;
  double lambda = 0.0;
};

struct ComplexMinimaxSolution {
  Poly poly;                            // monic; coefficients lose accuracy at high degree
  double norm = 0.0;                    // max over the set of |p|
  double lower_bound = 0.0;             // certified by the dual witness
  double gap = 0.0;                     // norm / lower_bound - 1
  std::vector<ActivePoint> active_points;
  std::vector<DualWeight> dual_witness;  // sums to 1
  std::vector<cplx> values;              // p at every point of the set, from the orthogonal basis
  int iterations = 0;                    // Newton steps
};

struct DiscreteOptions {
  int max_newton = 4000;
  double tau_growth = 10.0;
};

namespace detail {

// Discrete orthonormal basis q_0..q_n of the point set (RMS inner product)
// built by Arnoldi with reorthogonalisation. q_k = (z^k + ...) / prod h_i.
struct ArnoldiBasis {
  Eigen::MatrixXcd q;           // N x (n+1) values
  std::vector<double> h;        // subdiagonal, h[k] for k = 1..n (h[0] unused)
  std::vector<std::vector<cplx>> coeffs;  // monomial coefficients of q_k
  double log_scale = 0.0;       // sum log h_k
};

inline ArnoldiBasis arnoldi(const std::vector<cplx>& z, int n) {
  const auto N = static_cast<Eigen::Index>(z.size());
  ArnoldiBasis b;
  b.q.resize(N, n + 1);
  b.q.col(0).setOnes();
  b.h.assign(static_cast<std::size_t>(n) + 1, 0.0);
  b.coeffs.push_back({cplx{1.0}});
  Eigen::VectorXcd zz(N);
  for (Eigen::Index j = 0; j < N; ++j) zz[j] = z[static_cast<std::size_t>(j)];
  const double inv_n = 1.0 / static_cast<double>(N);
  for (int k = 1; k <= n; ++k) {
    Eigen::VectorXcd v = zz.cwiseProduct(b.q.col(k - 1));
    std::vector<cplx> proj(static_cast<std::size_t>(k), cplx{0.0});
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i < k; ++i) {
        const cplx c = b.q.col(i).dot(v) * inv_n;  // conj(q_i) . v
        v -= c * b.q.col(i);
        proj[static_cast<std::size_t>(i)] += c;
      }
    const double hk = std::sqrt(v.squaredNorm() * inv_n);
    if (!(hk > 1e-300)) throw DegenerateSet("solve_discrete_minimax: basis collapsed");
    b.h[static_cast<std::size_t>(k)] = hk;
    b.q.col(k) = v / hk;
    b.log_scale += std::log(hk);
    std::vector<cplx> c(static_cast<std::size_t>(k) + 1, cplx{0.0});
    const auto& prev = b.coeffs.back();
    for (std::size_t i = 0; i < prev.size(); ++i) c[i + 1] += prev[i];
    for (int i = 0; i < k; ++i)
      for (std::size_t t = 0; t < b.coeffs[static_cast<std::size_t>(i)].size(); ++t)
        c[t] -= proj[static_cast<std::size_t>(i)] * b.coeffs[static_cast<std::size_t>(i)][t];
    for (auto& ci : c) ci /= hk;
    b.coeffs.push_back(std::move(c));
  }
  return b;
}

inline std::size_t count_distinct(std::vector<cplx> z) {
  std::sort(z.begin(), z.end(), [](cplx a, cplx b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); });
  return static_cast<std::size_t>(std::unique(z.begin(), z.end()) - z.begin());
}

} // namespace detail

/// Monic degree-n minimiser of max_j |p(z_j)|.
///
/// Log-barrier interior-point method on the second-order-cone epigraph
/// |r_j| <= t, with r = q_n + sum_{k<n} u_k q_k in a discrete orthonormal
/// basis. At each centred point the multipliers lambda_j = 2t/(tau s_j) sum to
/// one and the lambda-weighted least-squares residual is a lower bound for the
/// discrete minimax value. The returned polynomial is the better of the barrier
/// iterate and the weighted least-squares minimiser (equal at exact centring).
inline ComplexMinimaxSolution solve_discrete_minimax(const DiscreteSet& set, int n, double tol,
                                                     const DiscreteOptions& opt = {}) {
  detail::check_tol(tol);
  if (n < 0) throw DomainError("solve_discrete_minimax: negative degree");
  const std::vector<cplx>& z = set.points;
  if (detail::count_distinct(z) < static_cast<std::size_t>(n) + 1)
    throw DegenerateSet("solve_discrete_minimax: fewer than n+1 distinct points");

  ComplexMinimaxSolution sol;
  const auto N = static_cast<Eigen::Index>(z.size());
  if (n == 0) {
    sol.poly = Poly::constant(1.0);
    sol.norm = sol.lower_bound = 1.0;
    sol.values.assign(z.size(), cplx{1.0});
    for (std::size_t j = 0; j < z.size(); ++j) {
      sol.active_points.push_back({z[j], 1.0});
      sol.dual_witness.push_back({j, 1.0 / static_cast<double>(N)});
    }
    return sol;
  }

  const auto basis = detail::arnoldi(z, n);
  const double scale = std::exp(basis.log_scale);
  const Eigen::MatrixXcd A = basis.q.leftCols(n);
  const Eigen::VectorXcd f = basis.q.col(n);
  const Eigen::Index dim = 2 * n + 1;  // (Re u, Im u, t)

  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
  auto residual = [&](const Eigen::VectorXd& v) -> Eigen::VectorXcd {
    Eigen::VectorXcd u(n);
    for (int k = 0; k < n; ++k) u[k] = cplx{v[k], v[n + k]};
    return f + A * u;
  };
  x[2 * n] = 1.05 * f.cwiseAbs().maxCoeff();
  double tau = 2.0 * static_cast<double>(N) / x[2 * n];

  auto barrier = [&](const Eigen::VectorXd& v, double tt, bool& feasible) {
    const Eigen::VectorXcd r = residual(v);
    const double t = v[2 * n];
    double val = tt * t;
    feasible = t > 0.0;
    for (Eigen::Index j = 0; j < N && feasible; ++j) {
      const double s = t * t - std::norm(r[j]);
      if (!(s > 0.0)) feasible = false;
      else val -= std::log(s);
    }
    return val;
  };

  Eigen::VectorXd lambda(N), best_lambda(N);
  int newton = 0;
  double best_ub = std::numeric_limits<double>::infinity();
  double best_lb = 0.0;
  Eigen::VectorXcd best_r;
  std::vector<cplx> best_u;
  int stale = 0;
  for (int stage = 0; stage < 60; ++stage) {
    // Centre for the current tau.
    for (int it = 0; it < 200; ++it) {
      if (++newton > opt.max_newton) throw NonConvergence("solve_discrete_minimax: Newton budget exhausted");
      const Eigen::VectorXcd r = residual(x);
      const double t = x[2 * n];
      Eigen::VectorXd grad = Eigen::VectorXd::Zero(dim);
      grad[2 * n] = tau;
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
      Eigen::VectorXd g(dim);
      for (Eigen::Index j = 0; j < N; ++j) {
        const double s = t * t - std::norm(r[j]);
        // g = grad of s: d s / d Re u_k = -2 Re(conj(r) a_k), d / d Im u_k = -2 Im(conj(a_k)... )
        for (int k = 0; k < n; ++k) {
          const cplx ar = std::conj(A(j, k)) * r[j];
          g[k] = -2.0 * ar.real();
          g[n + k] = -2.0 * ar.imag();
        }
        g[2 * n] = 2.0 * t;
        grad -= g / s;
        H.noalias() += (g / s) * (g / s).transpose();
        // -Hessian(s)/s: 2 Re(conj(a_k) a_l)/s block structure.
        const double w = 2.0 / s;
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            const cplx c = std::conj(A(j, k)) * A(j, l);
            H(k, l) += w * c.real();
            H(n + k, n + l) += w * c.real();
            H(k, n + l) -= w * c.imag();
            H(n + k, l) += w * c.imag();
          }
        H(2 * n, 2 * n) -= w;
      }
      Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
      Eigen::VectorXd dx = ldlt.solve(-grad);
      const double decrement = -grad.dot(dx);
      // An indefinite or singular system means the Hessian is rounding noise.
      if (ldlt.info() != Eigen::Success || !std::isfinite(decrement) || decrement < 1e-10) break;
      bool feasible = false;
      const double f0 = barrier(x, tau, feasible);
      double alpha = 1.0;
      bool accepted = false;
      for (int bt = 0; bt < 60; ++bt, alpha *= 0.5) {
        const double f1 = barrier(x + alpha * dx, tau, feasible);
        if ((accepted = feasible && f1 <= f0 - 0.25 * alpha * decrement)) break;
      }
      if (!accepted) break;  // rounding floor of the barrier
      x += alpha * dx;
      if (alpha * dx.norm() <= 1e-15 * (1.0 + x.norm())) break;
    }

    // Dual witness and certificate.
    const Eigen::VectorXcd r = residual(x);
    const double t = x[2 * n];
    for (Eigen::Index j = 0; j < N; ++j) lambda[j] = 2.0 * t / (tau * (t * t - std::norm(r[j])));
    lambda /= lambda.sum();
    const Eigen::VectorXd sq = lambda.cwiseSqrt();
    const Eigen::MatrixXcd WA = sq.asDiagonal() * A;
    const Eigen::VectorXcd Wf = sq.asDiagonal() * f;
    const Eigen::VectorXcd u = WA.colPivHouseholderQr().solve(-Wf);
    const Eigen::VectorXcd rl = f + A * u;
    const double lb = std::sqrt((sq.asDiagonal() * rl).squaredNorm());
    const double ub_ls = rl.cwiseAbs().maxCoeff();
    const double ub_x = r.cwiseAbs().maxCoeff();
    bool improved = false;
    if (lb > best_lb * (1.0 + 1e-15)) {
      best_lb = lb;
      best_lambda = lambda;  // the witness is the weighting that certifies best_lb
      improved = true;
    }
    if (std::min(ub_ls, ub_x) < best_ub * (1.0 - 1e-15)) {
      improved = true;
      if (ub_ls <= ub_x) {
        best_ub = ub_ls;
        best_r = rl;
        best_u.assign(u.data(), u.data() + n);
      } else {
        best_ub = ub_x;
        best_r = r;
        best_u.resize(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) best_u[static_cast<std::size_t>(k)] = cplx{x[k], x[n + k]};
      }
    }
    if (best_ub / best_lb - 1.0 <= tol) break;
    stale = improved ? 0 : stale + 1;
    if (stage == 59 || stale >= 3) throw NonConvergence("solve_discrete_minimax: gap not certified");
    tau *= opt.tau_growth;
  }

  sol.iterations = newton;
  sol.norm = scale * best_ub;
  sol.lower_bound = scale * best_lb;
  sol.gap = best_ub / best_lb - 1.0;
  sol.values.resize(z.size());
  for (Eigen::Index j = 0; j < N; ++j) sol.values[static_cast<std::size_t>(j)] = scale * best_r[j];

  // Monomial coefficients from the Arnoldi recurrence.
  std::vector<cplx> c = basis.coeffs[static_cast<std::size_t>(n)];
  for (int k = 0; k < n; ++k)
    for (std::size_t i = 0; i < basis.coeffs[static_cast<std::size_t>(k)].size(); ++i)
      c[i] += best_u[static_cast<std::size_t>(k)] * basis.coeffs[static_cast<std::size_t>(k)][i];
  for (auto& ci : c) ci *= scale;
  c.back() = 1.0;
  sol.poly = Poly(std::move(c));

  const double lmax = best_lambda.maxCoeff();
  for (Eigen::Index j = 0; j < N; ++j) {
    const double m = std::abs(sol.values[static_cast<std::size_t>(j)]);
    if (m >= sol.norm * (1.0 - sol.gap)) sol.active_points.push_back({z[static_cast<std::size_t>(j)], m});
    if (best_lambda[j] > 1e-14 * lmax) sol.dual_witness.push_back({static_cast<std::size_t>(j), best_lambda[j]});
  }
  double total = 0.0;
  for (const auto& d : sol.dual_witness) total += d.lambda;
  for (auto& d : sol.dual_witness) d.lambda /= total;
  return sol;
}

/// Checks the certificate of a discrete solution: the witness is a probability
/// vector, its weighted L2 mass of p lies between the lower bound and the norm,
/// the lambda-weighted mean of conj(p) z^k vanishes for k < n to
/// sqrt(2 gap) * norm * max|z|^k (the distance of p from the weighted
/// least-squares minimiser), and the active points sit within the gap of the norm.
inline bool audit_dual_witness(const ComplexMinimaxSolution& s, const DiscreteSet& set, int n,
                               std::string* why = nullptr) {
  auto fail = [why](std::string m) {
    if (why) *why = std::move(m);
    return false;
  };
  double total = 0.0, l2 = 0.0;
  for (const auto& d : s.dual_witness) {
    if (d.lambda < 0.0) return fail("negative multiplier");
    total += d.lambda;
    l2 += d.lambda * std::norm(s.values[d.index]);
  }
  if (std::abs(total - 1.0) > 1e-12) return fail("multipliers do not sum to one");
  if (s.lower_bound > std::sqrt(l2) + 1e-9 * s.norm || std::sqrt(l2) > s.norm * (1.0 + 1e-12))
    return fail("weighted mass outside [lower bound, norm]");
  if (s.norm > s.lower_bound * (1.0 + s.gap) * (1.0 + 1e-12)) return fail("gap inconsistent");
  double zmax = 0.0;
  for (const cplx z : set.points) zmax = std::max(zmax, std::abs(z));
  for (int k = 0; k < n; ++k) {
    cplx acc{0.0};
    for (const auto& d : s.dual_witness) acc += d.lambda * std::conj(s.values[d.index]) * std::pow(set.points[d.index], k);
    const double bound = std::sqrt(2.0 * std::max(s.gap, 1e-12)) * s.norm * std::pow(std::max(zmax, 1.0), k);
    if (std::abs(acc) > bound) return fail("stationarity violated at k = " + std::to_string(k));
  }
  if (s.active_points.empty()) return fail("no active points");
  for (const auto& a : s.active_points)
    if (a.modulus < s.norm * (1.0 - s.gap) * (1.0 - 1e-12) || a.modulus > s.norm * (1.0 + 1e-12))
      return fail("active point outside the band");
  return true;
}

// ---------------------------------------------------------------------------
// Exact reductions.

/// Monic Chebyshev polynomial of [lo, hi]: 2 ((hi-lo)/4)^n T_n(affine).
inline Poly chebyshev_interval(int n, double lo, double hi) {
  if (n < 0) throw DomainError("chebyshev_interval: negative degree");
  if (n == 0) return Poly::constant(1.0);
  // D_0 = 2, D_1 = x, D_{k+1} = x D_k - D_{k-1} is monic on [-2,2].
  const Poly x = Poly::monomial(1);
  Poly prev = Poly::constant(2.0), cur = x;
  for (int k = 1; k < n; ++k) {
    Poly next = x * cur - prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  const double half = (hi - lo) / 4.0;  // x in [lo,hi] -> (x - mid)/half in [-2,2]
  const double mid = (hi + lo) / 2.0;
  const Poly inner{-mid / half, 1.0 / half};
  return compose(cur, inner) * cplx{std::pow(half, n)};
}

struct ExactChebyshev {
  Poly poly;
  double norm = 0.0;
};

/// T_{nm} of inner^{-1}(E) = (T_n^E o inner) / a_m^n for E = [-2,2] or [0,4].
inline ExactChebyshev compose_chebyshev(const Poly& inner, int n, const Interval& e) {
  if (inner.degree() < 1) throw DomainError("compose_chebyshev: inner polynomial must be nonconstant");
  if (n < 0) throw DomainError("compose_chebyshev: negative degree");
  const Poly te = chebyshev_interval(n, e.a, e.b);
  const cplx lead = inner.leading();
  Poly p = compose(te, inner) * (1.0 / std::pow(lead, n));
  const double norm = n == 0 ? 1.0 : 2.0 * std::pow((e.b - e.a) / 4.0, n) / std::pow(std::abs(lead), n);
  return {std::move(p), norm};
}

struct ReducedNorm {
  double norm = 0.0;
  std::optional<Poly> poly;
  Route route = Route::Exact;
  double gap = 0.0;
  std::optional<MinimaxSolution> weighted;  // Remez solution behind the norm
};

namespace detail {

// z^l Q(z^k) with Q(y) = 2^n R(y/2 - 1) for y in [0,4].
inline Poly lift_star(const Poly& r, int n, int k, int l) {
  const Poly q = compose(r, Poly{-1.0, 0.5}) * cplx{std::ldexp(1.0, n)};
  return compose(q, Poly::monomial(k)) * Poly::monomial(l);
}

} // namespace detail

/// ||T_deg|| on E_m = {z^m in [-2,2]}. deg = 2nm + l; multiples of m are exact
/// by composition, deg < 2m is the monomial z^l, otherwise
/// 2^{n + l/(2m)} min ||(1+x)^{l/(2m)} R_n|| by Remez.
inline ReducedNorm star_norm(int m, int degree, double tol) {
  if (m < 1 || degree < 1) throw DomainError("star_norm: need m >= 1, degree >= 1");
  if (degree % m == 0) {
    auto e = compose_chebyshev(Poly::monomial(m), degree / m, Interval{-2.0, 2.0});
    return {e.norm, std::move(e.poly), Route::Exact, 0.0, std::nullopt};
  }
  const int n = degree / (2 * m);
  const int l = degree % (2 * m);
  if (n == 0) return {std::pow(2.0, static_cast<double>(l) / m), Poly::monomial(l), Route::Exact, 0.0, std::nullopt};
  const double s = static_cast<double>(l) / (2 * m);
  auto sol = remez_weighted(Weight::power(-1.0, s), n, tol);
  const double norm = std::pow(2.0, n + s) * sol.norm;
  Poly p = detail::lift_star(sol.poly, n, 2 * m, l);
  const double gap = sol.gap;
  return {norm, std::move(p), Route::Remez, gap, std::move(sol)};
}

/// ||T_deg|| on S_m = {z^m in [0,4]}; deg = nm + l gives
/// 2^{n + l/m} min ||(1+x)^{l/m} R_n||.
inline ReducedNorm star_odd_norm(int m, int degree, double tol) {
  if (m < 1 || degree < 1) throw DomainError("star_odd_norm: need m >= 1, degree >= 1");
  const int n = degree / m;
  const int l = degree % m;
  if (l == 0) {
    auto e = compose_chebyshev(Poly::monomial(m), n, Interval{0.0, 4.0});
    return {e.norm, std::move(e.poly), Route::Exact, 0.0, std::nullopt};
  }
  const double s = static_cast<double>(l) / m;
  if (n == 0) return {std::pow(4.0, s), Poly::monomial(l), Route::Exact, 0.0, std::nullopt};
  auto sol = remez_weighted(Weight::power(-1.0, s), n, tol);
  const double norm = std::pow(2.0, n + s) * sol.norm;
  Poly p = detail::lift_star(sol.poly, n, m, l);
  const double gap = sol.gap;
  return {norm, std::move(p), Route::Remez, gap, std::move(sol)};
}

/// ||T_{2n+1}|| on {z^2 + c in [-2,2]}: 2^{n+1/2} min || |x - c/2|^{1/2} R_n ||.
inline double quadratic_odd_norm(cplx c, int n, double tol) {
  if (n < 0) throw DomainError("quadratic_odd_norm: negative index");
  const auto sol = remez_weighted(Weight::power(c / 2.0, 0.5), n, tol);
  return std::pow(2.0, n + 0.5) * sol.norm;
}

/// Chebyshev polynomial of a quadratic preimage {z^2 + a z + b in [-2,2]}:
/// even degrees by composition, odd degrees by the weighted reduction in the
/// shifted variable w = z + a/2.
inline ReducedNorm quadratic_norm(const QuadraticPreimage& q, int degree, double tol) {
  if (degree < 1) throw DomainError("quadratic_norm: degree >= 1");
  if (degree % 2 == 0) {
    auto e = compose_chebyshev(q.poly(), degree / 2, Interval{-2.0, 2.0});
    return {e.norm, std::move(e.poly), Route::Exact, 0.0, std::nullopt};
  }
  const int n = (degree - 1) / 2;
  const cplx c = q.c();
  auto sol = remez_weighted(Weight::power(c / 2.0, 0.5), n, tol);
  const double norm = std::pow(2.0, n + 0.5) * sol.norm;
  // T(w) = w Q(w^2), Q(y) = 2^n R((y + c)/2), w = z + a/2.
  const Poly qy = compose(sol.poly, Poly{c / 2.0, 0.5}) * cplx{std::ldexp(1.0, n)};
  const Poly tw = compose(qy, Poly::monomial(2)) * Poly::monomial(1);
  Poly p = compose(tw, Poly{q.a / 2.0, 1.0});
  const double gap = sol.gap;
  return {norm, std::move(p), Route::Remez, gap, std::move(sol)};
}

} // namespace widomlab
