#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "errors.hpp"

namespace widomlab {

using cplx = std::complex<double>;

/// Dense complex polynomial, ascending coefficients: coeffs()[k] multiplies z^k.
///
/// Trailing zero coefficients are trimmed on construction so the leading
/// coefficient is nonzero unless the polynomial is identically zero, in
/// which case it is stored as the single coefficient 0 with degree 0.
class Poly {
public:
  Poly() : c_{cplx{0.0}} {}
  Poly(std::initializer_list<cplx> c) : c_(c) { trim(); }
  explicit Poly(std::vector<cplx> c) : c_(std::move(c)) { trim(); }

  static Poly constant(cplx a) { return Poly(std::vector<cplx>{a}); }

  static Poly monomial(int k, cplx a = 1.0) {
    std::vector<cplx> c(static_cast<std::size_t>(k) + 1, cplx{0.0});
    c.back() = a;
    return Poly(std::move(c));
  }

  /// Monic polynomial with the given roots.
  static Poly from_roots(std::span<const cplx> roots) {
    std::vector<cplx> c{cplx{1.0}};
    for (const cplx r : roots) {
      c.push_back(0.0);
      for (std::size_t k = c.size() - 1; k > 0; --k) c[k] = c[k - 1] - r * c[k];
      c[0] = -r * c[0];
    }
    return Poly(std::move(c));
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.size() == 1 && c_[0] == cplx{0.0}; }
  cplx leading() const { return c_.back(); }
  bool is_monic() const { return c_.back() == cplx{1.0}; }
  const std::vector<cplx>& coeffs() const { return c_; }
  cplx operator[](int k) const {
    return k >= 0 && k <= degree() ? c_[static_cast<std::size_t>(k)] : cplx{0.0};
  }

  /// Value at z. Horner's rule, run on the reversed coefficients at 1/z when
  /// |z| > 1 so intermediate sums stay bounded.
  cplx operator()(cplx z) const {
    const int n = degree();
    if (std::abs(z) <= 1.0) {
      cplx acc = c_.back();
      for (int k = n - 1; k >= 0; --k) acc = acc * z + c_[static_cast<std::size_t>(k)];
      return acc;
    }
    const cplx w = 1.0 / z;
    cplx acc = c_[0];
    for (int k = 1; k <= n; ++k) acc = acc * w + c_[static_cast<std::size_t>(k)];
    return acc * std::pow(z, n);
  }

  /// sum |c_k| |z|^k, the natural scale for backward-error residuals.
  double magnitude_at(cplx z) const {
    const double r = std::abs(z);
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * r + std::abs(*it);
    return acc;
  }

  Poly derivative() const {
    if (degree() == 0) return Poly{};
    std::vector<cplx> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
    return Poly(std::move(d));
  }

  Poly monic() const { return *this * (1.0 / leading()); }

  friend Poly operator+(const Poly& a, const Poly& b) {
    std::vector<cplx> c(std::max(a.c_.size(), b.c_.size()), cplx{0.0});
    for (std::size_t k = 0; k < a.c_.size(); ++k) c[k] += a.c_[k];
    for (std::size_t k = 0; k < b.c_.size(); ++k) c[k] += b.c_[k];
    return Poly(std::move(c));
  }
  friend Poly operator-(const Poly& a, const Poly& b) { return a + b * cplx{-1.0}; }
  friend Poly operator*(const Poly& a, const Poly& b) {
    std::vector<cplx> c(a.c_.size() + b.c_.size() - 1, cplx{0.0});
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Poly(std::move(c));
  }
  friend Poly operator*(const Poly& a, cplx s) {
    std::vector<cplx> c = a.c_;
    for (auto& x : c) x *= s;
    return Poly(std::move(c));
  }
  friend Poly operator*(cplx s, const Poly& a) { return a * s; }

private:
  void trim() {
    if (c_.empty()) c_.push_back(0.0);
    while (c_.size() > 1 && c_.back() == cplx{0.0}) c_.pop_back();
  }

  std::vector<cplx> c_;
};

inline cplx eval(const Poly& p, cplx z) { return p(z); }

/// p o q, of degree deg p * deg q.
inline Poly compose(const Poly& p, const Poly& q) {
  const auto& c = p.coeffs();
  Poly acc = Poly::constant(c.back());
  for (int k = p.degree() - 1; k >= 0; --k) acc = acc * q + Poly::constant(c[static_cast<std::size_t>(k)]);
  return acc;
}

struct Root {
  cplx location;
  int multiplicity = 1;
};

struct RootSet {
  std::vector<Root> roots;
  double residual = 0.0;

  int total_multiplicity() const {
    int s = 0;
    for (const auto& r : roots) s += r.multiplicity;
    return s;
  }
  /// Roots repeated according to multiplicity.
  std::vector<cplx> expanded() const {
    std::vector<cplx> out;
    for (const auto& r : roots) out.insert(out.end(), static_cast<std::size_t>(r.multiplicity), r.location);
    return out;
  }
};

/// Residual used by the root solver: |p(z)| relative to sum |c_k||z|^k when
/// that scale exceeds one, absolute otherwise.
inline double root_residual(const Poly& p, cplx z) {
  return std::abs(p(z)) / std::max(1.0, p.magnitude_at(z));
}

namespace detail {

inline double fujiwara_bound(const Poly& monic) {
  const int n = monic.degree();
  double b = 0.0;
  for (int k = 0; k < n; ++k) {
    const double a = std::abs(monic[k]);
    if (a == 0.0) continue;
    const double e = 1.0 / static_cast<double>(n - k);
    b = std::max(b, std::pow(k == 0 ? a / 2.0 : a, e));
  }
  return 2.0 * b;
}

// Aberth-Ehrlich simultaneous iteration on a monic polynomial with p(0) != 0.
inline std::vector<cplx> aberth(const Poly& p, std::uint64_t seed, int budget, bool& converged) {
  const int n = p.degree();
  const Poly dp = p.derivative();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);

  // Start on a circle whose radius is the geometric mean of the root moduli.
  double radius = std::pow(std::abs(p[0]), 1.0 / n);
  radius = std::clamp(radius, 1e-3 * fujiwara_bound(p), fujiwara_bound(p));
  if (!(radius > 0.0) || !std::isfinite(radius)) radius = 1.0;
  std::vector<cplx> z(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double th = 2.0 * std::numbers::pi * (k + 0.25 + jitter(rng)) / n + 0.4;
    z[static_cast<std::size_t>(k)] = std::polar(radius * (1.0 + jitter(rng)), th);
  }

  std::vector<bool> done(static_cast<std::size_t>(n), false);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  converged = false;
  for (int it = 0; it < budget; ++it) {
    bool all = true;
    for (int k = 0; k < n; ++k) {
      auto ku = static_cast<std::size_t>(k);
      if (done[ku]) continue;
      const cplx zk = z[ku];
      const cplx pv = p(zk);
      if (pv == cplx{0.0}) {
        done[ku] = true;
        continue;
      }
      const cplx ratio = pv / dp(zk);
      cplx s{0.0};
      for (int j = 0; j < n; ++j)
        if (j != k) s += 1.0 / (zk - z[static_cast<std::size_t>(j)]);
      cplx w = ratio / (1.0 - ratio * s);
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) w = ratio;
      z[ku] = zk - w;
      if (std::abs(w) <= 4.0 * eps * std::abs(z[ku])) done[ku] = true;
      else all = false;
    }
    if (all) {
      converged = true;
      break;
    }
  }
  return z;
}

} // namespace detail

/// All complex roots of p with multiplicities. Clusters of approximate roots
/// are merged when they lie within tol^(1/size) of their centroid, which is
/// the accuracy a root of that multiplicity is determined to.
inline RootSet solve_roots(const Poly& p, double tol, std::uint64_t seed = 0) {
  if (p.degree() < 1) throw DomainError("solve_roots: degree must be >= 1");
  if (!(tol > 0.0)) throw DomainError("solve_roots: tol must be positive");

  RootSet out;
  // Exact zeros at the origin.
  int zeros = 0;
  while (p[zeros] == cplx{0.0}) ++zeros;
  std::vector<cplx> c(p.coeffs().begin() + zeros, p.coeffs().end());
  const Poly q = Poly(std::move(c)).monic();
  if (zeros > 0) out.roots.push_back({cplx{0.0}, zeros});

  std::vector<cplx> approx;
  if (q.degree() == 1) {
    approx.push_back(-q[0]);
  } else if (q.degree() > 1) {
    bool conv = false;
    approx = detail::aberth(q, seed, 500, conv);
  }

  // Clustering: around each unassigned approximation take the largest k
  // nearest approximations that lie within tol^(1/k) of their centroid with
  // the centroid residual still below tol; a root of multiplicity k is only
  // determined to about that radius.
  struct Group {
    cplx sum;
    int size;
    cplx centroid() const { return sum / static_cast<double>(size); }
  };
  std::vector<Group> groups;
  std::vector<bool> used(approx.size(), false);
  for (std::size_t i = 0; i < approx.size(); ++i) {
    if (used[i]) continue;
    std::vector<std::pair<double, std::size_t>> near;
    for (std::size_t j = 0; j < approx.size(); ++j)
      if (!used[j]) near.push_back({std::abs(approx[j] - approx[i]), j});
    std::sort(near.begin(), near.end());
    std::size_t take = 1;
    for (std::size_t k = near.size(); k >= 2; --k) {
      cplx c{0.0};
      for (std::size_t t = 0; t < k; ++t) c += approx[near[t].second];
      c /= static_cast<double>(k);
      const double radius = std::pow(tol, 1.0 / static_cast<double>(k)) * std::max(1.0, std::abs(c));
      bool inside = true;
      for (std::size_t t = 0; t < k && inside; ++t) inside = std::abs(approx[near[t].second] - c) <= radius;
      if (inside && root_residual(q, c) <= tol) {
        take = k;
        break;
      }
    }
    Group g{0.0, 0};
    for (std::size_t t = 0; t < take; ++t) {
      g.sum += approx[near[t].second];
      ++g.size;
      used[near[t].second] = true;
    }
    groups.push_back(g);
  }

  for (const auto& g : groups) {
    // A root of multiplicity k is a simple root of the (k-1)-th derivative;
    // polish there with a few Newton steps while |f| decreases.
    cplx z = g.centroid();
    Poly f = q;
    for (int k = 1; k < g.size; ++k) f = f.derivative();
    const Poly df = f.derivative();
    for (int step = 0; step < 3; ++step) {
      const cplx d = df(z);
      if (d == cplx{0.0}) break;
      const cplx zn = z - f(z) / d;
      if (!(std::abs(f(zn)) < std::abs(f(z)))) break;
      z = zn;
    }
    out.roots.push_back({z, g.size});
  }

  const Poly pm = p.monic();
  double res = 0.0;
  for (const auto& r : out.roots) res = std::max(res, root_residual(pm, r.location));
  out.residual = res;
  if (res > tol)
    throw NonConvergence("solve_roots: residual " + std::to_string(res) + " exceeds tolerance");
  return out;
}

/// For each target t, the deg(p) solutions of p(z) = t (with multiplicity).
inline std::vector<std::vector<cplx>> preimage_points(const Poly& p, std::span<const cplx> targets, double tol,
                                                      std::uint64_t seed = 0) {
  if (targets.empty()) throw DomainError("preimage_points: no targets");
  const int n = p.degree();
  if (n < 1) throw DomainError("preimage_points: constant polynomial");

  bool monomial = true;
  for (int k = 0; k < n; ++k) monomial = monomial && p[k] == cplx{0.0};

  std::vector<std::vector<cplx>> out;
  out.reserve(targets.size());
  for (const cplx t : targets) {
    if (monomial) {
      // a z^n = t solved in closed form.
      std::vector<cplx> pts;
      const cplx w = t / p.leading();
      const double r = std::pow(std::abs(w), 1.0 / n);
      const double th = std::arg(w);
      for (int k = 0; k < n; ++k)
        pts.push_back(r == 0.0 ? cplx{0.0} : std::polar(r, (th + 2.0 * std::numbers::pi * k) / n));
      out.push_back(std::move(pts));
      continue;
    }
    const RootSet rs = solve_roots(p - Poly::constant(t), tol, seed);
    out.push_back(rs.expanded());
  }
  return out;
}

} // namespace widomlab
