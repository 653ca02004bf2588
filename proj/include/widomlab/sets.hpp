#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "poly.hpp"
#include "potential.hpp"

namespace widomlab {

struct Interval {
  double a = -2.0;
  double b = 2.0;
};

/// {z : |z| = 1, |arg z| <= alpha}, 0 < alpha < pi.
struct CircularArc {
  double alpha = std::numbers::pi / 2;
};

/// E_m = {z : z^m in [-2,2]}, a star with 2m edges.
struct StarEven {
  int m = 2;
};

/// S_m = {z : z^m in [0,4]}, a star with m edges.
struct StarOdd {
  int m = 3;
};

/// {z : z^2 + a z + b in [-2,2]}.
struct QuadraticPreimage {
  cplx a{0.0};
  cplx b{0.0};

  cplx c() const { return b - a * a / 4.0; }
  bool connected() const { return c().imag() == 0.0 && std::abs(c().real()) <= 2.0; }
  Poly poly() const { return Poly{b, a, 1.0}; }
};

/// p^{-1}([lo, hi]).
struct PolyPreimage {
  Poly p;
  double lo = -2.0;
  double hi = 2.0;
  bool shabat = false;
};

/// Unit circle with N = 4(2n+l-1) equally spaced radial slits [1, R].
struct SpikedCircle {
  int n = 1;
  int l = 1;
};

using SetSpec = std::variant<Interval, CircularArc, StarEven, StarOdd, QuadraticPreimage, PolyPreimage, SpikedCircle>;

/// The degree-7 Shabat polynomial 8/729 (z+1)(z^2 - 3z/2 + 9/2)^3 whose
/// preimage of [0,1] is a balanced tree with 7 edges.
inline Poly shabat_polynomial() {
  const Poly quad{4.5, -1.5, 1.0};
  return Poly{1.0, 1.0} * quad * quad * quad * cplx{8.0 / 729.0};
}

inline PolyPreimage shabat_example() { return {shabat_polynomial(), 0.0, 1.0, true}; }

inline std::string kind_name(const SetSpec& s) {
  static constexpr const char* names[] = {"interval", "arc",           "star_even",    "star_odd",
                                          "quadratic", "poly_preimage", "spiked_circle"};
  if (const auto* pp = std::get_if<PolyPreimage>(&s); pp && pp->shabat) return "shabat";
  return names[s.index()];
}

/// Throws DomainError when the set description violates its invariants.
inline void validate(const SetSpec& spec) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Interval>) {
          if (!(s.a < s.b)) throw DomainError("interval: need a < b");
        } else if constexpr (std::is_same_v<T, CircularArc>) {
          if (!(s.alpha > 0.0 && s.alpha < std::numbers::pi)) throw DomainError("arc: need 0 < alpha < pi");
        } else if constexpr (std::is_same_v<T, StarEven> || std::is_same_v<T, StarOdd>) {
          if (s.m < 1) throw DomainError("star: need m >= 1");
        } else if constexpr (std::is_same_v<T, PolyPreimage>) {
          if (s.p.degree() < 1) throw DomainError("poly_preimage: polynomial must be nonconstant");
          if (!(s.lo < s.hi)) throw DomainError("poly_preimage: need lo < hi");
        } else if constexpr (std::is_same_v<T, SpikedCircle>) {
          if (s.n < 1 || (s.l != 1 && s.l != 3)) throw DomainError("spiked_circle: need n >= 1, l in {1,3}");
        }
      },
      spec);
}

// ---------------------------------------------------------------------------
// Spiked circles.

struct SpikedCircleGeometry {
  int spikes = 0;     // N = 4(2n+l-1)
  double c = 0.0;     // right end of the reduced interval [-2, c]
  double rho = 0.0;   // rho + 1/rho = c, rho > 1
  double radius = 0;  // R = rho^{1/N}
};

/// Slit length chosen so that the circle carries (2n+1)/(4n+l) of the
/// equilibrium mass. z -> z^N followed by u -> u + 1/u sends the exterior of
/// S(n,l) to the exterior of [-2, c] with derivative 1 at infinity, so the
/// condition becomes an arcsine-law equation on [-2, c].
inline SpikedCircleGeometry spiked_circle_geometry(int n, int l) {
  validate(SpikedCircle{n, l});
  SpikedCircleGeometry g;
  g.spikes = 4 * (2 * n + l - 1);
  const double mass = static_cast<double>(2 * n + 1) / (4 * n + l);
  const double cs = std::cos(std::numbers::pi * mass);
  g.c = (6.0 + 2.0 * cs) / (1.0 - cs);
  g.rho = (g.c + std::sqrt(g.c * g.c - 4.0)) / 2.0;
  g.radius = std::pow(g.rho, 1.0 / g.spikes);
  return g;
}

inline double spiked_circle_radius(int n, int l) { return spiked_circle_geometry(n, l).radius; }

/// Equilibrium mass of the unit circle inside S(n,l) with slit length R.
inline double spiked_circle_circle_mass(int spikes, double radius) {
  const double rho = std::pow(radius, spikes);
  return interval_harmonic_measure(-2.0, rho + 1.0 / rho, 2.0);
}

inline CapacityResult cap_spiked_circle(int n, int l) {
  const auto g = spiked_circle_geometry(n, l);
  return {std::pow((2.0 + g.c) / 4.0, 1.0 / g.spikes), CapacityRoute::SpikedCircleReduction};
}

/// Exterior conformal map of E_2 = [-sqrt2, sqrt2] u i[-sqrt2, sqrt2] onto the
/// exterior of the unit disk, normalised by Phi(z) ~ z at infinity.
inline cplx phi_star(cplx z) {
  const cplx w = z * z / 2.0;
  const cplx u = detail::exterior_root(w, 1.0);
  cplx phi = std::sqrt(u);
  if (std::real(phi * std::conj(z)) < 0.0) phi = -phi;
  return phi;
}

// ---------------------------------------------------------------------------
// Capacities and discretisation.

inline CapacityResult capacity(const SetSpec& spec) {
  validate(spec);
  return std::visit(
      [](const auto& s) -> CapacityResult {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Interval>) {
          return cap_interval(s.a, s.b);
        } else if constexpr (std::is_same_v<T, CircularArc>) {
          return {std::sin(s.alpha / 2.0), CapacityRoute::ArcFormula};
        } else if constexpr (std::is_same_v<T, StarEven> || std::is_same_v<T, StarOdd>) {
          return cap_preimage(1.0, 1.0, s.m);
        } else if constexpr (std::is_same_v<T, QuadraticPreimage>) {
          return cap_preimage(1.0, 1.0, 2);
        } else if constexpr (std::is_same_v<T, PolyPreimage>) {
          return cap_preimage((s.hi - s.lo) / 4.0, s.p.leading(), s.p.degree());
        } else {
          return cap_spiked_circle(s.n, s.l);
        }
      },
      spec);
}

/// True when the set lies on the real line (Schiefermayr's bound applies).
inline bool is_real_set(const SetSpec& spec) {
  if (std::holds_alternative<Interval>(spec)) return true;
  if (const auto* s = std::get_if<StarEven>(&spec)) return s->m == 1;
  if (const auto* s = std::get_if<StarOdd>(&spec)) return s->m <= 2;
  if (const auto* q = std::get_if<QuadraticPreimage>(&spec)) {
    const cplx c = q->c();
    return q->a.imag() == 0.0 && c.imag() == 0.0 && c.real() <= -2.0;
  }
  return false;
}

inline int edge_count(const SetSpec& spec) {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Interval> || std::is_same_v<T, CircularArc>) return 1;
        else if constexpr (std::is_same_v<T, StarEven>) return 2 * s.m;
        else if constexpr (std::is_same_v<T, StarOdd>) return s.m;
        else if constexpr (std::is_same_v<T, QuadraticPreimage>) return s.connected() ? 4 : 2;
        else if constexpr (std::is_same_v<T, PolyPreimage>) return s.p.degree();
        else return 2 * spiked_circle_geometry(s.n, s.l).spikes;
      },
      spec);
}

/// factor * degree / edges, floor 50.
inline int default_per_edge(const SetSpec& spec, int degree, int factor = 60) {
  return std::max(50, factor * degree / edge_count(spec));
}

enum class Clustering { Uniform, Arcsine };

struct DiscreteSet {
  std::vector<cplx> points;
  SetSpec source;
  int per_edge = 0;
  Clustering clustering = Clustering::Arcsine;
};

namespace detail {

// K parameter samples of [lo, hi], endpoints included exactly.
inline std::vector<double> parameter_samples(double lo, double hi, int k, Clustering cl) {
  std::vector<double> t(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    double s;
    if (cl == Clustering::Arcsine) s = (1.0 - std::cos(std::numbers::pi * i / (k - 1))) / 2.0;
    else s = static_cast<double>(i) / (k - 1);
    t[static_cast<std::size_t>(i)] = lo + (hi - lo) * s;
  }
  t.front() = lo;
  t.back() = hi;
  return t;
}

inline std::vector<cplx> dedupe(std::vector<cplx> pts) {
  std::sort(pts.begin(), pts.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
  std::vector<cplx> out;
  for (const cplx z : pts) {
    bool dup = false;
    for (auto it = out.rbegin(); it != out.rend() && z.real() - it->real() <= 1e-12; ++it)
      if (std::abs(z - *it) <= 1e-12 * std::max(1.0, std::abs(z))) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(z);
  }
  return out;
}

inline std::vector<cplx> sample_preimage(const Poly& p, double lo, double hi, int k, Clustering cl,
                                         std::uint64_t seed) {
  const auto ts = parameter_samples(lo, hi, k, cl);
  std::vector<cplx> targets(ts.begin(), ts.end());
  std::vector<cplx> pts;
  for (auto& group : preimage_points(p, targets, 1e-12, seed))
    for (const cplx z : group) pts.push_back(z);
  return dedupe(std::move(pts));
}

} // namespace detail

/// Finite sampling of a set. Arcsine clustering places the parameter samples at
/// Chebyshev points of the target interval before mapping them back through
/// the defining polynomial, so every edge gets per_edge points with both
/// endpoints included.
inline DiscreteSet discretize(const SetSpec& spec, int per_edge, Clustering clustering = Clustering::Arcsine,
                              std::uint64_t seed = 0) {
  validate(spec);
  if (per_edge < 8) throw DomainError("discretize: per_edge must be >= 8");
  DiscreteSet out{{}, spec, per_edge, clustering};
  out.points = std::visit(
      [&](const auto& s) -> std::vector<cplx> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Interval>) {
          const auto ts = detail::parameter_samples(s.a, s.b, per_edge, clustering);
          return {ts.begin(), ts.end()};
        } else if constexpr (std::is_same_v<T, CircularArc>) {
          std::vector<cplx> pts;
          for (double th : detail::parameter_samples(-s.alpha, s.alpha, per_edge, clustering))
            pts.push_back(std::polar(1.0, th));
          return pts;
        } else if constexpr (std::is_same_v<T, StarEven>) {
          return detail::sample_preimage(Poly::monomial(s.m), -2.0, 2.0, 2 * per_edge, clustering, seed);
        } else if constexpr (std::is_same_v<T, StarOdd>) {
          return detail::sample_preimage(Poly::monomial(s.m), 0.0, 4.0, per_edge, clustering, seed);
        } else if constexpr (std::is_same_v<T, QuadraticPreimage>) {
          const int k = s.connected() ? 2 * per_edge : per_edge;
          return detail::sample_preimage(s.poly(), -2.0, 2.0, k, clustering, seed);
        } else if constexpr (std::is_same_v<T, PolyPreimage>) {
          return detail::sample_preimage(s.p, s.lo, s.hi, per_edge, clustering, seed);
        } else {
          const auto g = spiked_circle_geometry(s.n, s.l);
          const double step = 2.0 * std::numbers::pi / g.spikes;
          std::vector<cplx> pts;
          for (int k = 0; k < g.spikes; ++k) {
            for (double th : detail::parameter_samples(k * step, (k + 1) * step, per_edge, clustering))
              pts.push_back(std::polar(1.0, th));
            for (double r : detail::parameter_samples(1.0, g.radius, per_edge, clustering))
              pts.push_back(std::polar(r, k * step));
          }
          return detail::dedupe(std::move(pts));
        }
      },
      spec);
  return out;
}

/// Whether z satisfies the defining relation of the set to within tol.
inline bool on_set(const SetSpec& spec, cplx z, double tol = 1e-10) {
  auto in_target = [tol](cplx w, double lo, double hi) {
    return std::abs(w.imag()) <= tol * std::max(1.0, std::abs(w)) && w.real() >= lo - tol && w.real() <= hi + tol;
  };
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Interval>) {
          return in_target(z, s.a, s.b);
        } else if constexpr (std::is_same_v<T, CircularArc>) {
          return std::abs(std::abs(z) - 1.0) <= tol && std::abs(std::arg(z)) <= s.alpha + tol;
        } else if constexpr (std::is_same_v<T, StarEven>) {
          return in_target(std::pow(z, s.m), -2.0, 2.0);
        } else if constexpr (std::is_same_v<T, StarOdd>) {
          return in_target(std::pow(z, s.m), 0.0, 4.0);
        } else if constexpr (std::is_same_v<T, QuadraticPreimage>) {
          return in_target(s.poly()(z), -2.0, 2.0);
        } else if constexpr (std::is_same_v<T, PolyPreimage>) {
          return in_target(s.p(z), s.lo, s.hi);
        } else {
          const auto g = spiked_circle_geometry(s.n, s.l);
          if (std::abs(std::abs(z) - 1.0) <= tol) return true;
          const double step = 2.0 * std::numbers::pi / g.spikes;
          const double k = std::round(std::arg(z) / step);
          const double off = std::abs(std::remainder(std::arg(z) - k * step, 2.0 * std::numbers::pi));
          return off * std::abs(z) <= tol && std::abs(z) >= 1.0 - tol && std::abs(z) <= g.radius + tol;
        }
      },
      spec);
}

} // namespace widomlab
