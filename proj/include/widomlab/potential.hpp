#pragma once

// Closed-form potential theory for intervals, polynomial preimages and the
// star sets E_m = {z : z^m in [-2,2]}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "errors.hpp"
#include "poly.hpp"

namespace widomlab {

enum class CapacityRoute { PreimageFormula, IntervalFormula, SpikedCircleReduction, ArcFormula };

struct CapacityResult {
  double value = 0.0;
  CapacityRoute route = CapacityRoute::IntervalFormula;
};

namespace detail {

// The root w of w^2 - 2 z w + k = 0 of largest modulus, i.e. z + sqrt(z^2 - k)
// on the exterior branch. Ties (z on the cut) take the limit from the upper
// half-plane.
inline cplx exterior_root(cplx z, double k) {
  const cplx s = std::sqrt(z * z - k);
  const cplx a = z + s;
  const cplx b = z - s;
  const double da = std::abs(a), db = std::abs(b);
  const double scale = std::max({1.0, da, db});
  if (std::abs(da - db) <= 1e-14 * scale) return a.imag() >= b.imag() ? a : b;
  return da > db ? a : b;
}

} // namespace detail

/// z + sqrt(z^2 - 4) on the branch mapping the exterior of [-2,2] onto the
/// exterior of the closed disk of radius 2.
inline cplx joukowski_exterior(cplx z) { return detail::exterior_root(z, 4.0); }

/// Green's function of the complement of [a,b] with pole at infinity.
inline double green_interval(cplx z, double a, double b) {
  if (!(a < b)) throw DomainError("green_interval: need a < b");
  const cplx zeta = (2.0 * z - (a + b)) / (b - a);
  return std::max(0.0, std::log(std::abs(detail::exterior_root(zeta, 1.0))));
}

/// Cap of P^{-1}(E) for P of degree m with leading coefficient lead.
inline CapacityResult cap_preimage(double cap_E, cplx lead_coeff, int m) {
  if (!(cap_E > 0.0) || lead_coeff == cplx{0.0} || m < 1) throw DomainError("cap_preimage: bad arguments");
  return {std::pow(cap_E / std::abs(lead_coeff), 1.0 / m), CapacityRoute::PreimageFormula};
}

inline CapacityResult cap_interval(double a, double b) {
  if (!(a < b)) throw DomainError("cap_interval: need a < b");
  return {(b - a) / 4.0, CapacityRoute::IntervalFormula};
}

/// (1/pi) int_{-1}^{1} log|x - z| / sqrt(1 - x^2) dx = log(|z + sqrt(z^2-1)| / 2).
inline double log_potential_interval(cplx z) {
  if (z.imag() == 0.0 && std::abs(z.real()) <= 1.0) return -std::numbers::ln2;
  return std::log(std::abs(detail::exterior_root(z, 1.0)) / 2.0);
}

/// Arcsine-law mass of [a, s] inside [a, b].
inline double interval_harmonic_measure(double a, double b, double s) {
  if (!(a < b)) throw DomainError("interval_harmonic_measure: need a < b");
  if (s < a || s > b) throw DomainError("interval_harmonic_measure: s outside [a,b]");
  const double arg = std::clamp((a + b - 2.0 * s) / (b - a), -1.0, 1.0);
  return std::acos(arg) / std::numbers::pi;
}

struct DensityValue {
  double value = 0.0;
  bool endpoint_singularity = false;
};

/// Density of the equilibrium measure of E_m with respect to arc length.
inline DensityValue equilibrium_density_star(int m, cplx z) {
  if (m < 1) throw DomainError("equilibrium_density_star: m >= 1");
  const cplx zm = std::pow(z, m);
  if (std::abs(zm.imag()) > 1e-10 * std::max(1.0, std::abs(zm)) || std::abs(zm.real()) > 2.0 + 1e-10)
    throw DomainError("equilibrium_density_star: point is not on E_m");
  if (std::abs(std::abs(zm) - 2.0) <= 1e-8) return {std::numeric_limits<double>::infinity(), true};
  const double r = std::abs(z);
  const double x = zm.real();
  return {std::pow(r, m - 1) / (std::numbers::pi * std::sqrt(4.0 - x * x)), false};
}

} // namespace widomlab
