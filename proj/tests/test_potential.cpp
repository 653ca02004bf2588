#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "widomlab/potential.hpp"

using namespace widomlab;
using boost::math::quadrature::gauss_kronrod;

namespace {

// (1/pi) int_0^pi log|cos t - z| dt by adaptive Gauss-Kronrod.
double log_potential_quadrature(cplx z) {
  auto f = [z](double t) { return std::log(std::abs(std::cos(t) - z)); };
  return gauss_kronrod<double, 61>::integrate(f, 0.0, std::numbers::pi, 15, 1e-13) / std::numbers::pi;
}

} // namespace

TEST(Green, Examples) {
  EXPECT_EQ(green_interval(2.0, -2.0, 2.0), 0.0);
  EXPECT_NEAR(green_interval(cplx{0.0, 2.0}, -2.0, 2.0), 0.881374, 1e-6);
  EXPECT_NEAR(green_interval(10.0, -2.0, 2.0), 2.292432, 1e-6);
}

TEST(Green, NonnegativeAndZeroOnInterval) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 500; ++i) EXPECT_GE(green_interval(cplx{u(rng), u(rng)}, -1.0, 3.0), 0.0);
  for (int i = 0; i <= 100; ++i) EXPECT_LE(green_interval(-1.0 + 0.04 * i, -1.0, 3.0), 1e-12);
}

TEST(Green, AsymptoticsAtInfinity) {
  const double z = 1e7;
  EXPECT_NEAR(green_interval(z, 0.0, 4.0), std::log(z) - std::log(1.0), 1e-6);
  EXPECT_NEAR(green_interval(cplx{0.0, z}, -1.0, 1.0), std::log(z) - std::log(0.5), 1e-6);
}

TEST(Capacity, Examples) {
  EXPECT_EQ(cap_preimage(1.0, 1.0, 4).value, 1.0);
  EXPECT_NEAR(cap_preimage(3.0, 3.0, 2).value, 1.0, 1e-15);
  EXPECT_EQ(cap_preimage(1.0, 1.0, 2).route, CapacityRoute::PreimageFormula);
  EXPECT_EQ(cap_interval(-2.0, 2.0).value, 1.0);
  EXPECT_EQ(cap_interval(0.0, 1.0).value, 0.25);
  EXPECT_THROW(cap_preimage(1.0, 0.0, 2), DomainError);
}

TEST(LogPotential, Examples) {
  EXPECT_EQ(log_potential_interval(0.3), -std::numbers::ln2);
  EXPECT_NEAR(log_potential_interval(2.0), 0.623810, 1e-6);
  EXPECT_NEAR(log_potential_interval(cplx{0.0, 1.0}), 0.188226, 1e-6);
}

TEST(LogPotential, MatchesQuadrature) {
  for (const cplx z : {cplx{2.0}, cplx{0.0, 1.0}, cplx{-1.5, 0.2}, cplx{0.3, 0.05}, cplx{1.5}})
    EXPECT_NEAR(log_potential_interval(z), log_potential_quadrature(z), 1e-9) << z;
}

TEST(LogPotential, GreenRelation) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const cplx z{u(rng), u(rng)};
    EXPECT_NEAR(log_potential_interval(z) - green_interval(z, -1.0, 1.0), -std::numbers::ln2, 1e-12) << z;
  }
}

TEST(Joukowski, Examples) {
  EXPECT_NEAR(std::abs(joukowski_exterior(2.0) - 2.0), 0.0, 1e-7);
  EXPECT_NEAR(joukowski_exterior(3.0).real(), 3.0 + std::sqrt(5.0), 1e-12);
  const cplx w = joukowski_exterior(cplx{0.0, 0.5});
  EXPECT_NEAR(w.real(), 0.0, 1e-12);
  EXPECT_NEAR(w.imag(), 2.561553, 1e-6);
}

TEST(Joukowski, Invariants) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int i = 0; i < 500; ++i) {
    const cplx z{u(rng), i % 5 == 0 ? 0.0 : u(rng)};
    const cplx w = joukowski_exterior(z);
    EXPECT_GE(std::abs(w), 2.0 - 1e-12);
    EXPECT_LE(std::abs(w * w - 2.0 * z * w + 4.0), 1e-10 * std::max(1.0, std::norm(w)));
  }
  const cplx big{3e6, -4e6};
  EXPECT_NEAR(std::abs(joukowski_exterior(big) / (2.0 * big) - 1.0), 0.0, 1e-12);
}

TEST(HarmonicMeasure, Examples) {
  EXPECT_EQ(interval_harmonic_measure(-2.0, 2.0, -2.0), 0.0);
  EXPECT_NEAR(interval_harmonic_measure(0.0, 4.0, 1.0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(interval_harmonic_measure(-3.0, 7.0, 2.0), 0.5, 1e-15);
  EXPECT_EQ(interval_harmonic_measure(-3.0, 7.0, 7.0), 1.0);
  EXPECT_THROW(interval_harmonic_measure(0.0, 1.0, 1.5), DomainError);
}

TEST(HarmonicMeasure, Monotone) {
  double prev = -1.0;
  for (int i = 0; i <= 1000; ++i) {
    const double v = interval_harmonic_measure(-1.0, 2.5, -1.0 + 3.5 * i / 1000.0);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(StarDensity, Examples) {
  EXPECT_NEAR(equilibrium_density_star(1, 0.0).value, 1.0 / (2.0 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(equilibrium_density_star(2, 1.0).value, 1.0 / (std::numbers::pi * std::sqrt(3.0)), 1e-15);
  EXPECT_TRUE(equilibrium_density_star(2, std::sqrt(2.0)).endpoint_singularity);
  EXPECT_THROW(equilibrium_density_star(2, cplx{1.0, 1.0}), DomainError);
}

TEST(StarDensity, IntegratesToOne) {
  for (const int m : {1, 2, 3, 5}) {
    // Each of the 2m rays is r e^{i pi k/m}, r in [0, 2^{1/m}]; substitute r^m = 2 cos(t).
    double total = 0.0;
    for (int k = 0; k < 2 * m; ++k) {
      const cplx dir = std::polar(1.0, std::numbers::pi * k / m);
      auto f = [&](double t) {
        const double r = std::pow(2.0 * std::cos(t), 1.0 / m);
        if (r == 0.0) return 0.0;
        const double drdt = 2.0 * std::sin(t) * r / (m * 2.0 * std::cos(t));
        return equilibrium_density_star(m, dir * r).value * drdt;
      };
      total += gauss_kronrod<double, 61>::integrate(f, 1e-12, std::numbers::pi / 2 - 1e-12, 15, 1e-10);
    }
    EXPECT_NEAR(total, 1.0, 1e-6) << "m = " << m;
  }
}
