#include <cmath>
#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include "widomlab/sets.hpp"

using namespace widomlab;

namespace {

// Closed-form capacity of S(n,1).
double cap_spiked_closed(int n) {
  return std::pow(std::cos(std::numbers::pi * n / (4.0 * n + 1.0)), -1.0 / (4.0 * n));
}

bool contains(const std::vector<cplx>& pts, cplx z) {
  for (const cplx p : pts)
    if (std::abs(p - z) <= 1e-13) return true;
  return false;
}

} // namespace

TEST(Discretize, StarEvenTwo) {
  const auto d = discretize(StarEven{2}, 50);
  EXPECT_EQ(d.points.size(), 200u);
  for (const cplx z : d.points) {
    EXPECT_TRUE(on_set(StarEven{2}, z, 1e-10)) << z;
    EXPECT_TRUE(std::abs(z.real()) <= 1e-12 || std::abs(z.imag()) <= 1e-12) << z;
  }
  const double r = std::sqrt(2.0);
  for (const cplx e : {cplx{r}, cplx{-r}, cplx{0.0, r}, cplx{0.0, -r}}) EXPECT_TRUE(contains(d.points, e)) << e;
}

TEST(Discretize, Interval) {
  const auto d = discretize(Interval{-2.0, 2.0}, 33);
  EXPECT_EQ(d.points.size(), 33u);
  EXPECT_TRUE(contains(d.points, -2.0));
  EXPECT_TRUE(contains(d.points, 2.0));
}

TEST(Discretize, StretchedPlus) {
  const QuadraticPreimage q{0.0, -1.5};
  const auto d = discretize(q, 40);
  EXPECT_EQ(d.points.size(), 160u);
  for (const cplx z : d.points) EXPECT_TRUE(on_set(q, z, 1e-10)) << z;
}

TEST(Discretize, EverySpecRespectsItsDefinition) {
  const SetSpec specs[] = {Interval{-1.0, 3.0},       CircularArc{1.0},        StarEven{3},
                           StarOdd{3},                QuadraticPreimage{cplx{0.5, 0.2}, 3.0},
                           shabat_example(),          SpikedCircle{1, 1},      SpikedCircle{2, 3}};
  for (const auto& s : specs) {
    const auto d = discretize(s, 24, Clustering::Arcsine);
    EXPECT_GT(d.points.size(), 0u) << kind_name(s);
    for (const cplx z : d.points) EXPECT_TRUE(on_set(s, z, 1e-10)) << kind_name(s) << " " << z;
    const auto u = discretize(s, 24, Clustering::Uniform);
    for (const cplx z : u.points) EXPECT_TRUE(on_set(s, z, 1e-10)) << kind_name(s) << " " << z;
  }
}

TEST(Discretize, RejectsSmallPerEdge) { EXPECT_THROW(discretize(StarEven{2}, 7), DomainError); }

TEST(Discretize, ShabatTreeHasSevenEdges) {
  const auto d = discretize(shabat_example(), 30);
  // Three triple roots (two over t = 0, one over t = 1) are each shared by three edges.
  EXPECT_EQ(d.points.size(), 7u * 30u - 6u);
}

TEST(Validate, Invariants) {
  EXPECT_THROW(validate(CircularArc{0.0}), DomainError);
  EXPECT_THROW(validate(CircularArc{std::numbers::pi}), DomainError);
  EXPECT_THROW(validate(SpikedCircle{1, 2}), DomainError);
  EXPECT_THROW(validate(SpikedCircle{0, 1}), DomainError);
  EXPECT_TRUE((QuadraticPreimage{0.0, -1.5}).connected());
  EXPECT_FALSE((QuadraticPreimage{0.0, 3.0}).connected());
  EXPECT_FALSE((QuadraticPreimage{0.0, cplx{0.0, 0.5}}).connected());
}

TEST(SpikedCircle, RadiusExamples) {
  const auto g = spiked_circle_geometry(1, 1);
  EXPECT_EQ(g.spikes, 8);
  EXPECT_NEAR(g.c, 4.11145, 1e-5);
  EXPECT_NEAR(g.rho, 3.85184, 1e-5);
  EXPECT_NEAR(spiked_circle_radius(1, 1), 1.18361, 1e-5);
  const auto h = spiked_circle_geometry(1, 3);
  EXPECT_EQ(h.spikes, 16);
  EXPECT_NEAR(h.c, 8.28967, 1e-5);
}

TEST(SpikedCircle, MassConsistency) {
  for (const int l : {1, 3})
    for (int n = 1; n <= 50; ++n) {
      const auto g = spiked_circle_geometry(n, l);
      const double mass = spiked_circle_circle_mass(g.spikes, g.radius);
      EXPECT_NEAR(mass, (2.0 * n + 1) / (4.0 * n + l), 1e-12);
      EXPECT_NEAR(mass + (2.0 * n + l - 1) / (4.0 * n + l), 1.0, 1e-12);
    }
}

TEST(SpikedCircle, CapacityClosedForm) {
  EXPECT_NEAR(cap_spiked_circle(1, 1).value, 1.0544126, 1e-7);
  EXPECT_NEAR(cap_spiked_circle(2, 1).value, 1.033875, 1e-6);
  EXPECT_NEAR(std::pow(cap_spiked_circle(1, 3).value, 7), 1.51190, 1e-5);
  for (int n = 1; n <= 50; ++n) EXPECT_NEAR(cap_spiked_circle(n, 1).value, cap_spiked_closed(n), 1e-12) << n;
}

TEST(SpikedCircle, PowersApproachSqrtTwo) {
  double prev1 = 0.0, prev3 = 1e9;
  for (int n = 1; n <= 50; ++n) {
    const double a = std::pow(cap_spiked_circle(n, 1).value, 4 * n + 1);
    const double b = std::pow(cap_spiked_circle(n, 3).value, 4 * n + 3);
    EXPECT_GT(a, prev1);
    EXPECT_LT(b, prev3);
    EXPECT_LT(a, std::sqrt(2.0));
    EXPECT_GT(b, std::sqrt(2.0));
    prev1 = a;
    prev3 = b;
  }
  EXPECT_NEAR(prev1, std::sqrt(2.0), 5e-3);
  EXPECT_NEAR(prev3, std::sqrt(2.0), 5e-3);
}

TEST(Phi, Examples) {
  const cplx p = phi_star(2.0);
  EXPECT_NEAR(p.imag(), 0.0, 1e-15);
  EXPECT_GT(p.real(), 1.0);
  const cplx diag = std::polar(std::pow(2.0, 0.25), std::numbers::pi / 4);  // z^2 = i sqrt2, not on E_2
  EXPECT_GE(std::abs(phi_star(diag)), 1.0);
  EXPECT_NEAR(std::abs(phi_star(cplx{0.0, std::sqrt(2.0)})), 1.0, 1e-7);  // boundary limit
  EXPECT_NEAR(std::abs(phi_star(1.0)), 1.0, 1e-12);
  EXPECT_LE(std::abs(phi_star(10.0) / 10.0 - 1.0), 0.01);
}

TEST(Phi, MapsExteriorOutsideDisk) {
  for (int i = 0; i < 200; ++i) {
    const cplx z = std::polar(0.2 + 0.03 * i, 0.37 * i + 0.1);
    if (on_set(StarEven{2}, z, 1e-9)) continue;
    EXPECT_GE(std::abs(phi_star(z)), 1.0 - 1e-12) << z;
  }
}

TEST(Capacity, Routes) {
  EXPECT_EQ(capacity(StarEven{5}).value, 1.0);
  EXPECT_EQ(capacity(Interval{0.0, 4.0}).value, 1.0);
  EXPECT_NEAR(capacity(CircularArc{std::numbers::pi / 2}).value, std::sin(std::numbers::pi / 4), 1e-15);
  EXPECT_NEAR(capacity(shabat_example()).value, std::pow(0.25 / (8.0 / 729.0), 1.0 / 7.0), 1e-14);
  EXPECT_EQ(capacity(SpikedCircle{1, 1}).route, CapacityRoute::SpikedCircleReduction);
}
