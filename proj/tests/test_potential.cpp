#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "psh/error.hpp"
#include "psh/potential.hpp"

using namespace psh;
using std::numbers::pi;

namespace {

GridDomain disk(double r, double h, std::vector<double> c = {0.0, 0.0}) {
  return GridDomain::ball(c, r, h, Dimension::real(2));
}
GridDomain ball3(double r, double h, std::vector<double> c = {0.0, 0.0, 0.0}) {
  return GridDomain::ball(c, r, h, Dimension::real(3));
}

double at_point(const GridDomain& dom, const GreenSolution& s, std::vector<double> x) {
  return interpolate(dom, s.g, x);
}

}  // namespace

TEST_CASE("Green potential of the unit disk against log|z| / (2 pi)") {
  const double h = 1.0 / 256;
  auto dom = disk(1.0, h);
  GreenProblem gp{dom, Measure::point({0.0, 0.0}, 4 * h)};
  auto s = green_potential(gp);
  CHECK(s.residual <= 1e-8);
  CHECK(s.mass == doctest::Approx(1.0));
  for (double r : {0.3, 0.5, 0.7, 0.9}) {
    const double oracle = std::log(r) / (2 * pi);
    const double v = at_point(dom, s, {r * 0.6, r * 0.8});
    CHECK_MESSAGE(std::abs(v - oracle) <= 0.03 * std::abs(oracle), "r ", r, " g ", v, " oracle ", oracle);
  }
}

TEST_CASE("Green potential of the unit ball in R^3") {
  const double h = 1.0 / 32;
  auto dom = ball3(1.0, h);
  GreenProblem gp{dom, Measure::point({0.0, 0.0, 0.0}, 4 * h)};
  auto s = green_potential(gp);
  for (double r : {0.4, 0.6, 0.8}) {
    const double oracle = -(1.0 / r - 1.0) / (4 * pi);
    const double v = at_point(dom, s, {r / std::sqrt(3.0), r / std::sqrt(3.0), r / std::sqrt(3.0)});
    CHECK_MESSAGE(std::abs(v - oracle) <= 0.05 * std::abs(oracle), "r ", r, " g ", v, " oracle ", oracle);
  }
}

TEST_CASE("zero measure gives zero potential") {
  auto dom = disk(1.0, 1.0 / 32);
  auto s = green_potential({dom, Measure::zero(2)});
  CHECK(std::all_of(s.g.begin(), s.g.end(), [](double v) { return v == 0.0; }));
  CHECK(energy({dom, Measure::zero(2)}) == 0.0);
}

TEST_CASE("property: maximum principle g <= 0 for random bumps") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  const double h = 1.0 / 32;
  auto dom = disk(1.0, h);
  for (int k = 0; k < 10; ++k) {
    auto s = green_potential({dom, Measure::point({u(rng), u(rng)}, 4 * h, 0.5 + 0.1 * k)});
    double gmax = -HUGE_VAL;
    for (std::size_t i = 0; i < s.g.size(); ++i)
      if (dom.interior(i)) gmax = std::max(gmax, s.g[i]);
    CHECK(gmax <= 1e-12);
  }
}

TEST_CASE("support too close to the boundary is rejected") {
  const double h = 1.0 / 32;
  auto dom = disk(1.0, h);
  try {
    green_potential({dom, Measure::point({0.9, 0.0}, 4 * h)});
    FAIL("expected precondition");
  } catch (const LabError& e) {
    CHECK(e.kind() == ErrorKind::precondition);
  }
}

TEST_CASE("ring energy and domain scaling") {
  const double h = 1.0 / 128;
  const double rho0 = 0.5;
  auto ring = Measure::ring({0.0, 0.0}, rho0, 4 * h);
  const double u1 = energy({disk(1.0, h), ring});
  const double oracle = std::log(rho0) / (2 * pi);
  CHECK_MESSAGE(std::abs(u1 - oracle) <= 0.05 * std::abs(oracle), "u ", u1, " oracle ", oracle);
  // doubling the radius lowers u by log 2 / (2 pi)
  const double u2 = energy({disk(2.0, h), ring});
  const double shift = -std::log(2.0) / (2 * pi);
  CHECK_MESSAGE(std::abs((u2 - u1) - shift) <= 0.1 * std::abs(shift), "shift ", u2 - u1, " oracle ", shift);
}

TEST_CASE("property: enlarging the domain lowers the energy") {
  const double h = 1.0 / 64;
  auto mu = Measure::point({0.1, -0.05}, 4 * h);
  double prev = 0.0;
  for (double r : {0.5, 0.7, 1.0, 1.4}) {
    const double u = energy({disk(r, h), mu});
    CHECK(u < 0.0);
    if (r > 0.5) CHECK(u < prev);
    prev = u;
  }
}

TEST_CASE("energy scan: disks of radius e^{re t}") {
  auto fam = EnergyFamily::parse("x1^2 + x2^2 - exp(2*re(t))", 2, true, 1.6);
  auto mu = Measure::point({0.0, 0.0}, 4 * fam.h);
  auto r = energy_scan(fam, mu, TGrid::centered({0.0, 0.0}, 0.25, 0.125), EnergyMode::complex_subharmonic);
  CHECK_MESSAGE(r.pass, "min ", r.min_curvature, " tol ", r.tol);
  // u = c - re t / (2 pi): harmonic in t
  CHECK(std::abs(r.min_curvature) <= r.tol);
  const double slope = (r.u[4] - r.u[0]) / 0.5;
  CHECK(slope == doctest::Approx(-1.0 / (2 * pi)).epsilon(0.05));
}

TEST_CASE("energy scan: translated disks") {
  auto fam = EnergyFamily::parse("(x1 - re(t)/4)^2 + x2^2 - 1", 2, true, 1.4);
  auto mu = Measure::point({0.0, 0.0}, 4 * fam.h);
  auto r = energy_scan(fam, mu, TGrid::centered({0.0, 0.0}, 1.0, 0.5), EnergyMode::complex_subharmonic);
  CHECK_MESSAGE(r.pass, "min ", r.min_curvature, " tol ", r.tol);
  // u(c) - u(0) = -log(1 - c^2) / (2 pi), c = re t / 4
  const double du = r.u[4] - r.u[2];
  CHECK(du == doctest::Approx(-std::log(1 - 1.0 / 16) / (2 * pi)).epsilon(0.15));
}

TEST_CASE("real mode: sublevel sets of a subharmonic v") {
  auto fam = EnergyFamily::graph("x1^2 + 2*x2^2", 2, 1.4);
  auto mu = Measure::point({0.0, 0.0}, 4 * fam.h);
  TGrid grid{{0.5, 0.0}, 0.25, 5, 1};
  auto r = energy_scan(fam, mu, grid, EnergyMode::real_convex);
  CHECK_MESSAGE(r.pass, "min ", r.min_curvature, " tol ", r.tol);
  CHECK(r.min_curvature > 0.0);

  auto bad = EnergyFamily::graph("-(x1^2 + x2^2)", 2, 1.4);
  CHECK_FALSE(condition_C_check(bad, 0.5, 1.5).pass);
  CHECK_THROWS_AS(energy_scan(bad, mu, grid, EnergyMode::real_convex), LabError);

  auto general = EnergyFamily::parse("x1^2 + x2^2 - t", 2, false, 1.4);
  try {
    condition_C_check(general, 0.5, 1.5);
    FAIL("expected unsupported_family");
  } catch (const LabError& e) {
    CHECK(e.kind() == ErrorKind::unsupported_family);
  }
  auto convex = EnergyFamily::convex("x1^2 + x2^2 - t", 2, 1.4);
  CHECK(condition_C_check(convex, 0.5, 1.5).pass);
}

TEST_CASE("Robin function of a ball") {
  // Lambda(x) = R / (4 pi (R^2 - |x|^2))
  for (double R : {1.0, 2.0}) {
    auto dom = ball3(R, R / 32);
    for (double s : {0.0, 0.3, 0.5}) {
      const std::vector<double> x = {s * R, 0.0, 0.0};
      const double oracle = R / (4 * pi * (R * R - s * s * R * R));
      const double v = robin_function(dom, x);
      // 2% at the centre, 3% at |x| = R / 2
      CHECK_MESSAGE(v == doctest::Approx(oracle).epsilon(s == 0.0 ? 0.02 : 0.03), "R ", R, " s ", s, " Lambda ", v, " oracle ", oracle);
    }
  }
  // first-order convergence: the error at least roughly halves with h
  const std::vector<double> o = {0.0, 0.0, 0.0};
  const double exact = 1.0 / (4 * pi);
  const double e16 = std::abs(robin_function(ball3(1.0, 1.0 / 16), o) - exact);
  const double e32 = std::abs(robin_function(ball3(1.0, 1.0 / 32), o) - exact);
  MESSAGE("Robin error h=1/16 " << e16 << " h=1/32 " << e32);
  CHECK(e16 / e32 >= 1.7);
}

TEST_CASE("Robin points near the boundary are rejected") {
  auto dom = ball3(1.0, 1.0 / 16);
  const std::vector<double> x = {0.9, 0.0, 0.0};
  CHECK_THROWS_AS(robin_function(dom, x), LabError);
}

TEST_CASE("Lambda and log Lambda are convex along diameters") {
  const double h = 1.0 / 16;
  auto dom = ball3(1.0, h);
  std::vector<Segment> segs = {{{-0.5, 0, 0}, {0.5, 0, 0}}, {{0, -0.5, 0}, {0, 0.5, 0}}, {{-0.3, -0.3, -0.3}, {0.3, 0.3, 0.3}}};
  auto r = robin_convexity_scan(dom, segs, 5, 0.0);
  CHECK_MESSAGE(r.pass, "min second difference ", r.min_second_difference);
  CHECK(r.log_pass);
  // second derivative of R / (4 pi (R^2 - s^2)) at 0 is 1 / (2 pi)
  const auto& v = r.values[0];
  const double d2 = (v[1] - 2 * v[2] + v[3]) / (0.25 * 0.25);
  CHECK(d2 == doctest::Approx(1.0 / (2 * pi)).epsilon(0.25));

  auto box = GridDomain::build(
      [](std::span<const double> x) {
        return std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2])}) - 1.0;
      },
      Box::cube(3, 1.25), h, Dimension::real(3));
  auto rb = robin_convexity_scan(box, {{{-0.5, 0.1, 0}, {0.5, 0.1, 0}}, {{-0.4, -0.4, 0.2}, {0.4, 0.4, 0.2}}}, 5, 0.0);
  CHECK_MESSAGE(rb.pass, "box min second difference ", rb.min_second_difference);
}

TEST_CASE("harmonic centre of symmetric convex bodies") {
  const double h = 1.0 / 16;
  auto hc = harmonic_center(ball3(1.0, h, {0.2, -0.1, 0.0}));
  const std::vector<double> c = {0.2, -0.1, 0.0};
  for (int a = 0; a < 3; ++a) CHECK(std::abs(hc.point[static_cast<std::size_t>(a)] - c[static_cast<std::size_t>(a)]) < 2 * h);
  auto box = GridDomain::build(
      [](std::span<const double> x) {
        return std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2])}) - 1.0;
      },
      Box::cube(3, 1.25), h, Dimension::real(3));
  auto hb = harmonic_center(box);
  MESSAGE("box centre " << hb.point[0] << " " << hb.point[1] << " " << hb.point[2] << " evals " << hb.evaluations);
  for (double x : hb.point) CHECK(std::abs(x) < 2 * h);
}

TEST_CASE("non-convex domains are rejected") {
  auto dumbbell = GridDomain::build(
      [](std::span<const double> x) {
        const double a = std::hypot(x[0] - 0.6, x[1], x[2]) - 0.45, b = std::hypot(x[0] + 0.6, x[1], x[2]) - 0.45;
        return std::min(a, b);
      },
      Box::cube(3, 1.25), 1.0 / 16, Dimension::real(3));
  CHECK_THROWS_AS(check_convex(dumbbell), LabError);
}
