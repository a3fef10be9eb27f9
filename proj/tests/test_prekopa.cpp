#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "psh/error.hpp"
#include "psh/prekopa.hpp"

using namespace psh;
using std::numbers::pi;

namespace {

MarginalProblem gaussian(const std::string& phi) {
  auto mp = MarginalProblem::parse(phi, 1, 8.0);
  mp.x_lo = -1.0;
  mp.x_hi = 1.0;
  mp.h_x = 0.1;
  mp.h_y = 0.01;
  return mp;
}

const std::vector<VarDecl> kX = {{"x0", VarKind::real}, {"x1", VarKind::real}};

std::vector<Expression> exprs(std::initializer_list<const char*> texts) {
  std::vector<Expression> out;
  for (auto t : texts) out.push_back(Expression::parse(t, kX));
  return out;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "(%.17g)", v);
  return buf;
}

}  // namespace

TEST_CASE("Gaussian marginals match the closed forms") {
  auto mp = gaussian("x^2 + x*y + y^2");
  auto v = marginal(mp);
  auto xs = mp.x_grid();
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(std::abs(v[i] - (0.75 * xs[i] * xs[i] - 0.5 * std::log(pi))) < 1e-4);
  auto c = convexity_check(v, mp.h_x, 1e-6);
  CHECK(c.pass);
  CHECK(c.min_second_difference == doctest::Approx(1.5).epsilon(0.05));

  auto dec = marginal(gaussian("x^2 + y^2"));
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(std::abs(dec[i] - (xs[i] * xs[i] - 0.5 * std::log(pi))) < 1e-4);

  auto flat = marginal(gaussian("exp(x)"));
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(flat[i] == doctest::Approx(std::exp(xs[i]) - std::log(16.0)));
}

TEST_CASE("convexity check on synthetic values") {
  std::vector<double> quartic, concave;
  for (int i = -10; i <= 10; ++i) {
    const double x = 0.1 * i;
    quartic.push_back(x * x * x * x);
    concave.push_back(-x * x);
  }
  auto q = convexity_check(quartic, 0.1, 1e-9);
  CHECK(q.pass);
  CHECK(std::abs(q.min_second_difference) < 0.03);
  auto n = convexity_check(concave, 0.1, 0.01);
  CHECK_FALSE(n.pass);
  CHECK(n.min_second_difference == doctest::Approx(-2.0));
  CHECK_THROWS_AS(convexity_check(std::vector<double>{1.0, HUGE_VAL, 2.0}, 0.1, 0.0), LabError);
}

TEST_CASE("property: marginals of convex weights are convex") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::string> weights;
  for (int k = 0; k < 10; ++k) {
    // PSD Hessian [[a, b], [b, c]] with c > 0 and a c >= b^2
    const double c = 0.5 + std::abs(u(rng)), b = u(rng), a = b * b / c + 0.3 * std::abs(u(rng));
    weights.push_back(num(a) + "*x^2 + 2*" + num(b) + "*x*y + " + num(c) + "*y^2 + " + num(u(rng)) + "*x");
  }
  weights.push_back("x^4 + y^4");
  weights.push_back("log(exp(x) + exp(-x)) + log(exp(y) + exp(-y))");
  for (const auto& w : weights) {
    auto mp = gaussian(w);
    mp.y_box = Box::cube(1, 12.0);
    mp.h_y = 0.01;
    auto r = convexity_check(marginal(mp), mp.h_x, 1e-6);
    CHECK_MESSAGE(r.pass, w, " min ", r.min_second_difference);
  }
}

TEST_CASE("negative control: indefinite Hessian fails the convexity check") {
  auto r = convexity_check(marginal(gaussian("x^2 - 3*x*y + y^2")), 0.1, 1e-6);
  CHECK_FALSE(r.pass);
  CHECK(r.min_second_difference == doctest::Approx(-2.5).epsilon(0.05));
}

TEST_CASE("two-variable fibers") {
  auto mp = MarginalProblem::parse("x^2 + y1^2 + y2^2 + x*y1", 2, 6.0);
  mp.h_y = 0.05;
  auto v = marginal(mp);
  auto xs = mp.x_grid();
  // int e^{-(y1^2 + x y1)} e^{-y2^2} = pi e^{x^2/4}
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(std::abs(v[i] - (0.75 * xs[i] * xs[i] - std::log(pi))) < 1e-4);
}

TEST_CASE("minimum principle limit on two Gaussians") {
  const std::vector<double> ladder = {1, 2, 4, 8, 16, 32, 64, 128, 256};
  for (const char* w : {"x^2 + y^2", "x^2 + (y - 1)^2"}) {
    auto mp = gaussian(w);
    auto r = minimum_principle_limit(mp, ladder);
    CHECK(r.monotone);
    CHECK(r.within_band);
    for (std::size_t i = 0; i < r.x.size(); ++i) {
      CHECK(std::abs(r.values.back()[i] - r.x[i] * r.x[i]) <= 0.05);
      CHECK(r.infimum[i] == doctest::Approx(r.x[i] * r.x[i]).epsilon(1e-3).scale(1.0));
    }
  }
  auto flat = gaussian("x^2");
  auto r = minimum_principle_limit(flat, ladder);
  for (std::size_t i = 0; i < r.x.size(); ++i)
    CHECK(r.values.back()[i] == doctest::Approx(r.x[i] * r.x[i]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("p-marginals stay finite at large p") {
  auto mp = gaussian("100*(x^2 + y^2) + 50");
  auto v = p_marginal(mp, 256);
  for (double x : v) CHECK(std::isfinite(x));
}

TEST_CASE("identity residual: reference cases") {
  const std::vector<double> pt = {0.3, -0.7};
  auto s = hessian_identity_sides(Expression::parse("0", kX), exprs({"x0", "x1"}), pt, 1e-3);
  // sum_jk d_j d_k (x_j x_k) = 6
  CHECK(s.first == doctest::Approx(6.0).epsilon(1e-6));
  CHECK(s.second == doctest::Approx(6.0).epsilon(1e-6));
  CHECK(hessian_identity_residual(Expression::parse("0", kX), exprs({"x0", "x1"}), pt, 1e-2) < 10 * 1e-4);
  CHECK(hessian_identity_residual(Expression::parse("x0^2 + x1", kX), exprs({"0", "0"}), pt, 1e-2) == 0.0);
}

TEST_CASE("property: identity residual converges at second order") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int k = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::string phi = num(0.5 + std::abs(u(rng))) + "*x0^2 + " + num(u(rng)) + "*x0*x1 + " +
                            num(0.5 + std::abs(u(rng))) + "*x1^2 + 0.2*exp(" + num(u(rng)) + "*x0 + " +
                            num(u(rng)) + "*x1)";
    const std::string g0 = num(u(rng)) + " + " + num(u(rng)) + "*x0 + " + num(u(rng)) + "*x1^2";
    const std::string g1 = num(u(rng)) + "*x0*x1 + " + num(u(rng)) + "*exp(" + num(0.5 * u(rng)) + "*x1)";
    auto P = Expression::parse(phi, kX);
    auto G = exprs({g0.c_str(), g1.c_str()});
    const std::vector<double> pt = {0.5 * u(rng), 0.5 * u(rng)};
    const double r1 = hessian_identity_residual(P, G, pt, 1e-2);
    const double r2 = hessian_identity_residual(P, G, pt, 5e-3);
    const double r3 = hessian_identity_residual(P, G, pt, 2.5e-3);
    CHECK_MESSAGE(r1 / r2 >= 3.0, phi, " ratios ", r1 / r2, " ", r2 / r3);
    CHECK_MESSAGE(r2 / r3 >= 3.0, phi, " ratios ", r1 / r2, " ", r2 / r3);
    ++k;
  }
  CHECK(k == 20);
}

TEST_CASE("n = 1 certificate on Gaussian-type weights") {
  auto phi1 = as_field(Expression::parse("x0^2 + x1^2", kX));
  auto r1 = prekopa_certificate(phi1, -1.0, 1.0, 0.1, -8.0, 8.0);
  CHECK(r1.pass);
  for (const auto& row : r1.rows) CHECK(row.k == doctest::Approx(std::exp(row.t * row.t) / std::sqrt(pi)).epsilon(1e-6));
  auto phi2 = as_field(Expression::parse("x0^2 + x1^2 + x0*x1", kX));
  auto r2 = prekopa_certificate(phi2, -1.0, 1.0, 0.1, -8.0, 8.0);
  CHECK(r2.pass);
  // closed form k'' = k (9t^2/4 + 3/2)
  for (const auto& row : r2.rows)
    CHECK(row.k2_integral == doctest::Approx(row.k * (2.25 * row.t * row.t + 1.5)).epsilon(1e-3));
  auto sep = as_field(Expression::parse("exp(x0) + x1^2", kX));
  auto r3 = prekopa_certificate(sep, -1.0, 1.0, 0.1, -8.0, 8.0);
  CHECK(r3.pass);
  MESSAGE("certificate errors " << r1.max_relative_error << " " << r2.max_relative_error << " "
                                << r3.max_relative_error);
}

TEST_CASE("certificate rejects weights without decay at the box edge") {
  auto phi = as_field(Expression::parse("x0^2 + 0.01*x1^2", kX));
  try {
    prekopa_certificate(phi, -1.0, 1.0, 0.1, -8.0, 8.0);
    FAIL("expected not_admissible");
  } catch (const LabError& e) {
    CHECK(e.kind() == ErrorKind::not_admissible);
  }
}
