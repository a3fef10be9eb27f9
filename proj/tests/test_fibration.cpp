#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "psh/error.hpp"
#include "psh/fibration.hpp"

using namespace psh;
using std::numbers::pi;
using cplx = std::complex<double>;

namespace {

SliceFamily family(const std::string& rho, const std::string& phi, double t_half = 0.5, double h_t = 0.25) {
  auto f = SliceFamily::parse(rho, phi, 1);
  f.t_grid = TGrid::centered({0.0, 0.0}, t_half, h_t);
  return f;
}

TField synthetic(double (*f)(cplx)) {
  TField fld;
  fld.grid = TGrid::centered({0.0, 0.0}, 1.0, 0.1);
  for (std::size_t c = 0; c < fld.grid.size(); ++c) {
    fld.values.push_back(f(fld.grid.at(c)));
    fld.state.push_back(CellState::finite);
  }
  return fld;
}

// Strictly psh quadratic a|z|^2 + b|t|^2 + 2 re(c t zbar) + pluriharmonic terms, with |c|^2 < a b.
struct Quadratic {
  double a, b;
  cplx c;
  std::string text;
  double D() const { return b - std::norm(c) / a; }
};

Quadratic random_quadratic(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.3, 1.5), v(-1.0, 1.0);
  Quadratic q;
  q.a = u(rng);
  q.b = u(rng);
  const double bound = std::sqrt(q.a * q.b) * 0.9;
  q.c = cplx(v(rng), v(rng)) * (bound / std::sqrt(2.0));
  const double d = 0.3 * v(rng), e = 0.3 * v(rng);
  char buf[512];
  // re(c t zbar) = re c (xu + yv) - im c (yu - xv)
  std::snprintf(buf, sizeof buf,
                "%.17g*abs2(z) + %.17g*abs2(t) + 2*(%.17g*(re(t)*re(z) + im(t)*im(z)) - %.17g*(im(t)*re(z) - "
                "re(t)*im(z))) + %.17g*(re(z)^2 - im(z)^2) + %.17g*(re(t)^2 - im(t)^2)",
                q.a, q.b, q.c.real(), q.c.imag(), d, e);
  q.text = buf;
  return q;
}

}  // namespace

TEST_CASE("slice domains") {
  auto f = family("abs2(z) - exp(2*re(t))", "0");
  auto d0 = slice_domain(f, 0.0);
  REQUIRE(d0);
  CHECK(std::abs(d0->total_weight() - pi) < 0.03 * pi);
  auto g = family("abs2(z) - 1", "0");
  auto a = slice_domain(g, cplx(0.3, 0.1)), b = slice_domain(g, cplx(-0.4, 0.2));
  CHECK(a->mask() == b->mask());
  auto v = family("abs2(z) + re(t)", "0");
  CHECK_FALSE(slice_domain(v, 1.0).has_value());
}

TEST_CASE("synthetic Laplacians") {
  auto up = discrete_laplacian_min(synthetic([](cplx t) { return std::norm(t); }));
  CHECK(up.min == doctest::Approx(4.0).epsilon(1e-9));
  auto down = scan_field(synthetic([](cplx t) { return -std::norm(t); }), 0.1);
  CHECK(down.laplacian.min == doctest::Approx(-4.0).epsilon(1e-9));
  CHECK_FALSE(down.pass);
}

TEST_CASE("-inf cells are excluded from stencils") {
  auto fld = synthetic([](cplx t) { return std::norm(t); });
  const std::size_t mid = fld.grid.size() / 2;
  fld.values[mid] = kNegInf;
  fld.state[mid] = CellState::neg_inf;
  auto r = scan_field(fld, 0.1);
  CHECK(r.neg_inf_cells == 1);
  CHECK(r.laplacian.skipped == 5);
  CHECK(r.pass);
  TField all;
  all.grid = TGrid::centered({0, 0}, 0.1, 0.1);
  all.values.assign(all.grid.size(), kNegInf);
  all.state.assign(all.grid.size(), CellState::neg_inf);
  try {
    discrete_laplacian_min(all);
    FAIL("expected field_too_singular");
  } catch (const LabError& e) {
    CHECK(e.kind() == ErrorKind::field_too_singular);
  }
}

TEST_CASE("Hartogs family: harmonic field with the closed form") {
  auto f = family("abs2(z) - exp(2*re(t))", "0");
  f.fiber_box = Box::cube(2, 2.0);
  f.h = 1.0 / 40;
  auto r = psh_scan(f);
  for (std::size_t c = 0; c < r.field.grid.size(); ++c) {
    const cplx t = r.field.grid.at(c);
    CHECK(std::abs(r.field.values[c] - (-std::log(pi) - 2.0 * t.real())) < 0.03);
  }
  CHECK(r.pass);
  CHECK(std::abs(r.laplacian.min) <= r.tol);
  MESSAGE("hartogs min laplacian " << r.laplacian.min << " tol " << r.tol);
}

TEST_CASE("weight shift c re t on a fixed disk") {
  auto f = family("abs2(z) - 1", "0.8*re(t)");
  auto fld = log_kernel_field(f);
  for (std::size_t c = 0; c < fld.grid.size(); ++c)
    CHECK(std::abs(fld.values[c] - (std::log(1 / pi) + 0.8 * fld.grid.at(c).real())) < 0.02);
}

TEST_CASE("moving-centre weight and Oka mode pass") {
  auto f = family("abs2(z) - 1", "abs2(z - t)", 0.4, 0.2);
  auto r = psh_scan(f);
  CHECK(r.neg_inf_cells == 0);
  CHECK(r.pass);
  MESSAGE("|z-t|^2 min laplacian " << r.laplacian.min << " tol " << r.tol);
  auto o = family("abs2(z) - 1", "abs2(z)", 1.0, 0.25);
  o.z_mode = SliceFamily::ZMode::oka;
  o.direction = {0.3, 0.0};
  auto ro = psh_scan(o);
  CHECK(ro.pass);
  MESSAGE("oka min laplacian " << ro.laplacian.min << " tol " << ro.tol);
}

TEST_CASE("property: radial reduction matches -log of the fiber integral") {
  auto f = family("abs2(z) - 1", "abs2(z)*(1 + 0.5*re(t)) + im(t)");
  auto fld = log_kernel_field(f);
  for (std::size_t c = 0; c < fld.grid.size(); c += 3) {
    auto p = slice_problem(f, fld.grid.at(c));
    const double direct = -std::log(integrate([&](std::span<const double> x) { return std::exp(-p->weight(x)); }, p->dom));
    CHECK(std::abs(fld.values[c] - direct) < 0.02);
  }
}

TEST_CASE("property: adding a harmonic function of t keeps the verdict") {
  auto base = family("abs2(z) - 1", "abs2(z - t)", 0.4, 0.2);
  auto shifted = family("abs2(z) - 1", "abs2(z - t) + 0.7*re(t) - 1.3*im(t)", 0.4, 0.2);
  auto a = psh_scan(base), b = psh_scan(shifted);
  CHECK(a.pass == b.pass);
  CHECK(std::abs(a.laplacian.min - b.laplacian.min) < 2 * std::max(a.tol, b.tol));
}

TEST_CASE("property: -inf cells form a closed set on singular families") {
  // weight 2 log|z - t| with multiplicity 2: e^{-phi} = |z - t|^{-4}, so K_t(0,0) = 0 exactly when t = 0
  auto f = family("abs2(z) - 1", "2*log(abs2(z - t))", 0.5, 0.25);
  f.degree = 4;
  auto fld = log_kernel_field(f);
  int neg = 0;
  for (std::size_t c = 0; c < fld.grid.size(); ++c) {
    if (fld.state[c] != CellState::neg_inf) continue;
    ++neg;
    CHECK(std::abs(fld.grid.at(c)) < 1e-12);
  }
  CHECK(neg == 1);
}

TEST_CASE("Hessian bound: reference quadratics") {
  const std::vector<double> z0 = {0.2, -0.1};
  auto f1 = family("abs2(z) - 1", "abs2(z) + abs2(t)");
  auto r1 = hessian_bound_check(f1, 0.0, z0, 0.1);
  CHECK(r1.pass);
  CHECK(r1.rhs == doctest::Approx(kernel_diag(*slice_problem(f1, 0.0), z0).value).epsilon(0.02));
  auto f2 = family("abs2(z) - 1", "abs2(z - t)");
  auto r2 = hessian_bound_check(f2, 0.0, z0, 0.1);
  CHECK(std::abs(r2.rhs) < 1e-6);
  CHECK(r2.pass);
  auto f3 = family("abs2(z) - 1", "2*abs2(z) + abs2(t) + re(t)*re(z) + im(t)*im(z)");
  auto r3 = hessian_bound_check(f3, 0.0, z0, 0.1);
  CHECK(r3.pass);
  MESSAGE("margins " << r1.margin << " " << r2.margin << " " << r3.margin);
}

TEST_CASE("property: Hessian bound on random strictly psh quadratics") {
  std::mt19937_64 rng(17);
  const std::vector<double> z0 = {0.1, 0.15};
  for (int k = 0; k < 10; ++k) {
    auto q = random_quadratic(rng);
    auto f = family("abs2(z) - 1", q.text);
    auto r = hessian_bound_check(f, cplx(0.1, -0.05), z0, 0.1);
    CHECK_MESSAGE(r.pass, q.text, " margin ", r.margin, " tol ", r.tol);
  }
}

TEST_CASE("Hessian bound rejects weights that are not strictly psh in z") {
  auto f = family("abs2(z) - 1", "abs2(t) + re(z)");
  try {
    hessian_bound_check(f, 0.0, std::vector<double>{0.0, 0.0}, 0.1);
    FAIL("expected not_strictly_psh");
  } catch (const LabError& e) {
    CHECK(e.kind() == ErrorKind::not_strictly_psh);
  }
}

TEST_CASE("monotone limit ladders") {
  for (auto s : {LimitScenario::cutoff_weights, LimitScenario::increasing_domains, LimitScenario::decreasing_weights}) {
    auto r = monotone_limit_suite(s);
    CHECK_MESSAGE(r.monotone, to_string(s));
    CHECK_MESSAGE(r.converged, to_string(s), " last ", r.values.back(), " oracle ", r.limit_oracle);
  }
  auto d = monotone_limit_suite(LimitScenario::increasing_domains);
  for (std::size_t k = 0; k < d.values.size(); ++k) {
    const double r = 1.0 - 1.0 / (d.parameters[k] + 1.0);
    CHECK(std::abs(d.values[k] * pi * r * r - 1.0) < 0.02);
  }
}
