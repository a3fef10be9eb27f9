#include "psh/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "psh/bergman.hpp"
#include "psh/error.hpp"
#include "psh/fibration.hpp"
#include "psh/lelong.hpp"
#include "psh/potential.hpp"
#include "psh/prekopa.hpp"

namespace psh {

namespace {

using cplx = std::complex<double>;
using std::numbers::pi;

struct Sink {
  std::vector<Check>& out;

  void expect(std::string id, bool ok, double value, double bound, std::string locator = {}) {
    Check c;
    c.id = std::move(id);
    c.verdict = ok ? Verdict::pass : Verdict::fail;
    c.value = value;
    c.bound = bound;
    if (!ok) c.locator = locator.empty() ? c.id : std::move(locator);
    out.push_back(std::move(c));
  }
  // |value - oracle| <= rel |oracle|
  void near(std::string id, double value, double oracle, double rel, std::string locator = {}) {
    const double err = std::abs(value - oracle) / std::abs(oracle);
    expect(std::move(id), err <= rel, err, rel, std::move(locator));
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "(%.17g)", v);
  return buf;
}

std::string tau_log(double tau) { return num(tau) + "*0.5*log(abs2(z))"; }

const std::vector<VarDecl> kZ = {{"z", VarKind::complex}};
const std::vector<double> kOrigin = {0.0, 0.0};

GridDomain unit_disk(double h = 1.0 / 64) { return GridDomain::ball(kOrigin, 1.0, h, Dimension::complex(1)); }

BergmanProblem disk_problem(const std::string& phi, int degree = 8) {
  return make_problem(unit_disk(), Expression::parse(phi, kZ), degree, Normalization::lebesgue);
}

SliceFamily slice_family(const std::string& rho, const std::string& phi, double t_half, double h_t) {
  auto f = SliceFamily::parse(rho, phi, 1);
  f.t_grid = TGrid::centered({0.0, 0.0}, t_half, h_t);
  return f;
}

// ---------------------------------------------------------------------------

void c1_disk_kernel(Sink& s, const AcceptanceOptions& o) {
  BergmanKernel k(disk_problem("0"), o.mode);
  s.near("K(0,0) = 1/pi", k.diag(kOrigin).value, 1.0 / pi, 0.02);
  s.near("K(1/2,1/2) = 1/(pi (3/4)^2)", k.diag(std::vector<double>{0.5, 0.0}).value, 1.0 / (pi * 0.75 * 0.75), 0.03);
}

void c2_weight_shift(Sink& s, const AcceptanceOptions& o) {
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 5; ++k) {
    const std::string phi = num(0.2 + std::abs(u(rng))) + "*abs2(z) + " + num(u(rng)) + "*re(z) + " + num(u(rng)) + "*im(z)";
    const double c = 2.0 * u(rng);
    const std::vector<double> z = {0.4 * u(rng), 0.4 * u(rng)};
    auto base = disk_problem(phi);
    auto shifted = base;
    shifted.weight = [f = base.weight, c](std::span<const double> x) { return f(x) + c; };
    const double k0 = kernel_diag(base, z).value, k1 = kernel_diag(shifted, z).value;
    s.near("e^c rescaling, problem " + std::to_string(k), k1, std::exp(c) * k0, 1e-10, phi + " c=" + num(c));
  }
}

void c3_radial(Sink& s, const AcceptanceOptions&) {
  for (const char* phi : {"0", "abs2(z)", "0.5*abs2(z)^2", "0.5*log(abs2(z))", "-0.3*log(abs2(z))"}) {
    auto p = disk_problem(phi);
    s.near(std::string("radial identity ") + phi, kernel_diag(p, kOrigin).value, kernel_diag_radial(p), 0.02);
  }
}

void c4_scans(Sink& s, const AcceptanceOptions&) {
  auto h = slice_family("abs2(z) - exp(2*re(t))", "0", 0.5, 0.25);
  h.fiber_box = Box::cube(2, 2.0);
  h.h = 1.0 / 40;
  auto r = psh_scan(h);
  double worst = 0.0;
  std::string where;
  for (std::size_t c = 0; c < r.field.grid.size(); ++c) {
    const cplx t = r.field.grid.at(c);
    const double oracle = -std::log(pi) - 2.0 * t.real();
    const double err = std::abs(r.field.values[c] - oracle) / std::abs(oracle);
    if (err > worst) {
      worst = err;
      where = "t=" + num(t.real()) + "+" + num(t.imag()) + "i";
    }
  }
  s.expect("Hartogs field = -log pi - 2 re t", worst <= 0.03, worst, 0.03, where);
  s.expect("Hartogs min Laplacian >= -tol", r.laplacian.min >= -r.tol, r.laplacian.min, -r.tol);

  auto m = psh_scan(slice_family("abs2(z) - 1", "abs2(z - t)", 0.4, 0.2));
  s.expect("|z - t|^2 family", m.pass, m.laplacian.min, -m.tol);
  auto oka = slice_family("abs2(z) - 1", "abs2(z)", 1.0, 0.25);
  oka.z_mode = SliceFamily::ZMode::oka;
  oka.direction = {0.3, 0.0};
  auto ro = psh_scan(oka);
  s.expect("Oka-mode translate family", ro.pass, ro.laplacian.min, -ro.tol);
}

std::string random_quadratic(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.3, 1.5), v(-1.0, 1.0);
  const double a = u(rng), b = u(rng);
  const double bound = std::sqrt(a * b) * 0.9;
  const cplx c = cplx(v(rng), v(rng)) * (bound / std::sqrt(2.0));
  const double d = 0.3 * v(rng), e = 0.3 * v(rng);
  return num(a) + "*abs2(z) + " + num(b) + "*abs2(t) + 2*(" + num(c.real()) + "*(re(t)*re(z) + im(t)*im(z)) - " +
         num(c.imag()) + "*(im(t)*re(z) - re(t)*im(z))) + " + num(d) + "*(re(z)^2 - im(z)^2) + " + num(e) +
         "*(re(t)^2 - im(t)^2)";
}

void c5_hessian(Sink& s, const AcceptanceOptions& o) {
  const std::vector<double> z0 = {0.2, -0.1};
  for (const char* phi : {"abs2(z) + abs2(t)", "abs2(z - t)", "2*abs2(z) + abs2(t) + re(t)*re(z) + im(t)*im(z)"}) {
    auto r = hessian_bound_check(slice_family("abs2(z) - 1", phi, 0.5, 0.25), 0.0, z0, 0.1);
    s.expect(std::string("margin >= -tol: ") + phi, r.margin >= -r.tol, r.margin, -r.tol);
  }
  std::mt19937_64 rng(o.seed + 10);
  const std::vector<double> z1 = {0.1, 0.15};
  for (int k = 0; k < 10; ++k) {
    const auto q = random_quadratic(rng);
    auto r = hessian_bound_check(slice_family("abs2(z) - 1", q, 0.5, 0.25), cplx(0.1, -0.05), z1, 0.1);
    s.expect("random quadratic " + std::to_string(k), r.margin >= -r.tol, r.margin, -r.tol, q);
  }
}

void c6_limits(Sink& s, const AcceptanceOptions&) {
  for (auto sc : {LimitScenario::cutoff_weights, LimitScenario::increasing_domains, LimitScenario::decreasing_weights}) {
    auto r = monotone_limit_suite(sc);
    s.expect(std::string(to_string(sc)) + " monotone", r.monotone, r.values.back(), r.limit_oracle);
    const double err = std::abs(r.values.back() - r.limit_oracle) / r.limit_oracle;
    s.expect(std::string(to_string(sc)) + " converges", r.converged, err, 2.0 * r.quadrature_tol);
  }
}

MarginalProblem gaussian(const std::string& phi) {
  auto mp = MarginalProblem::parse(phi, 1, 8.0);
  mp.x_lo = -1.0;
  mp.x_hi = 1.0;
  mp.h_x = 0.1;
  mp.h_y = 0.01;
  return mp;
}

void c7_prekopa(Sink& s, const AcceptanceOptions&) {
  auto mp = gaussian("x^2 + x*y + y^2");
  auto v = marginal(mp);
  const auto xs = mp.x_grid();
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    worst = std::max(worst, std::abs(v[i] - (0.75 * xs[i] * xs[i] - 0.5 * std::log(pi))));
  s.expect("marginal = (3/4)x^2 - log(pi)/2", worst <= 1e-4, worst, 1e-4);
  auto c = convexity_check(v, mp.h_x, 1e-6);
  s.expect("convexity check passes", c.pass, c.min_second_difference, -1e-6);
  s.near("min second difference = 3/2", c.min_second_difference, 1.5, 0.05);
  auto neg = convexity_check(marginal(gaussian("x^2 - 3*x*y + y^2")), 0.1, 1e-6);
  s.expect("indefinite control fails", !neg.pass, neg.min_second_difference, -1e-6);
}

void c8_minimum_principle(Sink& s, const AcceptanceOptions&) {
  const std::vector<double> ladder = {1, 2, 4, 8, 16, 32, 64, 128, 256};
  for (const char* w : {"x^2 + y^2", "x^2 + (y - 1)^2"}) {
    auto r = minimum_principle_limit(gaussian(w), ladder);
    s.expect(std::string("within band at p=256: ") + w, r.within_band, r.max_deviation, r.band);
    s.expect(std::string("monotone in p: ") + w, r.max_monotonicity_violation <= 1e-10, r.max_monotonicity_violation,
             1e-10);
  }
}

void c9_identity(Sink& s, const AcceptanceOptions& o) {
  const std::vector<VarDecl> xv = {{"x0", VarKind::real}, {"x1", VarKind::real}};
  std::mt19937_64 rng(o.seed + 20);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = HUGE_VAL;
  std::string where;
  for (int trial = 0; trial < 20; ++trial) {
    const std::string phi = num(0.5 + std::abs(u(rng))) + "*x0^2 + " + num(u(rng)) + "*x0*x1 + " +
                            num(0.5 + std::abs(u(rng))) + "*x1^2 + 0.2*exp(" + num(u(rng)) + "*x0 + " +
                            num(u(rng)) + "*x1)";
    const std::string g0 = num(u(rng)) + " + " + num(u(rng)) + "*x0 + " + num(u(rng)) + "*x1^2";
    const std::string g1 = num(u(rng)) + "*x0*x1 + " + num(u(rng)) + "*exp(" + num(0.5 * u(rng)) + "*x1)";
    const auto P = Expression::parse(phi, xv);
    const std::vector<Expression> G = {Expression::parse(g0, xv), Expression::parse(g1, xv)};
    const std::vector<double> pt = {0.5 * u(rng), 0.5 * u(rng)};
    const double r1 = hessian_identity_residual(P, G, pt, 1e-2);
    const double r2 = hessian_identity_residual(P, G, pt, 5e-3);
    const double r3 = hessian_identity_residual(P, G, pt, 2.5e-3);
    const double ratio = std::min(r1 / r2, r2 / r3);
    if (ratio < worst) {
      worst = ratio;
      where = phi;
    }
  }
  s.expect("residual ratio >= 3 on 20 random (phi, gamma)", worst >= 3.0, worst, 3.0, where);
  for (const char* w : {"x0^2 + x1^2", "x0^2 + x1^2 + x0*x1"}) {
    auto r = prekopa_certificate(as_field(Expression::parse(w, xv)), -1.0, 1.0, 0.1, -8.0, 8.0);
    s.expect(std::string("k'' matches the integral: ") + w, r.max_relative_error <= 0.05, r.max_relative_error, 0.05);
    s.expect(std::string("integrand nonnegative: ") + w, r.pass, r.min_integrand_ratio, 0.0);
  }
}

void c10_lelong(Sink& s, const AcceptanceOptions&) {
  for (double tau : {0.5, 2.0}) {
    auto e = lelong_number(PshSample::parse(tau_log(tau), 1));
    s.expect("Lelong number tau=" + num(tau), std::abs(e.estimate - tau) <= 0.02, e.estimate, tau);
  }
  auto q = lelong_number(PshSample::parse("0.5*log(abs2(z^2 - z))", 1));
  s.expect("log|z^2 - z| at 0", std::abs(q.estimate - 1.0) <= 0.05, q.estimate, 1.0);
  auto i1 = integrability_index(PshSample::parse(tau_log(0.7), 1));
  s.expect("index in C^1, tau=0.7", std::abs(i1.estimate - 0.7) <= 0.05, i1.estimate, 0.7);
  auto i2 = integrability_index(PshSample::parse("1.2*0.5*log(abs2(z1) + abs2(z2))", 2));
  s.expect("index in C^2, tau=1.2", std::abs(i2.estimate - 0.6) <= 0.05, i2.estimate, 0.6);
  struct Case {
    const char* phi;
    int n;
  };
  for (auto c : {Case{"0.7*0.5*log(abs2(z))", 1}, Case{"2*0.5*log(abs2(z))", 1},
                 Case{"1.2*0.5*log(abs2(z1) + abs2(z2))", 2}, Case{"0.5*log(abs2(z1))", 2}}) {
    auto smp = PshSample::parse(c.phi, c.n);
    auto g = lelong_number(smp);
    auto i = integrability_index(smp);
    const double slack = (i.hi - i.lo) + 0.05;
    const bool ok = i.lo - slack <= g.estimate && g.estimate <= c.n * (i.hi + slack);
    s.expect(std::string("Skoda sandwich: ") + c.phi, ok, g.estimate, i.estimate);
  }
}

void c11_attenuation(Sink& s, const AcceptanceOptions&) {
  auto field = [](const std::string& phi) { return as_field(Expression::parse(phi, PshSample::variables(1))); };
  for (double eps : {0.1, 0.2}) {
    const double v = attenuated(field(tau_log(0.5)), 1, kOrigin, eps).value;
    const double oracle = 0.5 * std::log(eps) + 0.5 * std::log(0.5);
    s.expect("phi_eps(0), tau=0.5, eps=" + num(eps), std::abs(v - oracle) <= 5e-3, v, oracle);
  }
  const double sing = attenuated(field(tau_log(1.25)), 1, kOrigin, 0.1).value;
  s.expect("phi_eps(0) = -inf for tau=1.25", sing == kNegInf, sing, kNegInf);

  const char* catalog[] = {"abs2(z)", "0.5*0.5*log(abs2(z))", "0.5*log(abs2(z^2 - z))", "log(1 + abs2(z))",
                           "re(z) + 0.3*abs2(z)", "max(0.25*log(abs2(z)), abs2(z) - 1)"};
  const std::vector<std::vector<double>> points = {{0.0, 0.0}, {0.3, -0.2}, {-0.15, 0.4}};
  const std::vector<double> ladder = {0.1, 0.2, 0.4};
  for (const char* phi : catalog) {
    double worst = -HUGE_VAL;
    bool ok = true;
    for (const auto& z : points) {
      auto r = attenuation_monotonicity(field(phi), 1, z, ladder);
      ok = ok && r.pass;
      worst = std::max(worst, r.max_violation);
    }
    s.expect(std::string("eps-monotonicity: ") + phi, ok, worst, 1e-8);
  }

  auto smp = PshSample::parse(tau_log(2.0), 1);
  smp.slice.h = 1.0 / 32;
  auto drop = attenuation_lelong_drop(smp, 0.1);
  s.expect("Lelong drop for tau=2", drop.pass, drop.reduced.estimate, drop.threshold);
  for (const char* phi : {"0.5*0.5*log(abs2(z))", "abs2(z) + 0.5*0.5*log(abs2(z - 0.3))", "log(1 + abs2(z))"}) {
    auto r = attenuated_scan(field(phi), TGrid::centered({0.0, 0.0}, 0.4, 0.1), 0.2);
    s.expect(std::string("z-scan of phi_eps: ") + phi, r.pass, r.laplacian.min, -r.tol);
  }
}

void c12_chi(Sink& s, const AcceptanceOptions&) {
  auto disk = unit_disk();
  auto field = [](const std::string& phi) { return as_field(Expression::parse(phi, PshSample::variables(1))); };
  for (double tau : {0.25, 0.5, 0.9}) {
    const double v = chi(field(tau_log(tau)), disk, kOrigin);
    s.expect("chi finite, tau=" + num(tau), v != kNegInf, v, kNegInf);
  }
  for (double tau : {1.1, 1.25}) {
    const double v = chi(field(tau_log(tau)), disk, kOrigin);
    s.expect("chi singular, tau=" + num(tau), v == kNegInf, v, kNegInf);
  }
  // tau = 1 is reported only
  Check c;
  c.id = "chi at tau=1 (reported)";
  c.value = chi(field(tau_log(1.0)), disk, kOrigin);
  c.detail = c.value == kNegInf ? "singular" : "finite";
  s.out.push_back(c);
}

GridDomain ball3(double r, double h, std::vector<double> c = {0.0, 0.0, 0.0}) {
  return GridDomain::ball(c, r, h, Dimension::real(3));
}

GridDomain cube3(double h) {
  return GridDomain::build(
      [](std::span<const double> x) { return std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2])}) - 1.0; },
      Box::cube(3, 1.25), h, Dimension::real(3));
}

void c13_green_robin(Sink& s, const AcceptanceOptions& o) {
  {
    const double h = 1.0 / 256;
    auto dom = GridDomain::ball(kOrigin, 1.0, h, Dimension::real(2));
    auto sol = green_potential({dom, Measure::point({0.0, 0.0}, 4 * h)}, o.mode);
    double worst = 0.0;
    for (double r : {0.3, 0.5, 0.7, 0.9}) {
      const double oracle = std::log(r) / (2 * pi);
      worst = std::max(worst, std::abs(interpolate(dom, sol.g, std::vector<double>{0.6 * r, 0.8 * r}) - oracle) /
                                  std::abs(oracle));
    }
    s.expect("disk Green potential on 0.3 <= |z| <= 0.9", worst <= 0.03, worst, 0.03);
  }
  const double exact0 = 1.0 / (4 * pi);
  auto b32 = ball3(1.0, 1.0 / 32);
  const double l0 = robin_function(b32, std::vector<double>{0.0, 0.0, 0.0}, o.mode);
  s.near("Lambda(0) = 1/(4 pi) at h=1/32", l0, exact0, 0.02);
  s.near("Lambda(1/2, 0, 0) = 1/(3 pi)", robin_function(b32, std::vector<double>{0.5, 0.0, 0.0}, o.mode),
         1.0 / (4 * pi * 0.75), 0.03);
  const double e16 = std::abs(robin_function(ball3(1.0, 1.0 / 16), std::vector<double>{0.0, 0.0, 0.0}, o.mode) - exact0);
  const double ratio = e16 / std::abs(l0 - exact0);
  s.expect("grid-convergence ratio", ratio >= 1.7, ratio, 1.7);

  const double h = 1.0 / 16;
  auto ball = ball3(1.0, h);
  auto rb = robin_convexity_scan(
      ball, {{{-0.5, 0, 0}, {0.5, 0, 0}}, {{0, -0.5, 0}, {0, 0.5, 0}}, {{-0.3, -0.3, -0.3}, {0.3, 0.3, 0.3}}}, 5, 0.0);
  s.expect("Robin convexity on the ball", rb.pass, rb.min_second_difference, 0.0, "segment " + std::to_string(rb.argmin_segment));
  auto box = cube3(h);
  auto rc = robin_convexity_scan(box, {{{-0.5, 0.1, 0}, {0.5, 0.1, 0}}, {{-0.4, -0.4, 0.2}, {0.4, 0.4, 0.2}}}, 5, 0.0);
  s.expect("Robin convexity on the box", rc.pass, rc.min_second_difference, 0.0, "segment " + std::to_string(rc.argmin_segment));

  const std::vector<double> c = {0.2, -0.1, 0.0};
  auto hb = harmonic_center(ball3(1.0, h, c));
  double db = 0.0;
  for (std::size_t a = 0; a < 3; ++a) db = std::max(db, std::abs(hb.point[a] - c[a]));
  s.expect("harmonic centre of the ball", db < 2 * h, db, 2 * h);
  auto hc = harmonic_center(box);
  double dc = 0.0;
  for (double x : hc.point) dc = std::max(dc, std::abs(x));
  s.expect("harmonic centre of the box", dc < 2 * h, dc, 2 * h);
}

void c14_energy(Sink& s, const AcceptanceOptions&) {
  auto radius = EnergyFamily::parse("x1^2 + x2^2 - exp(2*re(t))", 2, true, 1.6);
  auto mu = Measure::point({0.0, 0.0}, 4 * radius.h);
  auto r = energy_scan(radius, mu, TGrid::centered({0.0, 0.0}, 0.25, 0.125), EnergyMode::complex_subharmonic);
  s.expect("radius family harmonic within tol", std::abs(r.min_curvature) <= r.tol, r.min_curvature, r.tol);
  auto tr = EnergyFamily::parse("(x1 - re(t)/4)^2 + x2^2 - 1", 2, true, 1.4);
  auto rt = energy_scan(tr, mu, TGrid::centered({0.0, 0.0}, 1.0, 0.5), EnergyMode::complex_subharmonic);
  s.expect("translate family", rt.pass, rt.min_curvature, -rt.tol);
  auto graph = EnergyFamily::graph("x1^2 + 2*x2^2", 2, 1.4);
  TGrid grid{{0.5, 0.0}, 0.25, 5, 1};
  auto rg = energy_scan(graph, mu, grid, EnergyMode::real_convex);
  s.expect("graph family with subharmonic v", rg.pass, rg.min_curvature, -rg.tol);
  auto bad = EnergyFamily::graph("-(x1^2 + x2^2)", 2, 1.4);
  bool rejected = false;
  try {
    energy_scan(bad, mu, grid, EnergyMode::real_convex);
  } catch (const LabError& e) {
    rejected = e.kind() == ErrorKind::precondition;
  }
  s.expect("superharmonic v rejected by condition (C)", rejected, rejected ? 1.0 : 0.0, 1.0);
}

using Runner = void (*)(Sink&, const AcceptanceOptions&);

const Runner kRunners[] = {c1_disk_kernel, c2_weight_shift, c3_radial,       c4_scans,     c5_hessian,
                           c6_limits,      c7_prekopa,      c8_minimum_principle, c9_identity, c10_lelong,
                           c11_attenuation, c12_chi,        c13_green_robin, c14_energy};

}  // namespace

const std::vector<CriterionInfo>& acceptance_criteria() {
  static const std::vector<CriterionInfo> list = {
      {1, "bergman", "unit-disk kernel against the closed form"},
      {2, "bergman", "constant weight shift rescales the kernel"},
      {3, "bergman", "radial identity K(0,0) = 1 / int e^{-phi}"},
      {4, "fibration", "log-kernel scans: Hartogs, moving weight, Oka mode"},
      {5, "fibration", "second-order Hessian bound"},
      {6, "fibration", "monotone limit ladders"},
      {7, "prekopa", "Gaussian marginal, convexity and negative control"},
      {8, "prekopa", "minimum principle as p grows"},
      {9, "prekopa", "identity residual order and the n=1 certificate"},
      {10, "lelong", "Lelong numbers, integrability index, Skoda sandwich"},
      {11, "lelong", "attenuation function"},
      {12, "lelong", "chi on the tau ladder"},
      {13, "potential", "Green potentials, Robin function, harmonic centres"},
      {14, "potential", "energy scans"},
  };
  return list;
}

Verdict CriterionOutcome::verdict() const {
  if (!error.empty()) return Verdict::fail;
  for (const auto& c : checks)
    if (c.verdict == Verdict::fail) return Verdict::fail;
  for (const auto& c : checks)
    if (c.verdict == Verdict::inconclusive) return Verdict::inconclusive;
  return Verdict::pass;
}

CriterionOutcome run_criterion(int id, const AcceptanceOptions& opt) {
  const auto& list = acceptance_criteria();
  if (id < 1 || id > static_cast<int>(list.size()))
    throw LabError(ErrorKind::config, "no acceptance criterion " + std::to_string(id));
  CriterionOutcome out;
  out.info = list[static_cast<std::size_t>(id - 1)];
  const Exec saved = default_exec();
  set_default_exec(opt.mode);
  const auto start = std::chrono::steady_clock::now();
  Sink sink{out.checks};
  try {
    kRunners[id - 1](sink, opt);
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  set_default_exec(saved);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

Report acceptance_report(const std::vector<CriterionOutcome>& outcomes, const AcceptanceOptions& opt,
                         bool record_time) {
  Report r;
  r.kind = "acceptance";
  r.subcommand = "verify-all";
  r.columns = {"criterion", "verdict", "checks", "failed", "seconds"};
  for (const auto& o : outcomes) {
    int failed = 0;
    for (const auto& c : o.checks) {
      if (c.verdict == Verdict::fail) ++failed;
      Check k = c;
      k.id = std::to_string(o.info.id) + "/" + c.id;
      r.add(std::move(k));
    }
    if (!o.error.empty()) {
      Check k;
      k.id = std::to_string(o.info.id) + "/error";
      k.verdict = Verdict::fail;
      k.locator = o.info.module;
      k.detail = o.error;
      r.add(std::move(k));
    }
    const Verdict v = o.verdict();
    r.rows.push_back({static_cast<double>(o.info.id), v == Verdict::pass ? 1.0 : v == Verdict::fail ? 0.0 : 0.5,
                      static_cast<double>(o.checks.size()), static_cast<double>(failed),
                      record_time ? o.seconds : 0.0});
  }
  r.provenance["seed"] = opt.seed;
  r.provenance["mode"] = opt.mode == Exec::serial ? "serial" : "parallel";
  return r;
}

}  // namespace psh
