#include "psh/fibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "psh/error.hpp"

namespace psh {

using cplx = std::complex<double>;

TGrid TGrid::centered(cplx center, double half_width, double h) {
  TGrid g;
  g.h = h;
  g.nx = g.ny = 2 * static_cast<int>(std::lround(half_width / h)) + 1;
  g.t0 = center - cplx(h * (g.nx / 2), h * (g.ny / 2));
  return g;
}

double TField::max_abs_finite() const {
  double m = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (state[i] == CellState::finite) m = std::max(m, std::abs(values[i]));
  return m;
}

LaplacianResult discrete_laplacian_min(const TField& field) {
  const TGrid& g = field.grid;
  LaplacianResult r;
  r.min = std::numeric_limits<double>::infinity();
  r.laplacian.assign(g.size(), std::numeric_limits<double>::quiet_NaN());
  auto ok = [&](int i, int j) {
    return field.state[static_cast<std::size_t>(j * g.nx + i)] == CellState::finite;
  };
  auto v = [&](int i, int j) { return field.values[static_cast<std::size_t>(j * g.nx + i)]; };
  for (int j = 1; j + 1 < g.ny; ++j) {
    for (int i = 1; i + 1 < g.nx; ++i) {
      if (!(ok(i, j) && ok(i - 1, j) && ok(i + 1, j) && ok(i, j - 1) && ok(i, j + 1))) {
        ++r.skipped;
        continue;
      }
      const double lap = (v(i + 1, j) + v(i - 1, j) + v(i, j + 1) + v(i, j - 1) - 4.0 * v(i, j)) / (g.h * g.h);
      r.laplacian[static_cast<std::size_t>(j * g.nx + i)] = lap;
      ++r.evaluated;
      if (lap < r.min) {
        r.min = lap;
        r.argmin = g.at(i, j);
      }
    }
  }
  if (r.evaluated == 0) throw LabError(ErrorKind::field_too_singular, "no finite 5-point stencil in the field");
  return r;
}

std::vector<VarDecl> SliceFamily::variables(int n) {
  if (n == 1) return {{"t", VarKind::complex}, {"z", VarKind::complex}};
  if (n == 2) return {{"t", VarKind::complex}, {"z1", VarKind::complex}, {"z2", VarKind::complex}};
  throw LabError(ErrorKind::precondition, "fiber dimension must be 1 or 2");
}

SliceFamily SliceFamily::parse(const std::string& rho, const std::string& phi, int n) {
  const auto vars = variables(n);
  SliceFamily f;
  f.rho = as_field(Expression::parse(rho, vars));
  f.phi = as_field(Expression::parse(phi, vars));
  f.n = n;
  f.fiber_box = Box::cube(2 * n, 1.25);
  f.z0.assign(static_cast<std::size_t>(2 * n), 0.0);
  f.direction.assign(static_cast<std::size_t>(2 * n), 0.0);
  return f;
}

std::vector<double> SliceFamily::point_at(cplx t) const {
  std::vector<double> z = z0;
  if (z_mode == ZMode::oka) {
    for (int k = 0; k < n; ++k) {
      const auto uk = static_cast<std::size_t>(2 * k);
      const cplx w = t * cplx(direction[uk], direction[uk + 1]);
      z[uk] += w.real();
      z[uk + 1] += w.imag();
    }
  }
  return z;
}

namespace {

ScalarField at_parameter(const ScalarField& f, cplx t) {
  return [f, t](std::span<const double> z) {
    double buf[6] = {t.real(), t.imag(), 0, 0, 0, 0};
    for (std::size_t a = 0; a < z.size(); ++a) buf[a + 2] = z[a];
    return f(std::span<const double>(buf, z.size() + 2));
  };
}

double log_kernel_at(const SliceFamily& fam, cplx t, double h, CellState& state) {
  auto dom = slice_domain(fam, t);
  const auto z = fam.point_at(t);
  if (!dom || !(dom->rho()(z) < 0.0)) {
    state = CellState::void_fiber;
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (h != fam.h) dom = dom->rebuilt(h);
  BergmanProblem p{std::move(*dom), at_parameter(fam.phi, t), fam.degree < 0 ? default_degree(fam.n) : fam.degree,
                   fam.normalization};
  const auto e = kernel_diag(p, z);
  state = e.log_value == kNegInf ? CellState::neg_inf : CellState::finite;
  return e.log_value;
}

}  // namespace

std::optional<GridDomain> slice_domain(const SliceFamily& fam, cplx t) {
  try {
    return GridDomain::build(at_parameter(fam.rho, t), fam.fiber_box, fam.h, Dimension::complex(fam.n));
  } catch (const LabError& e) {
    if (e.kind() == ErrorKind::empty_domain) return std::nullopt;
    throw;
  }
}

std::optional<BergmanProblem> slice_problem(const SliceFamily& fam, cplx t) {
  auto dom = slice_domain(fam, t);
  if (!dom) return std::nullopt;
  return BergmanProblem{std::move(*dom), at_parameter(fam.phi, t),
                        fam.degree < 0 ? default_degree(fam.n) : fam.degree, fam.normalization};
}

TField log_kernel_field(const SliceFamily& fam, Exec mode) {
  TField f;
  f.grid = fam.t_grid;
  f.values.assign(f.grid.size(), 0.0);
  f.state.assign(f.grid.size(), CellState::void_fiber);
  parallel_for(
      static_cast<std::ptrdiff_t>(f.grid.size()),
      [&](std::ptrdiff_t c) {
        const auto uc = static_cast<std::size_t>(c);
        f.values[uc] = log_kernel_at(fam, f.grid.at(uc), fam.h, f.state[uc]);
      },
      mode);
  if (std::all_of(f.state.begin(), f.state.end(), [](CellState s) { return s == CellState::void_fiber; }))
    throw LabError(ErrorKind::empty_domain, "every fiber of the family is void");
  return f;
}

double quadrature_error_estimate(const SliceFamily& fam) {
  const TGrid& g = fam.t_grid;
  const int ci = g.nx / 2, cj = g.ny / 2;
  const std::pair<int, int> probes[] = {{ci, cj}, {0, 0}, {g.nx - 1, 0}, {0, g.ny - 1}, {g.nx - 1, g.ny - 1}};
  double delta = 0.0;
  for (auto [i, j] : probes) {
    CellState s1{}, s2{};
    const double a = log_kernel_at(fam, g.at(i, j), fam.h, s1);
    const double b = log_kernel_at(fam, g.at(i, j), 2.0 * fam.h, s2);
    if (s1 == CellState::finite && s2 == CellState::finite) delta = std::max(delta, std::abs(a - b));
  }
  return delta;
}

ScanReport scan_field(TField field, double tol) {
  ScanReport r;
  r.laplacian = discrete_laplacian_min(field);
  for (auto s : field.state) {
    if (s == CellState::neg_inf) ++r.neg_inf_cells;
    if (s == CellState::void_fiber) ++r.void_cells;
  }
  r.field = std::move(field);
  r.tol = tol;
  r.pass = r.laplacian.min >= -tol;
  return r;
}

ScanReport psh_scan(const SliceFamily& fam, const TolModel& tol) {
  TField field = log_kernel_field(fam);
  double t = 0.0, delta = 0.0;
  if (tol.fixed) {
    t = *tol.fixed;
  } else {
    delta = quadrature_error_estimate(fam);
    const double ht2 = fam.t_grid.h * fam.t_grid.h;
    t = tol.c1 * ht2 * field.max_abs_finite() + tol.c2 * 4.0 * delta / ht2;
  }
  ScanReport r = scan_field(std::move(field), t);
  r.quadrature_error = delta;
  return r;
}

namespace {

struct Hessian2 {
  double tt = 0.0;  // phi_{t tbar}
  double zz = 0.0;  // phi_{z zbar}
  cplx tz;          // phi_{t zbar}
};

// coordinates (x, y, u, v) with t = x + iy, z = u + iv
Hessian2 complex_hessian(const ScalarField& phi, std::span<const double> p, double h) {
  double x[4] = {p[0], p[1], p[2], p[3]};
  auto f = [&](int a, double da, int b, double db) {
    double y[4] = {x[0], x[1], x[2], x[3]};
    y[a] += da;
    y[b] += db;
    return phi(std::span<const double>(y, 4));
  };
  const double f0 = phi(std::span<const double>(x, 4));
  auto second = [&](int a) { return (f(a, h, a, 0) - 2.0 * f0 + f(a, -h, a, 0)) / (h * h); };
  auto mixed = [&](int a, int b) {
    return (f(a, h, b, h) - f(a, h, b, -h) - f(a, -h, b, h) + f(a, -h, b, -h)) / (4.0 * h * h);
  };
  Hessian2 H;
  H.tt = 0.25 * (second(0) + second(1));
  H.zz = 0.25 * (second(2) + second(3));
  H.tz = 0.25 * cplx(mixed(0, 2) + mixed(1, 3), mixed(0, 3) - mixed(1, 2));
  return H;
}

}  // namespace

HessianBound hessian_bound_check(const SliceFamily& fam, cplx t0, std::span<const double> z0, double h_t) {
  if (fam.n != 1) throw LabError(ErrorKind::precondition, "the Hessian bound is checked for n = 1 only");
  auto kernel_at = [&](cplx t) {
    auto p = slice_problem(fam, t);
    if (!p) throw LabError(ErrorKind::empty_domain, "void fiber inside the Hessian stencil");
    return kernel_diag(*p, z0).value;
  };
  const double k0 = kernel_at(t0);
  const double kx = kernel_at(t0 + h_t) + kernel_at(t0 - h_t);
  const double ky = kernel_at(t0 + cplx(0, h_t)) + kernel_at(t0 - cplx(0, h_t));
  HessianBound r;
  r.lhs = (kx + ky - 4.0 * k0) / (4.0 * h_t * h_t);

  auto p = slice_problem(fam, t0);
  BergmanKernel kernel(*p);
  const double scale = p->normalization == Normalization::unit_total_mass ? 1.0 / p->dom.total_weight() : 1.0;
  const double hd = 2e-3;
  double rhs = 0.0;
  for (std::size_t i = 0; i < p->dom.num_points(); ++i) {
    const auto zeta = p->dom.point(i);
    const double coords[4] = {t0.real(), t0.imag(), zeta[0], zeta[1]};
    const auto H = complex_hessian(fam.phi, coords, hd);
    if (!(H.zz > 0.0)) throw LabError(ErrorKind::not_strictly_psh, "phi_{z zbar} <= 0 at a fiber node");
    const double D = H.tt - std::norm(H.tz) / H.zz;
    rhs += std::norm(kernel.offdiag(zeta, z0)) * D * std::exp(-p->weight(zeta)) * p->dom.weights()[i] * scale;
  }
  r.rhs = rhs;
  r.margin = r.lhs - r.rhs;
  // finite-difference truncation plus the relative kernel tolerance on both sides
  r.tol = 5.0 * h_t * h_t * k0 + 0.02 * (std::abs(r.lhs) + std::abs(r.rhs));
  r.pass = r.margin >= -r.tol;
  return r;
}

const char* to_string(LimitScenario s) {
  switch (s) {
    case LimitScenario::cutoff_weights: return "cutoff-weights";
    case LimitScenario::increasing_domains: return "increasing-domains";
    case LimitScenario::decreasing_weights: return "decreasing-weights";
  }
  return "?";
}

MonotoneLimitReport monotone_limit_suite(LimitScenario s, double h) {
  const std::vector<double> origin = {0.0, 0.0};
  const auto unit_disk = GridDomain::ball(origin, 1.0, h, Dimension::complex(1));
  MonotoneLimitReport r;
  r.scenario = s;
  r.quadrature_tol = 0.02;
  const int degree = default_degree(1);
  std::vector<BergmanProblem> ladder;
  switch (s) {
    case LimitScenario::cutoff_weights:
      // phi_j = j * max(|z|^2 - 1/4, 0)^2 increases to the indicator weight of disk(1/2)
      for (double j = 1.0; j <= 1e6; j *= 10.0) {
        r.parameters.push_back(j);
        ladder.push_back({unit_disk,
                          [j](std::span<const double> x) {
                            const double e = std::max(x[0] * x[0] + x[1] * x[1] - 0.25, 0.0);
                            return j * e * e;
                          },
                          degree, Normalization::lebesgue});
      }
      r.limit_oracle = 4.0 / std::numbers::pi;
      break;
    case LimitScenario::increasing_domains:
      for (int j = 1; j <= 64; j *= 2) {
        const double rj = 1.0 - 1.0 / (j + 1.0);
        r.parameters.push_back(j);
        // same lattice for every member: a fixed box around the unit disk
        ladder.push_back({GridDomain::build(ball_rho(origin, rj), Box::cube(2, 1.25), h, Dimension::complex(1)),
                          [](std::span<const double>) { return 0.0; }, degree, Normalization::lebesgue});
      }
      r.limit_oracle = 1.0 / std::numbers::pi;
      break;
    case LimitScenario::decreasing_weights:
      for (int j = 1; j <= 256; j *= 2) {
        r.parameters.push_back(j);
        ladder.push_back({unit_disk,
                          [j](std::span<const double> x) { return (x[0] * x[0] + x[1] * x[1]) / j; }, degree,
                          Normalization::lebesgue});
      }
      r.limit_oracle = 1.0 / std::numbers::pi;
      break;
  }

  // preconditions: pointwise monotone weights / nested domains at 100 nodes
  const auto& probe = unit_disk;
  const std::size_t stride = std::max<std::size_t>(1, probe.num_points() / 100);
  for (std::size_t k = 1; k < ladder.size(); ++k) {
    for (std::size_t i = 0; i < probe.num_points(); i += stride) {
      const auto x = probe.point(i);
      const double a = ladder[k - 1].weight(x), b = ladder[k].weight(x);
      const bool ok = s == LimitScenario::cutoff_weights       ? b >= a
                      : s == LimitScenario::decreasing_weights ? b <= a
                                                               : (ladder[k - 1].dom.rho()(x) >= 0.0 ||
                                                                  ladder[k].dom.rho()(x) < 0.0);
      if (!ok) throw LabError(ErrorKind::precondition, std::string("ladder violates its monotonicity: ") + to_string(s));
    }
  }

  for (const auto& p : ladder) r.values.push_back(kernel_diag(p, origin).value);
  const double slack = 1e-8;
  r.monotone = true;
  for (std::size_t k = 1; k < r.values.size(); ++k) {
    if (s == LimitScenario::cutoff_weights)
      r.monotone = r.monotone && r.values[k] >= r.values[k - 1] - slack;
    else
      r.monotone = r.monotone && r.values[k] <= r.values[k - 1] + slack;
  }
  r.converged = std::abs(r.values.back() - r.limit_oracle) <= 2.0 * r.quadrature_tol * r.limit_oracle;
  return r;
}

}  // namespace psh
