#include "psh/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "psh/error.hpp"

namespace psh {

namespace {

using cplx = std::complex<double>;
constexpr double kSolveTol = 1e-8;

double dist2(std::span<const double> x, std::span<const double> c) {
  double s = 0.0;
  for (std::size_t a = 0; a < c.size(); ++a) s += (x[a] - c[a]) * (x[a] - c[a]);
  return s;
}

std::vector<std::size_t> strides(const GridDomain& dom) {
  const auto& n = dom.counts();
  std::vector<std::size_t> s(n.size(), 1);
  for (std::size_t a = n.size() - 1; a-- > 0;) s[a] = s[a + 1] * static_cast<std::size_t>(n[a + 1]);
  return s;
}

// Unknowns are the interior nodes; exterior neighbours carry Dirichlet data.
struct Discretization {
  kernels::StencilOperator op;
  std::vector<std::int64_t> unknown_of_node;  // -1 for exterior
  std::vector<std::size_t> node_of_unknown;
  std::vector<std::int64_t> exterior_neighbor;  // node index of each -1 slot, -1 when off the grid
};

Discretization discretize(const GridDomain& dom) {
  Discretization d;
  const int dim = dom.real_dim();
  d.op.dim = dim;
  d.op.h = dom.h();
  d.unknown_of_node.assign(dom.num_nodes(), -1);
  for (std::size_t i = 0; i < dom.num_nodes(); ++i) {
    if (!dom.interior(i)) continue;
    d.unknown_of_node[i] = static_cast<std::int64_t>(d.node_of_unknown.size());
    d.node_of_unknown.push_back(i);
  }
  if (d.node_of_unknown.empty()) throw LabError(ErrorKind::empty_domain, "domain has no interior nodes");
  const auto st = strides(dom);
  const auto& counts = dom.counts();
  for (std::size_t node : d.node_of_unknown) {
    const auto idx = dom.node_index(node);
    for (int a = 0; a < dim; ++a) {
      for (int s : {-1, 1}) {
        const int j = idx[static_cast<std::size_t>(a)] + s;
        std::int64_t nb = -1;
        if (j >= 0 && j < counts[static_cast<std::size_t>(a)]) {
          nb = static_cast<std::int64_t>(s < 0 ? node - st[static_cast<std::size_t>(a)]
                                               : node + st[static_cast<std::size_t>(a)]);
        }
        const std::int64_t u = nb >= 0 ? d.unknown_of_node[static_cast<std::size_t>(nb)] : -1;
        d.op.neighbors.push_back(static_cast<std::int32_t>(u));
        d.exterior_neighbor.push_back(u >= 0 ? -1 : nb);
      }
    }
  }
  return d;
}

int iteration_cap(const GridDomain& dom) {
  return 20 * *std::max_element(dom.counts().begin(), dom.counts().end());
}

// Solves op x = b and verifies the true residual.
std::pair<int, double> solve(const kernels::StencilOperator& op, std::span<const double> b, std::span<double> x,
                             int cap, Exec mode) {
  const auto res = kernels::conjugate_gradient(op, b, x, 0.1 * kSolveTol, cap, mode);
  std::vector<double> ax(b.size());
  kernels::apply(op, x, ax, mode);
  double rr = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    rr += (ax[i] - b[i]) * (ax[i] - b[i]);
    bb += b[i] * b[i];
  }
  const double rel = bb > 0.0 ? std::sqrt(rr / bb) : std::sqrt(rr);
  if (rel > kSolveTol)
    throw LabError(ErrorKind::solver, "CG stopped after " + std::to_string(res.iterations) +
                                          " iterations with relative residual " + std::to_string(rel));
  return {res.iterations, rel};
}

void check_support(const GridDomain& dom, const Measure& mu) {
  if (mu.center.empty()) return;
  const double reach = mu.support_radius + 2.0 * dom.h();
  for (std::size_t i = 0; i < dom.num_nodes(); ++i) {
    if (dom.interior(i)) continue;
    if (dist2(dom.node_coords(i), mu.center) <= reach * reach)
      throw LabError(ErrorKind::precondition, "support of mu is within 2h of the boundary");
  }
}

}  // namespace

Measure Measure::point(std::vector<double> center, double radius, double mass) {
  Measure m;
  m.center = center;
  m.support_radius = radius;
  m.mass = mass;
  const double r2 = radius * radius;
  m.density = [center = std::move(center), r2](std::span<const double> x) {
    const double u = 1.0 - dist2(x, center) / r2;
    return u > 0.0 ? u * u : 0.0;
  };
  return m;
}

Measure Measure::ring(std::vector<double> center, double rho0, double width, double mass) {
  Measure m;
  m.center = center;
  m.support_radius = rho0 + width;
  m.mass = mass;
  m.density = [center = std::move(center), rho0, width](std::span<const double> x) {
    const double s = (std::sqrt(dist2(x, center)) - rho0) / width;
    const double u = 1.0 - s * s;
    return u > 0.0 ? u * u : 0.0;
  };
  return m;
}

Measure Measure::zero(int dim) {
  Measure m;
  m.center.assign(static_cast<std::size_t>(dim), 0.0);
  m.mass = 0.0;
  m.density = [](std::span<const double>) { return 0.0; };
  return m;
}

GreenSolution green_potential(const GreenProblem& gp, Exec mode) {
  const GridDomain& dom = gp.dom;
  if (dom.real_dim() != 2 && dom.real_dim() != 3)
    throw LabError(ErrorKind::precondition, "Green potentials are computed in R^2 and R^3");
  check_support(dom, gp.mu);
  const auto disc = discretize(dom);
  const std::size_t nu = disc.node_of_unknown.size();
  const double hd = std::pow(dom.h(), dom.real_dim());

  GreenSolution sol;
  sol.mu.assign(dom.num_nodes(), 0.0);
  double raw = 0.0;
  for (std::size_t k = 0; k < nu; ++k) {
    const std::size_t node = disc.node_of_unknown[k];
    const double v = gp.mu.density(dom.node_coords(node));
    if (!(v >= 0.0) || !std::isfinite(v)) throw LabError(ErrorKind::precondition, "mu must be finite and nonnegative");
    sol.mu[node] = v;
    raw += v * hd;
  }
  for (std::size_t i = 0; i < dom.num_nodes(); ++i)
    if (!dom.interior(i) && gp.mu.density(dom.node_coords(i)) > 0.0)
      throw LabError(ErrorKind::precondition, "mu charges an exterior node");
  if (raw > 0.0) {
    const double scale = gp.mu.mass / raw;
    for (double& v : sol.mu) v *= scale;
    sol.mass = gp.mu.mass;
  }

  // -Delta_h x = mu with g = -x
  std::vector<double> b(nu), x(nu, 0.0);
  for (std::size_t k = 0; k < nu; ++k) b[k] = sol.mu[disc.node_of_unknown[k]];
  sol.g.assign(dom.num_nodes(), 0.0);
  if (sol.mass == 0.0) return sol;
  const auto [its, rel] = solve(disc.op, b, x, iteration_cap(dom), mode);
  sol.iterations = its;
  sol.residual = rel;
  for (std::size_t k = 0; k < nu; ++k) sol.g[disc.node_of_unknown[k]] = -x[k];
  return sol;
}

double energy(const GreenProblem& gp, const GreenSolution& sol) {
  const double hd = std::pow(gp.dom.h(), gp.dom.real_dim());
  double u = 0.0;
  for (std::size_t i = 0; i < sol.g.size(); ++i) u += sol.g[i] * sol.mu[i];
  return u * hd;
}

double energy(const GreenProblem& gp, Exec mode) { return energy(gp, green_potential(gp, mode)); }

double interpolate(const GridDomain& dom, const std::vector<double>& node_values, std::span<const double> x) {
  const int d = dom.real_dim();
  const auto st = strides(dom);
  const auto o = dom.node_coords(0);
  std::vector<int> base(static_cast<std::size_t>(d));
  std::vector<double> frac(static_cast<std::size_t>(d));
  for (std::size_t a = 0; a < base.size(); ++a) {
    const double s = (x[a] - o[a]) / dom.h();
    base[a] = static_cast<int>(std::floor(s));
    frac[a] = s - base[a];
    if (base[a] < 0 || base[a] + 1 >= dom.counts()[a])
      throw LabError(ErrorKind::precondition, "interpolation point outside the grid");
  }
  double acc = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    std::size_t node = 0;
    double w = 1.0;
    for (std::size_t a = 0; a < base.size(); ++a) {
      const int bit = (corner >> a) & 1;
      node += static_cast<std::size_t>(base[a] + bit) * st[a];
      w *= bit ? frac[a] : 1.0 - frac[a];
    }
    if (!dom.interior(node)) throw LabError(ErrorKind::precondition, "interpolation stencil leaves the domain");
    acc += w * node_values[node];
  }
  return acc;
}

// ---------------------------------------------------------------------------
// families and energy scans

std::vector<VarDecl> EnergyFamily::variables(int dim, bool complex_t) {
  std::vector<VarDecl> v;
  for (int k = 1; k <= dim; ++k) v.push_back({"x" + std::to_string(k), VarKind::real});
  v.push_back({"t", complex_t ? VarKind::complex : VarKind::real});
  return v;
}

EnergyFamily EnergyFamily::parse(const std::string& rho, int dim, bool complex_t, double half_width) {
  if (dim != 2 && dim != 3) throw LabError(ErrorKind::precondition, "families live in R^2 or R^3");
  EnergyFamily f;
  f.rho = as_field(Expression::parse(rho, variables(dim, complex_t)));
  f.dim = dim;
  f.complex_t = complex_t;
  f.bbox = Box::cube(dim, half_width);
  return f;
}

EnergyFamily EnergyFamily::graph(const std::string& v, int dim, double half_width) {
  EnergyFamily f;
  std::vector<VarDecl> xs = variables(dim, false);
  xs.pop_back();
  f.v = as_field(Expression::parse(v, xs));
  f.shape = Shape::graph;
  f.dim = dim;
  f.complex_t = false;
  f.bbox = Box::cube(dim, half_width);
  f.rho = [vf = f.v, dim](std::span<const double> p) {
    return vf(p.first(static_cast<std::size_t>(dim))) - p[static_cast<std::size_t>(dim)];
  };
  return f;
}

EnergyFamily EnergyFamily::convex(const std::string& rho, int dim, double half_width) {
  EnergyFamily f = parse(rho, dim, false, half_width);
  f.shape = Shape::convex;
  return f;
}

namespace {

ScalarField fiber_rho(const EnergyFamily& fam, cplx t) {
  const int d = fam.dim;
  const bool ct = fam.complex_t;
  return [r = fam.rho, d, ct, t](std::span<const double> x) {
    double p[5];
    std::copy(x.begin(), x.end(), p);
    p[d] = t.real();
    if (ct) p[d + 1] = t.imag();
    return r(std::span<const double>(p, static_cast<std::size_t>(d + (ct ? 2 : 1))));
  };
}

}  // namespace

GridDomain EnergyFamily::fiber(cplx t, double mesh) const {
  return GridDomain::build(fiber_rho(*this, t), bbox, mesh, Dimension::real(dim));
}

ConditionC condition_C_check(const EnergyFamily& fam, double t_lo, double t_hi, double tol, std::uint64_t seed) {
  ConditionC c;
  if (fam.shape == EnergyFamily::Shape::graph) {
    // discrete Laplacian of v on the nodes of the union of fibers {v < t_hi}
    const double hv = fam.h;
    // {v < t_hi} may leave the box (e.g. superharmonic v); the check only needs the part inside it
    const auto dom = GridDomain::build(fiber_rho(fam, t_hi), fam.bbox, hv, Dimension::real(fam.dim), Truncation::clip);
    c.min_laplacian = HUGE_VAL;
    std::vector<double> y(static_cast<std::size_t>(fam.dim));
    for (std::size_t i = 0; i < dom.num_nodes(); ++i) {
      if (!dom.interior(i)) continue;
      const auto x = dom.node_coords(i);
      const double v0 = fam.v(x);
      double lap = 0.0;
      for (std::size_t a = 0; a < x.size(); ++a) {
        y = x;
        y[a] = x[a] + hv;
        lap += fam.v(y);
        y[a] = x[a] - hv;
        lap += fam.v(y);
        lap -= 2.0 * v0;
      }
      c.min_laplacian = std::min(c.min_laplacian, lap / (hv * hv));
    }
    c.pass = c.min_laplacian >= -tol;
    if (!c.pass) c.reason = "v is not subharmonic: min discrete Laplacian " + std::to_string(c.min_laplacian);
    return c;
  }
  if (fam.shape == EnergyFamily::Shape::convex) {
    std::mt19937_64 rng(seed);
    const int d = fam.dim;
    std::vector<std::uniform_real_distribution<double>> u;
    for (int a = 0; a < d; ++a)
      u.emplace_back(fam.bbox.lo[static_cast<std::size_t>(a)], fam.bbox.hi[static_cast<std::size_t>(a)]);
    std::uniform_real_distribution<double> ut(t_lo, t_hi);
    std::vector<double> p(static_cast<std::size_t>(d + 1)), q(p.size()), m(p.size());
    for (int k = 0; k < 200; ++k) {
      for (int a = 0; a < d; ++a) {
        p[static_cast<std::size_t>(a)] = u[static_cast<std::size_t>(a)](rng);
        q[static_cast<std::size_t>(a)] = u[static_cast<std::size_t>(a)](rng);
      }
      p[static_cast<std::size_t>(d)] = ut(rng);
      q[static_cast<std::size_t>(d)] = ut(rng);
      for (std::size_t a = 0; a < p.size(); ++a) m[a] = 0.5 * (p[a] + q[a]);
      const double defect = fam.rho(m) - 0.5 * (fam.rho(p) + fam.rho(q));
      c.max_convexity_defect = std::max(c.max_convexity_defect, defect);
    }
    c.pass = c.max_convexity_defect <= 1e-12;
    if (!c.pass) c.reason = "rho is not jointly convex";
    return c;
  }
  throw LabError(ErrorKind::unsupported_family, "condition (C) is checked for graph or convex families only");
}

namespace {

// |grad_x rho| on the cut nodes of one fiber; a vanishing gradient means the slice is not smoothly bounded
void check_fiber_gradient(const EnergyFamily& fam, const GridDomain& dom, cplx t) {
  const auto st = strides(dom);
  const int d = fam.dim;
  std::vector<double> p(static_cast<std::size_t>(d + (fam.complex_t ? 2 : 1)));
  p[static_cast<std::size_t>(d)] = t.real();
  if (fam.complex_t) p[static_cast<std::size_t>(d + 1)] = t.imag();
  const double step = 0.5 * dom.h();
  for (std::size_t i = 0; i < dom.num_nodes(); ++i) {
    if (!dom.interior(i)) continue;
    bool cut = false;
    for (std::size_t a = 0; a < st.size() && !cut; ++a)
      for (int s : {-1, 1}) {
        const auto j = static_cast<std::ptrdiff_t>(i) + s * static_cast<std::ptrdiff_t>(st[a]);
        if (j >= 0 && static_cast<std::size_t>(j) < dom.num_nodes() && !dom.interior(static_cast<std::size_t>(j)))
          cut = true;
      }
    if (!cut) continue;
    const auto x = dom.node_coords(i);
    double g2 = 0.0;
    for (int a = 0; a < d; ++a) {
      std::copy(x.begin(), x.end(), p.begin());
      p[static_cast<std::size_t>(a)] += step;
      const double fp = fam.rho(p);
      p[static_cast<std::size_t>(a)] -= 2.0 * step;
      const double fm = fam.rho(p);
      g2 += std::pow((fp - fm) / (2.0 * step), 2);
    }
    if (g2 < 1e-20) throw LabError(ErrorKind::precondition, "grad_x rho vanishes on a fiber boundary");
  }
}

double fiber_energy(const EnergyFamily& fam, const Measure& mu, cplx t, double mesh) {
  GreenProblem gp{fam.fiber(t, mesh), mu};
  return energy(gp, Exec::serial);
}

}  // namespace

EnergyScan energy_scan(const EnergyFamily& fam, const Measure& mu, const TGrid& grid, EnergyMode mode,
                       const TolModel& tol) {
  EnergyScan r;
  r.mode = mode;
  const bool real = mode == EnergyMode::real_convex;
  if (real) {
    if (fam.complex_t) throw LabError(ErrorKind::precondition, "real mode needs a real parameter");
    if (grid.nx < 3) throw LabError(ErrorKind::precondition, "real scan needs at least 3 parameters");
    const double t_lo = grid.t0.real(), t_hi = t_lo + grid.h * (grid.nx - 1);
    const auto c = condition_C_check(fam, t_lo, t_hi);
    if (!c.pass) throw LabError(ErrorKind::precondition, "condition (C) fails: " + c.reason);
    for (int k = 0; k < grid.nx; ++k) r.t.emplace_back(t_lo + grid.h * k, 0.0);
  } else {
    if (!fam.complex_t) throw LabError(ErrorKind::precondition, "complex mode needs a complex parameter");
    for (std::size_t c = 0; c < grid.size(); ++c) r.t.push_back(grid.at(c));
  }
  check_fiber_gradient(fam, fam.fiber(r.t[r.t.size() / 2], fam.h), r.t[r.t.size() / 2]);

  r.u.resize(r.t.size());
  parallel_for(static_cast<std::ptrdiff_t>(r.t.size()), [&](std::ptrdiff_t k) {
    r.u[static_cast<std::size_t>(k)] = fiber_energy(fam, mu, r.t[static_cast<std::size_t>(k)], fam.h);
  });

  // discretization error at the centre and the ends / corners
  std::vector<std::size_t> probes;
  if (real) {
    probes = {0, r.t.size() / 2, r.t.size() - 1};
  } else {
    const auto at = [&](int i, int j) { return static_cast<std::size_t>(j * grid.nx + i); };
    probes = {at(grid.nx / 2, grid.ny / 2), at(0, 0), at(grid.nx - 1, 0), at(0, grid.ny - 1), at(grid.nx - 1, grid.ny - 1)};
  }
  for (std::size_t p : probes)
    r.quadrature_error = std::max(r.quadrature_error, std::abs(r.u[p] - fiber_energy(fam, mu, r.t[p], 2.0 * fam.h)));
  double max_abs = 0.0;
  for (double v : r.u) max_abs = std::max(max_abs, std::abs(v));
  const double ht2 = grid.h * grid.h;
  r.tol = tol.fixed ? *tol.fixed : tol.c1 * ht2 * max_abs + tol.c2 * 4.0 * r.quadrature_error / ht2;

  if (real) {
    r.min_curvature = HUGE_VAL;
    for (std::size_t k = 1; k + 1 < r.u.size(); ++k) {
      const double d2 = (r.u[k - 1] - 2.0 * r.u[k] + r.u[k + 1]) / ht2;
      if (d2 < r.min_curvature) {
        r.min_curvature = d2;
        r.argmin = r.t[k];
      }
    }
  } else {
    TField f;
    f.grid = grid;
    f.values = r.u;
    f.state.assign(r.u.size(), CellState::finite);
    const auto lap = discrete_laplacian_min(f);
    r.min_curvature = lap.min;
    r.argmin = lap.argmin;
  }
  r.pass = r.min_curvature >= -r.tol;
  return r;
}

// ---------------------------------------------------------------------------
// Robin function

double robin_function(const GridDomain& dom, std::span<const double> x, Exec mode) {
  if (dom.real_dim() != 3) throw LabError(ErrorKind::precondition, "Robin function is computed in R^3");
  const double reach = 4.0 * dom.h();
  if (!(dom.rho()(x) < 0.0)) throw LabError(ErrorKind::precondition, "Robin point is outside the domain");
  for (std::size_t i = 0; i < dom.num_nodes(); ++i)
    if (!dom.interior(i) && dist2(dom.node_coords(i), x) <= reach * reach)
      throw LabError(ErrorKind::precondition, "Robin point is within 4h of the boundary");

  const auto disc = discretize(dom);
  const std::size_t nu = disc.node_of_unknown.size();
  const double inv_h2 = 1.0 / (dom.h() * dom.h());
  const double c = 1.0 / (4.0 * std::numbers::pi);
  const auto st = strides(dom);
  const auto o = dom.node_coords(0);
  std::vector<double> b(nu, 0.0), psi(nu, c);
  for (std::size_t k = 0; k < nu; ++k) {
    const auto idx = dom.node_index(disc.node_of_unknown[k]);
    for (int a = 0; a < 3; ++a) {
      for (int s = 0; s < 2; ++s) {
        const std::size_t slot = k * 6 + static_cast<std::size_t>(2 * a + s);
        if (disc.op.neighbors[slot] >= 0) continue;
        // boundary data at the exterior node (which may sit just off the grid)
        double zeta[3];
        for (int e = 0; e < 3; ++e) zeta[e] = o[static_cast<std::size_t>(e)] + dom.h() * idx[static_cast<std::size_t>(e)];
        zeta[a] += s == 0 ? -dom.h() : dom.h();
        b[k] += c / std::sqrt(dist2(zeta, x)) * inv_h2;
      }
    }
  }
  (void)st;
  solve(disc.op, b, psi, iteration_cap(dom), mode);
  std::vector<double> nodes(dom.num_nodes(), 0.0);
  for (std::size_t k = 0; k < nu; ++k) nodes[disc.node_of_unknown[k]] = psi[k];
  return interpolate(dom, nodes, x);
}

void check_convex(const GridDomain& dom, std::uint64_t seed) {
  std::vector<std::size_t> inside;
  for (std::size_t i = 0; i < dom.num_nodes(); ++i)
    if (dom.interior(i)) inside.push_back(i);
  if (inside.empty()) throw LabError(ErrorKind::empty_domain, "domain has no interior nodes");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, inside.size() - 1);
  for (int k = 0; k < 200; ++k) {
    const auto p = dom.node_coords(inside[pick(rng)]), q = dom.node_coords(inside[pick(rng)]);
    std::vector<double> m(p.size());
    for (std::size_t a = 0; a < p.size(); ++a) m[a] = 0.5 * (p[a] + q[a]);
    if (!(dom.rho()(m) < 0.0)) throw LabError(ErrorKind::precondition, "domain failed the convexity spot-check");
  }
}

RobinScan robin_convexity_scan(const GridDomain& dom, const std::vector<Segment>& segments, int samples, double tol) {
  if (samples < 3) throw LabError(ErrorKind::precondition, "segments need at least 3 samples");
  check_convex(dom);
  RobinScan r;
  r.tol = tol;
  r.min_second_difference = r.min_log_second_difference = HUGE_VAL;
  r.values.resize(segments.size());
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const auto& seg = segments[s];
    double len2 = 0.0;
    for (std::size_t a = 0; a < seg.a.size(); ++a) len2 += (seg.b[a] - seg.a[a]) * (seg.b[a] - seg.a[a]);
    const double step = std::sqrt(len2) / (samples - 1);
    auto& vals = r.values[s];
    vals.resize(static_cast<std::size_t>(samples));
    parallel_for(samples, [&](std::ptrdiff_t k) {
      const double f = static_cast<double>(k) / (samples - 1);
      std::vector<double> x(seg.a.size());
      for (std::size_t a = 0; a < x.size(); ++a) x[a] = seg.a[a] + f * (seg.b[a] - seg.a[a]);
      vals[static_cast<std::size_t>(k)] = robin_function(dom, x, Exec::serial);
    });
    for (std::size_t k = 1; k + 1 < vals.size(); ++k) {
      const double d2 = (vals[k - 1] - 2.0 * vals[k] + vals[k + 1]) / (step * step);
      const double l2 = (std::log(vals[k - 1]) - 2.0 * std::log(vals[k]) + std::log(vals[k + 1])) / (step * step);
      if (d2 < r.min_second_difference) {
        r.min_second_difference = d2;
        r.argmin_segment = s;
      }
      r.min_log_second_difference = std::min(r.min_log_second_difference, l2);
    }
  }
  r.pass = r.min_second_difference > tol;
  r.log_pass = r.min_log_second_difference >= -tol;
  return r;
}

HarmonicCenter harmonic_center(const GridDomain& dom, double tol) {
  if (dom.real_dim() != 3) throw LabError(ErrorKind::precondition, "harmonic centres are computed in R^3");
  check_convex(dom);
  HarmonicCenter hc;
  const double reach = 4.0 * dom.h();
  // admissible: inside and more than 4h from every exterior node
  std::vector<std::vector<double>> exterior;
  for (std::size_t i = 0; i < dom.num_nodes(); ++i)
    if (!dom.interior(i)) exterior.push_back(dom.node_coords(i));
  auto admissible = [&](std::span<const double> x) {
    if (!(dom.rho()(x) < 0.0)) return false;
    for (const auto& e : exterior)
      if (dist2(e, x) <= reach * reach) return false;
    return true;
  };
  auto lambda = [&](std::span<const double> x) {
    ++hc.evaluations;
    return robin_function(dom, x);
  };

  const auto c = dom.bbox().center();
  const double s = 0.5 * dom.bbox().max_half_width();
  hc.value = HUGE_VAL;
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j)
      for (int k = -1; k <= 1; ++k) {
        const std::vector<double> x = {c[0] + i * s, c[1] + j * s, c[2] + k * s};
        if (!admissible(x)) continue;
        const double v = lambda(x);
        if (v < hc.value) {
          hc.value = v;
          hc.point = x;
        }
      }
  if (hc.point.empty()) throw LabError(ErrorKind::precondition, "no admissible lattice point for the harmonic centre");

  constexpr double kPhi = 0.6180339887498949;
  for (int sweep = 0; sweep < 2; ++sweep) {
    for (int a = 0; a < 3; ++a) {
      auto at = [&](double v) {
        auto x = hc.point;
        x[static_cast<std::size_t>(a)] = v;
        return x;
      };
      // bracket along the axis inside the admissible set
      const double x0 = hc.point[static_cast<std::size_t>(a)];
      double lo = x0 - s, hi = x0 + s;
      for (int b = 0; b < 40 && !admissible(at(lo)); ++b) lo = 0.5 * (lo + x0);
      for (int b = 0; b < 40 && !admissible(at(hi)); ++b) hi = 0.5 * (hi + x0);
      double p = hi - kPhi * (hi - lo), q = lo + kPhi * (hi - lo);
      double fp = lambda(at(p)), fq = lambda(at(q));
      while (hi - lo > tol * 2.0 * s) {
        if (fp < fq) {
          hi = q;
          q = p;
          fq = fp;
          p = hi - kPhi * (hi - lo);
          fp = lambda(at(p));
        } else {
          lo = p;
          p = q;
          fp = fq;
          q = lo + kPhi * (hi - lo);
          fq = lambda(at(q));
        }
      }
      const double best = fp < fq ? p : q;
      const double fb = std::min(fp, fq);
      if (fb < hc.value) {
        hc.value = fb;
        hc.point = at(best);
      }
    }
  }
  return hc;
}

}  // namespace psh
