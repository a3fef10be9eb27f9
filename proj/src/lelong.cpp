#include "psh/lelong.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include "psh/error.hpp"

namespace psh {

namespace {

using cplx = std::complex<double>;

constexpr double kIndexLo = 1e-3;
constexpr double kIndexHi = 10.0;
constexpr double kIndexWidth = 5e-3;

struct LineFit {
  double slope = 0.0;
  double rms = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const double m = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / m;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (my + f.slope * (x[i] - mx));
    ss += e * e;
  }
  f.rms = std::sqrt(ss / m);
  return f;
}

struct Growth {
  double exponent = 0.0;  // D_k ~ h_k^exponent
  bool monotone_increasing = false;
  bool monotone_decreasing = false;
};

Growth growth_exponent(std::span<const double> h, std::span<const double> integrals) {
  Growth g;
  std::vector<double> x, y;
  g.monotone_increasing = g.monotone_decreasing = true;
  for (std::size_t k = 0; k + 1 < integrals.size(); ++k) {
    const double d = integrals[k + 1] - integrals[k];
    if (!std::isfinite(integrals[k + 1]) || !(d > 0.0)) g.monotone_increasing = false;
    if (!(d < 0.0)) g.monotone_decreasing = false;
    if (!std::isfinite(integrals[k + 1])) {
      g.exponent = -HUGE_VAL;
      g.monotone_increasing = true;
      return g;
    }
    x.push_back(std::log(h[k + 1]));
    y.push_back(std::log(std::abs(d) + 1e-300));
  }
  g.exponent = fit_line(x, y).slope;
  return g;
}

// Unit disk at mesh h, shared by every slice with the same mesh.
const GridDomain& slice_disk(double h) {
  static std::mutex mu;
  static std::map<double, GridDomain> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(h);
  if (it == cache.end()) it = cache.emplace(h, GridDomain::ball({}, 1.0, h, Dimension::complex(1))).first;
  return it->second;
}

// lambda -> 2 phi(z + lambda w)
ScalarField slice_weight(const ScalarField& phi, int n, std::span<const double> z, std::span<const double> w) {
  std::vector<double> zz(z.begin(), z.end()), ww(w.begin(), w.end());
  return [&phi, n, zz, ww](std::span<const double> lam) {
    double p[4];
    const cplx l(lam[0], lam[1]);
    for (int j = 0; j < n; ++j) {
      const cplx q = cplx(zz[2 * j], zz[2 * j + 1]) + l * cplx(ww[2 * j], ww[2 * j + 1]);
      p[2 * j] = q.real();
      p[2 * j + 1] = q.imag();
    }
    return 2.0 * phi(std::span<const double>(p, static_cast<std::size_t>(2 * n)));
  };
}

}  // namespace

std::vector<VarDecl> PshSample::variables(int n) {
  if (n == 1) return {{"z", VarKind::complex}};
  if (n == 2) return {{"z1", VarKind::complex}, {"z2", VarKind::complex}};
  throw LabError(ErrorKind::precondition, "samples live in C^1 or C^2");
}

PshSample PshSample::parse(const std::string& phi, int n, std::vector<double> a) {
  PshSample s;
  s.phi = as_field(Expression::parse(phi, variables(n)));
  s.n = n;
  s.a = std::move(a);
  if (n == 2) s.m = 128;
  return s;
}

std::vector<double> PshSample::basepoint() const {
  if (a.empty()) return std::vector<double>(static_cast<std::size_t>(2 * n), 0.0);
  if (a.size() != static_cast<std::size_t>(2 * n)) throw LabError(ErrorKind::precondition, "basepoint dimension");
  return a;
}

std::vector<double> PshSample::radii() const {
  if (levels < 4) throw LabError(ErrorKind::precondition, "radius ladder needs at least 5 radii");
  std::vector<double> r;
  for (int k = 0; k <= levels; ++k) r.push_back(r0 * std::ldexp(1.0, -k));
  return r;
}

LelongEstimate lelong_number(const ScalarField& f, const PshSample& s) {
  LelongEstimate e;
  e.radii = s.radii();
  const auto a = s.basepoint();
  std::vector<double> logr;
  for (double r : e.radii) {
    const auto rule = SphereRule::for_complex(s.n, a, r, s.m);
    double sum = 0.0, sup = kNegInf;
    bool singular = false;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double v = f(rule.node(i));
      if (std::isnan(v) || v == HUGE_VAL) throw LabError(ErrorKind::non_integrable, "sphere sample is not finite");
      if (v == kNegInf) singular = true;
      sum += v;
      sup = std::max(sup, v);
    }
    e.means.push_back(singular ? kNegInf : sum * rule.weight());
    e.sups.push_back(sup);
    logr.push_back(std::log(r));
  }
  if (std::any_of(e.means.begin(), e.means.end(), [](double v) { return v == kNegInf; })) {
    e.dense_singularity = true;
    e.estimate = e.sup_estimate = HUGE_VAL;
    return e;
  }
  const auto fm = fit_line(logr, e.means);
  e.estimate = fm.slope;
  e.fit_residual = fm.rms;
  e.sup_estimate = fit_line(logr, e.sups).slope;
  return e;
}

LelongEstimate lelong_number(const PshSample& s) { return lelong_number(s.phi, s); }

IntegrabilityIndex integrability_index(const PshSample& s) {
  const auto a = s.basepoint();
  IntegrabilityIndex out;
  if (std::isfinite(s.phi(a))) {
    // e^{-2 phi / t} is bounded near a for every t > 0
    out.lo = 0.0;
    out.hi = kIndexLo;
    return out;
  }
  const double r = s.r0;
  const std::vector<double> hs =
      s.n == 1 ? std::vector<double>{r / 8, r / 16, r / 32, r / 64} : std::vector<double>{r / 3, r / 6, r / 12};
  const auto ladder = BallLadder::build(a, r, Dimension::complex(s.n), hs);
  const auto cached = ladder.sample(s.phi);
  // (1 - |x - a|^2 / r^2)^2 vanishes to second order on the sphere, so the level
  // sums carry no cut-cell error and their differences come from the singularity alone
  std::vector<std::vector<double>> bump(ladder.levels.size());
  double ref = HUGE_VAL;
  for (std::size_t k = 0; k < ladder.levels.size(); ++k) {
    const auto& dom = ladder.levels[k];
    for (std::size_t i = 0; i < dom.num_points(); ++i) {
      double d2 = 0.0;
      for (std::size_t c = 0; c < a.size(); ++c) d2 += (dom.point(i)[c] - a[c]) * (dom.point(i)[c] - a[c]);
      const double u = std::max(0.0, 1.0 - d2 / (r * r));
      bump[k].push_back(u * u * dom.weights()[i]);
      if (std::isfinite(cached[k][i])) ref = std::min(ref, cached[k][i]);
    }
  }
  if (!std::isfinite(ref)) throw LabError(ErrorKind::field_too_singular, "phi is -inf on every probe node");

  // Divergent at t when the level sums grow: successive differences all positive
  // with a nonpositive fitted exponent. Mixed signs count as integrable but are
  // tracked, since they only occur next to the threshold.
  double lo = kIndexLo, hi = kIndexHi, widened = hi;
  int run = 0;
  std::vector<double> sums(hs.size());
  while (hi - lo > kIndexWidth) {
    const double t = 0.5 * (lo + hi);
    for (std::size_t k = 0; k < hs.size(); ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < bump[k].size(); ++i) acc += bump[k][i] * std::exp(-2.0 * (cached[k][i] - ref) / t);
      sums[k] = acc;
    }
    ++out.steps;
    const auto g = growth_exponent(hs, sums);
    if (g.monotone_increasing && g.exponent <= 0.0) {
      lo = t;
      run = 0;
      continue;
    }
    if (!g.monotone_increasing && !g.monotone_decreasing) {
      if (++run >= 2) out.coarse = true;
      widened = t;
    } else {
      run = 0;
    }
    hi = t;
  }
  out.lo = lo;
  out.hi = out.coarse ? std::max(hi, widened) : hi;
  out.estimate = 0.5 * (out.lo + out.hi);
  return out;
}

SliceValue slice_kernel(const ScalarField& phi, int n, std::span<const double> z, std::span<const double> w,
                        const SliceSettings& settings) {
  if (z.size() != static_cast<std::size_t>(2 * n) || w.size() != z.size())
    throw LabError(ErrorKind::precondition, "slice point and direction must lie in C^n");
  const auto& disk = slice_disk(settings.h);
  const ScalarField weight = slice_weight(phi, n, z, w);

  // only integrability at lambda = 0 can force K(0,0) = 0; singular points elsewhere
  // just make admissible functions vanish there
  SliceValue out;
  BergmanProblem p{disk, weight, settings.degree, Normalization::unit_total_mass};
  const std::vector<double> origin = {0.0, 0.0};
  if (!locally_integrable(p, origin)) {
    out.singular = true;
    return out;
  }
  const auto e = BergmanKernel(p, Exec::serial).diag(origin);
  out.value = e.value;
  out.log_value = e.log_value;
  out.singular = e.log_value == kNegInf;
  return out;
}

AttenuatedValue attenuated(const ScalarField& phi, int n, std::span<const double> z, double eps, int m,
                           const SliceSettings& settings) {
  if (m < 16) throw LabError(ErrorKind::rule_too_coarse, "attenuation needs at least 16 sphere nodes");
  const std::vector<double> origin(static_cast<std::size_t>(2 * n), 0.0);
  const auto rule = SphereRule::for_complex(n, origin, eps, m);
  std::vector<double> logs(rule.size());
  parallel_for(static_cast<std::ptrdiff_t>(rule.size()), [&](std::ptrdiff_t i) {
    logs[static_cast<std::size_t>(i)] = slice_kernel(phi, n, z, rule.node(static_cast<std::size_t>(i)), settings).log_value;
  });
  AttenuatedValue out;
  out.nodes = static_cast<int>(rule.size());
  double sum = 0.0;
  for (double v : logs) {
    if (v == kNegInf) ++out.singular_nodes;
    sum += v;
  }
  out.value = out.singular_nodes > 0 ? kNegInf : 0.5 * sum * rule.weight();
  return out;
}

AttenuationDrop attenuation_lelong_drop(const PshSample& s, double eps, int m_slice) {
  AttenuationDrop d;
  d.eps = eps;
  const auto base = lelong_number(s);
  d.tau = base.estimate;
  PshSample inner = s;
  inner.r0 = 0.5 * eps;
  inner.levels = 4;
  inner.m = m_slice;
  const ScalarField phi_eps = [&](std::span<const double> z) {
    return attenuated(s.phi, s.n, z, eps, m_slice, s.slice).value;
  };
  d.reduced = lelong_number(phi_eps, inner);
  d.threshold = d.tau - 1.0 - 0.1;
  d.pass = d.reduced.estimate >= d.threshold;
  return d;
}

EpsMonotonicity attenuation_monotonicity(const ScalarField& phi, int n, std::span<const double> z,
                                         std::span<const double> eps, int m, const SliceSettings& settings) {
  EpsMonotonicity r;
  r.eps.assign(eps.begin(), eps.end());
  SliceSettings coarse = settings, low = settings;
  coarse.h *= 2.0;
  low.degree = std::max(0, settings.degree - 2);
  double prev = kNegInf;
  for (double e : eps) {
    const double v = attenuated(phi, n, z, e, m, settings).value;
    for (const auto& other : {coarse, low}) {
      const double c = attenuated(phi, n, z, e, m, other).value;
      if (std::isfinite(v) && std::isfinite(c)) r.noise = std::max(r.noise, std::abs(v - c));
    }
    if (v != kNegInf || prev != kNegInf) r.max_violation = std::max(r.max_violation, prev - v);
    r.values.push_back(v);
    prev = v;
  }
  r.pass = r.max_violation <= 1e-8 + 2.0 * r.noise;
  return r;
}

ScanReport attenuated_scan(const ScalarField& phi, const TGrid& grid, double eps, int m, const SliceSettings& settings,
                           const TolModel& tol) {
  TField field;
  field.grid = grid;
  field.values.resize(grid.size());
  field.state.resize(grid.size());
  auto at = [&](cplx t, const SliceSettings& st) {
    const double z[2] = {t.real(), t.imag()};
    return attenuated(phi, 1, z, eps, m, st).value;
  };
  for (std::size_t c = 0; c < grid.size(); ++c) {
    field.values[c] = at(grid.at(c), settings);
    field.state[c] = field.values[c] == kNegInf ? CellState::neg_inf : CellState::finite;
  }
  double t = 0.0, delta = 0.0;
  if (tol.fixed) {
    t = *tol.fixed;
  } else {
    SliceSettings coarse = settings;
    coarse.h *= 2.0;
    const int ci = grid.nx / 2, cj = grid.ny / 2;
    const std::pair<int, int> probes[] = {{ci, cj}, {0, 0}, {grid.nx - 1, 0}, {0, grid.ny - 1}, {grid.nx - 1, grid.ny - 1}};
    for (auto [i, j] : probes) {
      const double fine = field.values[static_cast<std::size_t>(j * grid.nx + i)];
      const double rough = at(grid.at(i, j), coarse);
      if (std::isfinite(fine) && std::isfinite(rough)) delta = std::max(delta, std::abs(fine - rough));
    }
    const double ht2 = grid.h * grid.h;
    t = tol.c1 * ht2 * field.max_abs_finite() + tol.c2 * 4.0 * delta / ht2;
  }
  ScanReport r = scan_field(std::move(field), t);
  r.quadrature_error = delta;
  return r;
}

double chi(const ScalarField& phi, const GridDomain& dom, std::span<const double> a, int degree) {
  const int n = dom.dimension().n;
  std::vector<double> aa(a.begin(), a.end());
  ScalarField weight = [&phi, n, aa](std::span<const double> x) {
    const double v = phi(x);
    if (n == 1) return 2.0 * v;
    double r2 = 0.0;
    for (std::size_t k = 0; k < aa.size(); ++k) r2 += (x[k] - aa[k]) * (x[k] - aa[k]);
    // 2 (n - 1) log|z - a| = (n - 1) log|z - a|^2
    return 2.0 * v + (n - 1) * (r2 > 0.0 ? std::log(r2) : kNegInf);
  };
  BergmanProblem p{dom, weight, degree < 0 ? default_degree(n) : degree, Normalization::lebesgue};
  return kernel_diag(p, a).log_value;
}

}  // namespace psh
