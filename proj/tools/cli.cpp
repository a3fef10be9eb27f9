#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "psh/acceptance.hpp"
#include "psh/bergman.hpp"
#include "psh/catalog.hpp"
#include "psh/error.hpp"
#include "psh/fibration.hpp"
#include "psh/lelong.hpp"
#include "psh/potential.hpp"
#include "psh/prekopa.hpp"
#include "psh/report.hpp"

namespace psh::cli {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;
using cplx = std::complex<double>;

struct Flags {
  std::string config;
  std::string out = "report";
  std::optional<double> tol;
  std::optional<double> h;
  std::optional<int> degree;
  std::uint64_t seed = 7;
  std::string format = "csv";
  bool serial = false;
  // verify-all
  std::string suite = "desk";
  int only = 0;
  // catalog
  std::vector<std::string> catalog_args;
};

// Typed view of one JSON object; every key must be consumed before finish().
class Cfg {
 public:
  Cfg(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  bool has(const std::string& k) const { return j_.contains(k); }

  const json& raw(const std::string& k) {
    if (!has(k)) fail(k, "is required");
    used_.insert(k);
    return j_.at(k);
  }
  double num(const std::string& k) {
    const auto& v = raw(k);
    if (!v.is_number()) fail(k, "must be a number");
    return v.get<double>();
  }
  double num(const std::string& k, double def) { return has(k) ? num(k) : def; }
  double pos(const std::string& k, double def) {
    const double v = num(k, def);
    if (!(v > 0.0)) fail(k, "must be positive");
    return v;
  }
  int integer(const std::string& k, int def, int lo = 1) {
    if (!has(k)) return def;
    const auto& v = raw(k);
    if (!v.is_number_integer() || v.get<int>() < lo) fail(k, "must be an integer >= " + std::to_string(lo));
    return v.get<int>();
  }
  std::string str(const std::string& k) {
    const auto& v = raw(k);
    if (!v.is_string()) fail(k, "must be a string");
    return v.get<std::string>();
  }
  std::string str(const std::string& k, const std::string& def) { return has(k) ? str(k) : def; }
  bool flag(const std::string& k, bool def) {
    if (!has(k)) return def;
    const auto& v = raw(k);
    if (!v.is_boolean()) fail(k, "must be true or false");
    return v.get<bool>();
  }
  std::vector<double> vec(const std::string& k, std::size_t size = 0) {
    const auto& v = raw(k);
    if (!v.is_array()) fail(k, "must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) fail(k, "must be an array of numbers");
      out.push_back(x.get<double>());
    }
    if (size && out.size() != size) fail(k, "must have " + std::to_string(size) + " entries");
    return out;
  }
  std::vector<double> vec(const std::string& k, std::vector<double> def, std::size_t size = 0) {
    return has(k) ? vec(k, size) : std::move(def);
  }
  std::vector<std::vector<double>> points(const std::string& k, std::size_t size) {
    const auto& v = raw(k);
    if (!v.is_array()) fail(k, "must be an array of points");
    std::vector<std::vector<double>> out;
    for (const auto& p : v) {
      if (!p.is_array() || p.size() != size) fail(k, "points must have " + std::to_string(size) + " coordinates");
      std::vector<double> q;
      for (const auto& x : p) {
        if (!x.is_number()) fail(k, "coordinates must be numbers");
        q.push_back(x.get<double>());
      }
      out.push_back(std::move(q));
    }
    return out;
  }
  Cfg obj(const std::string& k) { return Cfg(raw(k), path_ + k + "."); }
  std::string choice(const std::string& k, const std::string& def, std::initializer_list<const char*> allowed) {
    const auto v = str(k, def);
    for (const char* a : allowed)
      if (v == a) return v;
    fail(k, "has unknown value '" + v + "'");
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!used_.count(k)) fail(k, "is not a recognised key");
  }

  [[noreturn]] void fail(const std::string& k, const std::string& what) const {
    throw LabError(ErrorKind::config, "config key '" + path_ + k + "' " + what);
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

std::string fmt(double v) { return format_number(v); }

std::string t_label(cplx t) { return "t=" + fmt(t.real()) + (t.imag() < 0 ? "-" : "+") + fmt(std::abs(t.imag())) + "i"; }

std::string point_label(std::span<const double> x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? ", " : "") + fmt(x[i]);
  return s + ")";
}

Check check(std::string id, bool ok, double value, double bound, std::string locator = {}) {
  Check c;
  c.id = std::move(id);
  c.verdict = ok ? Verdict::pass : Verdict::fail;
  c.value = value;
  c.bound = bound;
  if (!ok) c.locator = std::move(locator);
  return c;
}

TolModel tol_model(Cfg& cfg, const Flags& f) {
  TolModel t;
  if (cfg.has("tol")) {
    const auto& v = cfg.raw("tol");
    if (v.is_number()) {
      t.fixed = v.get<double>();
    } else {
      Cfg o(v, "tol.");
      t.c1 = o.pos("c1", t.c1);
      t.c2 = o.pos("c2", t.c2);
      o.finish();
    }
  }
  if (f.tol) t.fixed = *f.tol;
  return t;
}

TGrid complex_grid(Cfg g) {
  const auto c = g.vec("center", {0.0, 0.0}, 2);
  const double hw = g.pos("half_width", 0.5), h = g.pos("h", 0.25);
  g.finish();
  return TGrid::centered({c[0], c[1]}, hw, h);
}

std::vector<VarDecl> real_vars(int d) {
  std::vector<VarDecl> v;
  for (int k = 1; k <= d; ++k) v.push_back({"x" + std::to_string(k), VarKind::real});
  return v;
}

// {"center", "radius"} or {"rho", "half_width", "center"}
GridDomain domain_from(Cfg d, Dimension dim, double h) {
  const int rd = dim.real_dim();
  std::vector<double> center = d.vec("center", std::vector<double>(static_cast<std::size_t>(rd), 0.0),
                                     static_cast<std::size_t>(rd));
  if (d.has("radius")) {
    const double r = d.pos("radius", 1.0);
    d.finish();
    return GridDomain::ball(center, r, h, dim);
  }
  const auto vars = dim.kind == DimKind::complex ? PshSample::variables(dim.n) : real_vars(rd);
  const auto rho = Expression::parse(d.str("rho"), vars);
  const double hw = d.pos("half_width", 1.25);
  d.finish();
  return GridDomain::build(as_field(rho), Box::cube(rd, hw, center), h, dim);
}

Measure measure_from(Cfg m, int dim) {
  const auto type = m.choice("type", "point", {"point", "ring", "zero"});
  if (type == "zero") {
    m.finish();
    return Measure::zero(dim);
  }
  const auto c = m.vec("center", std::vector<double>(static_cast<std::size_t>(dim), 0.0), static_cast<std::size_t>(dim));
  const double mass = m.pos("mass", 1.0);
  Measure mu;
  if (type == "point") {
    mu = Measure::point(c, m.pos("radius", 0.0625), mass);
  } else {
    const double rho0 = m.pos("rho0", 0.5);
    mu = Measure::ring(c, rho0, m.pos("width", 0.0625), mass);
  }
  m.finish();
  return mu;
}

// ---------------------------------------------------------------------------

Report cmd_psh_scan(Cfg& cfg, const Flags& f) {
  const int n = cfg.integer("n", 1);
  if (n > 2) cfg.fail("n", "must be 1 or 2");
  auto fam = SliceFamily::parse(cfg.str("rho"), cfg.str("phi"), n);
  if (cfg.has("t_grid")) fam.t_grid = complex_grid(cfg.obj("t_grid"));
  if (cfg.has("fiber_half_width")) fam.fiber_box = Box::cube(2 * n, cfg.pos("fiber_half_width", 1.25));
  fam.h = f.h.value_or(cfg.pos("h", fam.h));
  fam.degree = f.degree.value_or(cfg.integer("degree", -1, 0));
  fam.normalization = cfg.choice("normalization", "lebesgue", {"lebesgue", "unit_total_mass"}) == "lebesgue"
                          ? Normalization::lebesgue
                          : Normalization::unit_total_mass;
  fam.z0 = cfg.vec("z0", fam.z0, static_cast<std::size_t>(2 * n));
  fam.z_mode = cfg.choice("z_mode", "fixed", {"fixed", "oka"}) == "oka" ? SliceFamily::ZMode::oka
                                                                        : SliceFamily::ZMode::fixed;
  fam.direction = cfg.vec("direction", fam.direction, static_cast<std::size_t>(2 * n));
  const auto tol = tol_model(cfg, f);
  cfg.finish();

  const auto r = psh_scan(fam, tol);
  Report rep;
  rep.kind = "scan";
  rep.columns = {"t_re", "t_im", "field", "laplacian"};
  for (std::size_t c = 0; c < r.field.grid.size(); ++c) {
    const cplx t = r.field.grid.at(c);
    rep.rows.push_back({t.real(), t.imag(), r.field.values[c], r.laplacian.laplacian[c]});
  }
  rep.add(check("min discrete Laplacian >= -tol", r.pass, r.laplacian.min, -r.tol, t_label(r.laplacian.argmin)));
  rep.provenance["n"] = n;
  rep.provenance["h"] = fam.h;
  rep.provenance["degree"] = fam.degree < 0 ? default_degree(n) : fam.degree;
  rep.provenance["h_t"] = fam.t_grid.h;
  rep.provenance["tol"] = r.tol;
  rep.provenance["quadrature_error"] = r.quadrature_error;
  rep.provenance["neg_inf_cells"] = r.neg_inf_cells;
  rep.provenance["void_cells"] = r.void_cells;
  return rep;
}

Report cmd_bergman(Cfg& cfg, const Flags& f) {
  const int n = cfg.integer("n", 1);
  if (n > 2) cfg.fail("n", "must be 1 or 2");
  const double h = f.h.value_or(cfg.pos("h", n == 1 ? 1.0 / 64 : 1.0 / 10));
  auto dom = domain_from(cfg.obj("domain"), Dimension::complex(n), h);
  const auto phi = Expression::parse(cfg.str("phi"), PshSample::variables(n));
  const int degree = f.degree.value_or(cfg.integer("degree", default_degree(n), 0));
  const auto norm = cfg.choice("normalization", "lebesgue", {"lebesgue", "unit_total_mass"}) == "lebesgue"
                        ? Normalization::lebesgue
                        : Normalization::unit_total_mass;
  const auto pts = cfg.points("points", static_cast<std::size_t>(2 * n));
  std::vector<double> expected;
  if (cfg.has("expected")) {
    expected = cfg.vec("expected", pts.size());
  }
  const double rel_tol = f.tol.value_or(cfg.pos("rel_tol", 0.02));
  cfg.finish();

  const auto p = make_problem(std::move(dom), phi, degree, norm);
  BergmanKernel k(p);
  Report rep;
  rep.kind = "kernel";
  for (int j = 1; j <= n; ++j) {
    rep.columns.push_back("re_z" + std::to_string(j));
    rep.columns.push_back("im_z" + std::to_string(j));
  }
  rep.columns.push_back("K");
  rep.columns.push_back("log_K");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto e = locally_integrable(p, pts[i]) ? k.diag(pts[i]) : KernelEvaluation{};
    auto row = pts[i];
    row.push_back(e.value);
    row.push_back(e.log_value);
    rep.rows.push_back(std::move(row));
    if (!expected.empty()) {
      const double err = std::abs(e.value - expected[i]) / std::abs(expected[i]);
      rep.add(check("K at " + point_label(pts[i]), err <= rel_tol, err, rel_tol, point_label(pts[i])));
    }
  }
  rep.provenance["n"] = n;
  rep.provenance["h"] = h;
  rep.provenance["degree"] = degree;
  rep.provenance["basis_size"] = k.basis_size();
  rep.provenance["gram_min_eigenvalue"] = k.gram().min_eigenvalue;
  return rep;
}

Report cmd_prekopa(Cfg& cfg, const Flags& f) {
  const int n_y = cfg.integer("n_y", 1);
  if (n_y > 2) cfg.fail("n_y", "must be 1 or 2");
  auto mp = MarginalProblem::parse(cfg.str("phi"), n_y, cfg.pos("y_half_width", 8.0));
  const auto xr = cfg.vec("x_range", {mp.x_lo, mp.x_hi}, 2);
  if (!(xr[1] > xr[0])) cfg.fail("x_range", "must be increasing");
  mp.x_lo = xr[0];
  mp.x_hi = xr[1];
  mp.h_x = cfg.pos("h_x", mp.h_x);
  mp.h_y = f.h.value_or(cfg.pos("h_y", mp.h_y));
  const double tol = f.tol.value_or(cfg.num("tol", 1e-6));
  const bool expect_convex = cfg.flag("expect_convex", true);
  std::vector<double> ladder;
  if (cfg.has("p_ladder")) ladder = cfg.vec("p_ladder");
  cfg.finish();

  const auto v = marginal(mp);
  const auto xs = mp.x_grid();
  Report rep;
  rep.kind = "profile";
  rep.columns = {"x", "phi_tilde", "second_difference"};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double d2 = std::nan("");
    if (i > 0 && i + 1 < xs.size()) d2 = (v[i - 1] - 2.0 * v[i] + v[i + 1]) / (mp.h_x * mp.h_x);
    rep.rows.push_back({xs[i], v[i], d2});
  }
  const auto c = convexity_check(v, mp.h_x, tol);
  const std::string where = "x=" + fmt(xs[c.argmin]);
  if (expect_convex)
    rep.add(check("marginal is convex", c.pass, c.min_second_difference, -tol, where));
  else
    rep.add(check("negative control: marginal is not convex", !c.pass, c.min_second_difference, -tol, where));
  if (!ladder.empty()) {
    const auto m = minimum_principle_limit(mp, ladder);
    rep.add(check("p-marginals nondecreasing in p", m.monotone, m.max_monotonicity_violation, 1e-10));
    rep.add(check("largest p within the band of the infimum", m.within_band, m.max_deviation, m.band));
    rep.provenance["p_ladder"] = ladder;
  }
  rep.provenance["h_x"] = mp.h_x;
  rep.provenance["h_y"] = mp.h_y;
  rep.provenance["tol"] = tol;
  return rep;
}

Report cmd_lelong(Cfg& cfg, const Flags& f) {
  const int n = cfg.integer("n", 1);
  if (n > 2) cfg.fail("n", "must be 1 or 2");
  const std::string phi_text = cfg.str("phi");
  auto s = PshSample::parse(phi_text, n, cfg.vec("a", std::vector<double>(static_cast<std::size_t>(2 * n), 0.0),
                                                   static_cast<std::size_t>(2 * n)));
  s.r0 = cfg.pos("r0", s.r0);
  s.levels = cfg.integer("levels", s.levels, 2);
  s.m = cfg.integer("m", s.m, 4);
  if (f.h) s.slice.h = *f.h;
  if (f.degree) s.slice.degree = *f.degree;
  const bool want_index = cfg.flag("index", false);
  std::vector<double> eps;
  int m_slice = 16;
  if (cfg.has("attenuation")) {
    auto a = cfg.obj("attenuation");
    eps = a.vec("eps");
    m_slice = a.integer("m", m_slice, 4);
    a.finish();
    for (std::size_t i = 0; i < eps.size(); ++i)
      if (!(eps[i] > 0.0) || (i && eps[i] <= eps[i - 1])) cfg.fail("attenuation.eps", "must be positive and increasing");
  }
  std::optional<TGrid> map_grid;
  double map_eps = 0.1, map_radius = 1.0;
  if (cfg.has("map")) {
    if (n != 1) cfg.fail("map", "is available for n = 1 only");
    auto m = cfg.obj("map");
    const auto c = m.vec("center", {0.0, 0.0}, 2);
    const double hw = m.pos("half_width", 0.1), h = m.pos("h", 0.1);
    map_eps = m.pos("eps", map_eps);
    map_radius = m.pos("domain_radius", map_radius);
    m.finish();
    map_grid = TGrid::centered({c[0], c[1]}, hw, h);
  }
  cfg.finish();

  Report rep;
  rep.kind = "singularity";
  const auto g = lelong_number(s);
  const bool agree = g.dense_singularity || std::abs(g.estimate - g.sup_estimate) <= 0.1;
  rep.add(check("sup and mean estimates agree", agree, std::abs(g.estimate - g.sup_estimate), 0.1,
                "a=" + point_label(s.basepoint())));
  rep.provenance["lelong_estimate"] = g.estimate;
  rep.provenance["lelong_sup_estimate"] = g.sup_estimate;
  if (want_index) {
    const auto i = integrability_index(s);
    const double slack = (i.hi - i.lo) + 0.05;
    const bool ok = i.lo - slack <= g.estimate && g.estimate <= n * (i.hi + slack);
    rep.add(check("Skoda sandwich", ok, g.estimate, n * (i.hi + slack), "a=" + point_label(s.basepoint())));
    rep.provenance["index_estimate"] = i.estimate;
    rep.provenance["index_bracket"] = {i.lo, i.hi};
    if (i.coarse) {
      Check c;
      c.id = "index bisection conclusive";
      c.verdict = Verdict::inconclusive;
      c.detail = "two consecutive mixed-sign probes";
      rep.add(std::move(c));
    }
  }
  if (!eps.empty()) {
    const auto r = attenuation_monotonicity(s.phi, n, s.basepoint(), eps, m_slice, s.slice);
    rep.add(check("phi_eps nondecreasing in eps", r.pass, r.max_violation, 1e-8 + 2 * r.noise,
                  "a=" + point_label(s.basepoint())));
    rep.provenance["eps"] = eps;
    rep.provenance["phi_eps"] = r.values;
  }
  if (map_grid) {
    rep.columns = {"a_re", "a_im", "chi", "phi_eps", "lelong_estimate"};
    for (std::size_t c = 0; c < map_grid->size(); ++c) {
      const cplx a = map_grid->at(c);
      const std::vector<double> pa = {a.real(), a.imag()};
      auto dom = GridDomain::ball(pa, map_radius, s.slice.h, Dimension::complex(1));
      auto sa = s;
      sa.a = pa;
      rep.rows.push_back({a.real(), a.imag(), chi(s.phi, dom, pa, s.slice.degree),
                          attenuated(s.phi, 1, pa, map_eps, m_slice, s.slice).value, lelong_number(sa).estimate});
    }
    rep.provenance["map_eps"] = map_eps;
    rep.provenance["map_domain_radius"] = map_radius;
  } else {
    rep.columns = {"r", "mean", "sup"};
    for (std::size_t k = 0; k < g.radii.size(); ++k) rep.rows.push_back({g.radii[k], g.means[k], g.sups[k]});
  }
  rep.provenance["n"] = n;
  rep.provenance["r0"] = s.r0;
  rep.provenance["levels"] = s.levels;
  rep.provenance["m"] = s.m;
  rep.provenance["slice_h"] = s.slice.h;
  rep.provenance["slice_degree"] = s.slice.degree;
  return rep;
}

Report cmd_green(Cfg& cfg, const Flags& f) {
  const auto mode = cfg.choice("mode", "potential", {"potential", "energy-scan"});
  Report rep;
  if (mode == "potential") {
    const int dim = cfg.integer("dim", 2, 2);
    if (dim > 3) cfg.fail("dim", "must be 2 or 3");
    const double h = f.h.value_or(cfg.pos("h", 1.0 / 64));
    auto dom = domain_from(cfg.obj("domain"), Dimension::real(dim), h);
    auto mu = measure_from(cfg.obj("measure"), dim);
    std::vector<std::vector<double>> pts;
    if (cfg.has("points")) pts = cfg.points("points", static_cast<std::size_t>(dim));
    std::vector<double> expected;
    if (cfg.has("expected")) expected = cfg.vec("expected", pts.size());
    const double rel_tol = f.tol.value_or(cfg.pos("rel_tol", 0.03));
    cfg.finish();

    GreenProblem gp{std::move(dom), std::move(mu)};
    const auto sol = green_potential(gp);
    rep.kind = "potential";
    for (int a = 1; a <= dim; ++a) rep.columns.push_back("x" + std::to_string(a));
    rep.columns.push_back("g");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double g = interpolate(gp.dom, sol.g, pts[i]);
      auto row = pts[i];
      row.push_back(g);
      rep.rows.push_back(std::move(row));
      if (!expected.empty()) {
        const double err = std::abs(g - expected[i]) / std::abs(expected[i]);
        rep.add(check("g at " + point_label(pts[i]), err <= rel_tol, err, rel_tol, point_label(pts[i])));
      }
    }
    double gmax = -HUGE_VAL;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < sol.g.size(); ++i)
      if (gp.dom.interior(i) && sol.g[i] > gmax) {
        gmax = sol.g[i];
        arg = i;
      }
    rep.add(check("maximum principle g <= 0", gmax <= 1e-12, gmax, 0.0, point_label(gp.dom.node_coords(arg))));
    rep.add(check("solver residual", sol.residual <= 1e-8, sol.residual, 1e-8));
    rep.provenance["dim"] = dim;
    rep.provenance["h"] = h;
    rep.provenance["energy"] = energy(gp, sol);
    rep.provenance["mass"] = sol.mass;
    rep.provenance["cg_iterations"] = sol.iterations;
    rep.provenance["residual"] = sol.residual;
    return rep;
  }

  auto fc = cfg.obj("family");
  const auto shape = fc.choice("shape", "general", {"general", "graph", "convex"});
  const int dim = fc.integer("dim", 2, 2);
  if (dim > 3) fc.fail("dim", "must be 2 or 3");
  const double hw = fc.pos("half_width", 1.5);
  EnergyFamily fam;
  if (shape == "graph") {
    fam = EnergyFamily::graph(fc.str("v"), dim, hw);
  } else if (shape == "convex") {
    fam = EnergyFamily::convex(fc.str("rho"), dim, hw);
  } else {
    fam = EnergyFamily::parse(fc.str("rho"), dim, fc.flag("complex_t", true), hw);
  }
  fam.h = f.h.value_or(fc.pos("h", fam.h));
  fc.finish();
  const auto scan_mode = cfg.choice("scan_mode", fam.complex_t ? "complex_subharmonic" : "real_convex",
                                    {"complex_subharmonic", "real_convex"});
  const EnergyMode em = scan_mode == "real_convex" ? EnergyMode::real_convex : EnergyMode::complex_subharmonic;
  auto mu = measure_from(cfg.obj("measure"), dim);
  TGrid grid;
  auto gc = cfg.obj("t_grid");
  if (em == EnergyMode::real_convex) {
    grid.t0 = {gc.num("start"), 0.0};
    grid.h = gc.pos("h", 0.25);
    grid.nx = gc.integer("count", 5, 3);
    grid.ny = 1;
    gc.finish();
  } else {
    grid = complex_grid(gc);
  }
  const auto tol = tol_model(cfg, f);
  cfg.finish();

  const auto r = energy_scan(fam, mu, grid, em, tol);
  rep.kind = "energy";
  rep.columns = {"t_re", "t_im", "u", "second_difference"};
  std::vector<double> second(r.u.size(), std::nan(""));
  if (em == EnergyMode::real_convex) {
    for (std::size_t k = 1; k + 1 < r.u.size(); ++k)
      second[k] = (r.u[k - 1] - 2.0 * r.u[k] + r.u[k + 1]) / (grid.h * grid.h);
  } else {
    TField fld;
    fld.grid = grid;
    fld.values = r.u;
    fld.state.assign(r.u.size(), CellState::finite);
    second = discrete_laplacian_min(fld).laplacian;
  }
  for (std::size_t k = 0; k < r.u.size(); ++k) rep.rows.push_back({r.t[k].real(), r.t[k].imag(), r.u[k], second[k]});
  rep.add(check(em == EnergyMode::real_convex ? "energy convex in t" : "energy subharmonic in t", r.pass,
                r.min_curvature, -r.tol, t_label(r.argmin)));
  rep.provenance["h"] = fam.h;
  rep.provenance["h_t"] = grid.h;
  rep.provenance["tol"] = r.tol;
  rep.provenance["quadrature_error"] = r.quadrature_error;
  return rep;
}

Report cmd_robin(Cfg& cfg, const Flags& f) {
  const double h = f.h.value_or(cfg.pos("h", 1.0 / 32));
  auto dom = domain_from(cfg.obj("domain"), Dimension::real(3), h);
  std::vector<std::vector<double>> pts;
  if (cfg.has("points")) pts = cfg.points("points", 3);
  std::vector<Segment> segs;
  if (cfg.has("segments")) {
    const auto& arr = cfg.raw("segments");
    if (!arr.is_array()) cfg.fail("segments", "must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Cfg s(arr[i], "segments[" + std::to_string(i) + "].");
      segs.push_back({s.vec("a", 3), s.vec("b", 3)});
      s.finish();
    }
  }
  const int samples = cfg.integer("samples", 5, 3);
  const double tol = f.tol.value_or(cfg.num("tol", 0.0));
  const bool want_center = cfg.flag("harmonic_center", false);
  std::vector<double> expected_center;
  if (cfg.has("expected_center")) expected_center = cfg.vec("expected_center", 3);
  cfg.finish();

  Report rep;
  rep.kind = "robin";
  rep.columns = {"x1", "x2", "x3", "Lambda"};
  for (const auto& p : pts) rep.rows.push_back({p[0], p[1], p[2], robin_function(dom, p)});
  if (!segs.empty()) {
    const auto r = robin_convexity_scan(dom, segs, samples, tol);
    for (std::size_t s = 0; s < segs.size(); ++s)
      for (int k = 0; k < samples; ++k) {
        const double t = static_cast<double>(k) / (samples - 1);
        std::vector<double> row(4);
        for (std::size_t a = 0; a < 3; ++a) row[a] = segs[s].a[a] + t * (segs[s].b[a] - segs[s].a[a]);
        row[3] = r.values[s][static_cast<std::size_t>(k)];
        rep.rows.push_back(std::move(row));
      }
    const std::string where = "segment " + std::to_string(r.argmin_segment);
    rep.add(check("Lambda strictly convex along segments", r.pass, r.min_second_difference, tol, where));
    rep.add(check("log Lambda convex along segments", r.log_pass, r.min_log_second_difference, -tol, where));
  }
  if (want_center) {
    const auto hc = harmonic_center(dom);
    rep.provenance["harmonic_center"] = hc.point;
    rep.provenance["harmonic_center_value"] = hc.value;
    rep.provenance["harmonic_center_evaluations"] = hc.evaluations;
    if (!expected_center.empty()) {
      double d = 0.0;
      for (std::size_t a = 0; a < 3; ++a) d = std::max(d, std::abs(hc.point[a] - expected_center[a]));
      rep.add(check("harmonic centre within 2h", d < 2 * h, d, 2 * h, point_label(hc.point)));
    }
  }
  rep.provenance["h"] = h;
  return rep;
}

Report cmd_verify_all(const Flags& f, std::ostream& out) {
  if (f.suite != "desk") throw LabError(ErrorKind::config, "unknown suite '" + f.suite + "' (only 'desk')");
  AcceptanceOptions opt;
  opt.seed = f.seed;
  opt.mode = f.serial ? Exec::serial : Exec::parallel;
  std::vector<CriterionOutcome> outcomes;
  out << "criterion  verdict       seconds  module      title\n";
  for (const auto& info : acceptance_criteria()) {
    if (f.only && info.id != f.only) continue;
    outcomes.push_back(run_criterion(info.id, opt));
    const auto& o = outcomes.back();
    char line[256];
    std::snprintf(line, sizeof line, "%9d  %-12s %8.1f  %-10s  %s\n", info.id, to_string(o.verdict()), o.seconds,
                  info.module, info.title);
    out << line;
    for (const auto& c : o.checks)
      if (c.verdict == Verdict::fail) out << "           failed: " << c.id << " at " << c.locator << "\n";
    if (!o.error.empty()) out << "           error: " << o.error << "\n";
  }
  auto rep = acceptance_report(outcomes, opt, !f.serial);
  rep.provenance["suite"] = f.suite;
  return rep;
}

int cmd_catalog(const Flags& f, std::ostream& out, std::ostream& err) {
  const auto& a = f.catalog_args;
  if (a.empty() || a[0] == "list") {
    for (const auto& e : catalog()) {
      out << e.name << "  [" << e.subcommand << "]  " << e.claim << "\n";
    }
    return Exit::ok;
  }
  if (a[0] == "show" && a.size() == 2) {
    const auto* e = find_catalog_entry(a[1]);
    if (!e) {
      err << "unknown catalog entry '" << a[1] << "'\n";
      return Exit::input_error;
    }
    out << "name: " << e->name << "\nsubcommand: " << e->subcommand << "\nclaim: " << e->claim << "\ntags:";
    for (const auto& t : e->tags) out << " " << t;
    out << "\n";
    for (const auto& [k, v] : e->fields) out << k << ": " << v << "\n";
    out << "config:\n" << json::parse(e->config).dump(2) << "\n";
    return Exit::ok;
  }
  if (a[0] == "export" && a.size() == 2) {
    std::error_code ec;
    std::filesystem::create_directories(a[1], ec);
    if (ec) {
      err << "cannot create " << a[1] << ": " << ec.message() << "\n";
      return Exit::input_error;
    }
    for (const auto& e : catalog()) {
      std::ofstream o(std::filesystem::path(a[1]) / (e.name + ".json"));
      o << ojson::parse(e.config).dump(2) << "\n";
      if (!o) {
        err << "cannot write " << e.name << ".json\n";
        return Exit::input_error;
      }
    }
    out << "wrote " << catalog().size() << " configs to " << a[1] << "\n";
    return Exit::ok;
  }
  err << "usage: catalog list | catalog show NAME | catalog export DIR\n";
  return Exit::input_error;
}

json load_config(const std::string& path) {
  if (path.empty()) throw LabError(ErrorKind::config, "--config is required");
  std::ifstream in(path);
  if (!in) throw LabError(ErrorKind::io, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw LabError(ErrorKind::config, "malformed JSON in '" + path + "': " + e.what());
  }
}

int exit_for(Verdict v) {
  switch (v) {
    case Verdict::pass: return Exit::ok;
    case Verdict::fail: return Exit::failed;
    case Verdict::inconclusive: return Exit::inconclusive;
  }
  return Exit::failed;
}

bool inconclusive_kind(ErrorKind k) {
  return k == ErrorKind::field_too_singular || k == ErrorKind::rule_too_coarse || k == ErrorKind::solver;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical checks for weighted Bergman kernels, marginals, singularities and potentials", "psh-lab"};
  // --h is the mesh width, so help is --help only
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);
  Flags f;
  std::optional<double> tol, h;
  std::optional<int> degree;

  auto common = [&](CLI::App* sub, bool with_config) {
    if (with_config) sub->add_option("--config", f.config, "JSON config file")->required();
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--tol", tol, "fixed tolerance override");
    sub->add_option("--h", h, "mesh width override")->check(CLI::PositiveNumber);
    sub->add_option("--degree", degree, "polynomial degree override")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", f.seed, "seed for randomized suites");
    sub->add_option("--format", f.format, "report format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--serial", f.serial, "serial kernels (reproducible reductions)");
  };
  std::vector<std::pair<std::string, CLI::App*>> subs;
  for (const char* name : {"psh-scan", "bergman", "prekopa", "lelong", "green", "robin"}) {
    auto* s = app.add_subcommand(name);
    common(s, true);
    subs.emplace_back(name, s);
  }
  auto* va = app.add_subcommand("verify-all", "run every acceptance criterion");
  common(va, false);
  va->add_option("--suite", f.suite, "suite name");
  va->add_option("--only", f.only, "run a single criterion");
  auto* cat = app.add_subcommand("catalog", "list | show NAME | export DIR");
  cat->add_option("args", f.catalog_args, "catalog action");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return Exit::ok;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help();
    return Exit::ok;
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    app.exit(e, o, er);
    err << er.str() << o.str();
    return Exit::input_error;
  }
  f.tol = tol;
  f.h = h;
  f.degree = degree;

  if (cat->parsed()) return cmd_catalog(f, out, err);

  const Exec saved = default_exec();
  set_default_exec(f.serial ? Exec::serial : Exec::parallel);
  struct Restore {
    Exec e;
    ~Restore() { set_default_exec(e); }
  } restore{saved};

  std::string name = va->parsed() ? "verify-all" : "";
  for (const auto& [n, s] : subs)
    if (s->parsed()) name = n;
  const auto start = std::chrono::steady_clock::now();
  Report rep;
  try {
    if (name == "verify-all") {
      rep = cmd_verify_all(f, out);
    } else {
      const json j = load_config(f.config);
      Cfg cfg(j, "");
      if (cfg.has("subcommand") && cfg.str("subcommand") != name)
        throw LabError(ErrorKind::config, "config is for '" + j["subcommand"].get<std::string>() + "', not '" + name + "'");
      try {
        if (name == "psh-scan") rep = cmd_psh_scan(cfg, f);
        else if (name == "bergman") rep = cmd_bergman(cfg, f);
        else if (name == "prekopa") rep = cmd_prekopa(cfg, f);
        else if (name == "lelong") rep = cmd_lelong(cfg, f);
        else if (name == "green") rep = cmd_green(cfg, f);
        else rep = cmd_robin(cfg, f);
      } catch (const LabError& e) {
        if (!inconclusive_kind(e.kind())) throw;
        rep = Report{};
        rep.kind = "inconclusive";
        Check c;
        c.id = "computation";
        c.verdict = Verdict::inconclusive;
        c.detail = e.what();
        rep.add(std::move(c));
      }
      rep.provenance["config"] = ojson::parse(j.dump());
      rep.provenance["config_path"] = f.config;
    }
    rep.subcommand = name;
    rep.provenance["seed"] = f.seed;
    rep.provenance["serial"] = f.serial;
    // wall time is left out of serial runs so their JSON is byte-identical
    if (!f.serial)
      rep.provenance["wall_seconds"] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto files = emit(rep, f.out, name, f.format == "csv" ? Format::csv : Format::json);
    for (const auto& c : rep.checks) {
      out << to_string(c.verdict) << "  " << c.id;
      if (c.verdict == Verdict::fail) out << "  (value " << fmt(c.value) << ", bound " << fmt(c.bound) << ", at " << c.locator << ")";
      if (!c.detail.empty()) out << "  " << c.detail;
      out << "\n";
    }
    out << "verdict: " << to_string(rep.overall()) << "\n";
    for (const auto& p : files) out << "wrote " << p.string() << "\n";
    return exit_for(rep.overall());
  } catch (const LabError& e) {
    err << "error: " << e.what() << "\n";
    return Exit::input_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return Exit::input_error;
  }
}

}  // namespace psh::cli
