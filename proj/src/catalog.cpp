#include "psh/catalog.hpp"

namespace psh {

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = {
      {"hartogs", "psh-scan",
       "log K_t(0,0) over the disks |z| < e^{re t} is harmonic: -log pi - 2 re t",
       {"log-psh-variation", "harmonic-oracle"},
       {{"rho", "abs2(z) - exp(2*re(t))"}, {"phi", "0"}},
       R"json({"subcommand": "psh-scan", "n": 1, "rho": "abs2(z) - exp(2*re(t))", "phi": "0",
 "t_grid": {"center": [0, 0], "half_width": 0.5, "h": 0.25}, "fiber_half_width": 2.0, "h": 0.025})json"},
      {"moving-weight", "psh-scan", "a weight psh in (t, z) on a fixed disk gives a psh log-kernel field",
       {"log-psh-variation"},
       {{"rho", "abs2(z) - 1"}, {"phi", "abs2(z - t)"}},
       R"json({"subcommand": "psh-scan", "n": 1, "rho": "abs2(z) - 1", "phi": "abs2(z - t)",
 "t_grid": {"center": [0, 0], "half_width": 0.4, "h": 0.2}})json"},
      {"translate-oka", "psh-scan", "the kernel at a point moving holomorphically with t stays log-psh",
       {"log-psh-variation", "oka-mode"},
       {{"rho", "abs2(z) - 1"}, {"phi", "abs2(z)"}, {"direction", "0.3"}},
       R"json({"subcommand": "psh-scan", "n": 1, "rho": "abs2(z) - 1", "phi": "abs2(z)", "z_mode": "oka",
 "direction": [0.3, 0], "t_grid": {"center": [0, 0], "half_width": 1.0, "h": 0.25}})json"},
      {"weight-shift", "psh-scan", "adding c re t to the weight shifts log K by c re t",
       {"log-psh-variation", "weight-covariance"},
       {{"rho", "abs2(z) - 1"}, {"phi", "0.8*re(t)"}},
       R"json({"subcommand": "psh-scan", "n": 1, "rho": "abs2(z) - 1", "phi": "0.8*re(t)",
 "t_grid": {"center": [0, 0], "half_width": 0.5, "h": 0.25}})json"},
      {"singular-family", "psh-scan", "log K_t may take the value -inf; here exactly at t = 0",
       {"log-psh-variation", "neg-inf-values"},
       {{"rho", "abs2(z) - 1"}, {"phi", "2*log(abs2(z - t))"}},
       R"json({"subcommand": "psh-scan", "n": 1, "rho": "abs2(z) - 1", "phi": "2*log(abs2(z - t))", "degree": 4,
 "t_grid": {"center": [0, 0], "half_width": 0.5, "h": 0.25}})json"},
      {"unit-disk", "bergman", "unweighted disk kernel 1 / (pi (1 - |z|^2)^2)",
       {"kernel-oracle"},
       {{"phi", "0"}, {"domain", "unit disk"}},
       R"json({"subcommand": "bergman", "n": 1, "domain": {"center": [0, 0], "radius": 1}, "phi": "0",
 "points": [[0, 0], [0.5, 0]], "expected": [0.3183098861837907, 0.5658842421045168], "rel_tol": 0.03})json"},
      {"radial-weights", "bergman", "for radial data K(0,0) equals the reciprocal weighted volume",
       {"radial-identity"},
       {{"phi", "0.5*log(abs2(z))"}, {"domain", "unit disk"}},
       R"json({"subcommand": "bergman", "n": 1, "domain": {"center": [0, 0], "radius": 1}, "phi": "0.5*log(abs2(z))",
 "points": [[0, 0]], "expected": [0.15915494309189535], "rel_tol": 0.02})json"},
      {"gaussian-prekopa", "prekopa", "marginals of log-concave Gaussians are log-concave: (3/4)x^2 - log(pi)/2",
       {"prekopa", "real-model"},
       {{"phi", "x^2 + x*y + y^2"}},
       R"json({"subcommand": "prekopa", "phi": "x^2 + x*y + y^2", "n_y": 1, "y_half_width": 8,
 "x_range": [-1, 1], "h_x": 0.1, "h_y": 0.01, "tol": 1e-6})json"},
      {"prekopa-negative", "prekopa", "an indefinite Hessian breaks the convexity of the marginal",
       {"prekopa", "negative-control"},
       {{"phi", "x^2 - 3*x*y + y^2"}},
       R"json({"subcommand": "prekopa", "phi": "x^2 - 3*x*y + y^2", "n_y": 1, "y_half_width": 8,
 "x_range": [-1, 1], "h_x": 0.1, "h_y": 0.01, "tol": 1e-6, "expect_convex": false})json"},
      {"minimum-principle", "prekopa", "p-marginals increase to the fiberwise infimum as p grows",
       {"minimum-principle"},
       {{"phi", "x^2 + (y - 1)^2"}, {"p ladder", "1, 2, 4, ..., 256"}},
       R"json({"subcommand": "prekopa", "phi": "x^2 + (y - 1)^2", "n_y": 1, "y_half_width": 8,
 "x_range": [-1, 1], "h_x": 0.1, "h_y": 0.01, "p_ladder": [1, 2, 4, 8, 16, 32, 64, 128, 256]})json"},
      {"tau-log", "lelong",
       "tau log|z|: Lelong number tau; the attenuation is finite at 0 iff tau < 1; chi is singular iff tau >= 1",
       {"attenuation-dichotomy", "attenuation-monotone", "chi-singular-set", "lelong"},
       {{"phi", "tau*0.5*log(abs2(z))"}, {"tau ladder", "0.25, 0.5, 0.9, 1.0, 1.1, 1.25"}},
       R"json({"subcommand": "lelong", "n": 1, "phi": "0.5*0.5*log(abs2(z))", "index": true,
 "attenuation": {"eps": [0.1, 0.2, 0.4]},
 "map": {"center": [0, 0], "half_width": 0.1, "h": 0.1, "eps": 0.1, "domain_radius": 1.0}})json"},
      {"lelong-quadratic", "lelong", "log|z^2 - z| has Lelong number 1 at the origin",
       {"lelong"},
       {{"phi", "0.5*log(abs2(z^2 - z))"}},
       R"json({"subcommand": "lelong", "n": 1, "phi": "0.5*log(abs2(z^2 - z))"})json"},
      {"skoda-c2", "lelong", "Skoda: the integrability index brackets the Lelong number in C^2",
       {"lelong", "skoda"},
       {{"phi", "1.2*0.5*log(abs2(z1) + abs2(z2))"}},
       R"json({"subcommand": "lelong", "n": 2, "phi": "1.2*0.5*log(abs2(z1) + abs2(z2))", "index": true})json"},
      {"disk-green", "green", "the disk Green function is log|z| / (2 pi) and nonpositive",
       {"green-oracle", "maximum-principle"},
       {{"domain", "unit disk"}, {"measure", "bump of radius 4h at 0"}},
       R"json({"subcommand": "green", "mode": "potential", "dim": 2, "domain": {"center": [0, 0], "radius": 1},
 "h": 0.0078125, "measure": {"type": "point", "center": [0, 0], "radius": 0.03125},
 "points": [[0.3, 0], [0.5, 0], [0.9, 0]]})json"},
      {"radius-energy", "green", "energy of disks of radius e^{re t} is harmonic in t",
       {"energy-subharmonic", "harmonic-oracle"},
       {{"rho", "x1^2 + x2^2 - exp(2*re(t))"}},
       R"json({"subcommand": "green", "mode": "energy-scan", "scan_mode": "complex_subharmonic",
 "family": {"shape": "general", "rho": "x1^2 + x2^2 - exp(2*re(t))", "dim": 2, "complex_t": true, "half_width": 1.6},
 "measure": {"type": "point", "center": [0, 0], "radius": 0.0625},
 "t_grid": {"center": [0, 0], "half_width": 0.25, "h": 0.125}})json"},
      {"translate-energy", "green", "energy of translated disks is subharmonic in t",
       {"energy-subharmonic"},
       {{"rho", "(x1 - re(t)/4)^2 + x2^2 - 1"}},
       R"json({"subcommand": "green", "mode": "energy-scan", "scan_mode": "complex_subharmonic",
 "family": {"shape": "general", "rho": "(x1 - re(t)/4)^2 + x2^2 - 1", "dim": 2, "complex_t": true, "half_width": 1.4},
 "measure": {"type": "point", "center": [0, 0], "radius": 0.0625},
 "t_grid": {"center": [0, 0], "half_width": 1.0, "h": 0.5}})json"},
      {"graph-energy", "green", "fiber energies of sublevel sets of a subharmonic v are convex in real t",
       {"energy-convex", "condition-C"},
       {{"v", "x1^2 + 2*x2^2"}},
       R"json({"subcommand": "green", "mode": "energy-scan", "scan_mode": "real_convex",
 "family": {"shape": "graph", "v": "x1^2 + 2*x2^2", "dim": 2, "half_width": 1.4},
 "measure": {"type": "point", "center": [0, 0], "radius": 0.0625},
 "t_grid": {"start": 0.5, "h": 0.25, "count": 5}})json"},
      {"ball-robin", "robin", "Lambda of a ball is R / (4 pi (R^2 - |x|^2)); convex with centre at 0",
       {"robin-convex", "harmonic-centre"},
       {{"domain", "unit ball"}},
       R"json({"subcommand": "robin", "domain": {"center": [0, 0, 0], "radius": 1}, "h": 0.0625,
 "points": [[0, 0, 0], [0.5, 0, 0]],
 "segments": [{"a": [-0.5, 0, 0], "b": [0.5, 0, 0]}, {"a": [-0.3, -0.3, -0.3], "b": [0.3, 0.3, 0.3]}],
 "samples": 5, "tol": 0, "harmonic_center": true})json"},
      {"box-robin", "robin", "Lambda of the cube is strictly convex with its minimum at the centre",
       {"robin-convex", "harmonic-centre"},
       {{"rho", "max(max(x1^2, x2^2), x3^2) - 1"}},
       R"json({"subcommand": "robin", "domain": {"rho": "max(max(x1^2, x2^2), x3^2) - 1", "half_width": 1.25},
 "h": 0.0625, "segments": [{"a": [-0.5, 0.1, 0], "b": [0.5, 0.1, 0]}], "samples": 5, "tol": 0,
 "harmonic_center": true})json"},
  };
  return entries;
}

const CatalogEntry* find_catalog_entry(const std::string& name) {
  for (const auto& e : catalog())
    if (e.name == name) return &e;
  return nullptr;
}

}  // namespace psh
