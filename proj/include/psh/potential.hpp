#pragma once

#include <complex>
#include <string>
#include <vector>

#include "psh/fibration.hpp"

namespace psh {

// Nonnegative density with support in the closed ball |x - center| <= support_radius.
// The discrete version is rescaled so that sum mu_i h^d equals mass.
struct Measure {
  ScalarField density;
  std::vector<double> center;
  double support_radius = 0.0;
  double mass = 1.0;

  // (1 - |x - c|^2 / r^2)^2 bump; r is usually 4h
  static Measure point(std::vector<double> center, double radius, double mass = 1.0);
  // bump of half-width `width` around the sphere |x - c| = rho0
  static Measure ring(std::vector<double> center, double rho0, double width, double mass = 1.0);
  static Measure zero(int dim);
};

struct GreenProblem {
  GridDomain dom;  // real dimension 2 or 3
  Measure mu;
};

struct GreenSolution {
  std::vector<double> g;   // per node, 0 at exterior nodes
  std::vector<double> mu;  // per node density
  double mass = 0.0;       // sum mu_i h^d
  int iterations = 0;
  double residual = 0.0;   // ||Delta_h g - mu|| / ||mu||
};

// Delta_h g = mu inside, g = 0 at every exterior node. Throws precondition when the
// support of mu comes within 2h of the exterior, solver when CG stalls.
GreenSolution green_potential(const GreenProblem& gp, Exec mode = default_exec());
// sum g mu h^d; the Green kernel is nonpositive so u <= 0
double energy(const GreenProblem& gp, const GreenSolution& sol);
double energy(const GreenProblem& gp, Exec mode = default_exec());

// Multilinear interpolation of node values; throws precondition when a corner is exterior.
double interpolate(const GridDomain& dom, const std::vector<double>& node_values, std::span<const double> x);

/// D_t in R^d (d = 2, 3) given by rho(x, t) < 0. Complex t feeds (re t, im t)
/// after x; real t feeds one coordinate.
struct EnergyFamily {
  enum class Shape { general, graph, convex };

  Shape shape = Shape::general;
  ScalarField rho;
  ScalarField v;  // graph shape: D_t = {v(x) < t}
  int dim = 2;
  bool complex_t = true;
  Box bbox;
  double h = 1.0 / 64;

  // variables x1..xd and t (complex or real)
  static EnergyFamily parse(const std::string& rho, int dim, bool complex_t, double half_width);
  // D_t = {v(x1..xd) < t}, real t
  static EnergyFamily graph(const std::string& v, int dim, double half_width);
  // jointly convex rho(x, t), real t; convexity is spot-checked by condition_C_check
  static EnergyFamily convex(const std::string& rho, int dim, double half_width);
  static std::vector<VarDecl> variables(int dim, bool complex_t);

  GridDomain fiber(std::complex<double> t, double mesh) const;
};

struct ConditionC {
  bool pass = false;
  double min_laplacian = 0.0;  // graph shape
  double max_convexity_defect = 0.0;  // convex shape
  std::string reason;
};

// Graph shape: min of the 5/7-point Laplacian of v over {v < t_max} >= -tol.
// Convex shape: rho(midpoint) <= mean of the endpoints on 200 random pairs.
// Any other shape throws unsupported_family.
ConditionC condition_C_check(const EnergyFamily& fam, double t_lo, double t_hi, double tol = 1e-6,
                             std::uint64_t seed = 7);

enum class EnergyMode { complex_subharmonic, real_convex };

struct EnergyScan {
  EnergyMode mode = EnergyMode::complex_subharmonic;
  std::vector<std::complex<double>> t;
  std::vector<double> u;
  double min_curvature = 0.0;  // min discrete Laplacian (complex) or second difference (real)
  std::complex<double> argmin;
  double tol = 0.0;
  double quadrature_error = 0.0;  // max |u(h) - u(2h)| at probe parameters
  bool pass = false;
};

// Complex mode scans u over `grid`; real mode scans u along t = re(grid.t0) + k grid.h,
// k < grid.nx. Real mode requires condition (C) first.
EnergyScan energy_scan(const EnergyFamily& fam, const Measure& mu, const TGrid& grid, EnergyMode mode,
                       const TolModel& tol = {});

// Lambda(x) = psi(x, x) on a convex domain in R^3; psi is the discrete harmonic
// function equal to 1 / (4 pi |x - zeta|) at exterior nodes.
double robin_function(const GridDomain& dom, std::span<const double> x, Exec mode = default_exec());

struct Segment {
  std::vector<double> a;
  std::vector<double> b;
};

struct RobinScan {
  double min_second_difference = 0.0;
  double min_log_second_difference = 0.0;
  std::size_t argmin_segment = 0;
  double tol = 0.0;
  bool pass = false;      // min second difference > tol (strict convexity)
  bool log_pass = false;  // log Lambda second differences >= -tol
  std::vector<std::vector<double>> values;  // Lambda at the samples of each segment
};

// Convexity precondition: 200 random interior node pairs have interior midpoints.
void check_convex(const GridDomain& dom, std::uint64_t seed = 11);

RobinScan robin_convexity_scan(const GridDomain& dom, const std::vector<Segment>& segments, int samples, double tol);

struct HarmonicCenter {
  std::vector<double> point;
  double value = 0.0;
  int evaluations = 0;
};

// argmin of Lambda: best node of a coarse interior lattice, then golden-section sweeps along the axes
HarmonicCenter harmonic_center(const GridDomain& dom, double tol = 1e-3);

}  // namespace psh
