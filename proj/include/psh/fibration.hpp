#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "psh/bergman.hpp"

namespace psh {

// Rectangular grid of complex parameters t = t0 + h (i + j sqrt(-1)),
// 0 <= i < nx, 0 <= j < ny. Cell (i, j) is stored at j * nx + i.
struct TGrid {
  std::complex<double> t0;
  double h = 0.25;
  int nx = 5;
  int ny = 5;

  static TGrid centered(std::complex<double> center, double half_width, double h);
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::complex<double> at(int i, int j) const { return t0 + std::complex<double>(h * i, h * j); }
  std::complex<double> at(std::size_t cell) const {
    return at(static_cast<int>(cell % static_cast<std::size_t>(nx)), static_cast<int>(cell / static_cast<std::size_t>(nx)));
  }
};

enum class CellState { finite, neg_inf, void_fiber };

struct TField {
  TGrid grid;
  std::vector<double> values;
  std::vector<CellState> state;

  double max_abs_finite() const;
};

struct LaplacianResult {
  double min = 0.0;
  std::complex<double> argmin;
  std::vector<double> laplacian;  // NaN where the stencil was skipped
  int skipped = 0;
  int evaluated = 0;
};

// 5-point Laplacian over cells whose full stencil is finite.
LaplacianResult discrete_laplacian_min(const TField& field);

/// D = {(t, z): rho(t, z) < 0} with weight phi(t, z). Both fields take real
/// coordinates (re t, im t, re z_1, im z_1, ...).
struct SliceFamily {
  enum class ZMode { fixed, oka };

  ScalarField rho;
  ScalarField phi;
  int n = 1;
  TGrid t_grid;
  Box fiber_box;
  double h = 1.0 / 32;
  int degree = -1;
  Normalization normalization = Normalization::lebesgue;
  ZMode z_mode = ZMode::fixed;
  std::vector<double> z0;       // real coordinates of the base point
  std::vector<double> direction;  // oka direction a (real coordinates)

  // rho and phi in variables t and z (n = 1) or t, z1, z2 (n = 2)
  static SliceFamily parse(const std::string& rho, const std::string& phi, int n);
  static std::vector<VarDecl> variables(int n);

  std::vector<double> point_at(std::complex<double> t) const;
};

std::optional<GridDomain> slice_domain(const SliceFamily& fam, std::complex<double> t);
std::optional<BergmanProblem> slice_problem(const SliceFamily& fam, std::complex<double> t);

TField log_kernel_field(const SliceFamily& fam, Exec mode = default_exec());

// tol = c1 * h_t^2 * max|field| + c2 * 4 delta / h_t^2, delta the fiber
// quadrature error estimated by comparing h and 2h at a few parameters.
struct TolModel {
  double c1 = 5.0;
  double c2 = 5.0;
  std::optional<double> fixed;  // overrides the model
};

struct ScanReport {
  TField field;
  LaplacianResult laplacian;
  double tol = 0.0;
  double quadrature_error = 0.0;
  bool pass = false;
  int neg_inf_cells = 0;
  int void_cells = 0;
};

double quadrature_error_estimate(const SliceFamily& fam);
ScanReport scan_field(TField field, double tol);
ScanReport psh_scan(const SliceFamily& fam, const TolModel& tol = {});

struct HessianBound {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double tol = 0.0;
  bool pass = false;
};

// Second-order bound for n = 1: d^2 K_t(z0,z0)/dt dtbar against
// int |K_t(zeta,z0)|^2 D e^{-phi}, D = phi_tt - |phi_tz|^2 / phi_zz.
HessianBound hessian_bound_check(const SliceFamily& fam, std::complex<double> t0, std::span<const double> z0,
                                 double h_t);

enum class LimitScenario { cutoff_weights, increasing_domains, decreasing_weights };

struct MonotoneLimitReport {
  LimitScenario scenario;
  std::vector<double> parameters;
  std::vector<double> values;  // K_j(0,0)
  double limit_oracle = 0.0;
  double quadrature_tol = 0.0;  // relative
  bool monotone = false;
  bool converged = false;
  bool pass() const { return monotone && converged; }
};

const char* to_string(LimitScenario s);
// Unit-disk ladders about the origin; h is the fiber mesh.
MonotoneLimitReport monotone_limit_suite(LimitScenario s, double h = 1.0 / 64);

}  // namespace psh
