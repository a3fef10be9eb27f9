#pragma once

#include <string>
#include <vector>

#include "psh/quadrature.hpp"

namespace psh {

// phi(x, y) with x a real scalar on a uniform grid and y in a box (dim 1 or 2).
// Field coordinates are (x, y_1, ..., y_n).
struct MarginalProblem {
  ScalarField phi;
  double x_lo = -1.0;
  double x_hi = 1.0;
  double h_x = 0.1;
  Box y_box;
  double h_y = 0.02;

  // phi over variables x, y (n_y = 1) or x, y1, y2
  static MarginalProblem parse(const std::string& phi, int n_y, double y_half_width);
  std::vector<double> x_grid() const;
};

// -log int e^{-phi(x, y)} dy (Lebesgue measure on the y box); +inf where the
// integral underflows.
std::vector<double> marginal(const MarginalProblem& mp);

struct ConvexityResult {
  double min_second_difference = 0.0;
  std::size_t argmin = 0;
  bool pass = false;
};

ConvexityResult convexity_check(std::span<const double> values, double h_x, double tol);

// -(1/p) log int e^{-p phi} dy/L over the box-normalized measure (L = box volume).
std::vector<double> p_marginal(const MarginalProblem& mp, double p);
// inf over the y quadrature nodes
std::vector<double> grid_infimum(const MarginalProblem& mp);

struct MinimumPrincipleReport {
  std::vector<double> x;
  std::vector<double> p_ladder;
  std::vector<std::vector<double>> values;  // values[k][i] at p_ladder[k], x[i]
  std::vector<double> infimum;
  double band = 0.0;             // allowed |phi_p - inf| at the largest p
  double max_deviation = 0.0;    // at the largest p
  double max_monotonicity_violation = 0.0;
  bool monotone = false;
  bool within_band = false;
  bool pass() const { return monotone && within_band; }
};

MinimumPrincipleReport minimum_principle_limit(const MarginalProblem& mp, std::span<const double> p_ladder);

// |lhs - rhs| of the expansion of sum_{j,k} d_j d_k (gamma_j gamma_k e^{-phi}),
// both sides by central differences with step h. phi and gamma share real
// variables x0, ..., x_{m-1}; gamma has m components.
double hessian_identity_residual(const Expression& phi, const std::vector<Expression>& gamma,
                                 std::span<const double> point, double h);
// Both sides separately, for reporting.
std::pair<double, double> hessian_identity_sides(const Expression& phi, const std::vector<Expression>& gamma,
                                                 std::span<const double> point, double h);

struct CertificateRow {
  double t = 0.0;
  double k = 0.0;
  double k2_fd = 0.0;        // k'' from finite differences of k on the t grid
  double k2_integral = 0.0;  // integral formula
  double relative_error = 0.0;
  double min_integrand = 0.0;
};

struct CertificateReport {
  std::vector<CertificateRow> rows;
  double max_relative_error = 0.0;
  double min_integrand_ratio = 0.0;  // min integrand / max |integrand|
  bool pass = false;
};

// n = 1 construction: phi(x0, x1) on t in [t_lo, t_hi] (step h_t) and x1 in [y_lo, y_hi].
CertificateReport prekopa_certificate(const ScalarField& phi, double t_lo, double t_hi, double h_t, double y_lo,
                                      double y_hi, double h_y = 1e-3);

}  // namespace psh
