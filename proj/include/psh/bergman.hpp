#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "psh/quadrature.hpp"

namespace psh {

// Kernel values below exp(kLogFloor) are reported as -inf on the log scale.
inline constexpr double kLogFloor = -40.0;

enum class Normalization { lebesgue, unit_total_mass };

int default_degree(int n);

/// Weighted Bergman space A^2(dom, e^{-weight}) truncated to polynomials of
/// total degree <= degree.
struct BergmanProblem {
  GridDomain dom;
  ScalarField weight;  // phi, extended real (-inf allowed)
  int degree = 8;
  Normalization normalization = Normalization::lebesgue;

  int n() const { return dom.dimension().n; }
};

BergmanProblem make_problem(GridDomain dom, const Expression& phi, int degree = -1,
                            Normalization norm = Normalization::lebesgue);

// Exponents alpha with |alpha| <= degree ordered by (|alpha|, lexicographic).
std::vector<std::vector<int>> monomial_exponents(int n, int degree);

struct KernelEvaluation {
  double value = 0.0;
  double log_value = kNegInf;
  int degree = 0;
  double gram_condition = 0.0;
  bool truncated = false;
  bool locally_non_integrable = false;
};

struct GramInfo {
  Eigen::MatrixXcd matrix;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};

/// Assembled and factorised Gram matrix of one problem; evaluates the
/// polynomial-truncated kernel K_N(zeta, z) = b(zeta)^T G^+ conj(b(z)).
class BergmanKernel {
 public:
  explicit BergmanKernel(const BergmanProblem& p, Exec mode = default_exec());

  const GramInfo& gram() const { return gram_; }
  std::size_t basis_size() const { return exponents_.size(); }

  // point coordinates are real pairs (re z_1, im z_1, ...)
  std::vector<std::complex<double>> basis_at(std::span<const double> point) const;
  KernelEvaluation diag(std::span<const double> z) const;
  std::complex<double> offdiag(std::span<const double> zeta, std::span<const double> z) const;
  double extremal(std::span<const double> z) const;

 private:
  Eigen::VectorXcd reduced(std::span<const double> z) const;

  int n_ = 1;
  int degree_ = 0;
  std::vector<std::vector<int>> exponents_;
  std::vector<double> center_;
  double scale_ = 1.0;
  GramInfo gram_;
  Eigen::MatrixXcd projector_;  // Lambda^{-1/2} V^* restricted to kept eigenpairs
  double condition_ = 0.0;
  bool truncated_ = false;
};

// Gram matrix of the raw monomials (zeta - c)^alpha, c the bbox centre.
GramInfo gram_matrix(const BergmanProblem& p);

// Local integrability of e^{-weight} at z, probed on a small ball when the
// weight is -inf at z. Returns false when e^{-weight} is not integrable near z
// (then K(z,z) = 0).
bool locally_integrable(const BergmanProblem& p, std::span<const double> z);

KernelEvaluation kernel_diag(const BergmanProblem& p, std::span<const double> z);
std::complex<double> kernel_offdiag(const BergmanProblem& p, std::span<const double> zeta, std::span<const double> z);
// (integral of e^{-phi})^{-1}; exact K(0,0) for rotation-invariant data.
double kernel_diag_radial(const BergmanProblem& p);
double extremal_oracle(const BergmanProblem& p, std::span<const double> z);

}  // namespace psh
