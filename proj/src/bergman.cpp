#include "psh/bergman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "psh/error.hpp"

namespace psh {

using cplx = std::complex<double>;

int default_degree(int n) { return n == 1 ? 8 : 4; }

BergmanProblem make_problem(GridDomain dom, const Expression& phi, int degree, Normalization norm) {
  if (dom.dimension().kind != DimKind::complex)
    throw LabError(ErrorKind::kind_mismatch, "Bergman problems need a complex domain");
  if (phi.real_dimension() != dom.real_dim())
    throw LabError(ErrorKind::kind_mismatch, "weight has " + std::to_string(phi.real_dimension()) +
                                                 " real coordinates, domain has " + std::to_string(dom.real_dim()));
  BergmanProblem p{std::move(dom), as_field(phi), degree, norm};
  if (p.degree < 0) p.degree = default_degree(p.n());
  return p;
}

std::vector<std::vector<int>> monomial_exponents(int n, int degree) {
  std::vector<std::vector<int>> out;
  for (int total = 0; total <= degree; ++total) {
    if (n == 1) {
      out.push_back({total});
      continue;
    }
    // lexicographic in (alpha_1, alpha_2) with alpha_1 decreasing first
    for (int a = total; a >= 0; --a) out.push_back({a, total - a});
  }
  return out;
}

namespace {

struct BasisFrame {
  int n;
  std::vector<std::vector<int>> exps;
  std::vector<double> center;
  double scale;

  // powers[k][j] = w_k^j for the scaled coordinate w_k = (z_k - c_k) / s
  void eval(std::span<const double> x, int degree, std::span<cplx> out) const {
    std::vector<cplx> pw(static_cast<std::size_t>(n * (degree + 1)));
    for (int k = 0; k < n; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      const cplx w((x[2 * uk] - center[2 * uk]) / scale, (x[2 * uk + 1] - center[2 * uk + 1]) / scale);
      cplx acc(1.0, 0.0);
      for (int j = 0; j <= degree; ++j) {
        pw[static_cast<std::size_t>(k * (degree + 1) + j)] = acc;
        acc *= w;
      }
    }
    for (std::size_t a = 0; a < exps.size(); ++a) {
      cplx v(1.0, 0.0);
      for (int k = 0; k < n; ++k) v *= pw[static_cast<std::size_t>(k * (degree + 1) + exps[a][static_cast<std::size_t>(k)])];
      out[a] = v;
    }
  }
};

BasisFrame frame_for(const BergmanProblem& p) {
  BasisFrame f{p.n(), monomial_exponents(p.n(), p.degree), p.dom.bbox().center(), p.dom.bbox().max_half_width()};
  return f;
}

double measure_scale(const BergmanProblem& p) {
  return p.normalization == Normalization::unit_total_mass ? 1.0 / p.dom.total_weight() : 1.0;
}

// weighted quadrature weights w_i e^{-phi(x_i)} (times normalization)
std::vector<double> weighted_measure(const BergmanProblem& p, Exec mode) {
  const auto phi = sample(p.weight, p.dom, mode);
  const double scale = measure_scale(p);
  std::vector<double> w(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double v = std::exp(-phi[i]);
    if (std::isnan(phi[i]) || !std::isfinite(v))
      throw LabError(ErrorKind::not_admissible,
                     "weight not admissible at degree " + std::to_string(p.degree) + ": e^{-phi} is not finite at a quadrature point");
    w[i] = v * p.dom.weights()[i] * scale;
  }
  return w;
}

GramInfo assemble(const BergmanProblem& p, const BasisFrame& frame, Exec mode) {
  const std::size_t nb = frame.exps.size();
  const std::size_t np = p.dom.num_points();
  std::vector<cplx> basis(np * nb);
  parallel_for(
      static_cast<std::ptrdiff_t>(np),
      [&](std::ptrdiff_t i) {
        const auto ui = static_cast<std::size_t>(i);
        frame.eval(p.dom.point(ui), p.degree, std::span<cplx>(basis.data() + ui * nb, nb));
      },
      mode);
  const auto w = weighted_measure(p, mode);
  std::vector<cplx> g(nb * nb);
  kernels::gram(basis, nb, w, g, mode);
  GramInfo info;
  info.matrix = Eigen::Map<Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      g.data(), static_cast<Eigen::Index>(nb), static_cast<Eigen::Index>(nb));
  for (std::size_t a = 0; a < nb * nb; ++a)
    if (!std::isfinite(g[a].real()) || !std::isfinite(g[a].imag()))
      throw LabError(ErrorKind::not_admissible, "weight not admissible at degree " + std::to_string(p.degree));
  return info;
}

}  // namespace

GramInfo gram_matrix(const BergmanProblem& p) {
  const auto frame = frame_for(p);
  GramInfo info = assemble(p, frame, default_exec());
  // back to the raw monomials (zeta - c)^alpha
  const auto nb = static_cast<Eigen::Index>(frame.exps.size());
  for (Eigen::Index a = 0; a < nb; ++a) {
    for (Eigen::Index b = 0; b < nb; ++b) {
      int deg = 0;
      for (int k = 0; k < frame.n; ++k)
        deg += frame.exps[static_cast<std::size_t>(a)][static_cast<std::size_t>(k)] +
               frame.exps[static_cast<std::size_t>(b)][static_cast<std::size_t>(k)];
      info.matrix(a, b) *= std::pow(frame.scale, deg);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(info.matrix, Eigen::EigenvaluesOnly);
  info.min_eigenvalue = es.eigenvalues().minCoeff();
  info.max_eigenvalue = es.eigenvalues().maxCoeff();
  return info;
}

BergmanKernel::BergmanKernel(const BergmanProblem& p, Exec mode) {
  const auto frame = frame_for(p);
  n_ = frame.n;
  degree_ = p.degree;
  exponents_ = frame.exps;
  center_ = frame.center;
  scale_ = frame.scale;
  gram_ = assemble(p, frame, mode);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram_.matrix);
  const auto& lam = es.eigenvalues();
  gram_.min_eigenvalue = lam.minCoeff();
  gram_.max_eigenvalue = lam.maxCoeff();
  const double nb = static_cast<double>(exponents_.size());
  // cutoff: relative floor or the roundoff scale of an nb x nb Hermitian solve
  const double cutoff = std::max(1e-12, nb * 64.0 * std::numeric_limits<double>::epsilon()) * gram_.max_eigenvalue;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index j = 0; j < lam.size(); ++j)
    if (lam(j) > cutoff && lam(j) > 0.0) kept.push_back(j);
  truncated_ = static_cast<Eigen::Index>(kept.size()) < lam.size();
  projector_.resize(static_cast<Eigen::Index>(kept.size()), lam.size());
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < kept.size(); ++r) {
    const Eigen::Index j = kept[r];
    projector_.row(static_cast<Eigen::Index>(r)) = es.eigenvectors().col(j).adjoint() / std::sqrt(lam(j));
    lo = std::min(lo, lam(j));
  }
  condition_ = kept.empty() ? std::numeric_limits<double>::infinity() : gram_.max_eigenvalue / lo;
}

std::vector<cplx> BergmanKernel::basis_at(std::span<const double> point) const {
  BasisFrame f{n_, exponents_, center_, scale_};
  std::vector<cplx> b(exponents_.size());
  f.eval(point, degree_, b);
  return b;
}

Eigen::VectorXcd BergmanKernel::reduced(std::span<const double> z) const {
  const auto b = basis_at(z);
  Eigen::VectorXcd v(static_cast<Eigen::Index>(b.size()));
  for (std::size_t a = 0; a < b.size(); ++a) v(static_cast<Eigen::Index>(a)) = std::conj(b[a]);
  return projector_ * v;
}

KernelEvaluation BergmanKernel::diag(std::span<const double> z) const {
  KernelEvaluation e;
  e.degree = degree_;
  e.gram_condition = condition_;
  e.truncated = truncated_;
  e.value = projector_.rows() == 0 ? 0.0 : reduced(z).squaredNorm();
  e.log_value = e.value > std::exp(kLogFloor) ? std::log(e.value) : kNegInf;
  return e;
}

cplx BergmanKernel::offdiag(std::span<const double> zeta, std::span<const double> z) const {
  if (projector_.rows() == 0) return {0.0, 0.0};
  return reduced(zeta).dot(reduced(z));
}

double BergmanKernel::extremal(std::span<const double> z) const {
  const auto b = basis_at(z);
  const auto nb = static_cast<Eigen::Index>(b.size());
  Eigen::VectorXcd v(nb);
  for (Eigen::Index a = 0; a < nb; ++a) v(a) = std::conj(b[static_cast<std::size_t>(a)]);
  const Eigen::MatrixXcd A = v * v.adjoint();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(A, gram_.matrix, Eigen::EigenvaluesOnly);
  if (ges.info() != Eigen::Success)
    throw LabError(ErrorKind::solver, "generalized eigenproblem failed (Gram matrix not positive definite)");
  return ges.eigenvalues().maxCoeff();
}

bool locally_integrable(const BergmanProblem& p, std::span<const double> z) {
  if (p.weight(z) != kNegInf) return true;
  const double r = 0.125 * p.dom.bbox().max_half_width();
  const std::vector<double> hs = p.n() == 1 ? std::vector<double>{r / 8, r / 16, r / 32}
                                            : std::vector<double>{r / 4, r / 6, r / 8};
  const auto ladder = BallLadder::build(z, r, p.dom.dimension(), hs);
  const auto probe = ladder.probe([&](std::span<const double> x) { return std::exp(-p.weight(x)); });
  return probe.status != ProbeResult::Status::diverging;
}

KernelEvaluation kernel_diag(const BergmanProblem& p, std::span<const double> z) {
  if (!locally_integrable(p, z)) {
    KernelEvaluation e;
    e.degree = p.degree;
    e.locally_non_integrable = true;
    return e;
  }
  return BergmanKernel(p).diag(z);
}

cplx kernel_offdiag(const BergmanProblem& p, std::span<const double> zeta, std::span<const double> z) {
  if (!locally_integrable(p, z) || !locally_integrable(p, zeta)) return {0.0, 0.0};
  return BergmanKernel(p).offdiag(zeta, z);
}

double kernel_diag_radial(const BergmanProblem& p) {
  // spot-check invariance of rho and phi under z -> e^{i theta} z at a spread of quadrature points
  const std::size_t np = p.dom.num_points();
  const std::size_t stride = std::max<std::size_t>(1, np / 16);
  const int d = p.dom.real_dim();
  for (int k = 1; k <= 8; ++k) {
    const double th = 2.0 * std::numbers::pi * k / 8.0 + 0.1;
    const double c = std::cos(th), s = std::sin(th);
    for (std::size_t i = 0; i < np; i += stride) {
      const auto x = p.dom.point(i);
      std::vector<double> y(static_cast<std::size_t>(d));
      for (int m = 0; m < d; m += 2) {
        const auto um = static_cast<std::size_t>(m);
        y[um] = c * x[um] - s * x[um + 1];
        y[um + 1] = s * x[um] + c * x[um + 1];
      }
      const double f0 = p.weight(x), f1 = p.weight(y);
      const bool same_phi = (f0 == f1) || std::abs(f0 - f1) <= 1e-9 * (1.0 + std::abs(f0));
      const bool inside = p.dom.rho()(y) < 0.0;
      if (!same_phi || !inside) throw LabError(ErrorKind::not_radial, "problem is not invariant under rotations");
    }
  }
  const auto w = weighted_measure(p, default_exec());
  double total = 0.0;
  for (double v : w) total += v;
  return 1.0 / total;
}

double extremal_oracle(const BergmanProblem& p, std::span<const double> z) {
  if (monomial_exponents(p.n(), p.degree).size() > 64)
    throw LabError(ErrorKind::precondition, "extremal oracle limited to 64 basis functions");
  return BergmanKernel(p).extremal(z);
}

}  // namespace psh
