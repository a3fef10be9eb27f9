#include <cmath>
#include <random>

#include "doctest.h"
#include "psh/kernels.hpp"

using namespace psh;
using cplx = std::complex<double>;

TEST_CASE("weighted sum: serial reference vs OpenMP") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(100001), w(100001);
  for (auto& x : v) x = u(rng);
  for (auto& x : w) x = std::abs(u(rng));
  const double s = kernels::weighted_sum_serial(v, w);
  const double p = kernels::weighted_sum_omp(v, w);
  CHECK(p == doctest::Approx(s).epsilon(1e-12));
  double naive = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) naive += v[i] * w[i];
  CHECK(s == naive);
}

TEST_CASE("gram: serial reference vs OpenMP and Hermitian structure") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t np = 5000, nb = 7;
  std::vector<cplx> basis(np * nb);
  std::vector<double> w(np);
  for (auto& b : basis) b = cplx(u(rng), u(rng));
  for (auto& x : w) x = std::abs(u(rng));
  std::vector<cplx> gs(nb * nb), gp(nb * nb);
  kernels::gram_serial(basis, nb, w, gs);
  kernels::gram_omp(basis, nb, w, gp);
  for (std::size_t a = 0; a < nb; ++a) {
    for (std::size_t b = 0; b < nb; ++b) {
      CHECK(std::abs(gs[a * nb + b] - gp[a * nb + b]) < 1e-10 * std::abs(gs[a * nb + a]));
      CHECK(std::abs(gs[a * nb + b] - std::conj(gs[b * nb + a])) == 0.0);
    }
    // independent oracle for the diagonal
    double d = 0.0;
    for (std::size_t i = 0; i < np; ++i) d += w[i] * std::norm(basis[i * nb + a]);
    CHECK(gs[a * nb + a].real() == doctest::Approx(d).epsilon(1e-12));
  }
}

namespace {

// 1-D chain Dirichlet Laplacian with n unknowns
kernels::StencilOperator chain(int n, double h) {
  kernels::StencilOperator op;
  op.dim = 1;
  op.h = h;
  for (int i = 0; i < n; ++i) {
    op.neighbors.push_back(i > 0 ? i - 1 : -1);
    op.neighbors.push_back(i + 1 < n ? i + 1 : -1);
  }
  return op;
}

}  // namespace

TEST_CASE("stencil apply: serial vs OpenMP and sign convention") {
  auto op = chain(50, 0.1);
  std::vector<double> x(50), ys(50), yp(50);
  for (int i = 0; i < 50; ++i) x[static_cast<std::size_t>(i)] = std::sin(0.3 * i);
  kernels::apply_serial(op, x, ys);
  kernels::apply_omp(op, x, yp);
  for (int i = 0; i < 50; ++i) CHECK(ys[static_cast<std::size_t>(i)] == yp[static_cast<std::size_t>(i)]);
  // -Laplacian of a constant vanishes away from the boundary
  std::vector<double> one(50, 1.0), r(50);
  kernels::apply_serial(op, one, r);
  CHECK(r[25] == 0.0);
  CHECK(r[0] == doctest::Approx(100.0));
}

TEST_CASE("conjugate gradient solves the discrete Poisson problem in 1-D") {
  const int n = 99;
  const double h = 1.0 / (n + 1);
  auto op = chain(n, h);
  // -u'' = 2, u(0) = u(1) = 0 has u = x(1 - x), exact for the 3-point stencil
  std::vector<double> rhs(n, 2.0), x(n, 0.0);
  for (Exec mode : {Exec::serial, Exec::parallel}) {
    std::fill(x.begin(), x.end(), 0.0);
    auto res = kernels::conjugate_gradient(op, rhs, x, 1e-12, 1000, mode);
    CHECK(res.converged);
    for (int i = 0; i < n; ++i) {
      const double xi = (i + 1) * h;
      CHECK(x[static_cast<std::size_t>(i)] == doctest::Approx(xi * (1 - xi)).epsilon(1e-9));
    }
  }
}

TEST_CASE("parallel_for rethrows exceptions from workers") {
  CHECK_THROWS_AS(parallel_for(100, [](std::ptrdiff_t i) {
                    if (i == 37) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}
