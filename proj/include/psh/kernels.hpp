#pragma once

#include <complex>
#include <cstdint>
#include <exception>
#include <span>
#include <vector>

namespace psh {

// Execution mode for the data-parallel kernels. `serial` is the reference:
// lexicographic reduction order, bit-reproducible. `parallel` uses OpenMP with
// static scheduling; results agree with serial to a documented tolerance.
enum class Exec { serial, parallel };

Exec default_exec();
void set_default_exec(Exec mode);

// Index loop that runs under OpenMP in parallel mode. Exceptions thrown by the
// body are captured and the first one is rethrown on the calling thread.
template <class Body>
void parallel_for(std::ptrdiff_t n, Body&& body, Exec mode = default_exec()) {
  std::exception_ptr first;
#pragma omp parallel for schedule(static) if (mode == Exec::parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(psh_parallel_for)
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
}

namespace kernels {

using cplx = std::complex<double>;

double weighted_sum_serial(std::span<const double> values, std::span<const double> weights);
double weighted_sum_omp(std::span<const double> values, std::span<const double> weights);
double weighted_sum(std::span<const double> values, std::span<const double> weights, Exec mode = default_exec());

// Hermitian Gram matrix G[a,b] = sum_i w_i conj(B[i,a]) B[i,b]; B is row-major
// (points x nb), G is row-major nb x nb and is overwritten.
void gram_serial(std::span<const cplx> basis, std::size_t nb, std::span<const double> w, std::span<cplx> gram);
void gram_omp(std::span<const cplx> basis, std::size_t nb, std::span<const double> w, std::span<cplx> gram);
void gram(std::span<const cplx> basis, std::size_t nb, std::span<const double> w, std::span<cplx> gram,
          Exec mode = default_exec());

// Negative discrete Laplacian on a masked structured grid. `neighbors` holds
// 2*dim entries per unknown (-1 marks a Dirichlet neighbour, contributing 0).
struct StencilOperator {
  int dim = 2;
  double h = 1.0;
  std::vector<std::int32_t> neighbors;

  std::size_t size() const { return neighbors.size() / static_cast<std::size_t>(2 * dim); }
};

void apply_serial(const StencilOperator& op, std::span<const double> x, std::span<double> y);
void apply_omp(const StencilOperator& op, std::span<const double> x, std::span<double> y);
void apply(const StencilOperator& op, std::span<const double> x, std::span<double> y, Exec mode = default_exec());

double dot(std::span<const double> a, std::span<const double> b, Exec mode = default_exec());

struct CgResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

// Conjugate gradients for the SPD stencil operator (Jacobi preconditioning is
// a constant scaling here, so plain CG is used). x holds the initial guess.
CgResult conjugate_gradient(const StencilOperator& op, std::span<const double> rhs, std::span<double> x,
                            double rel_tol, int max_iter, Exec mode = default_exec());

}  // namespace kernels
}  // namespace psh
