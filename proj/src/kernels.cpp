#include "psh/kernels.hpp"

#include <omp.h>

#include <atomic>
#include <cmath>

namespace psh {

namespace {
std::atomic<Exec> g_exec{Exec::parallel};
}

Exec default_exec() { return g_exec.load(); }
void set_default_exec(Exec mode) { g_exec.store(mode); }

namespace kernels {

double weighted_sum_serial(std::span<const double> values, std::span<const double> weights) {
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) acc += values[i] * weights[i];
  return acc;
}

double weighted_sum_omp(std::span<const double> values, std::span<const double> weights) {
  const auto n = static_cast<std::ptrdiff_t>(values.size());
  double acc = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : acc)
  for (std::ptrdiff_t i = 0; i < n; ++i) acc += values[i] * weights[i];
  return acc;
}

double weighted_sum(std::span<const double> values, std::span<const double> weights, Exec mode) {
  return mode == Exec::serial ? weighted_sum_serial(values, weights) : weighted_sum_omp(values, weights);
}

namespace {

void gram_rows(std::span<const cplx> basis, std::size_t nb, std::span<const double> w, std::size_t begin,
               std::size_t end, cplx* g) {
  for (std::size_t i = begin; i < end; ++i) {
    const double wi = w[i];
    if (wi == 0.0) continue;
    const cplx* row = basis.data() + i * nb;
    for (std::size_t a = 0; a < nb; ++a) {
      const cplx ca = std::conj(row[a]) * wi;
      for (std::size_t b = a; b < nb; ++b) g[a * nb + b] += ca * row[b];
    }
  }
}

void mirror_upper(std::size_t nb, std::span<cplx> g) {
  for (std::size_t a = 0; a < nb; ++a) {
    g[a * nb + a] = cplx(g[a * nb + a].real(), 0.0);
    for (std::size_t b = a + 1; b < nb; ++b) g[b * nb + a] = std::conj(g[a * nb + b]);
  }
}

}  // namespace

void gram_serial(std::span<const cplx> basis, std::size_t nb, std::span<const double> w, std::span<cplx> gram) {
  std::fill(gram.begin(), gram.end(), cplx(0.0));
  gram_rows(basis, nb, w, 0, w.size(), gram.data());
  mirror_upper(nb, gram);
}

void gram_omp(std::span<const cplx> basis, std::size_t nb, std::span<const double> w, std::span<cplx> gram) {
  std::fill(gram.begin(), gram.end(), cplx(0.0));
  const int threads = omp_get_max_threads();
  std::vector<std::vector<cplx>> partial(static_cast<std::size_t>(threads), std::vector<cplx>(nb * nb));
#pragma omp parallel num_threads(threads)
  {
    const auto tid = static_cast<std::size_t>(omp_get_thread_num());
    const std::size_t nt = static_cast<std::size_t>(omp_get_num_threads());
    const std::size_t chunk = (w.size() + nt - 1) / nt;
    const std::size_t begin = std::min(w.size(), tid * chunk);
    const std::size_t end = std::min(w.size(), begin + chunk);
    gram_rows(basis, nb, w, begin, end, partial[tid].data());
  }
  // fixed thread order keeps the result deterministic for a given thread count
  for (const auto& p : partial)
    for (std::size_t k = 0; k < nb * nb; ++k) gram[k] += p[k];
  mirror_upper(nb, gram);
}

void gram(std::span<const cplx> basis, std::size_t nb, std::span<const double> w, std::span<cplx> g, Exec mode) {
  if (mode == Exec::serial) gram_serial(basis, nb, w, g);
  else gram_omp(basis, nb, w, g);
}

void apply_serial(const StencilOperator& op, std::span<const double> x, std::span<double> y) {
  const std::size_t n = op.size();
  const std::size_t k = static_cast<std::size_t>(2 * op.dim);
  const double inv_h2 = 1.0 / (op.h * op.h);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = static_cast<double>(k) * x[i];
    for (std::size_t j = 0; j < k; ++j) {
      const auto nb = op.neighbors[i * k + j];
      if (nb >= 0) acc -= x[static_cast<std::size_t>(nb)];
    }
    y[i] = acc * inv_h2;
  }
}

void apply_omp(const StencilOperator& op, std::span<const double> x, std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(op.size());
  const std::size_t k = static_cast<std::size_t>(2 * op.dim);
  const double inv_h2 = 1.0 / (op.h * op.h);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double acc = static_cast<double>(k) * x[i];
    for (std::size_t j = 0; j < k; ++j) {
      const auto nb = op.neighbors[i * k + j];
      if (nb >= 0) acc -= x[static_cast<std::size_t>(nb)];
    }
    y[i] = acc * inv_h2;
  }
}

void apply(const StencilOperator& op, std::span<const double> x, std::span<double> y, Exec mode) {
  if (mode == Exec::serial) apply_serial(op, x, y);
  else apply_omp(op, x, y);
}

double dot(std::span<const double> a, std::span<const double> b, Exec mode) {
  return weighted_sum(a, b, mode);
}

CgResult conjugate_gradient(const StencilOperator& op, std::span<const double> rhs, std::span<double> x,
                            double rel_tol, int max_iter, Exec mode) {
  const std::size_t n = op.size();
  std::vector<double> r(n), p(n), ap(n);
  apply(op, x, ap, mode);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];
  p = r;
  const double bnorm = std::sqrt(dot(rhs, rhs, mode));
  CgResult res;
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    res.converged = true;
    return res;
  }
  double rr = dot(r, r, mode);
  for (int it = 0; it < max_iter; ++it) {
    res.relative_residual = std::sqrt(rr) / bnorm;
    if (res.relative_residual <= rel_tol) {
      res.converged = true;
      res.iterations = it;
      return res;
    }
    apply(op, p, ap, mode);
    const double alpha = rr / dot(p, ap, mode);
    const auto nn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (mode == Exec::parallel)
    for (std::ptrdiff_t i = 0; i < nn; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    const double rr_new = dot(r, r, mode);
    const double beta = rr_new / rr;
    rr = rr_new;
#pragma omp parallel for schedule(static) if (mode == Exec::parallel)
    for (std::ptrdiff_t i = 0; i < nn; ++i) p[i] = r[i] + beta * p[i];
    res.iterations = it + 1;
  }
  res.relative_residual = std::sqrt(rr) / bnorm;
  res.converged = res.relative_residual <= rel_tol;
  return res;
}

}  // namespace kernels
}  // namespace psh
