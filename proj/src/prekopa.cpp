#include "psh/prekopa.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "psh/error.hpp"

namespace psh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double box_volume(const Box& b) {
  double v = 1.0;
  for (std::size_t a = 0; a < b.lo.size(); ++a) v *= b.hi[a] - b.lo[a];
  return v;
}

// -(1/p) log sum_i w_i e^{-p phi_i}, stabilised by the running minimum.
double neg_log_mean(std::span<const double> phi, std::span<const double> w, double p) {
  double m = kInf;
  for (double v : phi) m = std::min(m, v);
  if (m == kInf) return kInf;
  if (m == -kInf) return -kInf;
  double s = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) s += w[i] * std::exp(-p * (phi[i] - m));
  return m - std::log(s) / p;
}

std::vector<double> phi_on_fiber(const MarginalProblem& mp, const TensorRule& rule, double x) {
  std::vector<double> v(rule.size());
  std::vector<double> c(static_cast<std::size_t>(rule.dim) + 1);
  c[0] = x;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const auto y = rule.point(i);
    std::copy(y.begin(), y.end(), c.begin() + 1);
    v[i] = mp.phi(c);
    if (std::isnan(v[i])) throw LabError(ErrorKind::non_integrable, "phi is NaN on the y box");
  }
  return v;
}

std::vector<double> p_marginal_with(const MarginalProblem& mp, double p, double mass_scale) {
  const auto rule = TensorRule::midpoint(mp.y_box, mp.h_y);
  std::vector<double> w(rule.weights);
  for (double& x : w) x *= mass_scale;
  const auto xs = mp.x_grid();
  std::vector<double> out(xs.size());
  parallel_for(static_cast<std::ptrdiff_t>(xs.size()), [&](std::ptrdiff_t i) {
    const auto ui = static_cast<std::size_t>(i);
    out[ui] = neg_log_mean(phi_on_fiber(mp, rule, xs[ui]), w, p);
  });
  return out;
}

}  // namespace

MarginalProblem MarginalProblem::parse(const std::string& phi, int n_y, double y_half_width) {
  std::vector<VarDecl> vars = {{"x", VarKind::real}};
  if (n_y == 1) {
    vars.push_back({"y", VarKind::real});
  } else if (n_y == 2) {
    vars.push_back({"y1", VarKind::real});
    vars.push_back({"y2", VarKind::real});
  } else {
    throw LabError(ErrorKind::precondition, "marginals integrate over 1 or 2 variables");
  }
  MarginalProblem mp;
  mp.phi = as_field(Expression::parse(phi, vars));
  mp.y_box = Box::cube(n_y, y_half_width);
  return mp;
}

std::vector<double> MarginalProblem::x_grid() const {
  if (!(h_x > 0.0) || !(x_hi > x_lo)) throw LabError(ErrorKind::precondition, "empty x grid");
  const int n = static_cast<int>(std::lround((x_hi - x_lo) / h_x));
  std::vector<double> xs;
  for (int i = 0; i <= n; ++i) xs.push_back(x_lo + h_x * i);
  return xs;
}

std::vector<double> marginal(const MarginalProblem& mp) { return p_marginal_with(mp, 1.0, 1.0); }

std::vector<double> p_marginal(const MarginalProblem& mp, double p) {
  if (!(p >= 1.0)) throw LabError(ErrorKind::precondition, "p-marginals need p >= 1");
  return p_marginal_with(mp, p, 1.0 / box_volume(mp.y_box));
}

std::vector<double> grid_infimum(const MarginalProblem& mp) {
  const auto rule = TensorRule::midpoint(mp.y_box, mp.h_y);
  const auto xs = mp.x_grid();
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto v = phi_on_fiber(mp, rule, xs[i]);
    out[i] = *std::min_element(v.begin(), v.end());
  }
  return out;
}

ConvexityResult convexity_check(std::span<const double> values, double h_x, double tol) {
  ConvexityResult r;
  r.min_second_difference = kInf;
  int finite = 0;
  for (double v : values) finite += std::isfinite(v) ? 1 : 0;
  if (finite < 3) throw LabError(ErrorKind::precondition, "convexity check needs at least 3 finite values");
  bool any = false;
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    if (!std::isfinite(values[i - 1]) || !std::isfinite(values[i]) || !std::isfinite(values[i + 1])) continue;
    const double d2 = (values[i - 1] - 2.0 * values[i] + values[i + 1]) / (h_x * h_x);
    any = true;
    if (d2 < r.min_second_difference) {
      r.min_second_difference = d2;
      r.argmin = i;
    }
  }
  if (!any) throw LabError(ErrorKind::precondition, "no three consecutive finite values");
  r.pass = r.min_second_difference >= -tol;
  return r;
}

MinimumPrincipleReport minimum_principle_limit(const MarginalProblem& mp, std::span<const double> p_ladder) {
  if (p_ladder.empty()) throw LabError(ErrorKind::precondition, "empty p ladder");
  for (std::size_t k = 1; k < p_ladder.size(); ++k)
    if (!(p_ladder[k] > p_ladder[k - 1])) throw LabError(ErrorKind::precondition, "p ladder must increase");
  MinimumPrincipleReport r;
  r.x = mp.x_grid();
  r.p_ladder.assign(p_ladder.begin(), p_ladder.end());
  for (double p : p_ladder) r.values.push_back(p_marginal(mp, p));
  r.infimum = grid_infimum(mp);

  // ||e^{-phi}||_{L^p(dy/L)} is nondecreasing in p, so phi_p is nonincreasing
  r.monotone = true;
  for (std::size_t k = 1; k < r.values.size(); ++k) {
    for (std::size_t i = 0; i < r.x.size(); ++i) {
      const double excess = r.values[k][i] - r.values[k - 1][i];
      r.max_monotonicity_violation = std::max(r.max_monotonicity_violation, excess);
    }
  }
  r.monotone = r.max_monotonicity_violation <= 1e-10;

  const double p = p_ladder.back();
  const double vol = box_volume(mp.y_box);
  // midpoint error of the Laplace-type integral is below the mesh-scale term
  const double quad = std::pow(mp.h_y, 2.0) * p;
  r.band = 3.0 * std::abs(std::log(vol)) / p + quad;
  for (std::size_t i = 0; i < r.x.size(); ++i)
    r.max_deviation = std::max(r.max_deviation, std::abs(r.values.back()[i] - r.infimum[i]));
  r.within_band = r.max_deviation <= r.band;
  return r;
}

std::pair<double, double> hessian_identity_sides(const Expression& phi, const std::vector<Expression>& gamma,
                                                 std::span<const double> point, double h) {
  const std::size_t m = gamma.size();
  if (static_cast<std::size_t>(phi.real_dimension()) != m || point.size() != m)
    throw LabError(ErrorKind::precondition, "gamma needs one component per real variable");
  using Fn = std::function<double(std::span<const double>)>;
  auto checked = [](const Expression& e) -> Fn {
    return [&e](std::span<const double> x) {
      const double v = e.eval_coords(x);
      if (!std::isfinite(v)) throw LabError(ErrorKind::singular_stencil, "non-finite value inside the stencil");
      return v;
    };
  };
  const Fn P = checked(phi);
  std::vector<Fn> g;
  for (const auto& e : gamma) g.push_back(checked(e));

  auto shifted = [&](std::span<const double> x, std::size_t k, double d) {
    std::vector<double> y(x.begin(), x.end());
    y[k] += d;
    return y;
  };
  auto D = [&](const Fn& f, std::size_t k, std::span<const double> x) {
    return (f(shifted(x, k, h)) - f(shifted(x, k, -h))) / (2.0 * h);
  };
  auto D2 = [&](const Fn& f, std::size_t j, std::size_t k, std::span<const double> x) {
    if (j == k) return (f(shifted(x, j, h)) - 2.0 * f(x) + f(shifted(x, j, -h))) / (h * h);
    auto y = [&](double a, double b) {
      auto z = shifted(x, j, a);
      z[k] += b;
      return f(z);
    };
    return (y(h, h) - y(h, -h) - y(-h, h) + y(-h, -h)) / (4.0 * h * h);
  };

  double lhs = 0.0;
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < m; ++k) {
      Fn T = [&, j, k](std::span<const double> x) { return g[j](x) * g[k](x) * std::exp(-P(x)); };
      lhs += D2(T, j, k, point);
    }

  // A_j = d_j^phi gamma_j = d_j gamma_j - phi_j gamma_j
  std::vector<Fn> A;
  for (std::size_t j = 0; j < m; ++j)
    A.push_back([&, j](std::span<const double> x) { return D(g[j], j, x) - D(P, j, x) * g[j](x); });
  double s1 = 0.0, s2 = 0.0, s4 = 0.0, s5 = 0.0, sum_a = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    sum_a += A[j](point);
    for (std::size_t k = 0; k < m; ++k) {
      s1 += D(g[j], k, point) * D(g[k], j, point);
      s2 += D(A[j], k, point) * g[k](point);
      s4 += g[j](point) * D(A[k], j, point);
      s5 += D2(P, j, k, point) * g[j](point) * g[k](point);
    }
  }
  const double rhs = (s1 + s2 + sum_a * sum_a + s4 + s5) * std::exp(-P(point));
  return {lhs, rhs};
}

double hessian_identity_residual(const Expression& phi, const std::vector<Expression>& gamma,
                                 std::span<const double> point, double h) {
  const auto [l, r] = hessian_identity_sides(phi, gamma, point, h);
  return std::abs(l - r);
}

CertificateReport prekopa_certificate(const ScalarField& phi, double t_lo, double t_hi, double h_t, double y_lo,
                                      double y_hi, double h_y) {
  if (!(t_hi > t_lo) || !(h_t > 0.0) || !(y_hi > y_lo)) throw LabError(ErrorKind::precondition, "empty grid");
  const int ny = static_cast<int>(std::ceil((y_hi - y_lo) / h_y));
  const double dy = (y_hi - y_lo) / ny;
  const double hd = 1e-4;  // derivative step for phi
  auto f = [&](double t, double y) {
    const double c[2] = {t, y};
    return phi(std::span<const double>(c, 2));
  };
  struct Fiber {
    double k, k1;
  };
  // k(t) and k'(t) = k^2 int phi_0 e^{-phi}
  auto fiber = [&](double t) {
    if (std::exp(-f(t, y_lo)) >= 1e-12 || std::exp(-f(t, y_hi)) >= 1e-12)
      throw LabError(ErrorKind::not_admissible, "gamma not admissible: e^{-phi} does not decay at the y-box edge");
    double I = 0.0, J = 0.0;
    for (int i = 0; i < ny; ++i) {
      const double y = y_lo + (i + 0.5) * dy;
      const double e = std::exp(-f(t, y));
      I += e * dy;
      J += (f(t + hd, y) - f(t - hd, y)) / (2.0 * hd) * e * dy;
    }
    const double k = 1.0 / I;
    return Fiber{k, k * k * J};
  };

  const int nt = static_cast<int>(std::lround((t_hi - t_lo) / h_t));
  if (nt < 2) throw LabError(ErrorKind::precondition, "certificate needs at least 3 t values");
  std::vector<double> ts, ks;
  for (int i = 0; i <= nt; ++i) {
    ts.push_back(t_lo + h_t * i);
    ks.push_back(fiber(ts.back()).k);
  }

  CertificateReport rep;
  rep.min_integrand_ratio = kInf;
  for (int i = 1; i < nt; ++i) {
    const double t = ts[static_cast<std::size_t>(i)];
    const auto [k, k1] = fiber(t);
    // source s(y) = (k' - phi_0 k) e^{-phi}; e^{-phi} gamma_1 = -int_lo^y s = int_y^hi s
    std::vector<double> y(static_cast<std::size_t>(ny)), src(static_cast<std::size_t>(ny)), ph(static_cast<std::size_t>(ny));
    for (int j = 0; j < ny; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      y[uj] = y_lo + (j + 0.5) * dy;
      ph[uj] = f(t, y[uj]);
      const double phi0 = (f(t + hd, y[uj]) - f(t - hd, y[uj])) / (2.0 * hd);
      src[uj] = (k1 - phi0 * k) * std::exp(-ph[uj]);
    }
    // cumulative integrals to the node centres from both ends
    std::vector<double> from_lo(static_cast<std::size_t>(ny)), from_hi(static_cast<std::size_t>(ny));
    double acc = 0.0;
    for (int j = 0; j < ny; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      from_lo[uj] = acc + 0.5 * src[uj] * dy;
      acc += src[uj] * dy;
    }
    acc = 0.0;
    for (int j = ny - 1; j >= 0; --j) {
      const auto uj = static_cast<std::size_t>(j);
      from_hi[uj] = acc + 0.5 * src[uj] * dy;
      acc += src[uj] * dy;
    }
    // the nearer end keeps the cancellation error small where e^{phi} is large
    std::size_t argmin = 0;
    for (std::size_t j = 1; j < ph.size(); ++j)
      if (ph[j] < ph[argmin]) argmin = j;

    double integral = 0.0, min_val = kInf, max_abs = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) {
      const double F = j <= argmin ? -from_lo[j] : from_hi[j];
      const double g1 = std::exp(ph[j]) * F;
      const double p0 = (f(t + hd, y[j]) - f(t - hd, y[j])) / (2.0 * hd);
      const double p1 = (f(t, y[j] + hd) - f(t, y[j] - hd)) / (2.0 * hd);
      const double p00 = (f(t + hd, y[j]) - 2.0 * ph[j] + f(t - hd, y[j])) / (hd * hd);
      const double p11 = (f(t, y[j] + hd) - 2.0 * ph[j] + f(t, y[j] - hd)) / (hd * hd);
      const double p01 = (f(t + hd, y[j] + hd) - f(t + hd, y[j] - hd) - f(t - hd, y[j] + hd) +
                          f(t - hd, y[j] - hd)) /
                         (4.0 * hd * hd);
      const double d1g1 = p1 * g1 - (k1 - p0 * k);
      const double val = k1 * k1 + d1g1 * d1g1 + p00 * k * k + 2.0 * p01 * k * g1 + p11 * g1 * g1;
      const double e = std::exp(-ph[j]);
      integral += val * e * dy;
      // pointwise sign is judged where the density carries mass
      if (e > 1e-8) {
        min_val = std::min(min_val, val);
        max_abs = std::max(max_abs, std::abs(val));
      }
    }
    CertificateRow row;
    row.t = t;
    row.k = k;
    row.k2_fd = (ks[static_cast<std::size_t>(i - 1)] - 2.0 * ks[static_cast<std::size_t>(i)] + ks[static_cast<std::size_t>(i + 1)]) /
                (h_t * h_t);
    row.k2_integral = integral;
    row.relative_error = std::abs(row.k2_fd - integral) / std::max(std::abs(integral), 1e-300);
    row.min_integrand = min_val;
    rep.max_relative_error = std::max(rep.max_relative_error, row.relative_error);
    rep.min_integrand_ratio = std::min(rep.min_integrand_ratio, max_abs > 0.0 ? min_val / max_abs : 0.0);
    rep.rows.push_back(row);
  }
  rep.pass = rep.max_relative_error <= 0.05 && rep.min_integrand_ratio >= -1e-6;
  return rep;
}

}  // namespace psh
