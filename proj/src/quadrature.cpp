#include "psh/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace psh {

Box Box::cube(int real_dim, double half_width, std::span<const double> center) {
  Box b;
  for (int a = 0; a < real_dim; ++a) {
    const double c = center.empty() ? 0.0 : center[static_cast<std::size_t>(a)];
    b.lo.push_back(c - half_width);
    b.hi.push_back(c + half_width);
  }
  return b;
}

std::vector<double> Box::center() const {
  std::vector<double> c(lo.size());
  for (std::size_t a = 0; a < lo.size(); ++a) c[a] = 0.5 * (lo[a] + hi[a]);
  return c;
}

double Box::max_half_width() const {
  double w = 0.0;
  for (std::size_t a = 0; a < lo.size(); ++a) w = std::max(w, 0.5 * (hi[a] - lo[a]));
  return w;
}

ScalarField as_field(const Expression& e) {
  return [e](std::span<const double> x) { return e.eval_coords(x); };
}

GridDomain GridDomain::build(const Expression& rho, Box bbox, double h, Dimension dim, Truncation t) {
  if (rho.real_dimension() != dim.real_dim())
    throw LabError(ErrorKind::kind_mismatch, "defining function has " + std::to_string(rho.real_dimension()) +
                                                 " real coordinates, domain needs " +
                                                 std::to_string(dim.real_dim()));
  return build(as_field(rho), std::move(bbox), h, dim, t);
}

namespace {

// Volume fraction of the cell around node i where the linear model
// rho(x_i) + grad . (x - x_i) is negative. Gradient from central differences
// of the node samples (one-sided on the grid edge). Exact for the linear model:
// inclusion-exclusion over the cube vertices.
struct CutCell {
  double fraction = 0.0;
  std::vector<double> centroid;  // offset from the node in units of h
};

CutCell linearized_cell(const std::vector<double>& rho_at, const std::vector<int>& counts,
                        const std::vector<std::size_t>& stride, std::size_t i) {
  const std::size_t d = counts.size();
  std::size_t rem = i;
  std::vector<int> idx(d);
  for (std::size_t a = d; a-- > 0;) {
    idx[a] = static_cast<int>(rem % static_cast<std::size_t>(counts[a]));
    rem /= static_cast<std::size_t>(counts[a]);
  }
  const double r0 = rho_at[i];
  std::vector<double> g(d);
  double gnorm = 0.0;
  for (std::size_t a = 0; a < d; ++a) {
    const bool lo = idx[a] > 0, hi = idx[a] + 1 < counts[a];
    const double rm = lo ? rho_at[i - stride[a]] : r0;
    const double rp = hi ? rho_at[i + stride[a]] : r0;
    const double span = (lo ? 1.0 : 0.0) + (hi ? 1.0 : 0.0);
    g[a] = span > 0.0 ? (rp - rm) / span : 0.0;  // per unit cell width
    gnorm += g[a] * g[a];
  }
  gnorm = std::sqrt(gnorm);
  CutCell out;
  if (!(gnorm > 0.0) || !std::isfinite(gnorm) || !std::isfinite(r0)) return out;
  // cell coordinates w in [0,1]^d after flipping negative components: sum a_k w_k < S
  double S = -r0;
  std::vector<double> a(d);
  for (std::size_t k = 0; k < d; ++k) {
    S += 0.5 * std::abs(g[k]);
    a[k] = std::max(std::abs(g[k]), 1e-4 * gnorm);
  }
  double sum_a = 0.0;
  for (double v : a) sum_a += v;
  if (S <= 0.0) return out;
  out.centroid.assign(d, 0.0);
  if (S >= sum_a) {
    out.fraction = 1.0;
    return out;
  }
  double vol = 0.0, denom = 1.0;
  for (std::size_t k = 0; k < d; ++k) denom *= a[k] * static_cast<double>(k + 1);
  for (std::size_t v = 0; v < (std::size_t{1} << d); ++v) {
    double t = S;
    int bits = 0;
    for (std::size_t k = 0; k < d; ++k)
      if (v & (std::size_t{1} << k)) {
        t -= a[k];
        ++bits;
      }
    if (t > 0.0) vol += (bits % 2 ? -1.0 : 1.0) * std::pow(t, static_cast<double>(d));
  }
  out.fraction = std::clamp(vol / denom, 0.0, 1.0);
  // centroid of the linear-model region from a midpoint sample of the cell
  const int m = d <= 2 ? 12 : (d == 3 ? 8 : 5);
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) total *= static_cast<std::size_t>(m);
  std::vector<double> acc(d, 0.0), v(d);
  std::size_t hits = 0;
  for (std::size_t s = 0; s < total; ++s) {
    std::size_t r = s;
    double val = r0;
    for (std::size_t k = 0; k < d; ++k) {
      v[k] = (static_cast<double>(r % static_cast<std::size_t>(m)) + 0.5) / m - 0.5;
      r /= static_cast<std::size_t>(m);
      val += g[k] * v[k];
    }
    if (val < 0.0) {
      ++hits;
      for (std::size_t k = 0; k < d; ++k) acc[k] += v[k];
    }
  }
  if (hits == 0) {
    out.centroid.clear();
    return out;
  }
  for (std::size_t k = 0; k < d; ++k) out.centroid[k] = acc[k] / static_cast<double>(hits);
  return out;
}

}  // namespace

GridDomain GridDomain::build(ScalarField rho, Box bbox, double h, Dimension dim, Truncation t) {
  const int d = dim.real_dim();
  if (!(h > 0.0)) throw LabError(ErrorKind::precondition, "mesh size must be positive");
  if (static_cast<int>(bbox.lo.size()) != d || static_cast<int>(bbox.hi.size()) != d)
    throw LabError(ErrorKind::precondition, "bounding box dimension does not match domain");
  GridDomain g;
  g.rho_ = std::move(rho);
  g.bbox_ = bbox;
  g.h_ = h;
  g.dim_ = dim;
  g.truncation_ = t;
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    const double width = bbox.hi[ua] - bbox.lo[ua];
    if (!(width > 0.0)) throw LabError(ErrorKind::precondition, "degenerate bounding box");
    // even counts keep the box centre off the node lattice and off the subsamples
    int n = std::max(4, static_cast<int>(std::ceil(width / h - 1e-9)));
    n += n % 2;
    g.counts_.push_back(n);
    g.origin_.push_back(0.5 * (bbox.lo[ua] + bbox.hi[ua]) - 0.5 * n * h + 0.5 * h);
    total *= static_cast<std::size_t>(n);
  }

  std::vector<double> rho_at(total);
  parallel_for(static_cast<std::ptrdiff_t>(total), [&](std::ptrdiff_t i) {
    const auto x = g.node_coords(static_cast<std::size_t>(i));
    rho_at[static_cast<std::size_t>(i)] = g.rho_(x);
  });
  g.mask_.resize(total);
  for (std::size_t i = 0; i < total; ++i) g.mask_[i] = rho_at[i] < 0.0 ? 1 : 0;

  // strides for row-major indexing (last axis fastest)
  std::vector<std::size_t> stride(static_cast<std::size_t>(d), 1);
  for (int a = d - 2; a >= 0; --a)
    stride[static_cast<std::size_t>(a)] = stride[static_cast<std::size_t>(a + 1)] * static_cast<std::size_t>(g.counts_[static_cast<std::size_t>(a + 1)]);

  std::vector<std::uint8_t> candidate(total, 0);
  for (std::size_t i = 0; i < total; ++i) {
    const auto idx = g.node_index(i);
    for (int a = 0; a < d; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      if (t == Truncation::reject && g.mask_[i] && (idx[ua] == 0 || idx[ua] == g.counts_[ua] - 1)) {
        std::ostringstream msg;
        msg << "interior node on the bounding box face along axis " << a;
        throw LabError(ErrorKind::domain_truncated, msg.str());
      }
      if (idx[ua] > 0 && g.mask_[i - stride[ua]] != g.mask_[i]) candidate[i] = 1;
      if (idx[ua] + 1 < g.counts_[ua] && g.mask_[i + stride[ua]] != g.mask_[i]) candidate[i] = 1;
    }
  }

  std::vector<std::size_t> cand_nodes;
  for (std::size_t i = 0; i < total; ++i)
    if (candidate[i]) cand_nodes.push_back(i);
  std::size_t nsub = 1;
  for (int a = 0; a < d; ++a) nsub *= 3;
  std::vector<std::uint8_t> sub_inside(cand_nodes.size() * nsub);
  parallel_for(static_cast<std::ptrdiff_t>(cand_nodes.size()), [&](std::ptrdiff_t c) {
    const auto node = cand_nodes[static_cast<std::size_t>(c)];
    const auto center = g.node_coords(node);
    std::vector<double> x(center);
    for (std::size_t s = 0; s < nsub; ++s) {
      std::size_t rem = s;
      for (int a = d - 1; a >= 0; --a) {
        const auto ua = static_cast<std::size_t>(a);
        x[ua] = center[ua] + (static_cast<double>(rem % 3) - 1.0) * h / 3.0;
        rem /= 3;
      }
      sub_inside[static_cast<std::size_t>(c) * nsub + s] = g.rho_(x) < 0.0 ? 1 : 0;
    }
  });

  const double cell = std::pow(h, d);
  std::vector<double> sub_points;
  std::size_t next_cand = 0;
  g.node_weights_.assign(total, 0.0);
  for (std::size_t i = 0; i < total; ++i) {
    if (candidate[i]) {
      const std::size_t c = next_cand++;
      const auto center = g.node_coords(i);
      sub_points.clear();
      for (std::size_t s = 0; s < nsub; ++s) {
        if (!sub_inside[c * nsub + s]) continue;
        std::size_t rem = s;
        std::vector<double> x(center);
        for (int a = d - 1; a >= 0; --a) {
          const auto ua = static_cast<std::size_t>(a);
          x[ua] = center[ua] + (static_cast<double>(rem % 3) - 1.0) * h / 3.0;
          rem /= 3;
        }
        sub_points.insert(sub_points.end(), x.begin(), x.end());
      }
      const std::size_t kept = sub_points.size() / static_cast<std::size_t>(d);
      const CutCell cut = linearized_cell(rho_at, g.counts_, stride, i);
      if (!cut.centroid.empty()) {
        std::vector<double> x(center);
        for (int a = 0; a < d; ++a) x[static_cast<std::size_t>(a)] += h * cut.centroid[static_cast<std::size_t>(a)];
        if (g.rho_(x) < 0.0) {
          g.points_.insert(g.points_.end(), x.begin(), x.end());
          g.weights_.push_back(cut.fraction * cell);
          g.node_weights_[i] = cut.fraction * cell;
          continue;
        }
      }
      if (kept == 0) continue;
      double frac = cut.fraction;
      if (!(frac > 0.0)) frac = static_cast<double>(kept) / static_cast<double>(nsub);
      const double w = frac * cell / static_cast<double>(kept);
      for (std::size_t k = 0; k < kept; ++k) g.weights_.push_back(w);
      g.points_.insert(g.points_.end(), sub_points.begin(), sub_points.end());
      g.node_weights_[i] = frac * cell;
    } else if (g.mask_[i]) {
      const auto x = g.node_coords(i);
      g.points_.insert(g.points_.end(), x.begin(), x.end());
      g.weights_.push_back(cell);
      g.node_weights_[i] = cell;
    }
  }
  if (g.weights_.empty()) throw LabError(ErrorKind::empty_domain, "no grid node satisfies rho < 0");
  return g;
}

std::vector<int> GridDomain::node_index(std::size_t node) const {
  const auto d = counts_.size();
  std::vector<int> idx(d);
  for (std::size_t a = d; a-- > 0;) {
    const auto n = static_cast<std::size_t>(counts_[a]);
    idx[a] = static_cast<int>(node % n);
    node /= n;
  }
  return idx;
}

std::vector<double> GridDomain::node_coords(std::size_t node) const {
  const auto idx = node_index(node);
  std::vector<double> x(idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) x[a] = origin_[a] + h_ * idx[a];
  return x;
}

double GridDomain::total_weight() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

std::vector<double> sample(const ScalarField& f, const GridDomain& dom, Exec mode) {
  std::vector<double> v(dom.num_points());
  parallel_for(
      static_cast<std::ptrdiff_t>(v.size()),
      [&](std::ptrdiff_t i) { v[static_cast<std::size_t>(i)] = f(dom.point(static_cast<std::size_t>(i))); }, mode);
  return v;
}

double integrate_values(std::span<const double> values, const GridDomain& dom, Exec mode) {
  const double guard = std::pow(dom.h(), -(dom.real_dim() + 1));
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
      throw LabError(ErrorKind::non_integrable, "density is not finite at quadrature point " + std::to_string(i));
    if (v > guard)
      throw LabError(ErrorKind::non_integrable,
                     "density spike above 1/h^(d+1) at quadrature point " + std::to_string(i) +
                         "; use divergence_probe");
  }
  return kernels::weighted_sum(values, dom.weights(), mode);
}

double integrate(const ScalarField& f, const GridDomain& dom, Exec mode) {
  const auto v = sample(f, dom, mode);
  return integrate_values(v, dom, mode);
}

const char* to_string(ProbeResult::Status s) {
  switch (s) {
    case ProbeResult::Status::converged: return "converged";
    case ProbeResult::Status::diverging: return "diverging";
    case ProbeResult::Status::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

// Increments of a midpoint sum near a power singularity |x|^-p in R^d scale as
// h^(d-p); the fitted exponent q = d - p separates convergence (q > 0) from
// divergence. Logarithmic divergence (q = 0) sits on the boundary, so a small
// positive margin is required before calling a sequence convergent.
constexpr double kMinConvergenceExponent = 0.05;

}  // namespace

ProbeResult divergence_probe_levels(std::span<const double> h_sequence, std::span<const double> integrals) {
  if (h_sequence.size() < 3 || integrals.size() != h_sequence.size())
    throw LabError(ErrorKind::precondition, "divergence probe needs at least 3 levels");
  for (std::size_t k = 1; k < h_sequence.size(); ++k)
    if (!(h_sequence[k] < h_sequence[k - 1]))
      throw LabError(ErrorKind::precondition, "h sequence must be strictly decreasing");

  ProbeResult r;
  r.h.assign(h_sequence.begin(), h_sequence.end());
  r.integrals.assign(integrals.begin(), integrals.end());
  for (double v : integrals) {
    if (!std::isfinite(v)) {
      r.status = ProbeResult::Status::diverging;
      r.rate = std::numeric_limits<double>::infinity();
      return r;
    }
  }
  const std::size_t levels = integrals.size();
  std::vector<double> diff(levels - 1);
  for (std::size_t k = 0; k + 1 < levels; ++k) diff[k] = integrals[k + 1] - integrals[k];

  // interior-rule error model: boundary cut cells perturb the sum by O(h)
  auto err_model = [&](std::size_t k) { return 0.25 * h_sequence[k] * std::abs(integrals[k]); };
  bool cauchy = true;
  for (std::size_t k = 0; k + 1 < levels; ++k) cauchy = cauchy && std::abs(diff[k]) <= 2.0 * err_model(k + 1);
  if (cauchy) {
    r.status = ProbeResult::Status::converged;
    r.value = integrals.back();
    return r;
  }
  const bool all_pos = std::all_of(diff.begin(), diff.end(), [](double x) { return x > 0.0; });
  const bool all_neg = std::all_of(diff.begin(), diff.end(), [](double x) { return x < 0.0; });
  if (!all_pos && !all_neg) {
    r.status = ProbeResult::Status::inconclusive;
    r.value = integrals.back();
    return r;
  }
  // least-squares slope of log|D_k| against log h_{k+1}
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(diff.size());
  for (std::size_t k = 0; k < diff.size(); ++k) {
    const double x = std::log(h_sequence[k + 1]);
    const double y = std::log(std::abs(diff[k]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double q = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  if (q > kMinConvergenceExponent) {
    r.status = ProbeResult::Status::converged;
    const double ratio = std::pow(h_sequence[levels - 2] / h_sequence[levels - 1], -q);
    r.value = integrals.back() + diff.back() * ratio / (1.0 - ratio);
    return r;
  }
  if (all_neg) {
    // a decreasing sequence that does not settle is not a divergence to +inf
    r.status = ProbeResult::Status::inconclusive;
    r.value = integrals.back();
    return r;
  }
  r.status = ProbeResult::Status::diverging;
  r.rate = -q;
  return r;
}

ProbeResult divergence_probe(const ScalarField& f, const GridDomain& dom, std::span<const double> h_sequence) {
  if (h_sequence.size() < 3) throw LabError(ErrorKind::precondition, "divergence probe needs at least 3 levels");
  std::vector<double> integrals;
  for (double h : h_sequence) {
    const GridDomain level = dom.rebuilt(h);
    const auto v = sample(f, level);
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (std::isnan(v[i])) throw LabError(ErrorKind::non_integrable, "density is NaN");
      s += v[i] * level.weights()[i];
    }
    integrals.push_back(s);
  }
  return divergence_probe_levels(h_sequence, integrals);
}

ScalarField ball_rho(std::span<const double> center, double radius) {
  std::vector<double> c(center.begin(), center.end());
  const double r2 = radius * radius;
  return [c, r2](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t a = 0; a < c.size(); ++a) s += (x[a] - c[a]) * (x[a] - c[a]);
    return s - r2;
  };
}

GridDomain GridDomain::ball(std::span<const double> center, double radius, double h, Dimension dim) {
  std::vector<double> c(center.begin(), center.end());
  if (c.empty()) c.assign(static_cast<std::size_t>(dim.real_dim()), 0.0);
  return build(ball_rho(c, radius), Box::cube(dim.real_dim(), 1.25 * radius, c), h, dim);
}

BallLadder BallLadder::build(std::span<const double> center, double radius, Dimension dim,
                             std::span<const double> h_sequence) {
  BallLadder b;
  for (double h : h_sequence) {
    b.h.push_back(h);
    b.levels.push_back(GridDomain::ball(center, radius, h, dim));
  }
  return b;
}

std::vector<std::vector<double>> BallLadder::sample(const ScalarField& f) const {
  std::vector<std::vector<double>> out;
  for (const auto& level : levels) out.push_back(psh::sample(f, level));
  return out;
}

ProbeResult BallLadder::probe_cached(const std::vector<std::vector<double>>& cached,
                                     const std::function<double(double)>& g) const {
  std::vector<double> integrals;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const auto& w = levels[k].weights();
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double v = g(cached[k][i]);
      if (std::isnan(v)) throw LabError(ErrorKind::non_integrable, "density is NaN");
      s += v * w[i];
    }
    integrals.push_back(s);
  }
  return divergence_probe_levels(h, integrals);
}

ProbeResult BallLadder::probe(const ScalarField& density) const {
  return probe_cached(sample(density), [](double v) { return v; });
}

SphereRule SphereRule::circle(std::span<const double> center, double radius, int m, double phase) {
  if (m < 8) throw LabError(ErrorKind::rule_too_coarse, "circle rule needs at least 8 nodes");
  if (center.size() != 2) throw LabError(ErrorKind::precondition, "circle rule needs a planar centre");
  SphereRule r;
  r.center.assign(center.begin(), center.end());
  r.radius = radius;
  r.real_dim = 2;
  for (int k = 0; k < m; ++k) {
    const double a = phase + 2.0 * std::numbers::pi * k / m;
    r.nodes.push_back(center[0] + radius * std::cos(a));
    r.nodes.push_back(center[1] + radius * std::sin(a));
  }
  return r;
}

SphereRule SphereRule::hopf(std::span<const double> center, double radius, int m_lat, int m_ang) {
  if (m_lat * m_ang * m_ang < 8) throw LabError(ErrorKind::rule_too_coarse, "sphere rule needs at least 8 nodes");
  if (center.size() != 4) throw LabError(ErrorKind::precondition, "Hopf rule needs a centre in C^2");
  SphereRule r;
  r.center.assign(center.begin(), center.end());
  r.radius = radius;
  r.real_dim = 4;
  for (int i = 0; i < m_lat; ++i) {
    const double u = (i + 0.5) / m_lat;  // sin^2 theta is uniform on S^3
    const double s = std::sqrt(u);
    const double c = std::sqrt(1.0 - u);
    for (int j = 0; j < m_ang; ++j) {
      // staggered angles decorrelate the two circle factors
      const double alpha = 2.0 * std::numbers::pi * (j + 0.5 * (i % 2)) / m_ang;
      for (int k = 0; k < m_ang; ++k) {
        const double beta = 2.0 * std::numbers::pi * (k + 0.25 + 0.5 * (j % 2)) / m_ang;
        r.nodes.push_back(center[0] + radius * c * std::cos(alpha));
        r.nodes.push_back(center[1] + radius * c * std::sin(alpha));
        r.nodes.push_back(center[2] + radius * s * std::cos(beta));
        r.nodes.push_back(center[3] + radius * s * std::sin(beta));
      }
    }
  }
  return r;
}

SphereRule SphereRule::for_complex(int n, std::span<const double> center, double radius, int m) {
  if (n == 1) return circle(center, radius, m);
  if (n == 2) {
    const int ang = std::max(4, static_cast<int>(std::lround(std::cbrt(static_cast<double>(m)))));
    const int lat = std::max(2, (m + ang * ang - 1) / (ang * ang));
    return hopf(center, radius, lat, ang);
  }
  throw LabError(ErrorKind::precondition, "sphere rules exist for n = 1, 2 only");
}

double sphere_average(const ScalarField& f, const SphereRule& rule) {
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = f(rule.node(i));
    if (v == kNegInf) return kNegInf;
    if (!std::isfinite(v)) throw LabError(ErrorKind::non_integrable, "sphere sample is not finite");
    acc += v;
  }
  return acc * rule.weight();
}

TensorRule TensorRule::midpoint(const Box& box, double h) {
  TensorRule t;
  t.dim = static_cast<int>(box.lo.size());
  std::vector<int> n(box.lo.size());
  std::vector<double> step(box.lo.size());
  std::size_t total = 1;
  double w = 1.0;
  for (std::size_t a = 0; a < n.size(); ++a) {
    n[a] = std::max(1, static_cast<int>(std::ceil((box.hi[a] - box.lo[a]) / h - 1e-9)));
    step[a] = (box.hi[a] - box.lo[a]) / n[a];
    total *= static_cast<std::size_t>(n[a]);
    w *= step[a];
  }
  t.points.reserve(total * n.size());
  t.weights.assign(total, w);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rem = i;
    std::vector<double> x(n.size());
    for (std::size_t a = n.size(); a-- > 0;) {
      const auto k = rem % static_cast<std::size_t>(n[a]);
      rem /= static_cast<std::size_t>(n[a]);
      x[a] = box.lo[a] + (static_cast<double>(k) + 0.5) * step[a];
    }
    t.points.insert(t.points.end(), x.begin(), x.end());
  }
  return t;
}

}  // namespace psh
