#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "psh/expr.hpp"
#include "psh/kernels.hpp"

namespace psh {

// Real-valued field over real coordinates (complex coordinates appear as
// consecutive (re, im) pairs).
using ScalarField = std::function<double(std::span<const double>)>;

enum class DimKind { real, complex };

struct Dimension {
  DimKind kind = DimKind::real;
  int n = 2;

  int real_dim() const { return kind == DimKind::complex ? 2 * n : n; }
  static Dimension real(int d) { return {DimKind::real, d}; }
  static Dimension complex(int n) { return {DimKind::complex, n}; }
};

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  static Box cube(int real_dim, double half_width, std::span<const double> center = {});
  std::vector<double> center() const;
  double max_half_width() const;
};

// Wrap an expression whose real coordinates are exactly the domain coordinates.
ScalarField as_field(const Expression& e);
// |x - center|^2 - radius^2
ScalarField ball_rho(std::span<const double> center, double radius);

/// Sublevel set {rho < 0} sampled on a node-centred grid.
///
/// Nodes sit at cell centres, so a grid built on a box centred at a point never
/// places a node on that point. Cells straddling the boundary (detected by a
/// sign change to an axis neighbour) are split into a 3^d subgrid and only the
/// interior subsamples are kept as quadrature points, each carrying h^d / 3^d.
// reject: an interior node on a bbox face throws domain_truncated.
// clip: the domain is {rho < 0} intersected with the bbox.
enum class Truncation { reject, clip };

class GridDomain {
 public:
  static GridDomain build(ScalarField rho, Box bbox, double h, Dimension dim, Truncation t = Truncation::reject);
  static GridDomain build(const Expression& rho, Box bbox, double h, Dimension dim,
                          Truncation t = Truncation::reject);

  GridDomain rebuilt(double h) const { return build(rho_, bbox_, h, dim_, truncation_); }
  // Euclidean ball on the cube of half-width 1.25 * radius around center.
  static GridDomain ball(std::span<const double> center, double radius, double h, Dimension dim);

  Dimension dimension() const { return dim_; }
  int real_dim() const { return dim_.real_dim(); }
  double h() const { return h_; }
  const Box& bbox() const { return bbox_; }
  const ScalarField& rho() const { return rho_; }

  // structured node grid
  const std::vector<int>& counts() const { return counts_; }
  std::size_t num_nodes() const { return mask_.size(); }
  std::vector<double> node_coords(std::size_t node) const;
  std::vector<int> node_index(std::size_t node) const;
  bool interior(std::size_t node) const { return mask_[node] != 0; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }
  const std::vector<double>& node_weights() const { return node_weights_; }

  // quadrature points
  std::size_t num_points() const { return weights_.size(); }
  std::span<const double> point(std::size_t i) const {
    return {points_.data() + i * static_cast<std::size_t>(real_dim()), static_cast<std::size_t>(real_dim())};
  }
  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  double total_weight() const;

 private:
  ScalarField rho_;
  Box bbox_;
  double h_ = 0.0;
  Dimension dim_;
  Truncation truncation_ = Truncation::reject;
  std::vector<int> counts_;
  std::vector<double> origin_;  // coordinate of node 0
  std::vector<std::uint8_t> mask_;
  std::vector<double> node_weights_;
  std::vector<double> points_;
  std::vector<double> weights_;
};

// Sum f(x) w(x) over the quadrature points. Throws non_integrable for +inf/NaN
// samples and for samples above the singularity guard 1/h^(d+1); those cases
// must go through divergence_probe. A -inf exponent gives density 0, which is fine.
double integrate(const ScalarField& f, const GridDomain& dom, Exec mode = default_exec());
// Same with the density already sampled at dom's quadrature points.
double integrate_values(std::span<const double> values, const GridDomain& dom, Exec mode = default_exec());
std::vector<double> sample(const ScalarField& f, const GridDomain& dom, Exec mode = default_exec());

struct ProbeResult {
  enum class Status { converged, diverging, inconclusive };
  Status status = Status::inconclusive;
  double value = 0.0;   // converged: limit estimate
  double rate = 0.0;    // diverging: fitted growth exponent (0 means logarithmic)
  std::vector<double> integrals;
  std::vector<double> h;
};

const char* to_string(ProbeResult::Status s);

// Classify integrability of f from midpoint sums on a strictly decreasing h
// ladder (at least 3 levels).
ProbeResult divergence_probe(const ScalarField& f, const GridDomain& dom, std::span<const double> h_sequence);
// Variant over prebuilt levels (coarse to fine) with f sampled per level.
ProbeResult divergence_probe_levels(std::span<const double> h_sequence, std::span<const double> integrals);

// Balls |x - center| < radius discretised at several mesh sizes, reused when
// many densities are probed on the same neighbourhood.
struct BallLadder {
  std::vector<double> h;
  std::vector<GridDomain> levels;

  static BallLadder build(std::span<const double> center, double radius, Dimension dim,
                          std::span<const double> h_sequence);
  std::vector<std::vector<double>> sample(const ScalarField& f) const;
  ProbeResult probe(const ScalarField& density) const;
  // density = g(cached sample) on every level
  ProbeResult probe_cached(const std::vector<std::vector<double>>& cached, const std::function<double(double)>& g) const;
};

/// Equal-weight rule on a circle (C^1 / R^2) or on the unit sphere of C^2
/// sampled along Hopf coordinates (cos t e^{ia}, sin t e^{ib}) with
/// sin^2 t equidistributed, which is uniform for the round measure.
struct SphereRule {
  std::vector<double> center;
  double radius = 0.0;
  int real_dim = 2;
  std::vector<double> nodes;  // flattened, real_dim per node

  std::size_t size() const { return nodes.size() / static_cast<std::size_t>(real_dim); }
  std::span<const double> node(std::size_t i) const {
    return {nodes.data() + i * static_cast<std::size_t>(real_dim), static_cast<std::size_t>(real_dim)};
  }
  double weight() const { return 1.0 / static_cast<double>(size()); }

  static SphereRule circle(std::span<const double> center, double radius, int m, double phase = 0.0);
  // m_lat latitude bands times m_ang^2 angle pairs
  static SphereRule hopf(std::span<const double> center, double radius, int m_lat, int m_ang);
  // n=1: circle with m nodes; n=2: Hopf rule with about m nodes
  static SphereRule for_complex(int n, std::span<const double> center, double radius, int m);
};

double sphere_average(const ScalarField& f, const SphereRule& rule);

// Midpoint tensor rule over a box (used for marginals over full boxes).
struct TensorRule {
  int dim = 1;
  std::vector<double> points;
  std::vector<double> weights;

  static TensorRule midpoint(const Box& box, double h);
  std::size_t size() const { return weights.size(); }
  std::span<const double> point(std::size_t i) const {
    return {points.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

}  // namespace psh
