#pragma once

#include <string>
#include <vector>

#include "psh/bergman.hpp"
#include "psh/fibration.hpp"

namespace psh {

// Mesh and degree of the unit-disk problems behind slice kernels.
struct SliceSettings {
  double h = 1.0 / 64;
  int degree = 8;
};

// phi on C^n (n = 1, 2) near a basepoint a, with the sphere ladder used to
// estimate its singularity there.
struct PshSample {
  ScalarField phi;
  int n = 1;
  std::vector<double> a;  // real coordinates; empty means the origin
  double r0 = 0.25;
  int levels = 6;  // radii r0 * 2^-k, k = 0..levels
  int m = 64;      // sphere nodes
  SliceSettings slice;

  // phi in z (n = 1) or z1, z2
  static PshSample parse(const std::string& phi, int n, std::vector<double> a = {});
  static std::vector<VarDecl> variables(int n);
  std::vector<double> basepoint() const;
  std::vector<double> radii() const;
};

struct LelongEstimate {
  double estimate = 0.0;      // slope of the sphere mean against log r
  double sup_estimate = 0.0;  // slope of the sphere max against log r
  std::vector<double> radii;
  std::vector<double> means;
  std::vector<double> sups;
  double fit_residual = 0.0;  // rms of the mean fit
  bool dense_singularity = false;  // some sphere average is -inf; estimates are +inf
};

LelongEstimate lelong_number(const PshSample& s);
// Same ladder applied to an arbitrary sampled function.
LelongEstimate lelong_number(const ScalarField& f, const PshSample& s);

struct IntegrabilityIndex {
  double estimate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int steps = 0;
  bool coarse = false;  // at least two consecutive inconclusive probes
};

// inf{t : e^{-2 phi / t} integrable near a}, bisection over [1e-3, 10].
IntegrabilityIndex integrability_index(const PshSample& s);

struct SliceValue {
  double value = 0.0;  // K_{z,w}(0,0); 0 when e^{-2 phi} fails to be integrable on the slice
  double log_value = kNegInf;
  bool singular = false;
};

// Unit-disk kernel at 0 for the weight lambda -> 2 phi(z + lambda w), total mass 1.
SliceValue slice_kernel(const ScalarField& phi, int n, std::span<const double> z, std::span<const double> w,
                        const SliceSettings& settings = {});

struct AttenuatedValue {
  double value = kNegInf;
  int singular_nodes = 0;
  int nodes = 0;
};

// (1/2) sphere average over |w| = eps of log K_{z,w}(0,0).
AttenuatedValue attenuated(const ScalarField& phi, int n, std::span<const double> z, double eps, int m = 16,
                           const SliceSettings& settings = {});

struct AttenuationDrop {
  double tau = 0.0;        // Lelong number of phi at a
  double eps = 0.0;
  LelongEstimate reduced;  // Lelong number of phi_eps at a
  double threshold = 0.0;  // tau - 1 - 0.1
  bool pass = false;
};

// The sphere ladder is rescaled to r0 = eps / 2 so every sphere sits inside |z - a| < eps.
AttenuationDrop attenuation_lelong_drop(const PshSample& s, double eps, int m_slice = 16);

struct EpsMonotonicity {
  std::vector<double> eps;  // increasing
  std::vector<double> values;
  double noise = 0.0;          // max change under h -> 2h or degree -> degree - 2
  double max_violation = 0.0;  // max of phi_eps at the smaller eps minus phi_eps at the larger
  bool pass = false;           // violation <= 1e-8 + 2 noise
};

// phi_eps(z) must not decrease as eps grows.
EpsMonotonicity attenuation_monotonicity(const ScalarField& phi, int n, std::span<const double> z,
                                         std::span<const double> eps, int m = 16, const SliceSettings& settings = {});

// z -> phi_eps(z) on a grid of z in C^1, scanned with the fibration tolerance model.
ScanReport attenuated_scan(const ScalarField& phi, const TGrid& grid, double eps, int m = 16,
                           const SliceSettings& settings = {}, const TolModel& tol = {});

// log K(a, a) on dom with weight 2 (phi + (n - 1) log|z - a|); -inf marks a singular point.
double chi(const ScalarField& phi, const GridDomain& dom, std::span<const double> a, int degree = -1);

}  // namespace psh
