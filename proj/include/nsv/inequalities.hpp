#pragma once

// Numerical verification of the estimate chain: bilinear bound, the scalar
// inequalities for w(t), the Riccati substitution and its mean-value
// construction, Gronwall bounds, the a priori ratio, the Hopf energy
// inequality and the boundedness harnesses of the fractional integral and
// Sobolev potential.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nsv/fields.hpp"
#include "nsv/greenop.hpp"
#include "nsv/solver.hpp"

namespace nsv {

struct InequalityReport {
  std::string id;
  std::string abscissa = "t";
  std::vector<double> x, lhs, rhs;
  std::map<std::string, double> constants;
  double margin = 0;  // min(rhs - lhs)
  bool pass = false;
  std::string notes;

  /// margin = min(rhs - lhs); pass iff rhs - lhs >= -rel_tol max(|lhs|, |rhs|)
  /// at every node, up to rounding at the largest |lhs|, |rhs|.
  void finalize(double rel_tol = 1e-10);
};

struct BundleNorms {
  TimeSeries w, f, p;  // component-summed L2(Omega) norms; p from grad p
};
BundleNorms norms_from_bundle(const SolutionBundle& b, const SpaceTimeField& f);

/// || sum_j G g_j * G_{x_j} g ||_{L2} <= b (J^mu g(t))^2, b fitted.
InequalityReport check_bilinear(const SpaceTimeField& g, double mu, const HeatParams& hp);
/// || sum_j G g1_j * G_{x_j} g2 ||_{L2} <= c J^mu g1(t) J^mu g2(t), c fitted.
InequalityReport check_bilinear_pair(const SpaceTimeField& g1, const SpaceTimeField& g2,
                                     double mu, const HeatParams& hp);

struct ScalarChainReports {
  InequalityReport r32;    // w < f + b (J^mu (w+p))^2
  InequalityReport r34;    // w < f + b1 J^mu (w^2)
  InequalityReport r34pp;  // J^mu(p^2) <= c J^mu(w^2)
};
ScalarChainReports check_32_34(const TimeSeries& w, const TimeSeries& f, const TimeSeries& p,
                               double mu);

struct RiccatiChain {
  double mu = 0, k = 0, z0 = 1;
  double half_horizon = 0;  // T; the series cover [0, 2T]
  TimeSeries wsq, w1, z, F;
  bool located = false;
  double t1 = 0, t2 = 0;
  double mean_first = 0, mean_second = 0;  // means of z_at on [0,T], [T,2T]
  double residual_t1 = 0, residual_t2 = 0; // |z(t_i) - mean_i|
  double w2_t1 = 0, w2_t2 = 0;
  double z_prime0 = 0;  // forward difference at t = 0

  double z_at(double t) const;
  double w2_at(double t) const;
};

/// k as twice the Beta-gap threshold at s = (1-mu)/2, at least 1.
double riccati_k(double b1, double mu);

/// Series on [0, 2T] (even step count >= 2). w1 = J^mu(w^2),
/// z = z0 exp(-k/(1-mu) int w^2 (t-tau)^{1-mu}), F = F_mu(f^2).
RiccatiChain build_riccati_chain(const TimeSeries& w, const TimeSeries& f, double mu, double k,
                                 double z0 = 1.0);

/// z0 t < (int_0^t z) exp(k int_0^t F) at nodes n >= 1; fills the
/// mean-value points t1, t2 and both sides of the bounds they give:
/// 1 < (e^{-w2(t1)} + e^{-w2(t2)}) e^{k int_0^T F} (mean_value_lhs/rhs) and
/// e^{w2(t2)} < (e^{w2(t2)-w2(t1)} + 1) e^{k int_0^T F} (scaled_lhs/rhs).
InequalityReport check_key_inequality(RiccatiChain& chain);
/// z2(t) = int z e^{-k int F} >= z0 t e^{-k int F} via gronwall_bound.
InequalityReport check_gronwall_chain(const RiccatiChain& chain);

/// ||w||/||f|| in L2(0,T) of the component-summed series < sqrt 2.
InequalityReport check_apriori(const SolutionBundle& b, const SpaceTimeField& f);

/// y' - coefficient * y = forcing, y(0) = y0, through the integrating
/// factor exp(int coefficient) with trapezoid integrals on the grid.
TimeSeries gronwall_bound(const TimeSeries& forcing, const TimeSeries& coefficient,
                          double y0 = 0.0);

/// ||u(t)|| + 2 rho int ||u_x|| < ||a||_{W_2^1} + c int ||f||, c fitted.
InequalityReport check_hopf(const SolutionBundle& b, const SpaceTimeField& f,
                            const SpectralVectorField& a);

// --- boundedness harnesses -----------------------------------------------------------

struct HarnessConfig {
  std::uint64_t seed = 12345;
  int samples = 500;
  double mu = 0.625;
  double p = 2.0;
  double lambda = 1.25;
  int hl_steps = 256;         // refined run uses twice as many
  int sobolev_grid = 8;       // refined run uses twice as many
  double sobolev_box = 1.0;
  int mixed_samples = 20;     // Green mixed-norm and bilinear pair harnesses
  int mixed_modes = 4;
  int mixed_steps = 16;
  double rho = 1.0;
  double tolerance = 0.25;    // allowed relative change under refinement

  void validate() const;
};

struct HarnessResult {
  std::string id;
  double coarse = 0, fine = 0;  // fitted constants
  double relative_change = 0;
  bool stable = false;
  double exponent = 0;          // q where meaningful
  std::string notes;
};

HarnessResult hardy_littlewood_harness(const HarnessConfig& cfg);
HarnessResult sobolev_harness(const HarnessConfig& cfg);
/// mixed_norm(G g, 12, 8) and sum_j mixed_norm(G_{x_j} g, 12/5, 8)
/// against ||g||_{L2(Q)}.
std::vector<HarnessResult> green_mixed_norm_harness(const HarnessConfig& cfg);
/// Bilinear Green pair bound at mu = cfg.mu, fitted constant over random pairs.
HarnessResult bilinear_pair_harness(const HarnessConfig& cfg);

std::vector<HarnessResult> boundedness_harnesses(const HarnessConfig& cfg);

}  // namespace nsv
