#pragma once

// Heat Green operator on the periodic box (Duhamel integral per Fourier
// mode), its spatial gradient, the free heat flow, the zero-mean inverse
// Laplacian, and the whole-space kernel / Sobolev potential used by the
// estimate harnesses.

#include <iosfwd>
#include <vector>

#include "nsv/fields.hpp"

namespace nsv {

struct HeatParams {
  double rho = 1.0;
  void validate() const;
};

/// u_t - rho Lap u = forcing, u(., 0) = 0. Per mode the Duhamel integral
/// is evaluated exactly for forcing linear in time between nodes.
SpaceTimeField heat_solve(const SpaceTimeField& forcing, const HeatParams& hp,
                          Exec exec = Exec::parallel);

/// Advances `state` from node `from` to node `to` (inclusive) with the same
/// integrator; state[from] is taken as given. Used for causal block
/// marching.
void heat_march(const SpaceTimeField& forcing, const HeatParams& hp,
                SpaceTimeField& state, int from, int to,
                Exec exec = Exec::parallel);

/// d/dx_axis of heat_solve(forcing).
SpaceTimeField grad_green(const SpaceTimeField& forcing, const HeatParams& hp,
                          Axis axis);

/// Free heat flow with initial value a.
SpaceTimeField heat_flow(const SpectralVectorField& a, const HeatParams& hp,
                         const TimeGrid& tg);

struct InverseLaplacian {
  SpectralField solution;  // zero mean
  double input_mean = 0;   // |c(0)| of the input
  bool mean_warning = false;
};

/// c(k) -> -c(k)/|k|^2, mean set to 0; flags a nonzero input mean.
InverseLaplacian inverse_laplacian(const SpectralField& f,
                                   double mean_tolerance = 1e-12);

/// (4 pi rho gap)^{-3/2} exp(-|offset|^2 / (4 rho gap)); throws on gap <= 0.
double whole_space_kernel(const std::array<double, 3>& offset, double gap,
                          const HeatParams& hp);
std::array<double, 3> whole_space_kernel_gradient(const std::array<double, 3>& offset,
                                                  double gap, const HeatParams& hp);

enum class KernelEstimate { value, gradient };

struct KernelSample {
  double offset = 0;  // |x - xi|
  double gap = 0;     // t - tau
  double kernel = 0;  // Phi or |grad Phi|
  double weighted = 0;
};

struct KernelSamplePlan {
  double gap_min = 1e-4, gap_max = 1.0;
  double offset_min = 1e-3, offset_max = 3.141592653589793;
  int gap_count = 200, offset_count = 200;
};

struct KernelEstimateResult {
  double mu = 0;
  KernelEstimate id = KernelEstimate::value;
  double constant = 0;  // sup of the weighted kernel over the plan
  KernelSample argmax;
  std::vector<KernelSample> samples;  // in plan order
};

/// Empirical constant of the local kernel bounds:
///   value:    Phi * gap^mu * r^{3-2mu},            0 < mu < 1
///   gradient: |grad Phi| * gap^mu * r^{3-(2mu-1)}, 1/2 < mu < 1
/// over log-spaced (gap, r) samples.
KernelEstimateResult kernel_estimate_constant(double mu, KernelEstimate id,
                                              const HeatParams& hp,
                                              const KernelSamplePlan& plan = {});
/// The supremum over all gap, r > 0 in closed form.
double kernel_estimate_supremum(double mu, KernelEstimate id, const HeatParams& hp);
/// CSV with columns mu, estimate_id, gap, offset, weighted_value, running_sup.
void write_kernel_csv(std::ostream& out, const KernelEstimateResult& r);

/// int over the unit cube centred at 0 of |y|^{lambda-3} dy.
double sobolev_self_cell(double lambda);

/// u(x) = sum_xi f(xi) |x - xi|^{lambda-3} dV over the sample cube (no
/// periodic images), the own cell integrated analytically. Requires equal
/// spacing on all axes and at most `cap` points per axis.
GridSamples sobolev_potential(const GridSamples& f, double lambda, int cap = 24,
                              Exec exec = Exec::parallel);

}  // namespace nsv
