#pragma once

// Volterra fixed-point solve of the Navier-Stokes system in the auxiliary
// field w, velocity/pressure recovery, strong-form residuals, the variant
// with nonzero initial data and manufactured solutions.
//
// With u_t - rho Lap u - grad p = w and div u = 0 the velocity is
// u = G(w + grad p) = G(Leray w), and the momentum equation
//   u_t - rho Lap u + s (u.grad)u + grad P = f,   P = -p,
// becomes w = f - s K_p(w) with K_p(w) = (v.grad)v, v = G(Leray w).
// s = +1 for the standard convention, s = -1 for the literal one.

#include <optional>
#include <string>
#include <vector>

#include "nsv/fields.hpp"
#include "nsv/greenop.hpp"

namespace nsv {

enum class SignConvention { standard, paper };

/// Coefficient of (u.grad)u on the left-hand side of the momentum equation.
inline double convection_sign(SignConvention s) {
  return s == SignConvention::standard ? 1.0 : -1.0;
}
std::string to_string(SignConvention s);
SignConvention parse_sign_convention(const std::string& s);

struct SolveConfig {
  double rho = 1.0;
  TimeGrid time{1.0, 64};
  DomainSpec domain = DomainSpec::cube(8);
  double tolerance = 1e-10;
  int max_iterations = 200;
  double relaxation = 1.0;
  SignConvention sign = SignConvention::standard;
  double mu = 0.625;    // diagnostic order for the estimate chain
  int block_steps = 0;  // 0: gcd(Nt, 16)
  Exec exec = Exec::parallel;

  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;
  int block_length() const;
  HeatParams heat() const { return {rho}; }
};

enum class SolveStatus { converged, max_iterations, diverged };
std::string to_string(SolveStatus s);

struct SolutionBundle {
  SolveConfig config;
  SolveStatus status = SolveStatus::converged;
  SpaceTimeField w;
  SpaceTimeField grad_p;     // grad p with u_t - rho Lap u - grad p = w
  ScalarSpaceTimeField p;    // zero-mean potential; physical pressure is -p
  SpaceTimeField u;          // full velocity (background flow included)
  SpaceTimeField background; // free heat flow of the initial data (zero if none)
  int iterations = 0;        // largest sweep count over the time blocks
  int total_sweeps = 0;
  std::vector<int> block_iterations;
  std::vector<double> update_norms;  // relative defect per sweep, all blocks
  double final_update = 0;
  double theta_min = 1.0;            // smallest relaxation factor used
  TimeSeries w_norm, f_norm, p_norm;  // component-summed L2 norms per node
  TimeSeries residual, residual_budget;

  bool converged() const { return status == SolveStatus::converged; }
};

// --- operators ------------------------------------------------------------------

/// (u.grad)u at one node, fused on the padded product grid.
SpectralVectorField convection(const SpectralVectorField& u);
/// (a.grad)b at one node.
SpectralVectorField convection(const SpectralVectorField& a, const SpectralVectorField& b);

/// (u.grad)u per node. `serial` evaluates the nine dealiased products one
/// by one; `parallel` fuses them and distributes nodes over threads.
SpaceTimeField nonlinear_term(const SpaceTimeField& u, Exec exec = Exec::parallel);

/// G(w + grad p(w)); divergence-free, zero at t = 0.
SpaceTimeField recover_velocity(const SpaceTimeField& w, const SolveConfig& cfg);

/// (v.grad)v with v = recover_velocity(w).
SpaceTimeField apply_Kp(const SpaceTimeField& w, const SolveConfig& cfg);
/// (u0.grad)v + (v.grad)u0 with v = recover_velocity(w).
SpaceTimeField apply_K1(const SpaceTimeField& w, const SpaceTimeField& u0,
                        const SolveConfig& cfg);

// --- solves -----------------------------------------------------------------------

/// Damped Picard iteration w <- (1-theta) w + theta (f - s K_p(w)) with
/// causal marching over time blocks. Non-convergence is reported through
/// `status`, never thrown.
SolutionBundle picard_solve(const SpaceTimeField& f, const SolveConfig& cfg);

/// Same with initial data a (div a = 0 checked): u = heat_flow(a) + v.
SolutionBundle solve_inhomogeneous(const SpaceTimeField& f, const SpectralVectorField& a,
                                   const SolveConfig& cfg);

struct ResidualReport {
  TimeSeries residual;
  TimeSeries budget;
};

/// ||u_t - rho Lap u + s (u.grad)u - grad p - f||_{L2} per node with u_t by
/// central differences; budget = Richardson estimate of the difference
/// error plus tolerance * ||w(t)||. Needs Nt >= 4.
ResidualReport nse_residual(const SolutionBundle& b, const SpaceTimeField& f,
                            const SolveConfig& cfg);
/// Residual of an arbitrary (u, grad p) pair; no budget.
TimeSeries nse_residual(const SpaceTimeField& u, const SpaceTimeField& grad_p,
                        const SpaceTimeField& f, const SolveConfig& cfg);

/// ||w - (f - s (K_p + K_1)(w) - s (u0.grad)u0)||_{L2(Q_T)} / ||w||.
double fixed_point_defect(const SolutionBundle& b, const SpaceTimeField& f);

// --- manufactured solutions -----------------------------------------------------------

enum class ManufacturedFamily {
  cyclic_decay,  // eps e^{-lambda t} (sin x2, sin x3, sin x1)
  cyclic_ramp,   // eps t e^{-lambda t} (sin x2, sin x3, sin x1)
};
std::string to_string(ManufacturedFamily f);
ManufacturedFamily parse_manufactured_family(const std::string& s);

struct ManufacturedSpec {
  ManufacturedFamily family = ManufacturedFamily::cyclic_ramp;
  double epsilon = 0.1;
  double decay = 1.0;
  bool include_convection = true;  // false: Stokes-limit forcing
};

struct ManufacturedSolution {
  SpaceTimeField f;
  SpaceTimeField u;
  ScalarSpaceTimeField p;  // zero: the family's convection is divergence-free
  SpectralVectorField initial() const { return u[0]; }
};

ManufacturedSolution manufactured_forcing(const ManufacturedSpec& spec, const SolveConfig& cfg);

/// f = eps t (sin x2, sin x3, sin x1): one mode per component, zero at t = 0.
SpaceTimeField single_mode_forcing(double epsilon, const SolveConfig& cfg);

}  // namespace nsv
