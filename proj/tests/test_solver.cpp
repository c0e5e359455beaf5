#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nsv/projection.hpp"
#include "nsv/random_fields.hpp"
#include "nsv/solver.hpp"
#include "support.hpp"

namespace nsv {
namespace {

using test::max_abs_diff;

SolveConfig small_config(int modes = 4, int steps = 16, double horizon = 1.0) {
  SolveConfig c;
  c.domain = DomainSpec::cube(modes);
  c.time = TimeGrid{horizon, steps};
  return c;
}

// (u.grad)u evaluated pointwise on a grid that holds the quadratic product
// without aliasing, then transformed back: no padding, no fused FFTs.
SpectralVectorField physical_convection(const SpectralVectorField& u) {
  const DomainSpec& d = u.domain();
  std::array<GridSamples, 3> uj;
  std::array<std::array<GridSamples, 3>, 3> du;
  for (int j = 0; j < 3; ++j) {
    uj[j] = to_physical(u[j]);
    for (int i = 0; i < 3; ++i) du[i][j] = to_physical(derivative(u[i], static_cast<Axis>(j)));
  }
  SpectralVectorField out(d);
  for (int i = 0; i < 3; ++i) {
    GridSamples g = uj[0];
    for (std::size_t p = 0; p < g.values.size(); ++p) {
      double s = 0;
      for (int j = 0; j < 3; ++j) s += uj[j].values[p] * du[i][j].values[p];
      g.values[p] = s;
    }
    out[i] = to_spectral(g, d);
  }
  return out;
}

SpectralVectorField low_mode_vector(const DomainSpec& d, Rng& rng, int m) {
  std::normal_distribution<double> g;
  SpectralVectorField v(d);
  for (int i = 0; i < 3; ++i)
    for (int a = -m; a <= m; ++a)
      for (int b = -m; b <= m; ++b)
        for (int c = -m; c <= m; ++c) v[i].set_mode(a, b, c, {g(rng), g(rng)});
  return v;
}

TEST(Convection, TrivialCases) {
  const DomainSpec d = DomainSpec::cube(3);
  SpectralVectorField c(d);
  for (int i = 0; i < 3; ++i) c[i].at(0, 0, 0) = 1.0 + i;
  EXPECT_LT(convection(c).max_abs(), 1e-16);
  SpectralVectorField s(d);
  s[0].add_sin(0, 1, 0, 1.0);
  EXPECT_LT(convection(s).max_abs(), 1e-16);
}

TEST(Convection, TaylorGreenClosedForm) {
  const DomainSpec d = DomainSpec::cube(4);
  SpectralVectorField u(d);  // (sin x1 cos x2, -cos x1 sin x2, 0)
  u[0].add_sin(1, 1, 0, 0.5);
  u[0].add_sin(1, -1, 0, 0.5);
  u[1].add_sin(1, 1, 0, -0.5);
  u[1].add_sin(-1, 1, 0, -0.5);
  SpectralVectorField expect(d);  // (sin 2x1, sin 2x2, 0) / 2
  expect[0].add_sin(2, 0, 0, 0.5);
  expect[1].add_sin(0, 2, 0, 0.5);
  EXPECT_LT(max_abs_diff(convection(u), expect), 1e-15);
  EXPECT_LT(max_abs_diff(physical_convection(u), expect), 1e-15);
}

TEST(Convection, MatchesPhysicalGridOracle) {
  const DomainSpec d = DomainSpec::cube(4);  // M = 10: products of |k| <= 2 fields are exact
  Rng rng(1);
  for (int s = 0; s < 5; ++s) {
    const SpectralVectorField u = low_mode_vector(d, rng, 2);
    EXPECT_LT(max_abs_diff(convection(u), physical_convection(u)), 1e-12);
  }
}

TEST(Convection, FusedAndSerialPathsAgree) {
  const DomainSpec d = DomainSpec::cube(5);
  Rng rng(2);
  const SpaceTimeField u = random_space_time_field(TimeGrid{1.0, 4}, d, rng);
  EXPECT_LT(max_abs_diff(nonlinear_term(u, Exec::serial), nonlinear_term(u, Exec::parallel)), 1e-14);
  const SpectralVectorField a = random_vector_field(d, rng), b = random_vector_field(d, rng);
  SpectralVectorField two(d);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      two[i] += pointwise_product(a[j], derivative(b[i], static_cast<Axis>(j)));
  EXPECT_LT(max_abs_diff(convection(a, b), two), 1e-14);
}

TEST(Kp, ZeroAndQuadraticScaling) {
  const SolveConfig cfg = small_config();
  EXPECT_EQ(test::max_abs(apply_Kp(SpaceTimeField(cfg.time, cfg.domain), cfg)), 0.0);
  Rng rng(3);
  const SpaceTimeField w = random_space_time_field(cfg.time, cfg.domain, rng);
  const double n1 = l2_norm(apply_Kp(1e-3 * w, cfg));
  const double n2 = l2_norm(apply_Kp(2e-3 * w, cfg));
  EXPECT_NEAR(n2 / n1, 4.0, 0.04);
}

TEST(Kp, MatchesHandComposedPipeline) {
  const SolveConfig cfg = small_config(3, 8);
  SpaceTimeField w(cfg.time, cfg.domain);
  for (int n = 0; n < cfg.time.nodes(); ++n) {
    w[n][0].add_cos(1, 1, 0, cfg.time.time(n));
    w[n][2].add_sin(0, 1, 2, 0.5);
  }
  SpaceTimeField projected(cfg.time, cfg.domain);
  for (int n = 0; n < cfg.time.nodes(); ++n) projected[n] = leray_project(w[n]);
  const SpaceTimeField v = heat_solve(projected, cfg.heat());
  SpaceTimeField expect(cfg.time, cfg.domain);
  for (int n = 0; n < cfg.time.nodes(); ++n) expect[n] = convection(v[n]);
  EXPECT_LT(max_abs_diff(apply_Kp(w, cfg), expect), 1e-15);
}

TEST(RecoverVelocity, ZeroAndConstantSolenoidalMode) {
  SolveConfig cfg = small_config(2, 8);
  cfg.rho = 0.5;
  EXPECT_EQ(test::max_abs(recover_velocity(SpaceTimeField(cfg.time, cfg.domain), cfg)), 0.0);
  SpaceTimeField w(cfg.time, cfg.domain);
  for (auto& s : w.snapshots) s[0].add_sin(0, 1, 1, 1.0);  // independent of x1: divergence-free
  const SpaceTimeField u = recover_velocity(w, cfg);
  for (int n = 0; n < cfg.time.nodes(); ++n) {
    const double lam = cfg.rho * 2;
    const double expect = -0.5 * (1 - std::exp(-lam * cfg.time.time(n))) / lam;
    EXPECT_NEAR(u[n][0].at(0, 1, 1).imag(), expect, 1e-15);
  }
}

TEST(RecoverVelocity, DivergenceFreeFromZero) {
  const SolveConfig cfg = small_config(6, 8);
  Rng rng(4);
  const SpaceTimeField u = recover_velocity(random_space_time_field(cfg.time, cfg.domain, rng), cfg);
  EXPECT_EQ(u[0].max_abs(), 0.0);
  for (const auto& s : u.snapshots) EXPECT_LT(divergence(s).max_abs(), 1e-12);
}

TEST(Picard, ZeroForcingConvergesImmediately) {
  const SolveConfig cfg = small_config(3, 8);
  const SolutionBundle b = picard_solve(SpaceTimeField(cfg.time, cfg.domain), cfg);
  EXPECT_TRUE(b.converged());
  EXPECT_EQ(b.iterations, 1);
  EXPECT_EQ(test::max_abs(b.w), 0.0);
  EXPECT_EQ(test::max_abs(b.u), 0.0);
  for (double r : b.residual.values) EXPECT_EQ(r, 0.0);
}

TEST(Picard, PerturbationOrder) {
  const SolveConfig cfg = small_config(4, 16);
  auto ratio = [&](double eps) {
    const SpaceTimeField f = single_mode_forcing(eps, cfg);
    const SolutionBundle b = picard_solve(f, cfg);
    EXPECT_TRUE(b.converged());
    const double fn = l2_norm(f);
    return l2_norm(b.w - f) / (fn * fn);
  };
  const double r1 = ratio(1e-3), r2 = ratio(5e-4);
  EXPECT_GT(r1, 0);
  EXPECT_NEAR(r2 / r1, 1.0, 0.01);
}

SpaceTimeField small_random_forcing(const SolveConfig& cfg, std::uint64_t seed, double amp) {
  Rng rng(seed);
  return random_space_time_field(cfg.time, cfg.domain, rng, amp, 3, true);
}

TEST(Picard, CausalityUnderTruncation) {
  const SolveConfig cfg = small_config(4, 32);
  const SpaceTimeField f = small_random_forcing(cfg, 5, 0.5);
  SpaceTimeField cut = f;
  for (int n = 17; n < cfg.time.nodes(); ++n) cut[n] = SpectralVectorField(cfg.domain);
  const SolutionBundle a = picard_solve(f, cfg), b = picard_solve(cut, cfg);
  ASSERT_TRUE(a.converged() && b.converged());
  double diff = 0;
  for (int n = 0; n <= 16; ++n) diff = std::max(diff, max_abs_diff(a.w[n], b.w[n]));
  EXPECT_LT(diff, 1e-15 * test::max_abs(a.w));
}

TEST(Picard, BundleInvariants) {
  SolveConfig cfg = small_config(6, 16);
  const SpaceTimeField f = small_random_forcing(cfg, 6, 0.5);
  const SolutionBundle b = picard_solve(f, cfg);
  ASSERT_TRUE(b.converged());
  EXPECT_EQ(b.u[0].max_abs(), 0.0);
  for (int n = 0; n < cfg.time.nodes(); ++n) {
    EXPECT_LT(divergence(b.u[n]).max_abs(), 1e-12);
    EXPECT_LT(divergence(b.w[n] + b.grad_p[n]).max_abs(), 1e-13);
    EXPECT_LT(max_abs_diff(gradient(b.p.snapshots[n]), b.grad_p[n]), 1e-15);
  }
  EXPECT_LE(fixed_point_defect(b, f), cfg.tolerance);
  EXPECT_EQ(b.block_iterations.size(), 1u);  // gcd(16, 16): one block
  EXPECT_EQ(b.total_sweeps, static_cast<int>(b.update_norms.size()));
  EXPECT_LT(b.final_update, cfg.tolerance);
}

TEST(Picard, ResidualWithinBudget) {
  SolveConfig cfg = small_config(6, 32);
  const SpaceTimeField f = small_random_forcing(cfg, 7, 0.5);
  const SolutionBundle b = picard_solve(f, cfg);
  ASSERT_TRUE(b.converged());
  for (int n = 0; n < cfg.time.nodes(); ++n) EXPECT_LE(b.residual[n], 3 * b.residual_budget[n]);
}

TEST(Picard, SerialAndParallelAgree) {
  SolveConfig cfg = small_config(4, 8);
  const SpaceTimeField f = small_random_forcing(cfg, 8, 0.5);
  const SolutionBundle p = picard_solve(f, cfg);
  cfg.exec = Exec::serial;
  const SolutionBundle s = picard_solve(f, cfg);
  EXPECT_LT(max_abs_diff(p.w, s.w), 1e-14);
  EXPECT_EQ(p.iterations, s.iterations);
}

TEST(Picard, AlternateSignFlipsConvection) {
  SolveConfig cfg = small_config(4, 16);
  const SpaceTimeField f = single_mode_forcing(0.01, cfg);
  const SolutionBundle std_b = picard_solve(f, cfg);
  cfg.sign = SignConvention::paper;
  const SolutionBundle paper_b = picard_solve(f, cfg);
  // w - f = -s Kp(f) + O(eps^3): the quadratic parts cancel
  EXPECT_LT(l2_norm((std_b.w - f) + (paper_b.w - f)), 1e-2 * l2_norm(std_b.w - f));
  EXPECT_EQ(parse_sign_convention("paper"), SignConvention::paper);
  EXPECT_THROW(parse_sign_convention("other"), std::invalid_argument);
}

TEST(Picard, LargeForcingReportsNonConvergence) {
  SolveConfig cfg = small_config(4, 16);
  cfg.max_iterations = 2;
  const SolutionBundle b = picard_solve(small_random_forcing(cfg, 9, 200.0), cfg);
  EXPECT_FALSE(b.converged());
  EXPECT_GT(b.final_update, cfg.tolerance);
}

TEST(SolveConfig, Validation) {
  SolveConfig c = small_config();
  EXPECT_NO_THROW(c.validate());
  c.tolerance = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small_config();
  c.relaxation = 1.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small_config();
  c.block_steps = 5;  // does not divide 16
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small_config(4, 24);
  EXPECT_EQ(c.block_length(), 8);
}

TEST(Inhomogeneous, ZeroInitialDataReducesBitForBit) {
  const SolveConfig cfg = small_config(4, 16);
  const SpaceTimeField f = small_random_forcing(cfg, 10, 0.5);
  const SolutionBundle a = picard_solve(f, cfg);
  const SolutionBundle b = solve_inhomogeneous(f, SpectralVectorField(cfg.domain), cfg);
  EXPECT_EQ(max_abs_diff(a.w, b.w), 0.0);
  EXPECT_EQ(max_abs_diff(a.u, b.u), 0.0);
  EXPECT_EQ(a.update_norms, b.update_norms);
  EXPECT_EQ(a.residual.values, b.residual.values);
}

TEST(Inhomogeneous, InitialValueAndPerturbationOrder) {
  const SolveConfig cfg = small_config(4, 16);
  Rng rng(11);
  const SpectralVectorField a = random_vector_field(cfg.domain, rng, 1.0, 2.0, true);
  const SpaceTimeField zero(cfg.time, cfg.domain);
  auto ratio = [&](double amp) {
    const SolutionBundle b = solve_inhomogeneous(zero, amp * a, cfg);
    EXPECT_TRUE(b.converged());
    EXPECT_LT(max_abs_diff(b.u[0], amp * a), 1e-16);
    return l2_norm(b.u - b.background) / (amp * amp);
  };
  EXPECT_NEAR(ratio(1e-3) / ratio(5e-4), 1.0, 0.01);
}

TEST(Inhomogeneous, RejectsDivergentData) {
  const SolveConfig cfg = small_config(3, 8);
  SpectralVectorField a(cfg.domain);
  a[0].add_sin(1, 0, 0, 1.0);
  EXPECT_THROW(solve_inhomogeneous(SpaceTimeField(cfg.time, cfg.domain), a, cfg),
               std::invalid_argument);
}

TEST(Manufactured, ZeroAmplitudeAndDivergence) {
  const SolveConfig cfg = small_config(8, 8);
  ManufacturedSpec spec;
  spec.epsilon = 0;
  const ManufacturedSolution z = manufactured_forcing(spec, cfg);
  EXPECT_EQ(test::max_abs(z.f), 0.0);
  EXPECT_EQ(test::max_abs(z.u), 0.0);
  spec.epsilon = 0.1;
  for (ManufacturedFamily fam : {ManufacturedFamily::cyclic_decay, ManufacturedFamily::cyclic_ramp}) {
    spec.family = fam;
    const ManufacturedSolution m = manufactured_forcing(spec, cfg);
    for (const auto& s : m.u.snapshots) EXPECT_EQ(divergence(s).max_abs(), 0.0);
  }
  EXPECT_THROW(parse_manufactured_family("vortex"), std::invalid_argument);
}

TEST(Manufactured, StokesLimitReproducedByHeatSolve) {
  auto err = [](int steps) {
    const SolveConfig cfg = small_config(2, steps);
    ManufacturedSpec spec;
    spec.include_convection = false;
    const ManufacturedSolution m = manufactured_forcing(spec, cfg);
    return l2_norm(heat_solve(m.f, cfg.heat()) - m.u) / l2_norm(m.u);
  };
  const double e32 = err(32), e64 = err(64);
  EXPECT_LT(e64, 1e-4);
  EXPECT_GE(e32 / e64, 3.5);
}

TEST(Manufactured, ExactPairResidualIsSecondOrder) {
  auto worst = [](int steps) {
    const SolveConfig cfg = small_config(2, steps);
    const ManufacturedSolution m = manufactured_forcing(ManufacturedSpec{}, cfg);
    const TimeSeries r = nse_residual(m.u, SpaceTimeField(cfg.time, cfg.domain), m.f, cfg);
    double w = 0;
    for (double v : r.values) w = std::max(w, v);
    return w;
  };
  const double r16 = worst(16), r32 = worst(32);
  EXPECT_GT(r16, 0);
  EXPECT_GE(r16 / r32, 3.5);
}

TEST(Manufactured, PicardConvergesAtSecondOrder) {
  auto err = [](int steps) {
    SolveConfig cfg = small_config(8, steps);
    const ManufacturedSolution m = manufactured_forcing(ManufacturedSpec{}, cfg);
    const SolutionBundle b = picard_solve(m.f, cfg);
    EXPECT_TRUE(b.converged());
    return l2_norm(b.u - m.u);
  };
  EXPECT_GE(err(32) / err(64), 3.5);
}

TEST(Manufactured, DecayFamilyReproducedToRoundOff) {
  SolveConfig cfg = small_config(8, 16);
  ManufacturedSpec spec;
  spec.family = ManufacturedFamily::cyclic_decay;
  const ManufacturedSolution m = manufactured_forcing(spec, cfg);
  const SolutionBundle b = solve_inhomogeneous(m.f, m.initial(), cfg);
  ASSERT_TRUE(b.converged());
  EXPECT_LT(l2_norm(b.u - m.u), 1e-13);
}

TEST(Residual, ZeroFields) {
  const SolveConfig cfg = small_config(2, 8);
  const SpaceTimeField z(cfg.time, cfg.domain);
  for (double r : nse_residual(z, z, z, cfg).values) EXPECT_EQ(r, 0.0);
}

}  // namespace
}  // namespace nsv
