#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nsv/fraccalc.hpp"
#include "nsv/random_fields.hpp"
#include "support.hpp"

namespace nsv {
namespace {

using std::numbers::pi;
using test::sample;

double max_err(const TimeSeries& a, const TimeSeries& b) {
  double m = 0;
  for (int n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
  return m;
}

double sup_norm(const TimeSeries& a) {
  double m = 0;
  for (double v : a.values) m = std::max(m, std::abs(v));
  return m;
}

TEST(FracOrder, Ranges) {
  EXPECT_THROW(FracOrder(0.0), std::invalid_argument);
  EXPECT_THROW(FracOrder(1.0), std::invalid_argument);
  EXPECT_THROW(FracOrder(0.5).require_solver_range(), std::invalid_argument);
  EXPECT_NO_THROW(FracOrder(0.625).require_solver_range());
}

TEST(FracIntegral, ClosedFormsAreExact) {
  const TimeGrid tg{2.0, 20};
  for (double mu : {0.3, 0.625, 0.75}) {
    const FracOrder m(mu);
    const TimeSeries one = frac_integral(sample(tg, [](double) { return 1.0; }), m);
    const TimeSeries lin = frac_integral(sample(tg, [](double t) { return t; }), m);
    for (int n = 0; n < tg.nodes(); ++n) {
      const double t = tg.time(n);
      EXPECT_NEAR(one[n], std::pow(t, 1 - mu) / (1 - mu), 1e-13);
      EXPECT_NEAR(lin[n], std::pow(t, 2 - mu) / ((1 - mu) * (2 - mu)), 1e-13);
    }
  }
}

// Linear interpolation of sqrt on the first cell leaves an O(h^{3/2}) error,
// about 2e-6 at 2048 steps; 1e-6 is reached at 8192.
TEST(FracIntegral, SqrtMatchesSingularQuadratureOracle) {
  const auto& o = test::oracles()["frac_sqrt"];
  const FracOrder m(o["mu"].get<double>());
  auto worst = [&](int steps) {
    const TimeGrid tg{1.0, steps};
    const TimeSeries j = frac_integral(sample(tg, [](double t) { return std::sqrt(t); }), m);
    double e = 0;
    for (std::size_t i = 0; i < o["t"].size(); ++i) {
      const double t = o["t"][i];
      e = std::max(e, std::abs(j[static_cast<int>(std::lround(t * steps))] - o["value"][i].get<double>()));
    }
    return e;
  };
  const double e2048 = worst(2048), e8192 = worst(8192);
  EXPECT_LT(e2048, 1e-5);
  EXPECT_LT(e8192, 1e-6);
  EXPECT_NEAR(std::log2(e2048 / e8192) / 2, 1.5, 0.05);
  for (std::size_t i = 0; i < o["t"].size(); ++i)
    EXPECT_NEAR(o["value"][i].get<double>(),
                beta_function(1.5, 0.375) * std::pow(o["t"][i].get<double>(), 0.875), 1e-12);
}

TEST(FracIntegral, PositivityAndSerialParallel) {
  const TimeGrid tg{1.0, 300};
  Rng rng(1);
  for (int s = 0; s < 10; ++s) {
    const TimeSeries u = sample_signal_abs(random_signal(rng, 1.0), tg);
    const TimeSeries a = frac_integral(u, FracOrder(0.7), Exec::serial);
    const TimeSeries b = frac_integral(u, FracOrder(0.7), Exec::parallel);
    for (int n = 0; n < tg.nodes(); ++n) {
      EXPECT_GE(a[n], 0.0);
      EXPECT_NEAR(a[n], b[n], 1e-14 * std::abs(a[n]) + 1e-15);
    }
  }
}

TEST(KernelIntegral, ArbitraryTimeMatchesNodes) {
  const TimeGrid tg{1.0, 10};
  const TimeSeries u = sample(tg, [](double t) { return 1 + t * t; });
  const TimeSeries k = kernel_integral(u, 0.375);
  EXPECT_NEAR(kernel_integral_at(u, 0.375, 0.7), k[7], 1e-14);
  EXPECT_THROW(kernel_integral(u, -1.5), std::invalid_argument);
}

TEST(AbelInvert, ClosedForms) {
  const TimeGrid tg{1.0, 64};
  const FracOrder m(0.625);
  const TimeSeries u = abel_invert(sample(tg, [](double t) { return std::pow(t, 0.375) / 0.375; }), m);
  for (int n = 0; n < tg.nodes(); ++n) EXPECT_NEAR(u[n], 1.0, 1e-12);
  const TimeSeries z = abel_invert(TimeSeries(tg), m);
  EXPECT_EQ(sup_norm(z), 0.0);
}

TEST(AbelInvert, RoundtripSinAtFineGrid) {
  const TimeGrid tg{1.0, 2048};
  for (double mu : {0.625, 0.75}) {
    const FracOrder m(mu);
    for (auto fn : {+[](double) { return 1.0; }, +[](double t) { return t; },
                    +[](double t) { return std::sin(3 * t); }}) {
      const TimeSeries u = sample(tg, fn);
      EXPECT_LT(max_err(abel_invert(frac_integral(u, m), m), u), 1e-4);
    }
  }
}

TEST(AbelInvert, RoundtripErrorShrinksUnderRefinement) {
  const FracOrder m(0.625);
  auto err = [&](int steps) {
    const TimeGrid tg{1.0, steps};
    const TimeSeries u = sample(tg, [](double t) { return std::cos(2 * t) + t * t * t; });
    return max_err(abel_invert(frac_integral(u, m), m), u);
  };
  const double e1 = err(64), e2 = err(128);
  EXPECT_LE(e2, e1 * 0.5 + 1e-13);
}

TEST(AbelInvert, DirectFormulaAgreesAwayFromOrigin) {
  const TimeGrid tg{1.0, 1024};
  const FracOrder m(0.625);
  const TimeSeries u = sample(tg, [](double t) { return std::sin(3 * t); });
  const TimeSeries d = abel_formula_direct(frac_integral(u, m), m);
  for (int n = 100; n < tg.steps; n += 100) EXPECT_NEAR(d[n], u[n], 1e-3);
}

TEST(AbelInvert, NonzeroStartRejected) {
  const TimeGrid tg{1.0, 16};
  EXPECT_THROW(abel_invert(sample(tg, [](double) { return 1.0; }), FracOrder(0.625)),
               std::domain_error);
}

TEST(Composition, GammaConstants) {
  EXPECT_NEAR(composition_constant(0.5, 0.5).value, pi, 1e-13);
  for (double mu : {0.2, 0.625, 0.9})
    EXPECT_NEAR(composition_constant(mu, 1 - mu).value, pi / std::sin(pi * mu), 1e-12);
}

TEST(Composition, NestedIntegralMatchesOracle) {
  const TimeGrid tg{1.0, 1024};
  const TimeSeries one = sample(tg, [](double) { return 1.0; });
  const TimeSeries nested = frac_integral(frac_integral(one, FracOrder(0.3)), FracOrder(0.6));
  const double expect = test::oracles()["composition_06_03"]["value"];
  EXPECT_LT(std::abs(nested[tg.steps] - expect) / expect, 1e-4);
  const double closed = composition_constant(0.6, 0.3).value / 1.1;  // int_0^1 (1-s)^{0.1}
  EXPECT_NEAR(closed, expect, 1e-12);
}

TEST(Composition, HalfHalfIsPiT) {
  const TimeGrid tg{1.0, 1024};
  const TimeSeries one = sample(tg, [](double) { return 1.0; });
  const TimeSeries nested = frac_integral(frac_integral(one, FracOrder(0.5)), FracOrder(0.5));
  double worst = 0;
  for (int n = 0; n < tg.nodes(); ++n) worst = std::max(worst, std::abs(nested[n] - pi * tg.time(n)));
  EXPECT_LT(worst / pi, 1e-3);
}

TEST(Composition, SemigroupOnRandomSignals) {
  const TimeGrid tg{1.0, 1024};
  Rng rng(3);
  for (int s = 0; s < 20; ++s) {
    const TimeSeries g = sample_signal_abs(random_signal(rng, 1.0), tg);
    const TimeSeries nested = frac_integral(frac_integral(g, FracOrder(0.4)), FracOrder(0.35));
    const TimeSeries direct = kernel_integral(g, 1 - 0.75);
    const double c = composition_constant(0.35, 0.4).value;
    double worst = 0;
    for (int n = 0; n < tg.nodes(); ++n) worst = std::max(worst, std::abs(nested[n] - c * direct[n]));
    EXPECT_LT(worst / (c * sup_norm(direct)), 1e-3) << "draw " << s;
  }
}

TEST(FMu, ZeroAndUnitIdentity) {
  const TimeGrid tg{1.0, 512};
  const FracOrder m(0.625);
  EXPECT_EQ(sup_norm(f_mu_transform(TimeSeries(tg), m)), 0.0);
  const TimeSeries fsq = sample(tg, [](double t) { return std::pow(t, 0.625) / 0.625; });
  const TimeSeries F = f_mu_transform(fsq, m);
  for (int n = 0; n < tg.nodes(); n += 32) EXPECT_NEAR(F[n], 2 * tg.time(n), 2e-3);
  TimeSeries neg(tg);
  neg[3] = -1;
  EXPECT_THROW(f_mu_transform(neg, m), std::invalid_argument);
}

TEST(FMu, SampleLplusClosedFormAndZero) {
  const TimeGrid tg{1.0, 64};
  const FracOrder m(0.625);
  const TimeSeries s = sample_Lplus(sample(tg, [](double) { return 1.0; }), m);
  for (int n = 0; n < tg.nodes(); ++n) EXPECT_NEAR(s[n], std::pow(tg.time(n), 0.625) / 0.625, 1e-13);
  EXPECT_EQ(sup_norm(sample_Lplus(TimeSeries(tg), m)), 0.0);
}

TEST(FMu, RandomSquaresGiveTwiceIntegralAndMonotone) {
  const TimeGrid tg{1.0, 1024};
  const FracOrder m(0.625);
  Rng rng(5);
  for (int s = 0; s < 20; ++s) {
    const TimeSeries g = sample_signal_abs(random_signal(rng, 1.0), tg);
    TimeSeries g2(tg);
    for (int n = 0; n < tg.nodes(); ++n) g2[n] = g[n] * g[n];
    const TimeSeries F = f_mu_transform(sample_Lplus(g, m), m);
    TimeSeries ref = cumulative_trapezoid(g2);
    for (double& v : ref.values) v *= 2;
    EXPECT_LT(max_err(F, ref) / sup_norm(ref), 1e-3);
    for (int n = 1; n < tg.nodes(); ++n) EXPECT_GE(F[n], F[n - 1]);
  }
}

TEST(HardyLittlewood, Exponent) {
  EXPECT_DOUBLE_EQ(hl_exponent(2.0, FracOrder(0.625)), 8.0);
  EXPECT_NEAR(hl_exponent(2.0, FracOrder(1 - 1e-9)), 2.0, 1e-7);
  EXPECT_GT(hl_exponent(2.0 - 1e-9, FracOrder(0.5)), 1e8);
  EXPECT_THROW(hl_exponent(2.0, FracOrder(0.5)), std::invalid_argument);
  EXPECT_THROW(hl_exponent(1.0, FracOrder(0.625)), std::invalid_argument);
}

TEST(BetaGap, ThresholdMatchesQuadratureOracle) {
  const auto& o = test::oracles()["beta_threshold"];
  const FracOrder m(o["mu"].get<double>());
  const double thr = beta_gap_threshold(o["b1"], o["s"], m);
  EXPECT_NEAR(thr, o["value"].get<double>(), 1e-12);
  EXPECT_LT(beta_gap(1.0, thr * (1 + 1e-9), 0.1, m), 0.0);
  EXPECT_GT(beta_gap(1.0, thr * (1 - 1e-9), 0.1, m), 0.0);
  EXPECT_DOUBLE_EQ(beta_gap(1.5, 0.0, 0.1, m), 2 * 1.5 * 1.5);
  const double g0 = beta_gap(1.0, 1.0, 0.1, m), g1 = beta_gap(1.0, 2.0, 0.1, m),
               g2 = beta_gap(1.0, 3.0, 0.1, m);
  EXPECT_LT(g1, g0);
  EXPECT_NEAR(g2 - g1, g1 - g0, 1e-14);
  EXPECT_THROW(beta_gap(1.0, 1.0, 0.5, m), std::invalid_argument);
}

TEST(CellWeights, SumToCellIntegral) {
  for (double g : {-0.625, -0.3, 0.375})
    for (double lo : {0.0, 1.0, 7.0}) {
      const auto [far, near] = detail::cell_weights(lo, g);
      const double whole = (std::pow(lo + 1, g + 1) - std::pow(lo, g + 1)) / (g + 1);
      EXPECT_NEAR(far + near, whole, 1e-14 * whole);
      EXPECT_GT(far, 0);
      EXPECT_GT(near, 0);
    }
}

}  // namespace
}  // namespace nsv
