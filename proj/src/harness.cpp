#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "nsv/fraccalc.hpp"
#include "nsv/inequalities.hpp"
#include "nsv/random_fields.hpp"

namespace nsv {

void HarnessConfig::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument("harness: " + m); };
  if (samples < 1) fail("samples must be positive");
  if (!(mu > 0 && mu < 1)) fail("mu must lie in (0, 1)");
  if (!(p > 1 && p * (1 - mu) < 1)) fail("need 1 < p < 1/(1-mu)");
  if (!(lambda > 0 && lambda * p < 3)) fail("need 0 < lambda < 3/p");
  if (hl_steps < 2) fail("hl_steps must be at least 2");
  if (sobolev_grid < 2 || 2 * sobolev_grid > 24) fail("sobolev_grid must lie in [2, 12]");
  if (!(sobolev_box > 0)) fail("sobolev_box must be positive");
  if (mixed_samples < 1 || mixed_modes < 1 || mixed_steps < 2)
    fail("mixed harness sizes must be positive");
  if (!(rho > 0)) fail("rho must be positive");
  if (!(tolerance > 0)) fail("tolerance must be positive");
}

namespace {

HarnessResult compare(std::string id, double coarse, double fine, double tol) {
  HarnessResult r;
  r.id = std::move(id);
  r.coarse = coarse;
  r.fine = fine;
  r.relative_change = std::abs(fine - coarse) / std::max(std::abs(coarse), 1e-300);
  r.stable = std::isfinite(coarse) && std::isfinite(fine) && r.relative_change <= tol;
  return r;
}

// Smooth test function on the cube [0, L]^3: a few random cosines plus a
// Gaussian bump, so every draw is continuous and refinement converges.
struct BoxFunction {
  std::vector<std::array<double, 3>> wave;
  std::vector<double> amp, phase;
  std::array<double, 3> centre{};
  double width = 0.2, bump = 0;

  double operator()(double x, double y, double z) const {
    double v = 0;
    for (std::size_t m = 0; m < amp.size(); ++m)
      v += amp[m] * std::cos(wave[m][0] * x + wave[m][1] * y + wave[m][2] * z + phase[m]);
    const double r2 = (x - centre[0]) * (x - centre[0]) + (y - centre[1]) * (y - centre[1]) +
                      (z - centre[2]) * (z - centre[2]);
    return v + bump * std::exp(-r2 / (2 * width * width));
  }
};

BoxFunction random_box_function(Rng& rng, double box) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::uniform_int_distribution<int> wavenum(-2, 2);
  BoxFunction f;
  const int terms = 4;
  for (int m = 0; m < terms; ++m) {
    const double k = 2 * std::numbers::pi / box;
    f.wave.push_back({k * wavenum(rng), k * wavenum(rng), k * wavenum(rng)});
    f.amp.push_back(gauss(rng));
    f.phase.push_back(2 * std::numbers::pi * uni(rng));
  }
  for (double& c : f.centre) c = box * (0.2 + 0.6 * uni(rng));
  f.width = box * (0.12 + 0.2 * uni(rng));
  f.bump = 3 * gauss(rng);
  return f;
}

double grid_lp(const GridSamples& g, double p, double dv) {
  double s = 0;
  for (double v : g.values) s += std::pow(std::abs(v), p);
  return std::pow(s * dv, 1.0 / p);
}

double sobolev_sup(const std::vector<BoxFunction>& draws, const HarnessConfig& cfg, int n,
                   double q) {
  DomainSpec d;
  d.length = {cfg.sobolev_box, cfg.sobolev_box, cfg.sobolev_box};
  d.modes = {0, 0, 0};
  d.grid = {n, n, n};
  const double h = cfg.sobolev_box / n;
  const double dv = h * h * h;
  double best = 0;
  for (const BoxFunction& fn : draws) {
    GridSamples f{d, {n, n, n}, std::vector<double>(static_cast<std::size_t>(n) * n * n)};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          f.values[f.index(i, j, k)] = fn((i + 0.5) * h, (j + 0.5) * h, (k + 0.5) * h);
    const GridSamples u = sobolev_potential(f, cfg.lambda);
    best = std::max(best, grid_lp(u, q, dv) / grid_lp(f, cfg.p, dv));
  }
  return best;
}

}  // namespace

HarnessResult hardy_littlewood_harness(const HarnessConfig& cfg) {
  cfg.validate();
  const FracOrder order(cfg.mu);
  const double q = hl_exponent(cfg.p, order);
  Rng rng(cfg.seed);
  std::vector<RandomSignal> draws;
  for (int s = 0; s < cfg.samples; ++s) draws.push_back(random_signal(rng, 1.0));
  auto sup = [&](int steps) {
    const TimeGrid tg{1.0, steps};
    double best = 0;
    for (const RandomSignal& d : draws) {
      const TimeSeries u = sample_signal(d, tg);
      const double den = time_lp_norm(u, cfg.p);
      if (den > 0) best = std::max(best, time_lp_norm(frac_integral(u, order), q) / den);
    }
    return best;
  };
  HarnessResult r = compare("hardy_littlewood", sup(cfg.hl_steps), sup(2 * cfg.hl_steps),
                            cfg.tolerance);
  r.exponent = q;
  return r;
}

HarnessResult sobolev_harness(const HarnessConfig& cfg) {
  cfg.validate();
  const double q = 1.0 / (1.0 / cfg.p - cfg.lambda / 3.0);
  Rng rng(cfg.seed ^ 0x5b5b5b5bULL);
  std::vector<BoxFunction> draws;
  for (int s = 0; s < cfg.samples; ++s) draws.push_back(random_box_function(rng, cfg.sobolev_box));
  HarnessResult r = compare("sobolev_potential", sobolev_sup(draws, cfg, cfg.sobolev_grid, q),
                            sobolev_sup(draws, cfg, 2 * cfg.sobolev_grid, q), cfg.tolerance);
  r.exponent = q;
  return r;
}

std::vector<HarnessResult> green_mixed_norm_harness(const HarnessConfig& cfg) {
  cfg.validate();
  const HeatParams hp{cfg.rho};
  const DomainSpec d = DomainSpec::cube(cfg.mixed_modes);
  auto sup = [&](int steps) {
    const TimeGrid tg{1.0, steps};
    double value = 0, grad = 0;
    for (int s = 0; s < cfg.mixed_samples; ++s) {
      Rng rng(cfg.seed + 7919ULL * s);
      const SpaceTimeField g = random_space_time_field(tg, d, rng);
      const double den = l2_norm(g);
      value = std::max(value, mixed_norm(heat_solve(g, hp), 12.0, 8.0) / den);
      double gx = 0;
      for (Axis ax : kAxes) gx += mixed_norm(grad_green(g, hp, ax), 12.0 / 5.0, 8.0);
      grad = std::max(grad, gx / den);
    }
    return std::pair{value, grad};
  };
  const auto [v0, g0] = sup(cfg.mixed_steps);
  const auto [v1, g1] = sup(2 * cfg.mixed_steps);
  HarnessResult a = compare("green_L12_8", v0, v1, cfg.tolerance);
  a.exponent = 12;
  HarnessResult b = compare("green_grad_L12_5_8", g0, g1, cfg.tolerance);
  b.exponent = 12.0 / 5.0;
  return {a, b};
}

HarnessResult bilinear_pair_harness(const HarnessConfig& cfg) {
  cfg.validate();
  const HeatParams hp{cfg.rho};
  const DomainSpec d = DomainSpec::cube(cfg.mixed_modes);
  auto sup = [&](int steps) {
    const TimeGrid tg{1.0, steps};
    double best = 0;
    for (int s = 0; s < cfg.mixed_samples; ++s) {
      Rng rng(cfg.seed + 104729ULL * s);
      const SpaceTimeField g1 = random_space_time_field(tg, d, rng);
      const SpaceTimeField g2 = random_space_time_field(tg, d, rng);
      best = std::max(best, check_bilinear_pair(g1, g2, cfg.mu, hp).constants.at("c"));
    }
    return best;
  };
  return compare("bilinear_pair", sup(cfg.mixed_steps), sup(2 * cfg.mixed_steps), cfg.tolerance);
}

std::vector<HarnessResult> boundedness_harnesses(const HarnessConfig& cfg) {
  std::vector<HarnessResult> out{hardy_littlewood_harness(cfg), sobolev_harness(cfg)};
  for (HarnessResult& r : green_mixed_norm_harness(cfg)) out.push_back(std::move(r));
  out.push_back(bilinear_pair_harness(cfg));
  return out;
}

}  // namespace nsv
