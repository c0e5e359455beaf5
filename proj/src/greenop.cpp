#include "nsv/greenop.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "quadrature.hpp"

namespace nsv {

namespace {

std::vector<double> wavenumber_squared(const DomainSpec& d) {
  std::vector<double> k2(d.coeff_count());
  const auto& n = d.modes;
  std::size_t i = 0;
  for (int a = -n[0]; a <= n[0]; ++a)
    for (int b = -n[1]; b <= n[1]; ++b)
      for (int c = -n[2]; c <= n[2]; ++c)
        k2[i++] = std::pow(d.wavenumber(0, a), 2) + std::pow(d.wavenumber(1, b), 2) +
                  std::pow(d.wavenumber(2, c), 2);
  return k2;
}

struct StepWeights {
  double decay;    // e^{-z}
  double w_start;  // weight of f_n, over h
  double w_end;    // weight of f_{n+1}, over h
};

// int_0^1 e^{-zr} {r, 1-r} dr for z = lambda h >= 0.
StepWeights step_weights(double z) {
  if (z == 0) return {1.0, 0.5, 0.5};
  const double phi1 = -std::expm1(-z) / z;
  double phir;
  if (z < 0.5) {
    // sum_m (-z)^m / (m! (m+2))
    double term = 1, sum = 0;
    for (int m = 0; m < 30; ++m) {
      sum += term / (m + 2);
      term *= -z / (m + 1);
    }
    phir = sum;
  } else {
    phir = (1 - std::exp(-z) * (1 + z)) / (z * z);
  }
  return {std::exp(-z), phir, phi1 - phir};
}

void check_forcing(const SpaceTimeField& f) {
  f.validate();
}

}  // namespace

void HeatParams::validate() const {
  if (!(rho > 0) || !std::isfinite(rho)) throw std::invalid_argument("viscosity rho must be positive");
}

void heat_march(const SpaceTimeField& forcing, const HeatParams& hp, SpaceTimeField& state,
                int from, int to, Exec exec) {
  hp.validate();
  if (!(state.grid == forcing.grid)) throw std::invalid_argument("time grids differ");
  if (from < 0 || to > forcing.grid.steps || from > to)
    throw std::out_of_range("invalid marching range");
  const DomainSpec& d = forcing.domain();
  const std::vector<double> k2 = wavenumber_squared(d);
  const double h = forcing.grid.step();
  const std::size_t nc = k2.size();
  std::vector<StepWeights> sw(nc);
  for (std::size_t c = 0; c < nc; ++c) sw[c] = step_weights(hp.rho * k2[c] * h);

  auto advance = [&](std::size_t flat) {
    const int comp = static_cast<int>(flat / nc);
    const std::size_t c = flat % nc;
    const StepWeights& w = sw[c];
    Complex u = state[from][comp].coeffs()[c];
    for (int n = from; n < to; ++n) {
      const Complex f0 = forcing[n][comp].coeffs()[c];
      const Complex f1 = forcing[n + 1][comp].coeffs()[c];
      u = w.decay * u + h * (w.w_start * f0 + w.w_end * f1);
      state[n + 1][comp].coeffs()[c] = u;
    }
  };
  const std::size_t total = 3 * nc;
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < total; ++i) advance(i);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < total; ++i) advance(i);
}

SpaceTimeField heat_solve(const SpaceTimeField& forcing, const HeatParams& hp, Exec exec) {
  check_forcing(forcing);
  SpaceTimeField out(forcing.grid, forcing.domain());
  heat_march(forcing, hp, out, 0, forcing.grid.steps, exec);
  return out;
}

SpaceTimeField grad_green(const SpaceTimeField& forcing, const HeatParams& hp, Axis axis) {
  SpaceTimeField u = heat_solve(forcing, hp);
  for (auto& s : u.snapshots)
    for (auto& c : s.comp) c = derivative(c, axis);
  return u;
}

SpaceTimeField heat_flow(const SpectralVectorField& a, const HeatParams& hp, const TimeGrid& tg) {
  hp.validate();
  tg.validate();
  for (const auto& c : a.comp)
    for (const auto& x : c.coeffs())
      if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
        throw std::invalid_argument("initial data not finite");
  const std::vector<double> k2 = wavenumber_squared(a.domain());
  SpaceTimeField out(tg, a.domain());
  for (int n = 0; n <= tg.steps; ++n) {
    const double t = tg.time(n);
    for (int i = 0; i < 3; ++i) {
      auto dst = out[n][i].coeffs();
      auto src = a[i].coeffs();
      for (std::size_t c = 0; c < k2.size(); ++c) dst[c] = std::exp(-hp.rho * k2[c] * t) * src[c];
    }
  }
  return out;
}

InverseLaplacian inverse_laplacian(const SpectralField& f, double mean_tolerance) {
  const std::vector<double> k2 = wavenumber_squared(f.domain());
  InverseLaplacian r{SpectralField(f.domain()), std::abs(f.mean()), false};
  auto src = f.coeffs();
  auto dst = r.solution.coeffs();
  for (std::size_t c = 0; c < k2.size(); ++c) dst[c] = k2[c] > 0 ? -src[c] / k2[c] : Complex{};
  r.mean_warning = r.input_mean > mean_tolerance * std::max(1.0, f.max_abs());
  return r;
}

double whole_space_kernel(const std::array<double, 3>& x, double gap, const HeatParams& hp) {
  hp.validate();
  if (!(gap > 0)) throw std::invalid_argument("kernel time gap must be positive");
  const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  return std::pow(4 * std::numbers::pi * hp.rho * gap, -1.5) * std::exp(-r2 / (4 * hp.rho * gap));
}

std::array<double, 3> whole_space_kernel_gradient(const std::array<double, 3>& x, double gap,
                                                  const HeatParams& hp) {
  const double phi = whole_space_kernel(x, gap, hp);
  const double s = -phi / (2 * hp.rho * gap);
  return {s * x[0], s * x[1], s * x[2]};
}

namespace {

void check_mu(double mu, KernelEstimate id) {
  const double lo = id == KernelEstimate::value ? 0.0 : 0.5;
  if (!(mu > lo && mu < 1))
    throw std::invalid_argument("mu=" + std::to_string(mu) + " outside the estimate's range (" +
                                (id == KernelEstimate::value ? "0" : "1/2") + ", 1)");
}

const char* estimate_name(KernelEstimate id) {
  return id == KernelEstimate::value ? "value" : "gradient";
}

}  // namespace

KernelEstimateResult kernel_estimate_constant(double mu, KernelEstimate id, const HeatParams& hp,
                                              const KernelSamplePlan& plan) {
  check_mu(mu, id);
  hp.validate();
  if (plan.gap_count < 2 || plan.offset_count < 2 || !(plan.gap_min > 0) ||
      !(plan.offset_min > 0) || !(plan.gap_max > plan.gap_min) ||
      !(plan.offset_max > plan.offset_min))
    throw std::invalid_argument("kernel sample plan is degenerate");
  KernelEstimateResult r{mu, id, 0.0, {}, {}};
  r.samples.reserve(static_cast<std::size_t>(plan.gap_count) * plan.offset_count);
  const double lg = std::log(plan.gap_max / plan.gap_min) / (plan.gap_count - 1);
  const double lr = std::log(plan.offset_max / plan.offset_min) / (plan.offset_count - 1);
  const double power = id == KernelEstimate::value ? 3 - 2 * mu : 3 - (2 * mu - 1);
  for (int i = 0; i < plan.gap_count; ++i) {
    const double gap = plan.gap_min * std::exp(lg * i);
    for (int j = 0; j < plan.offset_count; ++j) {
      const double off = plan.offset_min * std::exp(lr * j);
      const std::array<double, 3> x{off, 0, 0};
      double k;
      if (id == KernelEstimate::value) {
        k = whole_space_kernel(x, gap, hp);
      } else {
        const auto g = whole_space_kernel_gradient(x, gap, hp);
        k = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
      }
      KernelSample s{off, gap, k, k * std::pow(gap, mu) * std::pow(off, power)};
      if (s.weighted > r.constant) {
        r.constant = s.weighted;
        r.argmax = s;
      }
      r.samples.push_back(s);
    }
  }
  return r;
}

double kernel_estimate_supremum(double mu, KernelEstimate id, const HeatParams& hp) {
  check_mu(mu, id);
  hp.validate();
  // With xi = r^2/(4 rho gap) the weighted kernel is C(rho) xi^a e^{-xi}.
  const double base = std::pow(4 * std::numbers::pi * hp.rho, -1.5);
  if (id == KernelEstimate::value) {
    const double a = (3 - 2 * mu) / 2;
    return base * std::pow(4 * hp.rho, a) * std::pow(a, a) * std::exp(-a);
  }
  const double b = (5 - 2 * mu) / 2;
  return base / (2 * hp.rho) * std::pow(4 * hp.rho, b) * std::pow(b, b) * std::exp(-b);
}

void write_kernel_csv(std::ostream& out, const KernelEstimateResult& r) {
  out << "mu,estimate_id,gap,offset,weighted_value,running_sup\n";
  out.precision(17);
  double sup = 0;
  for (const auto& s : r.samples) {
    sup = std::max(sup, s.weighted);
    out << r.mu << ',' << estimate_name(r.id) << ',' << s.gap << ',' << s.offset << ','
        << s.weighted << ',' << sup << '\n';
  }
}

double sobolev_self_cell(double lambda) {
  if (!(lambda > 0 && lambda < 3)) throw std::invalid_argument("Sobolev order needs 0 < lambda < 3");
  // Divergence theorem with div(y |y|^{lambda-3}) = lambda |y|^{lambda-3}:
  // six faces at distance 1/2, each contributing (1/2) int r^{lambda-3}.
  constexpr int pieces = 8;
  double face = 0;
  for (int a = 0; a < pieces; ++a)
    for (int b = 0; b < pieces; ++b)
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
          const double y = -0.5 + (a + 0.5 * (detail::kGaussNode[i] + 1)) / pieces;
          const double z = -0.5 + (b + 0.5 * (detail::kGaussNode[j] + 1)) / pieces;
          const double w = 0.25 * detail::kGaussWeight[i] * detail::kGaussWeight[j] / (pieces * pieces);
          face += w * std::pow(0.25 + y * y + z * z, 0.5 * (lambda - 3));
        }
  return 6.0 / lambda * 0.5 * face;
}

GridSamples sobolev_potential(const GridSamples& f, double lambda, int cap, Exec exec) {
  if (!(lambda > 0 && lambda < 3)) throw std::invalid_argument("Sobolev order needs 0 < lambda < 3");
  for (int a = 0; a < 3; ++a)
    if (f.dims[a] < 1 || f.dims[a] > cap)
      throw std::invalid_argument("grid too large for direct summation: " +
                                  std::to_string(f.dims[a]) + " > cap " + std::to_string(cap));
  const double h = f.domain.length[0] / f.dims[0];
  for (int a = 1; a < 3; ++a)
    if (std::abs(f.domain.length[a] / f.dims[a] - h) > 1e-12 * h)
      throw std::invalid_argument("Sobolev potential needs equal spacing on all axes");
  const std::size_t total = f.values.size();
  if (total != static_cast<std::size_t>(f.dims[0]) * f.dims[1] * f.dims[2])
    throw std::invalid_argument("sample count does not match grid dimensions");
  const double dv = h * h * h;
  const double self = sobolev_self_cell(lambda) * std::pow(h, lambda);
  const double expo = 0.5 * (lambda - 3);
  GridSamples out{f.domain, f.dims, std::vector<double>(total)};
  const auto& dm = f.dims;
  auto point = [&](std::size_t p) {
    const int i = static_cast<int>(p / (static_cast<std::size_t>(dm[1]) * dm[2]));
    const int j = static_cast<int>((p / dm[2]) % dm[1]);
    const int k = static_cast<int>(p % dm[2]);
    double s = self * f.values[p];
    for (int a = 0; a < dm[0]; ++a)
      for (int b = 0; b < dm[1]; ++b)
        for (int c = 0; c < dm[2]; ++c) {
          if (a == i && b == j && c == k) continue;
          const double r2 = h * h * double((a - i) * (a - i) + (b - j) * (b - j) + (c - k) * (c - k));
          s += f.values[f.index(a, b, c)] * std::pow(r2, expo) * dv;
        }
    out.values[p] = s;
  };
  if (exec == Exec::serial) {
    for (std::size_t p = 0; p < total; ++p) point(p);
    return out;
  }
  // Kernel tabulated by integer offset, shared by every target point.
  const int e0 = 2 * dm[0] - 1, e1 = 2 * dm[1] - 1, e2 = 2 * dm[2] - 1;
  std::vector<double> table(static_cast<std::size_t>(e0) * e1 * e2);
#pragma omp parallel for schedule(static)
  for (int a = 0; a < e0; ++a)
    for (int b = 0; b < e1; ++b)
      for (int c = 0; c < e2; ++c) {
        const int da = a - dm[0] + 1, db = b - dm[1] + 1, dc = c - dm[2] + 1;
        const double r2 = h * h * double(da * da + db * db + dc * dc);
        table[(static_cast<std::size_t>(a) * e1 + b) * e2 + c] =
            r2 > 0 ? std::pow(r2, expo) * dv : 0.0;
      }
#pragma omp parallel for schedule(static)
  for (std::size_t p = 0; p < total; ++p) {
    const int i = static_cast<int>(p / (static_cast<std::size_t>(dm[1]) * dm[2]));
    const int j = static_cast<int>((p / dm[2]) % dm[1]);
    const int k = static_cast<int>(p % dm[2]);
    double s = self * f.values[p];
    for (int a = 0; a < dm[0]; ++a)
      for (int b = 0; b < dm[1]; ++b) {
        const double* row = &table[(static_cast<std::size_t>(a - i + dm[0] - 1) * e1 +
                                    (b - j + dm[1] - 1)) * e2 + (dm[2] - 1 - k)];
        const double* src = &f.values[f.index(a, b, 0)];
        for (int c = 0; c < dm[2]; ++c) s += src[c] * row[c];
      }
    out.values[p] = s;
  }
  return out;
}

}  // namespace nsv
