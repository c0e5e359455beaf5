#include "nsv/fraccalc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "quadrature.hpp"

namespace nsv {

namespace {

using detail::kGaussNode;
using detail::kGaussWeight;

void require_exponent(double g) {
  if (!(g > -1) || !std::isfinite(g))
    throw std::invalid_argument("kernel exponent must exceed -1");
}

struct WeightTable {
  std::vector<double> far, near;
};

// Weights already scaled by h^{g+1}, one entry per integer cell offset.
WeightTable weight_table(int count, double g, double h) {
  WeightTable t{std::vector<double>(count), std::vector<double>(count)};
  const double scale = std::pow(h, g + 1);
  for (int m = 0; m < count; ++m) {
    const auto [a, b] = detail::cell_weights(m, g);
    t.far[m] = a * scale;
    t.near[m] = b * scale;
  }
  return t;
}

}  // namespace

namespace detail {

std::pair<double, double> cell_weights(double lo, double g) {
  const double hi = lo + 1;
  if (lo < 4) {
    auto P = [g](double x) { return x > 0 ? std::pow(x, g + 1) / (g + 1) : 0.0; };
    auto Q = [g](double x) { return x > 0 ? std::pow(x, g + 2) / (g + 2) : 0.0; };
    const double dp = P(hi) - P(lo);
    const double dq = Q(hi) - Q(lo);
    return {dq - lo * dp, hi * dp - dq};
  }
  // Away from the singularity the closed form cancels; quadrature is exact
  // to round-off here.
  double far = 0, near = 0;
  for (int i = 0; i < 8; ++i) {
    const double s = lo + 0.5 * (kGaussNode[i] + 1);
    const double k = 0.5 * kGaussWeight[i] * std::pow(s, g);
    far += k * (s - lo);
    near += k * (hi - s);
  }
  return {far, near};
}

}  // namespace detail

FracOrder::FracOrder(double mu) : mu_(mu) {
  if (!(mu > 0 && mu < 1))
    throw std::invalid_argument("fractional order must satisfy 0 < mu < 1, got " +
                                std::to_string(mu));
}

const FracOrder& FracOrder::require_solver_range() const {
  if (!(mu_ >= 0.625 && mu_ < 1))
    throw std::invalid_argument("mu must satisfy 5/8 <= mu < 1, got " + std::to_string(mu_));
  return *this;
}

double beta_function(double a, double b) {
  if (!(a > 0 && b > 0)) throw std::invalid_argument("Beta function needs a, b > 0");
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

TimeSeries kernel_integral(const TimeSeries& u, double g, Exec exec) {
  require_exponent(g);
  u.validate();
  const int nt = u.grid.steps;
  const double h = u.grid.step();
  TimeSeries out(u.grid);
  const double* x = u.values.data();
  if (exec == Exec::serial) {
    const double scale = std::pow(h, g + 1);
    for (int n = 1; n <= nt; ++n) {
      double s = 0;
      for (int j = 0; j < n; ++j) {
        const auto [a, b] = detail::cell_weights(n - j - 1, g);
        s += a * x[j] + b * x[j + 1];
      }
      out[n] = s * scale;
    }
    return out;
  }
  const WeightTable w = weight_table(nt, g, h);
  double* y = out.values.data();
#pragma omp parallel for schedule(dynamic, 32)
  for (int n = 1; n <= nt; ++n) {
    double s = 0;
    for (int j = 0; j < n; ++j) s += w.far[n - j - 1] * x[j] + w.near[n - j - 1] * x[j + 1];
    y[n] = s;
  }
  return out;
}

double kernel_integral_at(const TimeSeries& u, double g, double t) {
  require_exponent(g);
  const double h = u.grid.step();
  if (!(t >= 0) || t > u.grid.horizon * (1 + 1e-14))
    throw std::out_of_range("evaluation time outside the series grid");
  t = std::min(t, u.grid.horizon);
  int nf = std::min(static_cast<int>(std::floor(t / h)), u.grid.steps);
  double s = 0;
  for (int j = 0; j < nf; ++j) {
    const double lo = std::max(0.0, (t - u.grid.time(j + 1)) / h);
    const auto [a, b] = detail::cell_weights(lo, g);
    s += a * u[j] + b * u[j + 1];
  }
  const double delta = (t - u.grid.time(nf)) / h;
  if (delta > 0 && nf < u.grid.steps) {
    const double P = std::pow(delta, g + 1) / (g + 1);
    const double Q = std::pow(delta, g + 2) / (g + 2);
    s += ((1 - delta) * P + Q) * u[nf] + (delta * P - Q) * u[nf + 1];
  }
  return s * std::pow(h, g + 1);
}

TimeSeries frac_integral(const TimeSeries& u, FracOrder mu, Exec exec) {
  return kernel_integral(u, -mu.value(), exec);
}

TimeSeries abel_invert(const TimeSeries& f, FracOrder mu, double f0_tolerance) {
  f.validate();
  double fmax = 0;
  for (double v : f.values) fmax = std::max(fmax, std::abs(v));
  if (std::abs(f[0]) > f0_tolerance * std::max(1.0, fmax))
    throw std::domain_error("f(0) = " + std::to_string(f[0]) +
                            " is not 0: no solution in the class");
  const int nt = f.grid.steps;
  const double g = -mu.value();
  const WeightTable w = weight_table(nt, g, f.grid.step());
  // c[d]: weight of u_{n-d} in row n (d < n); e[n]: weight of u_0 in row n.
  std::vector<double> c(nt + 1), e(nt + 1);
  c[0] = w.near[0];
  for (int d = 1; d < nt; ++d) c[d] = w.far[d - 1] + w.near[d];
  for (int n = 1; n <= nt; ++n) e[n] = w.far[n - 1];

  TimeSeries u(f.grid);
  if (nt == 1) {
    u[0] = u[1] = f[1] / (e[1] + c[0]);
    return u;
  }
  // Rows 1 and 2 with u_2 = 2u_1 - u_0.
  const double a11 = e[1], a12 = c[0];
  const double a21 = e[2] - c[0], a22 = c[1] + 2 * c[0];
  const double det = a11 * a22 - a12 * a21;
  u[0] = (f[1] * a22 - a12 * f[2]) / det;
  u[1] = (a11 * f[2] - a21 * f[1]) / det;
  u[2] = 2 * u[1] - u[0];
  for (int n = 3; n <= nt; ++n) {
    double s = f[n] - e[n] * u[0];
    for (int i = 1; i < n; ++i) s -= c[n - i] * u[i];
    u[n] = s / c[0];
  }
  return u;
}

TimeSeries abel_formula_direct(const TimeSeries& f, FracOrder mu) {
  const TimeSeries inner = kernel_integral(f, mu.value() - 1);
  const int nt = f.grid.steps;
  if (nt < 2) throw std::invalid_argument("Abel formula needs Nt >= 2");
  const double h = f.grid.step();
  const double k = std::sin(std::numbers::pi * mu.value()) / std::numbers::pi;
  TimeSeries u(f.grid);
  for (int n = 0; n <= nt; ++n) {
    double d;
    if (n == 0)
      d = (4 * inner[1] - 3 * inner[0] - inner[2]) / (2 * h);
    else if (n == nt)
      d = (3 * inner[nt] - 4 * inner[nt - 1] + inner[nt - 2]) / (2 * h);
    else
      d = (inner[n + 1] - inner[n - 1]) / (2 * h);
    u[n] = k * d;
  }
  return u;
}

GammaConstant composition_constant(double mu1, double mu2) {
  if (!(mu1 < 1 && mu2 < 1)) throw std::invalid_argument("composition needs mu1, mu2 < 1");
  const double v = std::exp(std::lgamma(1 - mu1) + std::lgamma(1 - mu2) -
                            std::lgamma(2 - mu1 - mu2));
  return {mu1, mu2, v};
}

TimeSeries f_mu_transform(const TimeSeries& fsq, FracOrder mu) {
  for (double v : fsq.values)
    if (v < 0) throw std::invalid_argument("F_mu transform needs a nonnegative input");
  TimeSeries out = frac_integral(fsq, mu);
  const double scale = 2 / composition_constant(1 - mu.value(), mu.value()).value;
  for (double& v : out.values) v *= scale;
  return out;
}

TimeSeries sample_Lplus(const TimeSeries& g, FracOrder mu) {
  TimeSeries sq(g.grid);
  for (int n = 0; n < g.size(); ++n) sq[n] = g[n] * g[n];
  return kernel_integral(sq, mu.value() - 1);
}

double hl_exponent(double p, FracOrder mu) {
  const double m = mu.value();
  if (!(p > 1 && p < 1 / (1 - m)))
    throw std::invalid_argument("Hardy-Littlewood exponent needs 1 < p < 1/(1-mu)");
  return p / (1 - p * (1 - m));
}

double beta_gap(double b1, double k, double s, FracOrder mu) {
  const double m = mu.value();
  if (!(s + m > 0 && s + m < 1)) throw std::invalid_argument("Beta gap needs 0 < s+mu < 1");
  return 2 * b1 * b1 - k * beta_function(1 - s - m, m);
}

double beta_gap_threshold(double b1, double s, FracOrder mu) {
  const double m = mu.value();
  if (!(s + m > 0 && s + m < 1)) throw std::invalid_argument("Beta gap needs 0 < s+mu < 1");
  return 2 * b1 * b1 / beta_function(1 - s - m, m);
}

}  // namespace nsv
