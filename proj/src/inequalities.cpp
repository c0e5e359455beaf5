#include <boost/math/quadrature/gauss.hpp>

#include "nsv/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "nsv/fraccalc.hpp"

namespace nsv {

void InequalityReport::finalize(double rel_tol) {
  double scale = 1e-300;
  margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    scale = std::max({scale, std::abs(lhs[i]), std::abs(rhs[i])});
    margin = std::min(margin, rhs[i] - lhs[i]);
  }
  if (lhs.empty()) margin = 0;
  // each node against its own size, plus rounding at the global scale
  pass = !std::isnan(margin);
  const double floor = 64 * std::numeric_limits<double>::epsilon() * scale;
  for (std::size_t i = 0; i < lhs.size() && pass; ++i) {
    const double local = std::max(std::abs(lhs[i]), std::abs(rhs[i]));
    pass = rhs[i] - lhs[i] >= -(rel_tol * local + floor);
  }
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// max_n num/den over n >= 1 (clipped below at 0); infinite when a positive
// numerator meets a vanishing denominator.
double fit_ratio(const std::vector<double>& num, const std::vector<double>& den) {
  double scale = 1e-300;
  for (double v : num) scale = std::max(scale, std::abs(v));
  double c = 0;
  for (std::size_t n = 1; n < num.size(); ++n) {
    if (num[n] <= 1e-14 * scale) continue;
    if (!(den[n] > 0)) return kInf;
    c = std::max(c, num[n] / den[n]);
  }
  return c;
}

void require_same_grid(const TimeSeries& a, const TimeSeries& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("series live on different time grids");
}

void require_nonnegative(const TimeSeries& s, const char* what) {
  for (double v : s.values)
    if (v < 0) throw std::invalid_argument(std::string(what) + " must be nonnegative");
}

TimeSeries squared(const TimeSeries& s) {
  TimeSeries out(s.grid);
  for (int n = 0; n < s.size(); ++n) out[n] = s[n] * s[n];
  return out;
}

}  // namespace

BundleNorms norms_from_bundle(const SolutionBundle& b, const SpaceTimeField& f) {
  if (!(b.w.grid == f.grid) || !(b.w.domain() == f.domain()))
    throw std::invalid_argument("bundle and forcing grids differ");
  return {norm_series(b.w), norm_series(f), norm_series(b.grad_p)};
}

InequalityReport check_bilinear_pair(const SpaceTimeField& g1, const SpaceTimeField& g2, double mu,
                                     const HeatParams& hp) {
  const FracOrder order(mu);
  if (!(g1.grid == g2.grid)) throw std::invalid_argument("time grids differ");
  const SpaceTimeField G1 = heat_solve(g1, hp);
  const SpaceTimeField G2 = &g1 == &g2 ? G1 : heat_solve(g2, hp);
  const TimeSeries J1 = frac_integral(norm_series(g1), order);
  const TimeSeries J2 = &g1 == &g2 ? J1 : frac_integral(norm_series(g2), order);
  const int nodes = g1.grid.nodes();
  std::vector<double> lhs(nodes), den(nodes);
#pragma omp parallel for schedule(dynamic)
  for (int n = 0; n < nodes; ++n) lhs[n] = l2_norm(convection(G1[n], G2[n]));
  for (int n = 0; n < nodes; ++n) den[n] = J1[n] * J2[n];
  InequalityReport r;
  r.id = "bilinear_pair";
  const double c = fit_ratio(lhs, den);
  r.constants["c"] = c;
  r.constants["mu"] = mu;
  for (int n = 1; n < nodes; ++n) {
    r.x.push_back(g1.grid.time(n));
    r.lhs.push_back(lhs[n]);
    r.rhs.push_back(std::isfinite(c) ? c * den[n] : kInf);
  }
  r.finalize();
  if (!std::isfinite(c)) {
    r.pass = false;
    r.notes = "no finite constant covers the nodes";
  }
  return r;
}

InequalityReport check_bilinear(const SpaceTimeField& g, double mu, const HeatParams& hp) {
  FracOrder(mu).require_solver_range();
  InequalityReport r = check_bilinear_pair(g, g, mu, hp);
  r.id = "bilinear_3_1";
  r.constants["b"] = r.constants["c"];
  r.constants.erase("c");
  return r;
}

ScalarChainReports check_32_34(const TimeSeries& w, const TimeSeries& f, const TimeSeries& p,
                               double mu) {
  const FracOrder order(mu);
  require_same_grid(w, f);
  require_same_grid(w, p);
  require_nonnegative(w, "w(t)");
  require_nonnegative(f, "f(t)");
  require_nonnegative(p, "p(t)");
  const int nodes = w.size();
  TimeSeries wp(w.grid);
  for (int n = 0; n < nodes; ++n) wp[n] = w[n] + p[n];
  const TimeSeries Jwp = frac_integral(wp, order);
  const TimeSeries Jw2 = frac_integral(squared(w), order);
  const TimeSeries Jp2 = frac_integral(squared(p), order);

  std::vector<double> excess(nodes), d32(nodes), d34(nodes);
  for (int n = 0; n < nodes; ++n) {
    excess[n] = std::max(0.0, w[n] - f[n]);
    d32[n] = Jwp[n] * Jwp[n];
    d34[n] = Jw2[n];
  }
  const double b = fit_ratio(excess, d32);
  const double b1 = fit_ratio(excess, d34);
  const double c = fit_ratio(Jp2.values, Jw2.values);

  ScalarChainReports out;
  auto fill = [&](InequalityReport& r, const char* id, const char* name, double k,
                  const std::vector<double>& den) {
    r.id = id;
    r.constants[name] = k;
    r.constants["mu"] = mu;
    for (int n = 1; n < nodes; ++n) {
      r.x.push_back(w.grid.time(n));
      r.lhs.push_back(w[n]);
      r.rhs.push_back(std::isfinite(k) ? f[n] + k * den[n] : kInf);
    }
    r.finalize();
    if (!std::isfinite(k)) r.pass = false;
    if (k == 0) r.notes = "w <= f at every node; the constant is 0 and the margin is 0";
  };
  fill(out.r32, "scalar_3_2", "b", b, d32);
  fill(out.r34, "scalar_3_4", "b1", b1, d34);

  InequalityReport& r = out.r34pp;
  r.id = "pressure_3_4pp";
  r.constants["c"] = c;
  r.constants["mu"] = mu;
  for (int n = 1; n < nodes; ++n) {
    r.x.push_back(w.grid.time(n));
    r.lhs.push_back(Jp2[n]);
    r.rhs.push_back(std::isfinite(c) ? c * Jw2[n] : kInf);
  }
  r.finalize();
  if (!std::isfinite(c)) r.pass = false;
  return out;
}

// --- Riccati chain ---------------------------------------------------------------------

double riccati_k(double b1, double mu) {
  const FracOrder order(mu);
  const double s = (1 - mu) / 2;
  // The chain also needs k >> 1; small data gives a threshold near zero.
  return std::max(2 * beta_gap_threshold(b1, s, order), 1.0);
}

double RiccatiChain::w2_at(double t) const {
  return k / (1 - mu) * kernel_integral_at(wsq, 1 - mu, t);
}

double RiccatiChain::z_at(double t) const { return z0 * std::exp(-w2_at(t)); }

RiccatiChain build_riccati_chain(const TimeSeries& w, const TimeSeries& f, double mu, double k,
                                 double z0) {
  const FracOrder order(mu);
  order.require_solver_range();
  require_same_grid(w, f);
  require_nonnegative(w, "w(t)");
  if (!(k > 0)) throw std::invalid_argument("Riccati k must be positive");
  if (!(z0 > 0)) throw std::invalid_argument("z(0) must be positive");
  RiccatiChain c;
  c.mu = mu;
  c.k = k;
  c.z0 = z0;
  c.half_horizon = w.grid.horizon / 2;
  c.wsq = squared(w);
  c.w1 = frac_integral(c.wsq, order);
  const TimeSeries inner = kernel_integral(c.wsq, 1 - mu);
  c.z = TimeSeries(w.grid);
  for (int n = 0; n < w.size(); ++n) c.z[n] = z0 * std::exp(-k / (1 - mu) * inner[n]);
  c.F = f_mu_transform(squared(f), order);
  c.z_prime0 = (c.z[1] - c.z[0]) / w.grid.step();
  return c;
}

namespace {

// Cumulative integral of a chain series. The chain quantities start like
// s0 + a t^p with p < 1 possible (F ~ t^(1-mu), z0 - z ~ t^(2-mu)), which the
// trapezoid underweights on the first cell; there the increment is integrated
// as a power law with p fitted from the first two nodes. Trapezoid elsewhere.
TimeSeries chain_integral(const TimeSeries& s) {
  TimeSeries out = cumulative_trapezoid(s);
  if (s.size() < 3) return out;
  const double d1 = s[1] - s[0], d2 = s[2] - s[0];
  if (d1 == 0 || !(d2 / d1 > 1)) return out;
  const double p = std::clamp(std::log2(d2 / d1), 0.05, 8.0);
  const double h = s.grid.step();
  const double shift = h * (s[0] + d1 / (1 + p)) - out[1];
  for (int n = 1; n < s.size(); ++n) out[n] += shift;
  return out;
}

// Cell integrals of the continuous z on [t_{n-1}, t_n]. The first cell is cut
// geometrically toward 0, where z0 - z ~ t^(2-mu) and large data make z
// collapse inside the cell.
std::vector<double> z_cell_integrals(const RiccatiChain& c) {
  using Gauss = boost::math::quadrature::gauss<double, 10>;
  const TimeGrid& g = c.z.grid;
  const auto z = [&](double t) { return c.z_at(t); };
  std::vector<double> cell(g.steps + 1, 0.0);
  double b = g.time(1);
  for (int j = 0; j < 60; ++j) {
    cell[1] += Gauss::integrate(z, b / 2, b);
    b /= 2;
  }
  cell[1] += b * c.z0;
  for (int n = 2; n <= g.steps; ++n) cell[n] = Gauss::integrate(z, g.time(n - 1), g.time(n));
  return cell;
}

// Last point on [lo, hi] where z_at > target (strict) or >= target.
double level_edge(const RiccatiChain& c, double target, double lo, double hi, bool strict) {
  const double ulps = 16 * std::numeric_limits<double>::epsilon() * c.z0;
  for (int i = 0; i < 200 && hi - lo > 1e-16 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double z = c.z_at(mid);
    if (strict ? z > target + ulps : z >= target - ulps)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Mean-value point of the nonincreasing z on [lo, hi]: midpoint of the level
// set {z = target}, a single point when z is strictly decreasing there and an
// interval when z is flat (zero weight, or underflow to 0).
double mean_value_point(const RiccatiChain& c, double target, double lo, double hi) {
  return 0.5 * (level_edge(c, target, lo, hi, true) + level_edge(c, target, lo, hi, false));
}

}  // namespace

InequalityReport check_key_inequality(RiccatiChain& c) {
  const TimeGrid& g = c.z.grid;
  if (g.steps < 2 || g.steps % 2 != 0)
    throw std::invalid_argument("chain series too short to bracket t2: need an even step count "
                                "covering [0, 2T]");
  const std::vector<double> cell = z_cell_integrals(c);
  TimeSeries Z(g);
  for (int n = 1; n <= g.steps; ++n) Z[n] = Z[n - 1] + cell[n];
  const TimeSeries I = chain_integral(c.F);
  InequalityReport r;
  r.id = "key_3_25";
  for (int n = 1; n <= g.steps; ++n) {
    r.x.push_back(g.time(n));
    r.lhs.push_back(c.z0 * g.time(n));
    r.rhs.push_back(Z[n] * std::exp(c.k * I[n]));
  }
  r.finalize();

  const int half = g.steps / 2;
  const double T = c.half_horizon;
  c.mean_first = Z[half] / T;
  c.mean_second = 0;
  for (int n = half + 1; n <= g.steps; ++n) c.mean_second += cell[n];
  c.mean_second /= T;
  c.t1 = mean_value_point(c, c.mean_first, 0.0, T);
  c.t2 = mean_value_point(c, c.mean_second, T, 2 * T);
  c.residual_t1 = std::abs(c.z_at(c.t1) - c.mean_first);
  c.residual_t2 = std::abs(c.z_at(c.t2) - c.mean_second);
  c.w2_t1 = c.w2_at(c.t1);
  c.w2_t2 = c.w2_at(c.t2);
  c.located = c.t1 > 0 && c.t1 < T && c.t2 > T && c.t2 < 2 * T;
  if (c.z[0] - c.z[half] <= 1e-14 * c.z0 || c.z[half] - c.z[g.steps] <= 1e-14 * c.z0)
    r.notes = "z is flat on a half interval; mean-value point taken mid level set";
  const double eF = std::exp(c.k * I[half]);
  r.constants["k"] = c.k;
  r.constants["mu"] = c.mu;
  r.constants["z0"] = c.z0;
  r.constants["z_prime0"] = c.z_prime0;
  r.constants["located"] = c.located ? 1 : 0;
  r.constants["t1"] = c.t1;
  r.constants["t2"] = c.t2;
  r.constants["T"] = T;
  r.constants["residual_t1"] = c.residual_t1;
  r.constants["residual_t2"] = c.residual_t2;
  r.constants["w2_t1"] = c.w2_t1;
  r.constants["w2_t2"] = c.w2_t2;
  r.constants["mean_value_lhs"] = 1.0;
  r.constants["mean_value_rhs"] = (std::exp(-c.w2_t1) + std::exp(-c.w2_t2)) * eF;
  r.constants["scaled_lhs"] = std::exp(c.w2_t2);
  r.constants["scaled_rhs"] = (std::exp(c.w2_t2 - c.w2_t1) + 1) * eF;
  int violations = 0;
  for (int n = 1; n <= g.steps; ++n) violations += c.z[n] > c.z[n - 1];
  r.constants["z_increase_count"] = violations;
  return r;
}

TimeSeries gronwall_bound(const TimeSeries& forcing, const TimeSeries& coefficient, double y0) {
  require_same_grid(forcing, coefficient);
  const TimeSeries A = cumulative_trapezoid(coefficient);
  TimeSeries integrand(forcing.grid);
  for (int n = 0; n < forcing.size(); ++n) integrand[n] = std::exp(-A[n]) * forcing[n];
  const TimeSeries S = cumulative_trapezoid(integrand);
  TimeSeries y(forcing.grid);
  for (int n = 0; n < forcing.size(); ++n) y[n] = std::exp(A[n]) * (y0 + S[n]);
  return y;
}

InequalityReport check_gronwall_chain(const RiccatiChain& c) {
  const TimeGrid& g = c.z.grid;
  const TimeSeries I = chain_integral(c.F);
  TimeSeries damped(g), forcing(g), coef(g);
  for (int n = 0; n < c.z.size(); ++n) {
    damped[n] = c.z[n] * std::exp(-c.k * I[n]);
    forcing[n] = c.z0 * std::exp(-c.k * I[n]);
    coef[n] = -c.k * c.F[n];
  }
  const TimeSeries z2 = chain_integral(damped);
  const TimeSeries bound = gronwall_bound(forcing, coef);
  InequalityReport r;
  r.id = "gronwall_3_24";
  // z2 > bound, stored as lhs = bound, rhs = z2.
  for (int n = 1; n <= g.steps; ++n) {
    r.x.push_back(g.time(n));
    r.lhs.push_back(bound[n]);
    r.rhs.push_back(z2[n]);
  }
  r.constants["k"] = c.k;
  r.finalize();
  return r;
}

InequalityReport check_apriori(const SolutionBundle& b, const SpaceTimeField& f) {
  const BundleNorms nm = norms_from_bundle(b, f);
  const double wn = time_lp_norm(nm.w, 2);
  const double fn = time_lp_norm(nm.f, 2);
  const double ratio = fn > 0 ? wn / fn : (wn > 0 ? kInf : 0.0);
  const double hf = l2_norm(f);
  InequalityReport r;
  r.id = "apriori_2_21";
  r.abscissa = "ratio";
  r.x = {0.0};
  r.lhs = {ratio};
  r.rhs = {std::numbers::sqrt2};
  r.constants["ratio"] = ratio;
  r.constants["hilbert_ratio"] = hf > 0 ? l2_norm(b.w) / hf : 0.0;
  r.constants["w_norm"] = wn;
  r.constants["f_norm"] = fn;
  r.finalize(0.0);
  if (fn == 0) {
    r.pass = true;
    r.notes = "f = 0";
  } else {
    r.pass = ratio < std::numbers::sqrt2;
  }
  return r;
}

InequalityReport check_hopf(const SolutionBundle& b, const SpaceTimeField& f,
                            const SpectralVectorField& a) {
  const SpaceTimeField& u = b.u;
  const TimeGrid& g = u.grid;
  const double rho = b.config.rho;
  auto grad_sum = [](const SpectralVectorField& v) {
    double s = 0;
    for (int i = 0; i < 3; ++i) {
      double q = 0;
      for (Axis ax : kAxes) q += std::pow(parseval_norm(derivative(v[i], ax)), 2);
      s += std::sqrt(q);
    }
    return s;
  };
  double aw = 0;
  for (int i = 0; i < 3; ++i) {
    double q = std::pow(parseval_norm(a[i]), 2);
    for (Axis ax : kAxes) q += std::pow(parseval_norm(derivative(a[i], ax)), 2);
    aw += std::sqrt(q);
  }
  TimeSeries ux(g);
  for (int n = 0; n <= g.steps; ++n) ux[n] = grad_sum(u[n]);
  const TimeSeries U = norm_series(u);
  const TimeSeries Ux = cumulative_trapezoid(ux);
  const TimeSeries Fi = cumulative_trapezoid(norm_series(f));
  std::vector<double> lhs(g.nodes()), excess(g.nodes());
  for (int n = 0; n <= g.steps; ++n) {
    lhs[n] = U[n] + 2 * rho * Ux[n];
    excess[n] = std::max(0.0, lhs[n] - aw);
  }
  const double c = fit_ratio(excess, Fi.values);
  InequalityReport r;
  r.id = "hopf_4_4";
  r.constants["c"] = c;
  r.constants["a_W21"] = aw;
  for (int n = 0; n <= g.steps; ++n) {
    r.x.push_back(g.time(n));
    r.lhs.push_back(lhs[n]);
    r.rhs.push_back(std::isfinite(c) ? aw + c * Fi[n] : kInf);
  }
  r.finalize();
  if (!std::isfinite(c)) {
    r.pass = false;
    r.notes = "energy side exceeds ||a|| where int ||f|| vanishes";
  }
  return r;
}

}  // namespace nsv
