#pragma once

// Fractional integration J^mu u(t) = int_0^t u(tau) (t - tau)^{-mu} dtau by
// product integration, Abel-Carleman inversion, the Gamma composition
// constant, the F_mu transform and the Hardy-Littlewood / Beta-gap
// quantities built on them.
//
// Every integral here treats the series as piecewise linear between grid
// nodes and integrates the singular kernel against it exactly.

#include <utility>

#include "nsv/fields.hpp"

namespace nsv {

/// Order mu of J^mu, 0 < mu < 1.
class FracOrder {
 public:
  explicit FracOrder(double mu);
  double value() const { return mu_; }
  /// Throws unless 5/8 <= mu < 1 (the range of the bilinear estimate).
  const FracOrder& require_solver_range() const;

 private:
  double mu_;
};

/// Gamma(1-mu1) Gamma(1-mu2) / Gamma(2-mu1-mu2).
struct GammaConstant {
  double mu1;
  double mu2;
  double value;
};

/// B(a, b) via log-Gamma.
double beta_function(double a, double b);

/// int_0^{t_n} u(tau) (t_n - tau)^exponent dtau at every node, exponent > -1.
TimeSeries kernel_integral(const TimeSeries& u, double exponent,
                           Exec exec = Exec::parallel);
/// Same integral at an arbitrary time 0 <= t <= horizon.
double kernel_integral_at(const TimeSeries& u, double exponent, double t);

TimeSeries frac_integral(const TimeSeries& u, FracOrder mu,
                         Exec exec = Exec::parallel);

/// Solves int_0^t u(tau)(t-tau)^{-mu} dtau = f(t) for u. f is taken in the
/// product-integration representation f = J^mu(u) with u piecewise linear,
/// for which (sin(pi mu)/pi) d/dt J^{1-mu} f = u holds exactly; the nodal
/// values follow by forward substitution. The start value u_0 closes the
/// system through u_0 - 2u_1 + u_2 = 0. Throws std::domain_error if
/// |f(0)| > f0_tolerance * max(1, max|f|).
TimeSeries abel_invert(const TimeSeries& f, FracOrder mu,
                       double f0_tolerance = 1e-10);

/// Right-hand side of the Abel-Carleman formula evaluated directly:
/// (sin(pi mu)/pi) d/dt J^{1-mu} f with the derivative taken by central
/// differences of J^{1-mu} f. Used as a cross-check of abel_invert.
TimeSeries abel_formula_direct(const TimeSeries& f, FracOrder mu);

GammaConstant composition_constant(double mu1, double mu2);

/// (2 / Gamma^{mu}_{1-mu}) J^mu(fsq); throws on negative input.
TimeSeries f_mu_transform(const TimeSeries& fsq, FracOrder mu);

/// f^2_{1-mu}(t) = int_0^t g^2(tau) (t-tau)^{-(1-mu)} dtau, a member of the
/// class whose F_mu transform equals 2 int_0^t g^2.
TimeSeries sample_Lplus(const TimeSeries& g, FracOrder mu);

/// q = p / (1 - p(1-mu)); requires 1 < p < 1/(1-mu).
double hl_exponent(double p, FracOrder mu);

/// 2 b1^2 - k B(1-s-mu, mu); requires 0 < s+mu < 1.
double beta_gap(double b1, double k, double s, FracOrder mu);
/// Smallest k making beta_gap negative: 2 b1^2 / B(1-s-mu, mu).
double beta_gap_threshold(double b1, double s, FracOrder mu);

namespace detail {

/// Product-integration weights for a cell at integer offset `lo` (in steps)
/// from the evaluation point: {int_lo^{lo+1} (s-lo) s^g ds,
/// int_lo^{lo+1} (lo+1-s) s^g ds}, multiplying the far and the near node.
std::pair<double, double> cell_weights(double lo, double exponent);

}  // namespace detail

}  // namespace nsv
