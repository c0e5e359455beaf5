#include "nsv/projection.hpp"

#include <algorithm>

namespace nsv {

DecompositionResult weyl_decompose(const SpectralVectorField& v) {
  const DomainSpec& d = v.domain();
  DecompositionResult r{v, SpectralVectorField(d), SpectralField(d)};
  const auto& n = d.modes;
  for (int a = -n[0]; a <= n[0]; ++a)
    for (int b = -n[1]; b <= n[1]; ++b)
      for (int c = -n[2]; c <= n[2]; ++c) {
        const double k[3] = {d.wavenumber(0, a), d.wavenumber(1, b), d.wavenumber(2, c)};
        const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if (k2 == 0) continue;
        Complex kv{};
        for (int i = 0; i < 3; ++i) kv += k[i] * v[i].at(a, b, c);
        // phi = Lap^{-1} div v: phi_k = -i (k.v)/|k|^2, grad phi = k (k.v)/|k|^2
        r.potential.at(a, b, c) = Complex(0, -1) * kv / k2;
        for (int i = 0; i < 3; ++i) {
          const Complex g = k[i] * kv / k2;
          r.gradient[i].at(a, b, c) = g;
          r.solenoidal[i].at(a, b, c) -= g;
        }
      }
  return r;
}

SpectralVectorField leray_project(const SpectralVectorField& v) {
  return weyl_decompose(v).solenoidal;
}

SpectralVectorField pressure_gradient(const SpectralVectorField& w) {
  SpectralVectorField g = weyl_decompose(w).gradient;
  g *= -1.0;
  return g;
}

SpaceTimeField pressure_gradient_from_w(const SpaceTimeField& w, Exec exec) {
  w.validate();
  SpaceTimeField out(w.grid, w.domain());
  const int nodes = w.grid.nodes();
  if (exec == Exec::serial) {
    for (int n = 0; n < nodes; ++n) out[n] = pressure_gradient(w[n]);
    return out;
  }
#pragma omp parallel for schedule(static)
  for (int n = 0; n < nodes; ++n) out[n] = pressure_gradient(w[n]);
  return out;
}

SpectralField pressure_potential(const SpectralVectorField& w) {
  SpectralField p = weyl_decompose(w).potential;
  p *= -1.0;
  return p;
}

double pressure_bound_constant(const SpaceTimeField& w) {
  const SpaceTimeField gp = pressure_gradient_from_w(w);
  TimeSeries num(w.grid), den(w.grid);
  for (int n = 0; n < w.grid.nodes(); ++n) {
    num[n] = l2_inner(gp[n], gp[n]);
    den[n] = l2_inner(w[n], w[n]);
  }
  const TimeSeries P = cumulative_trapezoid(num), W = cumulative_trapezoid(den);
  double c = 0;
  for (int n = 1; n < w.grid.nodes(); ++n)
    if (W[n] > 0) c = std::max(c, P[n] / W[n]);
  return c;
}

}  // namespace nsv
