#include "nsv/random_fields.hpp"

#include <cmath>
#include <numbers>

#include "nsv/projection.hpp"

namespace nsv {

SpectralField random_scalar_field(const DomainSpec& d, Rng& rng, double amplitude, double decay) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  SpectralField f(d);
  const auto& n = d.modes;
  for (int a = -n[0]; a <= n[0]; ++a)
    for (int b = -n[1]; b <= n[1]; ++b)
      for (int c = -n[2]; c <= n[2]; ++c) {
        const double k2 = double(a * a + b * b + c * c);
        const double s = std::pow(1 + k2, -0.5 * decay);
        f.at(a, b, c) = s * Complex(gauss(rng), gauss(rng));
      }
  f.at(0, 0, 0) = 0;
  f.enforce_conjugate_symmetry();
  const double norm = parseval_norm(f);
  if (norm > 0) f *= amplitude / norm;
  return f;
}

SpectralVectorField random_vector_field(const DomainSpec& d, Rng& rng, double amplitude,
                                        double decay, bool solenoidal) {
  SpectralVectorField v(random_scalar_field(d, rng, amplitude, decay),
                        random_scalar_field(d, rng, amplitude, decay),
                        random_scalar_field(d, rng, amplitude, decay));
  if (solenoidal) v = leray_project(v);
  return v;
}

SpaceTimeField random_space_time_field(const TimeGrid& tg, const DomainSpec& d, Rng& rng,
                                       double amplitude, int modes, bool zero_start,
                                       bool solenoidal) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<SpectralVectorField> phi;
  std::vector<double> omega, phase;
  for (int m = 0; m < modes; ++m) {
    phi.push_back(random_vector_field(d, rng, amplitude / modes, 2.0, solenoidal));
    omega.push_back(2 * std::numbers::pi / tg.horizon * modes * uni(rng));
    phase.push_back(2 * std::numbers::pi * uni(rng));
  }
  SpaceTimeField out(tg, d);
  for (int n = 0; n <= tg.steps; ++n) {
    const double t = tg.time(n);
    for (int m = 0; m < modes; ++m) {
      double c = std::cos(omega[m] * t + phase[m]);
      if (zero_start) c -= std::cos(phase[m]);
      SpectralVectorField term = phi[m];
      term *= c;
      out[n] += term;
    }
  }
  return out;
}

double RandomSignal::operator()(double t) const {
  double s = 0;
  for (std::size_t i = 0; i < amplitude.size(); ++i)
    s += amplitude[i] * std::cos(frequency[i] * t + phase[i]);
  if (power_weight != 0 && t > 0) s += power_weight * std::pow(t, -power_alpha);
  return s;
}

RandomSignal random_signal(Rng& rng, double horizon, int terms, bool singular) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  RandomSignal s;
  for (int i = 0; i < terms; ++i) {
    s.amplitude.push_back(gauss(rng) / (1 + i));
    s.frequency.push_back(std::numbers::pi * i / horizon);
    s.phase.push_back(2 * std::numbers::pi * uni(rng));
  }
  if (singular) {
    s.power_weight = gauss(rng);
    s.power_alpha = 0.1 + 0.3 * uni(rng);
  }
  return s;
}

TimeSeries sample_signal(const RandomSignal& s, const TimeGrid& tg) {
  TimeSeries out(tg);
  // A t^{-alpha} term is replaced at t = 0 by its cell average over [0, h].
  for (int n = 0; n <= tg.steps; ++n) out[n] = s(tg.time(n));
  if (s.power_weight != 0) {
    const double h = tg.step();
    out[0] += s.power_weight * std::pow(h, -s.power_alpha) / (1 - s.power_alpha);
  }
  return out;
}

TimeSeries sample_signal_abs(const RandomSignal& s, const TimeGrid& tg) {
  TimeSeries out = sample_signal(s, tg);
  for (double& v : out.values) v = std::abs(v);
  return out;
}

}  // namespace nsv
