#pragma once

// Seeded random inputs for property tests, harnesses and CLI battery runs.
// Every generator draws from a caller-owned std::mt19937_64.

#include <random>

#include "nsv/fields.hpp"

namespace nsv {

using Rng = std::mt19937_64;

/// Real field with Gaussian coefficients scaled by (1+|k|^2)^{-decay/2},
/// normalised to unit Parseval norm and then multiplied by `amplitude`.
SpectralField random_scalar_field(const DomainSpec& d, Rng& rng, double amplitude = 1.0,
                                  double decay = 2.0);
/// As above per component; `solenoidal` projects out the gradient part.
SpectralVectorField random_vector_field(const DomainSpec& d, Rng& rng, double amplitude = 1.0,
                                        double decay = 2.0, bool solenoidal = false);

/// f(x,t) = sum_{m<modes} cos(omega_m t + phase_m) phi_m(x) with random
/// spatial fields phi_m and omega_m in [0, 2 pi / T * modes]; smooth in
/// time, and independent of the step count so refinement studies compare
/// like with like. Vanishes at t = 0 when `zero_start` is set.
SpaceTimeField random_space_time_field(const TimeGrid& tg, const DomainSpec& d, Rng& rng,
                                       double amplitude = 1.0, int modes = 3,
                                       bool zero_start = false, bool solenoidal = false);

/// Random smooth function on [0, horizon] as a closure-free coefficient set,
/// so the same draw can be sampled on several grids.
struct RandomSignal {
  std::vector<double> amplitude, frequency, phase;
  double power_weight = 0;    // coefficient of t^{-alpha} term
  double power_alpha = 0.25;  // alpha < 1/2 keeps the signal in L2
  double operator()(double t) const;
};
RandomSignal random_signal(Rng& rng, double horizon, int terms = 8, bool singular = false);
TimeSeries sample_signal(const RandomSignal& s, const TimeGrid& tg);
/// |s(t)|, nonnegative.
TimeSeries sample_signal_abs(const RandomSignal& s, const TimeGrid& tg);

}  // namespace nsv
