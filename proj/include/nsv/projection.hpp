#pragma once

// Weyl (Helmholtz) decomposition on the periodic box and the pressure
// operator built from it.
//
// Pressure convention: u_t - rho Lap u - grad p = w, so with div u = 0 the
// potential is p = -Lap^{-1} div w and grad p = -(gradient part of w).

#include "nsv/fields.hpp"

namespace nsv {

struct DecompositionResult {
  SpectralVectorField solenoidal;
  SpectralVectorField gradient;  // == gradient(potential)
  SpectralField potential;       // zero mean, Lap^{-1} div v
};

/// Mode-wise k (k.v)/|k|^2 for k != 0; the mean goes to the solenoidal part.
DecompositionResult weyl_decompose(const SpectralVectorField& v);

/// Solenoidal part of v.
SpectralVectorField leray_project(const SpectralVectorField& v);

/// grad p = -(gradient part of w) at one node.
SpectralVectorField pressure_gradient(const SpectralVectorField& w);
/// The same per time node; w + result is divergence-free.
SpaceTimeField pressure_gradient_from_w(const SpaceTimeField& w, Exec exec = Exec::parallel);

/// p = -Lap^{-1} div w (zero mean).
SpectralField pressure_potential(const SpectralVectorField& w);

/// Smallest c with sum_i int_0^t ||p_{x_i}||^2 <= c sum_i int_0^t ||w_i||^2
/// at every node t > 0 (0 for w = 0).
double pressure_bound_constant(const SpaceTimeField& w);

}  // namespace nsv
