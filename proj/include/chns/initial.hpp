#pragma once

#include "chns/grid.hpp"

#include <cstdint>
#include <random>
#include <string>

namespace chns {

/// Uniform double in [0, 1) built from the top 53 bits of the generator, so
/// values are identical across standard library implementations.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// phi_mean + amplitude * U(-1, 1) cell by cell.
ScalarField spinodal_phase(const Grid& g, double phi_mean, double amplitude, std::uint64_t seed);

/// Horizontal band of phase +1 (|y - ly/2| < width/2) in a -1 matrix, joined by a tanh profile.
ScalarField stripe_phase(const Grid& g, double width, double thickness, double fill = 0.9);

/// Exactly divergence-free MAC velocity from the nodal stream function
/// amplitude * sin^2(pi x/lx) sin^2(pi y/ly); normal components vanish on the walls.
MacVelocity discrete_vortex(const Grid& g, double amplitude);

}  // namespace chns
