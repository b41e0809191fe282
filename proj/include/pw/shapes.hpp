#pragma once

#include <cstdint>

#include "pw/measure.hpp"

namespace pw::shapes {

/// Bundled 2-D pivot: a dog-like polyline (body, head, muzzle, legs, tail)
/// sampled at roughly `points` vertices. Normalized, uniform weights.
DiscreteMeasure dog2d(int points = 110, std::uint64_t seed = 7);

/// Bundled 3-D pivot: an elongated, jittered torus. Normalized, uniform
/// weights.
DiscreteMeasure torus3d(int points = 140, std::uint64_t seed = 11);

/// Simple parametric families used by the synthetic clustering suites.
DiscreteMeasure ring2d(int points, std::uint64_t seed, double squash = 1.0);
DiscreteMeasure bar2d(int points, std::uint64_t seed);
DiscreteMeasure cross2d(int points, std::uint64_t seed);
DiscreteMeasure vee2d(int points, std::uint64_t seed);
DiscreteMeasure scurve2d(int points, std::uint64_t seed);

}  // namespace pw::shapes
