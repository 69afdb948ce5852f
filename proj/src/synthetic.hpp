#pragma once

#include <cstdint>

#include "geometry.hpp"

namespace relrank {

// n points at uniformly random angles on a radius-r circle, plus isotropic
// Gaussian noise of the given standard deviation on each coordinate.
PointCloud make_noisy_circle(std::size_t n, double radius, double noise_sigma,
                             std::uint64_t seed);

// n points uniform in [lo, hi]^dim.
PointCloud make_uniform_box(std::size_t n, double lo, double hi, std::size_t dim,
                            std::uint64_t seed);

}  // namespace relrank
