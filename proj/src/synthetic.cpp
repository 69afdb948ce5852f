#include "synthetic.hpp"

#include <cmath>
#include <stdexcept>

#include "rng.hpp"

namespace relrank {

PointCloud make_noisy_circle(std::size_t n, double radius, double noise_sigma,
                             std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("empty circle");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  if (noise_sigma < 0.0) throw std::invalid_argument("negative noise");
  Philox rng(seed, rng_purpose::kCloud);
  std::vector<double> coords;
  coords.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    double a = 2.0 * 3.141592653589793238462643383279502884 * rng.uniform();
    coords.push_back(radius * std::cos(a) + noise_sigma * rng.gaussian());
    coords.push_back(radius * std::sin(a) + noise_sigma * rng.gaussian());
  }
  return PointCloud(std::move(coords), 2);
}

PointCloud make_uniform_box(std::size_t n, double lo, double hi, std::size_t dim,
                            std::uint64_t seed) {
  if (n == 0 || dim == 0) throw std::invalid_argument("empty box cloud");
  if (!(lo < hi)) throw std::invalid_argument("box needs lo < hi");
  Philox rng(seed, rng_purpose::kCloud);
  std::vector<double> coords;
  coords.reserve(n * dim);
  for (std::size_t i = 0; i < n * dim; ++i) coords.push_back(lo + (hi - lo) * rng.uniform());
  return PointCloud(std::move(coords), dim);
}

}  // namespace relrank
