#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "geometry.hpp"
#include "rng.hpp"

namespace relrank {

// Nonnegative weighting function on filter values.
struct Distribution {
  enum class Kind { UniformConstant, Gaussian, StepGE, Window };

  Kind kind = Kind::UniformConstant;
  double a = 0.0;  // Gaussian mean, StepGE threshold, Window low edge
  double b = 1.0;  // Gaussian sigma, Window high edge

  double operator()(double x) const;

  static Distribution uniform();
  static Distribution gaussian(double mu, double sigma);
  static Distribution step_ge(double threshold);
  static Distribution window(double lo, double hi);
};

// Assigns a direction to each query point: either a fixed vector or the
// vector toward a fixed center.
struct VectorField {
  enum class Kind { Constant, ToCenter };

  Kind kind = Kind::Constant;
  std::vector<double> v;  // the vector itself, or the center

  static VectorField constant(std::vector<double> vec);
  static VectorField to_center(std::vector<double> center);
};

// Signed projection of p - x onto the field direction at p, for every
// reference point x. A zero direction yields all zeros.
std::vector<double> directional_filter(const PointCloud& reference,
                                       std::span<const double> p,
                                       const VectorField& field);

// Plain Euclidean distance from each reference point to p. Equals the
// directional filter under a to-center field anchored at p.
std::vector<double> distance_filter(const PointCloud& reference, std::span<const double> p);

struct RelativeGaussianParams {
  double percentile = 1.0;       // percentile rank selecting the mean
  std::uint32_t amplification = 5;  // sigma index multiplier on sample size
};

struct FittedGaussian {
  Distribution distribution;
  double mu = 0.0;
  double sigma = 0.0;
};

// Gaussian adapted to the local scale of the distance vector: mu is the
// nearest-rank percentile, sigma the (s * amplification)-th smallest
// deviation from it.
FittedGaussian fit_relative_gaussian(std::span<const double> distances,
                                     const RelativeGaussianParams& params,
                                     std::uint32_t sample_size);

// Normalized weights D(filter[i]) / S; all zeros when S = 0.
std::vector<double> to_probability(std::span<const double> filter_values,
                                   const Distribution& d);

struct SamplingConfig {
  std::uint32_t sample_size = 30;
  std::uint32_t instances = 100;
  std::uint64_t seed = 0;
};

// Instances are empty iff the probability's support is smaller than the
// sample size. Instance i draws from Philox stream (seed, i), so results
// do not depend on how instances are scheduled.
struct SubsampleSet {
  std::vector<std::vector<std::uint32_t>> instances;
  bool empty() const { return instances.empty(); }
};

SubsampleSet draw_subsamples(std::span<const double> prob, const SamplingConfig& cfg);

// Sequential weighted draws without replacement over a Fenwick tree; the
// remaining-weight array stays authoritative so floating-point residue in
// the tree cannot select an exhausted index.
class WeightedSampler {
 public:
  explicit WeightedSampler(std::span<const double> weights);

  std::uint32_t support() const { return support_; }

  // Draws s distinct indices into out and restores internal state after.
  void draw(std::uint32_t s, Philox& rng, std::vector<std::uint32_t>& out);

 private:
  void add(std::size_t i, double delta);
  double total() const;
  std::size_t find(double u) const;

  std::vector<double> tree_;
  std::vector<double> remaining_;
  std::uint32_t support_ = 0;
};

}  // namespace relrank
