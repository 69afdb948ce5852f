#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geometry.hpp"
#include "probability.hpp"
#include "stablerank.hpp"

namespace relrank {

struct FilterSpec {
  enum class Kind { Distance, Directional };
  Kind kind = Kind::Distance;
  VectorField field;  // Directional only
};

struct QuerySpec {
  enum class Kind { Coords, CenterOfMass };
  Kind kind = Kind::CenterOfMass;
  std::vector<double> coords;
};

struct DistributionSpec {
  enum class Kind { UniformProbability, Direct, Fitted };
  Kind kind = Kind::UniformProbability;
  Distribution direct;
  RelativeGaussianParams fitted;
};

struct ContourSpec {
  std::vector<double> density_jumps;
  std::vector<double> density_values;  // empty means the constant-1 density
  double truncation = kInfinity;

  Contour build() const;
};

struct PipelineConfig {
  FilterSpec filter;
  QuerySpec query;
  DistributionSpec distribution;
  SamplingConfig sampling;
  int degree = 0;
  ContourSpec contour;
  std::size_t workers = 0;
  std::size_t simplex_cap = 5'000'000;
};

// Resolves the query point against the reference cloud.
std::vector<double> resolve_query(const PointCloud& reference, const QuerySpec& q);

// Probability over the reference given filter, query, and distribution.
// The fitted distribution requires the distance filter.
std::vector<double> build_probability(const PointCloud& reference, const PipelineConfig& cfg);

struct PipelineResult {
  StepFun rank;
  bool empty_support = false;  // sample size exceeded the support
  std::uint32_t instances = 0;
  double fitted_mu = 0.0;      // populated for the fitted distribution
  double fitted_sigma = 0.0;
};

// Subsample, compute one barcode per instance, average the stable ranks.
// Instance work is farmed out to workers but lands in per-instance slots,
// so the result does not depend on the worker count.
PipelineResult averaged_stable_rank(const PairwiseDistances& dist,
                                    std::span<const double> prob,
                                    const PipelineConfig& cfg);

// The full run: probability, then averaged rank.
PipelineResult run_pipeline(const PairwiseDistances& dist, const PipelineConfig& cfg);

// Config JSON round-trip; parse rejects unknown keys.
PipelineConfig parse_pipeline_config(const nlohmann::json& j);
nlohmann::ordered_json pipeline_config_json(const PipelineConfig& cfg);

}  // namespace relrank
