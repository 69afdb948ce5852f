#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pipeline.hpp"
#include "report.hpp"

namespace relrank {

// Compares the train and test partitions of each digit against random
// re-partitions of the pooled cloud, one uniform-probability run per side.
struct GlobalConfig {
  std::filesystem::path data_dir;
  std::vector<int> digits{0, 7};
  std::vector<int> degrees{0, 1};
  double truncation = kInfinity;
  std::uint32_t sample_size = 30;
  std::uint32_t instances = 200;
  std::uint32_t repeats = 10;
  std::uint32_t ref_limit = 1000;  // per split, 0 keeps everything
  std::uint64_t seed = 0;
  std::size_t workers = 0;
};

Report run_global_experiment(const GlobalConfig& cfg);

// Reference-object constructions in the plane: a directional filter against
// an explicit vector (example 1), a distance-Gaussian against a noisy
// circle (example 2), and a to-center step filter (example 3).
struct PlaneConfig {
  int example = 1;
  std::uint32_t ref_points = 500;  // circle size for examples 2 and 3
  std::uint32_t queries = 200;
  double radius = 3.0;
  double noise = 0.2;
  double box_half_width = 5.0;
  std::vector<double> ref_point{-1.0, 2.0};  // example 1 reference object
  std::vector<double> direction{1.0, 1.0};     // example 1
  std::uint32_t sample_size = 10;
  std::uint32_t instances = 100;
  double threshold_t = 0.0;   // 0 picks the per-example default
  double threshold_v = 0.0;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
};

Report run_plane_experiment(const PlaneConfig& cfg);

// Relative constructions against a digit reference: fitted Gaussians around
// each query. Modes: illustrate (rank curves plus a planar projection),
// ambient (k-means centers against uniform ambient points), classify (SVM
// on rank kernels), sweep (distance to the uniform baseline as the fit
// parameters widen).
struct RelativeConfig {
  std::filesystem::path data_dir;
  std::string mode = "classify";
  std::vector<int> ref_digits{1, 7};
  std::uint32_t ref_limit = 2000;  // total across digits, 0 keeps everything
  double percentile = 1.0;
  std::uint32_t amplification = 2;
  std::uint32_t sample_size = 30;
  std::uint32_t instances = 100;
  int degree = 0;
  ContourSpec contour;
  std::uint32_t train_ranks_per_class = 10;
  std::uint32_t eval_per_class = 250;
  double svm_c = 1.0;
  std::uint32_t repeats = 10;
  std::uint32_t queries = 3;  // illustrate and ambient modes
  std::vector<double> sweep_percentiles{1.0, 10.0, 50.0};
  std::vector<std::uint32_t> sweep_amplifications{5, 20, 100};
  std::uint64_t seed = 0;
  std::size_t workers = 0;
};

Report run_relative_experiment(const RelativeConfig& cfg);

// Config parsing with scale presets; "desk" is the default sizing above,
// "full" removes the limits.
GlobalConfig parse_global_config(const nlohmann::json& j);
PlaneConfig parse_plane_config(const nlohmann::json& j);
RelativeConfig parse_relative_config(const nlohmann::json& j);

// Seeded subset of size at most limit (everything when limit is 0).
std::vector<std::uint32_t> seeded_subset(std::size_t total, std::uint32_t limit,
                                         std::uint64_t seed);

}  // namespace relrank
