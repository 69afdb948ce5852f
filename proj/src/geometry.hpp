#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace relrank {

// Finite point set in R^dim, coordinates row-major. Optional integer labels
// align index for index with the points.
class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(std::vector<double> coords, std::size_t dim,
             std::vector<std::int32_t> labels = {});

  static PointCloud single_point(std::span<const double> coords);

  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  const std::vector<double>& coords() const { return coords_; }
  bool has_labels() const { return !labels_.empty(); }
  const std::vector<std::int32_t>& labels() const { return labels_; }
  std::int32_t label(std::size_t i) const { return labels_[i]; }

  PointCloud subset(std::span<const std::uint32_t> indices) const;
  void append(const PointCloud& other);

 private:
  std::vector<double> coords_;
  std::size_t dim_ = 0;
  std::vector<std::int32_t> labels_;
};

double point_distance(std::span<const double> a, std::span<const double> b);

// Dense symmetric Euclidean distances, zero diagonal.
struct DistanceMatrix {
  std::size_t n = 0;
  std::vector<double> d;  // n*n, row-major

  double operator()(std::size_t i, std::size_t j) const { return d[i * n + j]; }
  double& at(std::size_t i, std::size_t j) { return d[i * n + j]; }
};

DistanceMatrix distance_matrix(const PointCloud& cloud);

std::vector<double> center_of_mass(const PointCloud& cloud);

// Distances from every cloud point to one query point.
std::vector<double> distances_to_point(const PointCloud& cloud, std::span<const double> p);

struct Projection2 {
  std::vector<double> coords;       // size() x 2, row-major
  std::vector<double> axes;         // 2 x dim, the projection directions
  std::vector<double> eigenvalues;  // the two leading covariance eigenvalues
  bool degenerate = false;          // fewer than two directions of variance
};

// Principal-plane projection by power iteration on the covariance operator.
// Extra points (queries, centroids) are projected with the axes fitted to
// the cloud but do not influence them.
Projection2 pca_project2(const PointCloud& cloud,
                         const std::vector<std::vector<double>>& extra = {});

struct KMeansResult {
  std::size_t k = 0;
  std::size_t dim = 0;
  std::vector<double> centroids;        // k x dim
  std::vector<std::uint32_t> assignment;
  double inertia = 0.0;
  std::size_t iterations = 0;
  std::vector<double> inertia_history;  // inertia after each update step
};

KMeansResult kmeans(const PointCloud& cloud, std::size_t k, std::uint64_t seed);

// Pairwise distances for subsample gathering. Builds the full table when the
// cloud is small enough to afford it; gather() is bit-identical either way
// because both paths call point_distance on the same operands.
class PairwiseDistances {
 public:
  explicit PairwiseDistances(const PointCloud& cloud,
                             std::size_t cache_limit = kDefaultCacheLimit);

  DistanceMatrix gather(std::span<const std::uint32_t> indices) const;
  const PointCloud& cloud() const { return cloud_; }
  bool cached() const { return !table_.empty(); }

  static constexpr std::size_t kDefaultCacheLimit = 4096;

 private:
  const PointCloud& cloud_;
  std::vector<double> table_;  // full n*n when cached
};

}  // namespace relrank
