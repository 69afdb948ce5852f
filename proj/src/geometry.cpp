#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "errors.hpp"
#include "rng.hpp"

namespace relrank {

PointCloud::PointCloud(std::vector<double> coords, std::size_t dim,
                       std::vector<std::int32_t> labels)
    : coords_(std::move(coords)), dim_(dim), labels_(std::move(labels)) {
  if (dim_ == 0) {
    if (!coords_.empty()) throw structural_error("point cloud with dim 0 but nonempty coords");
  } else if (coords_.size() % dim_ != 0) {
    throw structural_error("coordinate buffer not a multiple of dim");
  }
  if (!labels_.empty() && labels_.size() != size()) {
    throw structural_error("label count does not match point count");
  }
  for (double c : coords_) {
    if (!std::isfinite(c)) throw structural_error("non-finite coordinate");
  }
}

PointCloud PointCloud::single_point(std::span<const double> coords) {
  return PointCloud(std::vector<double>(coords.begin(), coords.end()), coords.size());
}

PointCloud PointCloud::subset(std::span<const std::uint32_t> indices) const {
  std::vector<double> coords;
  coords.reserve(indices.size() * dim_);
  std::vector<std::int32_t> labels;
  if (has_labels()) labels.reserve(indices.size());
  for (std::uint32_t i : indices) {
    if (i >= size()) throw std::out_of_range("subset index past point count");
    auto p = point(i);
    coords.insert(coords.end(), p.begin(), p.end());
    if (has_labels()) labels.push_back(labels_[i]);
  }
  return PointCloud(std::move(coords), dim_, std::move(labels));
}

void PointCloud::append(const PointCloud& other) {
  if (other.size() == 0) return;
  if (size() == 0 && dim_ == 0) {
    *this = other;
    return;
  }
  if (other.dim_ != dim_) throw structural_error("appending cloud of different dimension");
  if (has_labels() != other.has_labels())
    throw structural_error("appending cloud with mismatched label presence");
  coords_.insert(coords_.end(), other.coords_.begin(), other.coords_.end());
  labels_.insert(labels_.end(), other.labels_.begin(), other.labels_.end());
}

double point_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw structural_error("distance between points of different dimension");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

DistanceMatrix distance_matrix(const PointCloud& cloud) {
  std::size_t n = cloud.size();
  if (n == 0) throw std::invalid_argument("distance matrix of an empty cloud");
  DistanceMatrix dm;
  dm.n = n;
  dm.d.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = point_distance(cloud.point(i), cloud.point(j));
      dm.at(i, j) = v;
      dm.at(j, i) = v;
    }
  }
  return dm;
}

std::vector<double> center_of_mass(const PointCloud& cloud) {
  if (cloud.size() == 0) throw std::invalid_argument("center of mass of an empty cloud");
  std::vector<double> c(cloud.dim(), 0.0);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    auto p = cloud.point(i);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] += p[k];
  }
  for (double& v : c) v /= static_cast<double>(cloud.size());
  return c;
}

std::vector<double> distances_to_point(const PointCloud& cloud, std::span<const double> p) {
  if (p.size() != cloud.dim())
    throw structural_error("query point dimension does not match cloud");
  std::vector<double> out(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) out[i] = point_distance(cloud.point(i), p);
  return out;
}

namespace {

// v <- v / ||v||; returns the old norm.
double normalize(std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  s = std::sqrt(s);
  if (s > 0.0) {
    for (double& x : v) x /= s;
  }
  return s;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Leading eigenpair of the covariance operator v -> X^T (X v) / m with X the
// centered data, deflated against the vectors already found.
std::pair<double, std::vector<double>> power_eig(
    const std::vector<double>& centered, std::size_t m, std::size_t d,
    const std::vector<std::vector<double>>& deflate) {
  constexpr int kMaxIter = 1000;
  constexpr double kTol = 1e-10;

  Philox rng(0x9e3779b97f4a7c15ull, 0);
  std::vector<double> v(d);
  for (double& x : v) x = rng.gaussian();
  for (const auto& u : deflate) {
    double c = dot(v, u);
    for (std::size_t k = 0; k < d; ++k) v[k] -= c * u[k];
  }
  if (normalize(v) == 0.0) return {0.0, std::vector<double>(d, 0.0)};

  std::vector<double> xv(m), w(d);
  double lambda = 0.0;
  for (int it = 0; it < kMaxIter; ++it) {
    for (std::size_t i = 0; i < m; ++i) {
      const double* row = centered.data() + i * d;
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += row[k] * v[k];
      xv[i] = s;
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double* row = centered.data() + i * d;
      double s = xv[i];
      for (std::size_t k = 0; k < d; ++k) w[k] += s * row[k];
    }
    for (double& x : w) x /= static_cast<double>(m);
    for (const auto& u : deflate) {
      double c = dot(w, u);
      for (std::size_t k = 0; k < d; ++k) w[k] -= c * u[k];
    }
    double nl = normalize(w);
    v.swap(w);
    if (nl == 0.0) return {0.0, std::vector<double>(d, 0.0)};
    if (std::abs(nl - lambda) <= kTol * std::max(1.0, nl)) {
      lambda = nl;
      break;
    }
    lambda = nl;
  }
  return {lambda, v};
}

void fix_sign(std::vector<double>& v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  double thresh = 1e-9 * std::max(norm, 1e-300);
  for (double x : v) {
    if (std::abs(x) > thresh) {
      if (x < 0.0) {
        for (double& y : v) y = -y;
      }
      return;
    }
  }
}

}  // namespace

Projection2 pca_project2(const PointCloud& cloud,
                         const std::vector<std::vector<double>>& extra) {
  std::size_t m = cloud.size();
  std::size_t d = cloud.dim();
  if (m == 0) throw std::invalid_argument("projection of an empty cloud");
  for (const auto& e : extra) {
    if (e.size() != d) throw structural_error("extra point dimension does not match cloud");
  }

  std::vector<double> mean = center_of_mass(cloud);
  std::vector<double> centered(m * d);
  for (std::size_t i = 0; i < m; ++i) {
    auto p = cloud.point(i);
    for (std::size_t k = 0; k < d; ++k) centered[i * d + k] = p[k] - mean[k];
  }

  Projection2 out;
  std::vector<std::vector<double>> axes;
  std::vector<double> lambdas;
  for (int a = 0; a < 2 && static_cast<std::size_t>(a) < d; ++a) {
    auto [lambda, v] = power_eig(centered, m, d, axes);
    fix_sign(v);
    axes.push_back(std::move(v));
    lambdas.push_back(lambda);
  }
  while (axes.size() < 2) {
    // One-dimensional input: pad with a zero axis.
    axes.emplace_back(d, 0.0);
    lambdas.push_back(0.0);
  }

  double scale = std::max(lambdas[0], 1.0);
  std::size_t nonzero = 0;
  for (double l : lambdas) {
    if (l > 1e-12 * scale) ++nonzero;
  }
  out.degenerate = nonzero < 2;

  // A vanished direction of variance still needs a usable second axis, so
  // fall back to standard basis vectors orthogonal to what was found.
  for (std::size_t a = 0; a < 2; ++a) {
    double norm = std::sqrt(dot(axes[a], axes[a]));
    if (norm > 0.5) continue;
    for (std::size_t k = 0; k < d; ++k) {
      std::vector<double> cand(d, 0.0);
      cand[k] = 1.0;
      for (std::size_t b = 0; b < a; ++b) {
        double c = dot(cand, axes[b]);
        for (std::size_t q = 0; q < d; ++q) cand[q] -= c * axes[b][q];
      }
      if (normalize(cand) > 1e-6) {
        axes[a] = std::move(cand);
        break;
      }
    }
  }

  auto project = [&](std::span<const double> p, double* dst) {
    for (std::size_t a = 0; a < 2; ++a) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += (p[k] - mean[k]) * axes[a][k];
      dst[a] = s;
    }
  };

  out.coords.resize((m + extra.size()) * 2);
  for (std::size_t i = 0; i < m; ++i) project(cloud.point(i), out.coords.data() + 2 * i);
  for (std::size_t e = 0; e < extra.size(); ++e) {
    project(extra[e], out.coords.data() + 2 * (m + e));
  }
  out.axes.resize(2 * d);
  for (std::size_t a = 0; a < 2; ++a) {
    std::copy(axes[a].begin(), axes[a].end(), out.axes.begin() + a * d);
  }
  out.eigenvalues = std::move(lambdas);
  return out;
}

namespace {

double sq_distance(std::span<const double> a, const double* b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

}  // namespace

KMeansResult kmeans(const PointCloud& cloud, std::size_t k, std::uint64_t seed) {
  std::size_t m = cloud.size();
  std::size_t d = cloud.dim();
  if (k == 0) throw std::invalid_argument("kmeans with k = 0");
  if (k > m) throw std::invalid_argument("kmeans with more clusters than points");

  KMeansResult res;
  res.k = k;
  res.dim = d;
  res.centroids.assign(k * d, 0.0);
  res.assignment.assign(m, 0);

  Philox rng(seed, rng_purpose::kKMeans);

  // k-means++ seeding.
  std::vector<std::size_t> chosen;
  chosen.push_back(static_cast<std::size_t>(rng.below(m)));
  std::vector<double> best_sq(m, std::numeric_limits<double>::infinity());
  while (chosen.size() < k) {
    std::size_t last = chosen.back();
    auto lp = cloud.point(last);
    for (std::size_t i = 0; i < m; ++i) {
      double sq = sq_distance(cloud.point(i), lp.data());
      if (sq < best_sq[i]) best_sq[i] = sq;
    }
    double total = 0.0;
    for (double v : best_sq) total += v;
    std::size_t pick;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      double acc = 0.0;
      pick = m - 1;
      for (std::size_t i = 0; i < m; ++i) {
        acc += best_sq[i];
        if (u < acc) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<std::size_t>(rng.below(m));
    }
    chosen.push_back(pick);
  }
  for (std::size_t c = 0; c < k; ++c) {
    auto p = cloud.point(chosen[c]);
    std::copy(p.begin(), p.end(), res.centroids.begin() + c * d);
  }

  constexpr std::size_t kMaxIter = 300;
  std::vector<std::uint32_t> prev(m, std::numeric_limits<std::uint32_t>::max());
  std::vector<double> sums(k * d);
  std::vector<std::size_t> counts(k);

  for (res.iterations = 0; res.iterations < kMaxIter; ++res.iterations) {
    double inertia = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      auto p = cloud.point(i);
      double best = std::numeric_limits<double>::infinity();
      std::uint32_t arg = 0;
      for (std::size_t c = 0; c < k; ++c) {
        double sq = sq_distance(p, res.centroids.data() + c * d);
        if (sq < best) {
          best = sq;
          arg = static_cast<std::uint32_t>(c);
        }
      }
      res.assignment[i] = arg;
      inertia += best;
    }
    res.inertia = inertia;
    res.inertia_history.push_back(inertia);
    if (res.assignment == prev) break;
    prev = res.assignment;

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < m; ++i) {
      auto p = cloud.point(i);
      double* dst = sums.data() + res.assignment[i] * d;
      for (std::size_t q = 0; q < d; ++q) dst[q] += p[q];
      ++counts[res.assignment[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        for (std::size_t q = 0; q < d; ++q) {
          res.centroids[c * d + q] = sums[c * d + q] / static_cast<double>(counts[c]);
        }
      }
    }
    // An emptied cluster restarts at the point farthest from its nearest
    // surviving centroid, lowest index on ties.
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      double far_sq = -1.0;
      std::size_t far_i = 0;
      for (std::size_t i = 0; i < m; ++i) {
        auto p = cloud.point(i);
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t c2 = 0; c2 < k; ++c2) {
          if (counts[c2] == 0 && c2 != c) continue;
          if (c2 == c) continue;
          double sq = sq_distance(p, res.centroids.data() + c2 * d);
          if (sq < nearest) nearest = sq;
        }
        if (nearest > far_sq) {
          far_sq = nearest;
          far_i = i;
        }
      }
      auto p = cloud.point(far_i);
      std::copy(p.begin(), p.end(), res.centroids.begin() + c * d);
    }
  }
  return res;
}

PairwiseDistances::PairwiseDistances(const PointCloud& cloud, std::size_t cache_limit)
    : cloud_(cloud) {
  std::size_t n = cloud.size();
  if (n == 0 || n > cache_limit) return;
  table_.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = point_distance(cloud.point(i), cloud.point(j));
      table_[i * n + j] = v;
      table_[j * n + i] = v;
    }
  }
}

DistanceMatrix PairwiseDistances::gather(std::span<const std::uint32_t> indices) const {
  std::size_t s = indices.size();
  DistanceMatrix dm;
  dm.n = s;
  dm.d.assign(s * s, 0.0);
  std::size_t n = cloud_.size();
  for (std::size_t a = 0; a < s; ++a) {
    for (std::size_t b = a + 1; b < s; ++b) {
      std::uint32_t i = indices[a];
      std::uint32_t j = indices[b];
      if (i >= n || j >= n) throw std::out_of_range("gather index past point count");
      double v = table_.empty() ? point_distance(cloud_.point(i), cloud_.point(j))
                                : table_[static_cast<std::size_t>(i) * n + j];
      dm.at(a, b) = v;
      dm.at(b, a) = v;
    }
  }
  return dm;
}

}  // namespace relrank
