#include <doctest.h>

#include <cmath>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"

using namespace relrank;

TEST_CASE("point_distance on a 3-4-5 triangle") {
  std::vector<double> a{0.0, 0.0}, b{3.0, 4.0};
  CHECK(point_distance(a, b) == doctest::Approx(5.0));
  CHECK(point_distance(a, a) == 0.0);
}

TEST_CASE("cloud accessors, subset, append") {
  PointCloud c({0, 0, 3, 0, 0, 4}, 2, {10, 11, 12});
  REQUIRE(c.size() == 3);
  CHECK(c.dim() == 2);
  CHECK(c.point(1)[0] == 3.0);
  CHECK(c.label(2) == 12);

  std::vector<std::uint32_t> pick{2, 0};
  PointCloud s = c.subset(pick);
  REQUIRE(s.size() == 2);
  CHECK(s.point(0)[1] == 4.0);
  CHECK(s.label(0) == 12);
  CHECK(s.label(1) == 10);

  PointCloud empty;
  empty.append(s);
  CHECK(empty.dim() == 2);
  CHECK(empty.size() == 2);
  empty.append(c);
  CHECK(empty.size() == 5);

  PointCloud single = PointCloud::single_point(std::vector<double>{-1.0, 2.0});
  CHECK(single.size() == 1);
  CHECK(single.point(0)[0] == -1.0);
}

TEST_CASE("non-finite coordinates are rejected") {
  CHECK_THROWS_AS(PointCloud({0.0, std::nan("")}, 2), structural_error);
  CHECK_THROWS_AS(PointCloud({0.0, 1.0, 2.0}, 2), structural_error);
}

TEST_CASE("distance matrix is symmetric with zero diagonal") {
  PointCloud c({0, 0, 3, 0, 0, 4}, 2);
  DistanceMatrix dm = distance_matrix(c);
  REQUIRE(dm.n == 3);
  CHECK(dm(0, 1) == doctest::Approx(3.0));
  CHECK(dm(0, 2) == doctest::Approx(4.0));
  CHECK(dm(1, 2) == doctest::Approx(5.0));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(dm(i, i) == 0.0);
    for (std::size_t j = 0; j < 3; ++j) CHECK(dm(i, j) == dm(j, i));
  }
}

TEST_CASE("center of mass and point distances") {
  PointCloud c({1, 2, 3, 4}, 2);
  auto com = center_of_mass(c);
  CHECK(com[0] == doctest::Approx(2.0));
  CHECK(com[1] == doctest::Approx(3.0));

  auto d = distances_to_point(c, std::vector<double>{1.0, 2.0});
  CHECK(d[0] == 0.0);
  CHECK(d[1] == doctest::Approx(std::sqrt(8.0)));
}

TEST_CASE("pca recovers axis-aligned variance") {
  // Centered cloud whose covariance is diagonal: eigenvalues 10/6 and 1/12.
  PointCloud c({2, 0, -2, 0, 1, 0, -1, 0, 0, 0.5, 0, -0.5}, 2);
  Projection2 p = pca_project2(c, {{1.0, 1.0}});
  CHECK_FALSE(p.degenerate);
  CHECK(p.eigenvalues[0] == doctest::Approx(10.0 / 6.0));
  CHECK(p.eigenvalues[1] == doctest::Approx(1.0 / 12.0));
  CHECK(p.axes[0] == doctest::Approx(1.0));
  CHECK(p.axes[1] == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(p.axes[2] == doctest::Approx(0.0).epsilon(1e-6));
  // The minor axis is (0, 1) up to a sign that iteration noise may flip.
  double sy = p.axes[3] >= 0.0 ? 1.0 : -1.0;
  CHECK(sy * p.axes[3] == doctest::Approx(1.0));
  // With axis-aligned axes and zero mean the projection is the original
  // cloud, and the extra point rides along without influencing the fit.
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(p.coords[2 * i] == doctest::Approx(c.point(i)[0]));
    CHECK(p.coords[2 * i + 1] == doctest::Approx(sy * c.point(i)[1]));
  }
  CHECK(p.coords[12] == doctest::Approx(1.0));
  CHECK(p.coords[13] == doctest::Approx(sy * 1.0));
}

TEST_CASE("pca flags collinear input as degenerate") {
  PointCloud c({0, 0, 1, 0, 2, 0}, 2);
  Projection2 p = pca_project2(c);
  CHECK(p.degenerate);
  CHECK(p.eigenvalues[1] == doctest::Approx(0.0));
}

TEST_CASE("kmeans separates two far clusters exactly") {
  PointCloud c({0, 0, 0, 1, 10, 10, 10, 11}, 2);
  KMeansResult r = kmeans(c, 2, 7);
  REQUIRE(r.k == 2);
  CHECK(r.inertia == doctest::Approx(1.0));
  CHECK(r.assignment[0] == r.assignment[1]);
  CHECK(r.assignment[2] == r.assignment[3]);
  CHECK(r.assignment[0] != r.assignment[2]);
  for (std::size_t i = 1; i < r.inertia_history.size(); ++i) {
    CHECK(r.inertia_history[i] <= r.inertia_history[i - 1] + 1e-12);
  }
}

TEST_CASE("pairwise gather agrees between cached and direct paths") {
  std::vector<double> coords;
  for (int i = 0; i < 50; ++i) {
    coords.push_back(std::cos(0.37 * i) * (1 + i % 5));
    coords.push_back(std::sin(0.53 * i));
  }
  PointCloud c(coords, 2);
  PairwiseDistances cached(c);
  PairwiseDistances direct(c, 10);
  CHECK(cached.cached());
  CHECK_FALSE(direct.cached());

  std::vector<std::uint32_t> idx{4, 0, 17, 33, 49};
  DistanceMatrix a = cached.gather(idx);
  DistanceMatrix b = direct.gather(idx);
  REQUIRE(a.n == idx.size());
  REQUIRE(b.n == idx.size());
  for (std::size_t i = 0; i < a.d.size(); ++i) CHECK(a.d[i] == b.d[i]);

  // Gathered entries match distances computed on the subset directly.
  DistanceMatrix whole = distance_matrix(c.subset(idx));
  for (std::size_t i = 0; i < a.d.size(); ++i) {
    CHECK(a.d[i] == doctest::Approx(whole.d[i]));
  }
}
