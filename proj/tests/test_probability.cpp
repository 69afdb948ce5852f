#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "errors.hpp"
#include "probability.hpp"

using namespace relrank;

TEST_CASE("distribution kinds evaluate pointwise") {
  Distribution u = Distribution::uniform();
  CHECK(u(-3.0) == 1.0);
  CHECK(u(42.0) == 1.0);

  Distribution g = Distribution::gaussian(0.0, 1.0);
  CHECK(g(0.0) == doctest::Approx(1.0));
  CHECK(g(1.0) == doctest::Approx(std::exp(-0.5)));
  CHECK(g(-1.0) == g(1.0));

  Distribution s = Distribution::step_ge(1.0);
  CHECK(s(1.0) == 1.0);
  CHECK(s(0.999) == 0.0);
  CHECK(s(5.0) == 1.0);

  Distribution w = Distribution::window(-2.0, 1.0);
  CHECK(w(-2.0) == 1.0);
  CHECK(w(1.0) == 1.0);
  CHECK(w(0.0) == 1.0);
  CHECK(w(1.001) == 0.0);
  CHECK(w(-2.001) == 0.0);
}

TEST_CASE("directional filter projects onto the field") {
  PointCloud ref({0, 0, 3, 0}, 2);

  // Constant field keeps only the component of p - x along v.
  auto vals = directional_filter(ref, std::vector<double>{3.0, 4.0},
                                 VectorField::constant({2.0, 0.0}));
  CHECK(vals[0] == doctest::Approx(3.0));
  CHECK(vals[1] == doctest::Approx(0.0));

  // To-center field at x = (3,0) with center (0,0) points along -e1.
  auto toc = directional_filter(ref, std::vector<double>{1.0, 0.0},
                                 VectorField::to_center({0.0, 0.0}));
  CHECK(toc[0] == doctest::Approx(0.0));  // zero direction at the center itself
  CHECK(toc[1] == doctest::Approx(2.0));

  auto zero = directional_filter(ref, std::vector<double>{1.0, 1.0},
                                 VectorField::constant({0.0, 0.0}));
  CHECK(zero[0] == 0.0);
  CHECK(zero[1] == 0.0);
}

TEST_CASE("to-center field anchored at the query equals the distance filter") {
  PointCloud ref({0, 0, 3, 1, -2, 5}, 2);
  std::vector<double> p{1.0, 1.0};
  auto a = directional_filter(ref, p, VectorField::to_center(p));
  auto b = distance_filter(ref, p);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  CHECK(b[0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(b[1] == doctest::Approx(2.0));
}

TEST_CASE("relative gaussian fit picks nearest-rank statistics") {
  std::vector<double> d(100);
  for (int i = 0; i < 100; ++i) d[i] = i + 1.0;

  FittedGaussian f = fit_relative_gaussian(d, {1.0, 2}, 5);
  CHECK(f.mu == 1.0);     // 1st order statistic
  CHECK(f.sigma == 9.0);  // 10th smallest deviation from 1

  FittedGaussian mid = fit_relative_gaussian(d, {50.0, 1}, 1);
  CHECK(mid.mu == 50.0);

  FittedGaussian top = fit_relative_gaussian(d, {100.0, 1}, 1);
  CHECK(top.mu == 100.0);
}

TEST_CASE("degenerate local scale falls back to a positive sigma") {
  std::vector<double> flat{5.0, 5.0, 5.0, 5.0};
  FittedGaussian f = fit_relative_gaussian(flat, {1.0, 1}, 1);
  CHECK(f.mu == 5.0);
  CHECK(f.sigma == 1.0);

  std::vector<double> near{5.0, 5.0, 5.0, 7.0};
  FittedGaussian g = fit_relative_gaussian(near, {1.0, 1}, 1);
  CHECK(g.mu == 5.0);
  CHECK(g.sigma == 2.0);  // smallest positive deviation
}

TEST_CASE("fit rejects impossible or malformed parameters") {
  std::vector<double> d{1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0};
  CHECK_THROWS_AS(fit_relative_gaussian(d, {1.0, 5}, 3), std::domain_error);
  CHECK_THROWS_AS(fit_relative_gaussian(d, {0.0, 1}, 1), std::invalid_argument);
  CHECK_THROWS_AS(fit_relative_gaussian(d, {101.0, 1}, 1), std::invalid_argument);
  CHECK_THROWS_AS(fit_relative_gaussian(d, {1.0, 0}, 1), std::invalid_argument);
  CHECK_THROWS_AS(fit_relative_gaussian(d, {1.0, 1}, 0), std::invalid_argument);
  CHECK_THROWS_AS(fit_relative_gaussian({}, {1.0, 1}, 1), std::invalid_argument);
  std::vector<double> neg{1.0, -2.0};
  CHECK_THROWS_AS(fit_relative_gaussian(neg, {1.0, 1}, 1), structural_error);
}

TEST_CASE("probabilities normalize or vanish") {
  std::vector<double> vals{0.0, 1.0};
  auto p = to_probability(vals, Distribution::gaussian(0.0, 1.0));
  double e = std::exp(-0.5);
  CHECK(p[0] == doctest::Approx(1.0 / (1.0 + e)));
  CHECK(p[1] == doctest::Approx(e / (1.0 + e)));
  CHECK(p[0] + p[1] == doctest::Approx(1.0));

  auto zero = to_probability(vals, Distribution::step_ge(5.0));
  CHECK(zero[0] == 0.0);
  CHECK(zero[1] == 0.0);

  auto uni = to_probability(vals, Distribution::uniform());
  CHECK(uni[0] == 0.5);
  CHECK(uni[1] == 0.5);
}

TEST_CASE("fitted probabilities are scale invariant") {
  std::vector<double> base(20);
  for (int i = 0; i < 20; ++i) base[i] = 0.3 + 0.7 * i;

  RelativeGaussianParams params{10.0, 2};
  FittedGaussian f0 = fit_relative_gaussian(base, params, 5);
  auto p0 = to_probability(base, f0.distribution);

  for (double c : {0.1, 10.0}) {
    std::vector<double> scaled(base);
    for (double& v : scaled) v *= c;
    FittedGaussian fc = fit_relative_gaussian(scaled, params, 5);
    CHECK(fc.mu == doctest::Approx(c * f0.mu).epsilon(1e-9));
    CHECK(fc.sigma == doctest::Approx(c * f0.sigma).epsilon(1e-9));
    auto pc = to_probability(scaled, fc.distribution);
    for (std::size_t i = 0; i < p0.size(); ++i) {
      CHECK(pc[i] == doctest::Approx(p0[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("weighted sampler draws distinct support indices and restores state") {
  std::vector<double> w{0.0, 0.5, 0.0, 0.5, 0.0};
  WeightedSampler sampler(w);
  CHECK(sampler.support() == 2);

  std::vector<std::uint32_t> out;
  Philox r1(11, 0);
  sampler.draw(2, r1, out);
  std::vector<std::uint32_t> sorted(out);
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<std::uint32_t>{1, 3});

  // A second draw from an identically seeded generator repeats the first,
  // so the draw left the sampler's internal weights intact.
  std::vector<std::uint32_t> again;
  Philox r2(11, 0);
  sampler.draw(2, r2, again);
  CHECK(again == out);
}

TEST_CASE("weighted draws follow the weights") {
  std::vector<double> w{0.9, 0.1};
  WeightedSampler sampler(w);
  Philox rng(3, 0);
  std::vector<std::uint32_t> out;
  int heavy = 0;
  for (int i = 0; i < 2000; ++i) {
    sampler.draw(1, rng, out);
    if (out[0] == 0) ++heavy;
  }
  CHECK(heavy > 1740);
  CHECK(heavy < 1860);
}

TEST_CASE("subsample sets are deterministic and size-checked") {
  std::vector<double> p{0.25, 0.25, 0.25, 0.25};
  SamplingConfig cfg{2, 5, 9};
  SubsampleSet s = draw_subsamples(p, cfg);
  REQUIRE(s.instances.size() == 5);
  for (const auto& inst : s.instances) {
    REQUIRE(inst.size() == 2);
    std::set<std::uint32_t> uniq(inst.begin(), inst.end());
    CHECK(uniq.size() == 2);
    for (auto i : uniq) CHECK(i < 4);
  }

  SubsampleSet t = draw_subsamples(p, cfg);
  CHECK(t.instances == s.instances);

  // Instance i is its own stream: a shorter run is a prefix of a longer one.
  SamplingConfig small{2, 3, 9};
  SubsampleSet u = draw_subsamples(p, small);
  REQUIRE(u.instances.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(u.instances[i] == s.instances[i]);

  std::vector<double> thin{0.5, 0.5, 0.0};
  CHECK(draw_subsamples(thin, {3, 4, 1}).empty());
}
