#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "pipeline.hpp"
#include "synthetic.hpp"

using namespace relrank;

TEST_CASE("queries resolve against the reference") {
  PointCloud ref({0, 0, 4, 0}, 2);
  QuerySpec com;
  com.kind = QuerySpec::Kind::CenterOfMass;
  auto c = resolve_query(ref, com);
  CHECK(c == std::vector<double>{2.0, 0.0});

  QuerySpec at;
  at.kind = QuerySpec::Kind::Coords;
  at.coords = {1.0, 1.0};
  CHECK(resolve_query(ref, at) == at.coords);

  at.coords = {1.0};
  CHECK_THROWS_AS(resolve_query(ref, at), structural_error);
}

TEST_CASE("probability construction wires filter and distribution") {
  PointCloud ref({0, 0, 3, 0}, 2);
  PipelineConfig cfg;
  cfg.query.kind = QuerySpec::Kind::Coords;
  cfg.query.coords = {0.0, 0.0};
  cfg.distribution.kind = DistributionSpec::Kind::Direct;
  cfg.distribution.direct = Distribution::step_ge(2.0);

  // Distances 0 and 3; only the far point passes the step.
  auto p = build_probability(ref, cfg);
  CHECK(p[0] == 0.0);
  CHECK(p[1] == 1.0);

  cfg.distribution.kind = DistributionSpec::Kind::UniformProbability;
  auto u = build_probability(ref, cfg);
  CHECK(u[0] == 0.5);
  CHECK(u[1] == 0.5);

  cfg.distribution.kind = DistributionSpec::Kind::Fitted;
  cfg.filter.kind = FilterSpec::Kind::Directional;
  cfg.filter.field = VectorField::constant({1.0, 0.0});
  CHECK_THROWS_AS(build_probability(ref, cfg), std::invalid_argument);
}

TEST_CASE("averaged rank of a two-point cloud is exact") {
  PointCloud ref({0, 0, 2, 0}, 2);
  PairwiseDistances dist(ref);
  std::vector<double> prob{0.5, 0.5};

  PipelineConfig cfg;
  cfg.sampling = {2, 3, 11};
  PipelineResult res = averaged_stable_rank(dist, prob, cfg);
  CHECK_FALSE(res.empty_support);
  CHECK(res.instances == 3);
  CHECK(res.rank == StepFun({2.0}, {2.0, 1.0}));

  // Truncation caps the immortal component's life as well.
  cfg.contour.truncation = 1.0;
  PipelineResult tr = averaged_stable_rank(dist, prob, cfg);
  CHECK(tr.rank == StepFun({1.0}, {2.0, 0.0}));

  std::vector<double> thin{1.0, 0.0};
  cfg.contour.truncation = kInfinity;
  PipelineResult empty = averaged_stable_rank(dist, thin, cfg);
  CHECK(empty.empty_support);
  CHECK(empty.instances == 0);
  CHECK(empty.rank == StepFun());
}

TEST_CASE("degree one picks up the square's cycle") {
  PointCloud ref({0, 0, 1, 0, 1, 1, 0, 1}, 2);
  PairwiseDistances dist(ref);
  std::vector<double> prob(4, 0.25);

  PipelineConfig cfg;
  cfg.degree = 1;
  cfg.sampling = {4, 2, 3};
  PipelineResult res = averaged_stable_rank(dist, prob, cfg);
  CHECK(res.rank == StepFun({std::sqrt(2.0) - 1.0}, {1.0, 0.0}));
}

TEST_CASE("worker count does not change the averaged rank") {
  PointCloud ref = make_noisy_circle(40, 2.0, 0.1, 77);
  PairwiseDistances dist(ref);
  std::vector<double> prob(40, 1.0 / 40);

  PipelineConfig cfg;
  cfg.degree = 1;
  cfg.sampling = {12, 20, 5};
  cfg.workers = 1;
  PipelineResult serial = averaged_stable_rank(dist, prob, cfg);
  for (std::size_t w : {4, 16}) {
    cfg.workers = w;
    PipelineResult parallel = averaged_stable_rank(dist, prob, cfg);
    CHECK(parallel.rank == serial.rank);
  }
}

TEST_CASE("full runs report the fitted scale") {
  PointCloud ref = make_noisy_circle(60, 3.0, 0.2, 9);
  PairwiseDistances dist(ref);

  PipelineConfig cfg;
  cfg.query.kind = QuerySpec::Kind::Coords;
  cfg.query.coords = {0.0, 0.0};
  cfg.distribution.kind = DistributionSpec::Kind::Fitted;
  cfg.distribution.fitted = {5.0, 2};
  cfg.sampling = {10, 8, 21};
  PipelineResult res = run_pipeline(dist, cfg);

  auto d = distances_to_point(ref, cfg.query.coords);
  FittedGaussian f = fit_relative_gaussian(d, cfg.distribution.fitted, 10);
  CHECK(res.fitted_mu == f.mu);
  CHECK(res.fitted_sigma == f.sigma);
  CHECK(res.rank.terminal() >= 1.0);  // the immortal component never dies
}

TEST_CASE("config json round trips and rejects unknown keys") {
  PipelineConfig cfg;
  cfg.filter.kind = FilterSpec::Kind::Directional;
  cfg.filter.field = VectorField::to_center({1.0, 2.0});
  cfg.query.kind = QuerySpec::Kind::Coords;
  cfg.query.coords = {0.5, -0.5};
  cfg.distribution.kind = DistributionSpec::Kind::Direct;
  cfg.distribution.direct = Distribution::window(-2.0, 1.0);
  cfg.sampling = {7, 9, 42};
  cfg.degree = 1;
  cfg.contour.truncation = 3.5;
  cfg.contour.density_jumps = {1.0};
  cfg.contour.density_values = {2.0, 1.0};
  cfg.workers = 2;

  nlohmann::ordered_json j = pipeline_config_json(cfg);
  PipelineConfig back = parse_pipeline_config(j);
  CHECK(pipeline_config_json(back) == j);

  nlohmann::json bad = j;
  bad["surprise"] = 1;
  CHECK_THROWS_AS(parse_pipeline_config(bad), std::invalid_argument);

  nlohmann::json bad_inner = j;
  bad_inner["sampling"]["rate"] = 2;
  CHECK_THROWS_AS(parse_pipeline_config(bad_inner), std::invalid_argument);

  // Infinity survives the string encoding.
  PipelineConfig inf_cfg;
  nlohmann::ordered_json ij = pipeline_config_json(inf_cfg);
  CHECK(ij["contour"]["truncation"] == "inf");
  CHECK(std::isinf(parse_pipeline_config(ij).contour.truncation));
}
