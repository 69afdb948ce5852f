#include <doctest.h>

#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "stablerank.hpp"

using namespace relrank;

TEST_CASE("step functions evaluate right-continuously") {
  StepFun f({1.0, 3.0}, {3.0, 2.0, 1.0});
  CHECK(f(0.0) == 3.0);
  CHECK(f(0.999) == 3.0);
  CHECK(f(1.0) == 2.0);
  CHECK(f(2.9) == 2.0);
  CHECK(f(3.0) == 1.0);
  CHECK(f(100.0) == 1.0);
  CHECK(f.terminal() == 1.0);

  CHECK(StepFun().terminal() == 0.0);
  CHECK(StepFun::constant(4.0)(17.0) == 4.0);
}

TEST_CASE("step function construction is validated and canonical") {
  CHECK_THROWS_AS(StepFun({1.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(StepFun({2.0, 1.0}, {3.0, 2.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(StepFun({0.0}, {2.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(StepFun({1.0}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(StepFun({1.0}, {1.0, -0.5}), std::invalid_argument);

  // A jump that does not change the value disappears, so == is meaningful.
  CHECK(StepFun({1.0}, {2.0, 2.0}) == StepFun::constant(2.0));
  CHECK(StepFun({1.0}, {2.0, 1.0}).jumps().size() == 1);
}

TEST_CASE("contours integrate piecewise densities and clip at truncation") {
  Contour std_c = Contour::standard();
  CHECK(std_c.integral_to(2.5) == doctest::Approx(2.5));
  CHECK(std_c.bar_life({1.0, 3.0}) == doctest::Approx(2.0));
  CHECK(std_c.bar_life({1.0, kInfinity}) == kInfinity);

  Contour trunc = Contour::standard(2.0);
  CHECK(trunc.bar_life({1.0, 3.0}) == doctest::Approx(1.0));
  CHECK(trunc.bar_life({3.0, 5.0}) == doctest::Approx(0.0));
  CHECK(trunc.bar_life({1.0, kInfinity}) == doctest::Approx(1.0));

  Contour dens = Contour::with_density({1.0}, {2.0, 1.0});
  CHECK(dens.integral_to(0.5) == doctest::Approx(1.0));
  CHECK(dens.integral_to(1.0) == doctest::Approx(2.0));
  CHECK(dens.integral_to(2.0) == doctest::Approx(3.0));
  CHECK(dens.bar_life({0.5, 1.5}) == doctest::Approx(1.5));

  CHECK_THROWS_AS(Contour::with_density({1.0}, {1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(Contour::with_density({1.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Contour::with_density({}, {1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("stable rank counts bars by contour life") {
  Barcode code;
  code.degree = 0;
  code.bars = {{0.0, kInfinity}, {0.0, 1.0}, {0.0, 3.0}};
  StepFun r = stable_rank(code, Contour::standard());
  CHECK(r == StepFun({1.0, 3.0}, {3.0, 2.0, 1.0}));

  Barcode pair;
  pair.bars = {{0.0, 1.0}, {0.0, 1.0}};
  CHECK(stable_rank(pair, Contour::standard()) == StepFun({1.0}, {2.0, 0.0}));

  // Truncation makes even immortal bars finite.
  Barcode immortal;
  immortal.bars = {{0.0, kInfinity}};
  CHECK(stable_rank(immortal, Contour::standard(2.0)) == StepFun({2.0}, {1.0, 0.0}));

  Barcode empty;
  CHECK(stable_rank(empty, Contour::standard()) == StepFun());
}

TEST_CASE("average divides the pointwise sum once") {
  std::vector<StepFun> funs{StepFun({1.0}, {1.0, 0.0}), StepFun({3.0}, {1.0, 0.0})};
  StepFun avg = average(funs, 2);
  CHECK(avg == StepFun({1.0, 3.0}, {1.0, 0.5, 0.0}));
  CHECK_THROWS_AS(average(funs, 3), std::invalid_argument);
  CHECK_THROWS_AS(average(funs, 0), std::invalid_argument);
}

TEST_CASE("average absorbs rounding residue at the tail") {
  // 3 * 0.005 accumulated left to right overshoots the sum of the parts by
  // one ulp, so the delta sweep used to end a hair below zero.
  std::vector<StepFun> funs{
      StepFun({1.0}, {0.005, 0.0}),
      StepFun({2.0}, {0.005, 0.0}),
      StepFun({3.0}, {0.005, 0.0}),
  };
  StepFun avg = average(funs, 3);
  CHECK(avg.terminal() == 0.0);
  CHECK(avg(0.5) == doctest::Approx(0.005));
}

TEST_CASE("l1 distance integrates the absolute gap") {
  StepFun f({2.0}, {2.0, 1.0});
  StepFun g({1.0}, {2.0, 1.0});
  CHECK(l1_distance(f, g) == doctest::Approx(1.0));
  CHECK(l1_distance(g, f) == doctest::Approx(1.0));
  CHECK(l1_distance(f, f) == 0.0);

  // Different tails never stop accumulating mass.
  CHECK(l1_distance(StepFun::constant(1.0), StepFun::constant(0.0)) == kInfinity);
}

TEST_CASE("l2 inner product respects the cap") {
  CHECK(l2_inner_product(StepFun::constant(2.0), StepFun::constant(3.0), 5.0) ==
        doctest::Approx(30.0));
  StepFun ind({1.0}, {1.0, 0.0});
  CHECK(l2_inner_product(ind, ind, 10.0) == doctest::Approx(1.0));
  StepFun f({1.0}, {2.0, 0.0});
  StepFun g({2.0}, {1.0, 0.0});
  CHECK(l2_inner_product(f, g, 10.0) == doctest::Approx(2.0));
}

TEST_CASE("serialization carries breakpoints and terminal value") {
  CHECK(to_csv(StepFun()) == "t,value\n0,0\n");
  StepFun f({1.5}, {2.0, 1.0});
  CHECK(to_csv(f) == "t,value\n0,2\n1.5,1\n");

  auto j = nlohmann::json::parse(to_json(f));
  CHECK(j["breakpoints"].size() == 1);
  CHECK(j["breakpoints"][0] == 1.5);
  CHECK(j["values"][0] == 2.0);
  CHECK(j["terminal"] == 1.0);
}
