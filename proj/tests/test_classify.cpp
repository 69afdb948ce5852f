#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "classify.hpp"

using namespace relrank;

TEST_CASE("gram matrix integrates rank products under an automatic cap") {
  std::vector<StepFun> ranks{StepFun::constant(1.0), StepFun::constant(2.0)};
  GramMatrix g = gram_matrix(ranks);
  REQUIRE(g.n == 2);
  CHECK(g.cap == 1.0);  // every input constant
  CHECK(g(0, 0) == doctest::Approx(1.0));
  CHECK(g(0, 1) == doctest::Approx(2.0));
  CHECK(g(1, 0) == doctest::Approx(2.0));
  CHECK(g(1, 1) == doctest::Approx(4.0));

  GramMatrix g2 = gram_matrix(ranks, 2.0);
  CHECK(g2(0, 1) == doctest::Approx(4.0));

  std::vector<StepFun> stepped{StepFun({1.5}, {2.0, 0.0}), StepFun::constant(1.0)};
  CHECK(gram_matrix(stepped).cap == 1.5);  // largest breakpoint wins
}

TEST_CASE("gram matrices are symmetric and positive semidefinite") {
  std::vector<StepFun> ranks{
      StepFun({1.0, 2.0}, {3.0, 1.0, 0.0}),
      StepFun({0.5}, {2.0, 1.0}),
      StepFun::constant(0.5),
      StepFun({2.5}, {4.0, 0.0}),
  };
  GramMatrix g = gram_matrix(ranks);
  for (std::size_t i = 0; i < g.n; ++i) {
    for (std::size_t j = 0; j < g.n; ++j) CHECK(g(i, j) == g(j, i));
  }
  auto [lo, hi] = sym_eigen_range(g);
  CHECK(lo >= -1e-9);
  CHECK(hi > 0.0);
}

TEST_CASE("kernel rows match gram entries") {
  std::vector<StepFun> train{StepFun::constant(1.0), StepFun::constant(2.0)};
  auto row = kernel_row(StepFun::constant(1.0), train, 1.0);
  REQUIRE(row.size() == 2);
  CHECK(row[0] == doctest::Approx(1.0));
  CHECK(row[1] == doctest::Approx(2.0));
  CHECK_THROWS_AS(kernel_row(train[0], train, 0.0), std::invalid_argument);
}

TEST_CASE("smo on an identity kernel finds the analytic solution") {
  GramMatrix identity{2, {1.0, 0.0, 0.0, 1.0}, 1.0};
  std::vector<int> labels{1, -1};

  // Unconstrained optimum alpha = (1, 1), interior at C = 10, bias 0.
  SvmModel loose = train_svm(identity, labels, 10.0);
  CHECK(loose.alpha[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(loose.alpha[1] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(loose.bias == doctest::Approx(0.0).epsilon(1e-3));
  std::vector<double> r0{1.0, 0.0}, r1{0.0, 1.0};
  CHECK(predict(loose, r0) == 1);
  CHECK(predict(loose, r1) == -1);

  // C = 0.5 clamps both multipliers at the box.
  SvmModel tight = train_svm(identity, labels, 0.5);
  CHECK(tight.alpha[0] == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(tight.alpha[1] == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(decision_value(tight, r0) == doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("an exactly zero decision value predicts positive") {
  SvmModel m;
  m.coef = {1.0, -1.0};
  m.bias = 0.0;
  std::vector<double> symmetric{0.3, 0.3};
  CHECK(decision_value(m, symmetric) == 0.0);
  CHECK(predict(m, symmetric) == 1);
}

TEST_CASE("svm separates rank classes end to end") {
  std::vector<StepFun> ranks{
      StepFun::constant(3.0),
      StepFun({1.0}, {3.0, 2.0}),
      StepFun::constant(1.0),
      StepFun({1.0}, {1.0, 0.0}),
  };
  std::vector<int> labels{1, 1, -1, -1};
  GramMatrix g = gram_matrix(ranks);
  SvmModel model = train_svm(g, labels, 1.0);
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    auto row = kernel_row(ranks[i], ranks, g.cap);
    CHECK(predict(model, row) == labels[i]);
  }
}

TEST_CASE("svm rejects malformed training input") {
  GramMatrix identity{2, {1.0, 0.0, 0.0, 1.0}, 1.0};
  std::vector<int> bad{1, 2};
  CHECK_THROWS_AS(train_svm(identity, bad, 1.0), std::invalid_argument);
  std::vector<int> onesided{1, 1};
  CHECK_THROWS_AS(train_svm(identity, onesided, 1.0), std::invalid_argument);
  std::vector<int> labels{1, -1};
  CHECK_THROWS_AS(train_svm(identity, labels, 0.0), std::invalid_argument);
  std::vector<int> short_labels{1};
  CHECK_THROWS_AS(train_svm(identity, short_labels, 1.0), std::invalid_argument);
}
