#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stablerank.hpp"

namespace relrank {

struct GramMatrix {
  std::size_t n = 0;
  std::vector<double> k;  // n*n, symmetric
  double cap = 0.0;       // integration cap used to build it

  double operator()(std::size_t i, std::size_t j) const { return k[i * n + j]; }
};

// L2 inner products of the ranks, integrated over [0, cap]. With cap 0 the
// cap becomes the largest breakpoint across the inputs, or 1 if every input
// is constant.
GramMatrix gram_matrix(std::span<const StepFun> ranks, double cap = 0.0);

// Kernel rows for queries against the training ranks, under the same cap.
std::vector<double> kernel_row(const StepFun& query, std::span<const StepFun> train,
                               double cap);

struct SvmModel {
  std::vector<double> alpha;  // dual variables, one per training rank
  std::vector<double> coef;   // alpha_i * y_i
  double bias = 0.0;
  double c = 1.0;
  std::size_t iterations = 0;
};

// Two-class soft-margin SVM on a precomputed kernel, solved by sequential
// minimal optimization on maximal-violating pairs. Labels are +1/-1.
SvmModel train_svm(const GramMatrix& gram, std::span<const int> labels, double c = 1.0);

// Decision value sum_i coef_i * k_i + bias for one kernel row.
double decision_value(const SvmModel& model, std::span<const double> kernel_row);

// Predicted label; an exact zero decision value goes to +1.
int predict(const SvmModel& model, std::span<const double> kernel_row);

// Extreme eigenvalues of a symmetric matrix by power iteration with a
// spectral shift, for checking positive semidefiniteness.
std::pair<double, double> sym_eigen_range(const GramMatrix& gram);

}  // namespace relrank
