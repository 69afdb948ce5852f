#include "classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rng.hpp"

namespace relrank {

namespace {

double resolve_cap(std::span<const StepFun> ranks, double cap) {
  if (cap > 0.0) return cap;
  double best = 0.0;
  for (const StepFun& f : ranks) {
    if (!f.jumps().empty()) best = std::max(best, f.jumps().back());
  }
  return best > 0.0 ? best : 1.0;
}

}  // namespace

GramMatrix gram_matrix(std::span<const StepFun> ranks, double cap) {
  GramMatrix g;
  g.n = ranks.size();
  g.cap = resolve_cap(ranks, cap);
  g.k.assign(g.n * g.n, 0.0);
  for (std::size_t i = 0; i < g.n; ++i) {
    for (std::size_t j = i; j < g.n; ++j) {
      double v = l2_inner_product(ranks[i], ranks[j], g.cap);
      g.k[i * g.n + j] = v;
      g.k[j * g.n + i] = v;
    }
  }
  return g;
}

std::vector<double> kernel_row(const StepFun& query, std::span<const StepFun> train,
                               double cap) {
  if (!(cap > 0.0)) throw std::invalid_argument("kernel row needs a positive cap");
  std::vector<double> row(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) row[i] = l2_inner_product(query, train[i], cap);
  return row;
}

SvmModel train_svm(const GramMatrix& gram, std::span<const int> labels, double c) {
  std::size_t n = gram.n;
  if (labels.size() != n) throw std::invalid_argument("label count does not match kernel size");
  if (!(c > 0.0)) throw std::invalid_argument("svm box constraint must be positive");
  bool has_pos = false, has_neg = false;
  for (int y : labels) {
    if (y == 1) {
      has_pos = true;
    } else if (y == -1) {
      has_neg = true;
    } else {
      throw std::invalid_argument("labels must be +1 or -1");
    }
  }
  if (!has_pos || !has_neg) throw std::invalid_argument("training needs both classes");

  constexpr double kGapTol = 1e-3;
  constexpr std::size_t kMaxIter = 1'000'000;

  SvmModel model;
  model.c = c;
  model.alpha.assign(n, 0.0);
  std::vector<double> u(n, 0.0);  // u_t = sum_j alpha_j y_j K_tj

  auto K = [&](std::size_t i, std::size_t j) { return gram.k[i * n + j]; };

  double m_val = 0.0, big_m = 0.0;
  for (model.iterations = 0; model.iterations < kMaxIter; ++model.iterations) {
    // Maximal-violating pair over y_t - u_t; lowest index wins ties.
    std::size_t i_up = n, i_low = n;
    m_val = -std::numeric_limits<double>::infinity();
    big_m = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      double g = static_cast<double>(labels[t]) - u[t];
      bool in_up = labels[t] == 1 ? model.alpha[t] < c : model.alpha[t] > 0.0;
      bool in_low = labels[t] == 1 ? model.alpha[t] > 0.0 : model.alpha[t] < c;
      if (in_up && g > m_val) {
        m_val = g;
        i_up = t;
      }
      if (in_low && g < big_m) {
        big_m = g;
        i_low = t;
      }
    }
    if (i_up == n || i_low == n || m_val - big_m <= kGapTol) break;

    std::size_t i = i_up, j = i_low;
    double eta = K(i, i) + K(j, j) - 2.0 * K(i, j);
    double room_i = labels[i] == 1 ? c - model.alpha[i] : model.alpha[i];
    double room_j = labels[j] == 1 ? model.alpha[j] : c - model.alpha[j];
    double max_step = std::min(room_i, room_j);
    double step = eta > 0.0 ? std::min((m_val - big_m) / eta, max_step) : max_step;

    model.alpha[i] += labels[i] == 1 ? step : -step;
    model.alpha[j] -= labels[j] == 1 ? step : -step;
    for (std::size_t t = 0; t < n; ++t) u[t] += step * (K(t, i) - K(t, j));
  }

  model.coef.resize(n);
  for (std::size_t t = 0; t < n; ++t) model.coef[t] = model.alpha[t] * labels[t];

  // Bias from the margin of unbounded support vectors, or the midpoint of
  // the violating-pair bounds when every vector sits on the box.
  double sum = 0.0;
  std::size_t cnt = 0;
  for (std::size_t t = 0; t < n; ++t) {
    if (model.alpha[t] > 0.0 && model.alpha[t] < c) {
      sum += static_cast<double>(labels[t]) - u[t];
      ++cnt;
    }
  }
  model.bias = cnt > 0 ? sum / static_cast<double>(cnt) : 0.5 * (m_val + big_m);
  return model;
}

double decision_value(const SvmModel& model, std::span<const double> kr) {
  if (kr.size() != model.coef.size()) {
    throw std::invalid_argument("kernel row size does not match model");
  }
  double s = model.bias;
  for (std::size_t t = 0; t < kr.size(); ++t) s += model.coef[t] * kr[t];
  return s;
}

int predict(const SvmModel& model, std::span<const double> kr) {
  return decision_value(model, kr) < 0.0 ? -1 : 1;
}

std::pair<double, double> sym_eigen_range(const GramMatrix& gram) {
  std::size_t n = gram.n;
  if (n == 0) throw std::invalid_argument("eigen range of an empty matrix");

  // Gershgorin bound makes both shifted operators PSD, so plain power
  // iteration finds each extreme.
  double bound = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += std::abs(gram.k[i * n + j]);
    bound = std::max(bound, row);
  }
  if (bound == 0.0) return {0.0, 0.0};

  auto dominant = [&](double shift_sign) {
    // Operator v -> bound*v + shift_sign * G v.
    Philox rng(0x51a2b3c4d5e6f708ull, 0);
    std::vector<double> v(n), w(n);
    for (double& x : v) x = rng.gaussian();
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    double lambda = 0.0;
    for (int it = 0; it < 1000; ++it) {
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += gram.k[i * n + j] * v[j];
        w[i] = bound * v[i] + shift_sign * s;
      }
      double nl = 0.0;
      for (double x : w) nl += x * x;
      nl = std::sqrt(nl);
      if (nl == 0.0) return 0.0;
      for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nl;
      if (std::abs(nl - lambda) <= 1e-12 * std::max(1.0, nl)) return nl;
      lambda = nl;
    }
    return lambda;
  };

  double hi = dominant(1.0) - bound;   // largest eigenvalue of G
  double lo = bound - dominant(-1.0);  // smallest eigenvalue of G
  return {lo, hi};
}

}  // namespace relrank
