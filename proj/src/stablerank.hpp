#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "persistence.hpp"

namespace relrank {

// Non-increasing, right-continuous, nonnegative step function on [0, inf).
// jumps are strictly increasing and positive; values has one more entry,
// values[i] holding on [jumps[i-1], jumps[i]) and values.back() beyond the
// last jump.
class StepFun {
 public:
  StepFun() : values_{0.0} {}
  StepFun(std::vector<double> jumps, std::vector<double> values);

  static StepFun constant(double v);

  double operator()(double t) const;
  double terminal() const { return values_.back(); }
  const std::vector<double>& jumps() const { return jumps_; }
  const std::vector<double>& values() const { return values_; }

  bool operator==(const StepFun&) const = default;

 private:
  std::vector<double> jumps_;
  std::vector<double> values_;
};

// Piecewise-constant positive density plus a truncation point. The life of
// a bar is the density mass it covers below the truncation; a bar is worth
// +inf only if it never dies and nothing is truncated.
struct Contour {
  std::vector<double> density_jumps;   // strictly increasing, positive
  std::vector<double> density_values;  // one more entry, all positive
  double truncation = kInfinity;

  static Contour standard(double truncation = kInfinity);
  static Contour with_density(std::vector<double> jumps, std::vector<double> values,
                              double truncation = kInfinity);

  double integral_to(double t) const;  // integral of the density over [0, t]
  double bar_life(const Bar& bar) const;
};

// r(t) = number of bars whose contour life exceeds t.
StepFun stable_rank(const Barcode& code, const Contour& contour);

// Pointwise mean of count functions, dividing by n once at the end so the
// sweep stays exact while the summands are integers.
StepFun average(std::span<const StepFun> funs, std::size_t n);

// Integral of |a - b|; +inf when the terminal values differ.
double l1_distance(const StepFun& a, const StepFun& b);

// Integral of a*b over [0, cap].
double l2_inner_product(const StepFun& a, const StepFun& b, double cap);

std::string to_csv(const StepFun& f);
std::string to_json(const StepFun& f);

}  // namespace relrank
