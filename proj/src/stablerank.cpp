#include "stablerank.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "format.hpp"

namespace relrank {

namespace {

// Merge segments where the value does not change.
void canonicalize(std::vector<double>& jumps, std::vector<double>& values) {
  std::size_t w = 0;
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    if (values[i + 1] != values[w]) {
      jumps[w] = jumps[i];
      values[w + 1] = values[i + 1];
      ++w;
    }
  }
  jumps.resize(w);
  values.resize(w + 1);
}

}  // namespace

StepFun::StepFun(std::vector<double> jumps, std::vector<double> values)
    : jumps_(std::move(jumps)), values_(std::move(values)) {
  if (values_.size() != jumps_.size() + 1) {
    throw std::invalid_argument("step function needs one more value than jumps");
  }
  double prev = 0.0;
  for (double t : jumps_) {
    if (!(t > prev) || !std::isfinite(t)) {
      throw std::invalid_argument("jumps must be finite, positive, strictly increasing");
    }
    prev = t;
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw std::invalid_argument("step values must be finite");
    if (i > 0 && values_[i] > values_[i - 1]) {
      throw std::invalid_argument("step values must be non-increasing");
    }
  }
  if (values_.back() < 0.0) throw std::invalid_argument("step values must be nonnegative");
  canonicalize(jumps_, values_);
}

StepFun StepFun::constant(double v) { return StepFun({}, {v}); }

double StepFun::operator()(double t) const {
  if (t < 0.0 || std::isnan(t)) throw std::invalid_argument("step function evaluated below 0");
  auto it = std::upper_bound(jumps_.begin(), jumps_.end(), t);
  return values_[static_cast<std::size_t>(it - jumps_.begin())];
}

Contour Contour::standard(double truncation) {
  return with_density({}, {1.0}, truncation);
}

Contour Contour::with_density(std::vector<double> jumps, std::vector<double> values,
                              double truncation) {
  if (values.size() != jumps.size() + 1) {
    throw std::invalid_argument("density needs one more value than jumps");
  }
  double prev = 0.0;
  for (double t : jumps) {
    if (!(t > prev) || !std::isfinite(t)) {
      throw std::invalid_argument("density jumps must be finite, positive, strictly increasing");
    }
    prev = t;
  }
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("density must be positive");
  }
  if (!(truncation > 0.0)) throw std::invalid_argument("truncation must be positive");
  Contour c;
  c.density_jumps = std::move(jumps);
  c.density_values = std::move(values);
  c.truncation = truncation;
  return c;
}

double Contour::integral_to(double t) const {
  if (t <= 0.0) return 0.0;
  if (std::isinf(t)) return kInfinity;
  double acc = 0.0;
  double lo = 0.0;
  for (std::size_t i = 0; i < density_jumps.size(); ++i) {
    double hi = density_jumps[i];
    if (t <= hi) {
      acc += (t - lo) * density_values[i];
      return acc;
    }
    acc += (hi - lo) * density_values[i];
    lo = hi;
  }
  acc += (t - lo) * density_values.back();
  return acc;
}

double Contour::bar_life(const Bar& bar) const {
  if (std::isinf(bar.death) && std::isinf(truncation)) return kInfinity;
  double lo = std::min(bar.birth, truncation);
  double hi = std::min(bar.death, truncation);
  if (hi <= lo) return 0.0;
  return integral_to(hi) - integral_to(lo);
}

StepFun stable_rank(const Barcode& code, const Contour& contour) {
  std::size_t infinite = 0;
  std::vector<double> lives;
  lives.reserve(code.bars.size());
  for (const Bar& b : code.bars) {
    double life = contour.bar_life(b);
    if (std::isinf(life)) {
      ++infinite;
    } else if (life > 0.0) {
      lives.push_back(life);
    }
  }
  std::sort(lives.begin(), lives.end());

  std::vector<double> jumps;
  std::vector<double> values;
  values.push_back(static_cast<double>(lives.size() + infinite));
  std::size_t i = 0;
  while (i < lives.size()) {
    std::size_t j = i;
    while (j < lives.size() && lives[j] == lives[i]) ++j;
    jumps.push_back(lives[i]);
    values.push_back(static_cast<double>(lives.size() - j + infinite));
    i = j;
  }
  return StepFun(std::move(jumps), std::move(values));
}

StepFun average(std::span<const StepFun> funs, std::size_t n) {
  if (n == 0) throw std::invalid_argument("average over zero functions");
  if (funs.size() != n) throw std::invalid_argument("average count does not match inputs");

  // Delta sweep: jump positions carry the value change of each summand, so
  // the running sum is exact whenever the summands are exact.
  std::map<double, double> deltas;
  double start = 0.0;
  for (const StepFun& f : funs) {
    start += f.values()[0];
    for (std::size_t i = 0; i < f.jumps().size(); ++i) {
      deltas[f.jumps()[i]] += f.values()[i + 1] - f.values()[i];
    }
  }
  std::vector<double> jumps;
  std::vector<double> values;
  values.push_back(start / static_cast<double>(n));
  double running = start;
  for (auto [t, d] : deltas) {
    if (d == 0.0) continue;
    running += d;
    jumps.push_back(t);
    values.push_back(running / static_cast<double>(n));
  }
  // Summands that were already divided once carry rounding residue, and the
  // tail of the sweep can land a few ulps below zero where the true value is
  // zero. Snap those back; anything larger is a genuine violation.
  for (double& v : values) {
    if (v < 0.0 && v > -1e-9) v = 0.0;
  }
  return StepFun(std::move(jumps), std::move(values));
}

double l1_distance(const StepFun& a, const StepFun& b) {
  if (a.terminal() != b.terminal()) return kInfinity;
  double acc = 0.0;
  double lo = 0.0;
  std::size_t ia = 0, ib = 0;
  const auto& ja = a.jumps();
  const auto& jb = b.jumps();
  while (ia < ja.size() || ib < jb.size()) {
    double next;
    if (ia < ja.size() && ib < jb.size()) {
      next = std::min(ja[ia], jb[ib]);
    } else if (ia < ja.size()) {
      next = ja[ia];
    } else {
      next = jb[ib];
    }
    acc += std::abs(a.values()[ia] - b.values()[ib]) * (next - lo);
    if (ia < ja.size() && ja[ia] == next) ++ia;
    if (ib < jb.size() && jb[ib] == next) ++ib;
    lo = next;
  }
  return acc;
}

double l2_inner_product(const StepFun& a, const StepFun& b, double cap) {
  if (!(cap > 0.0) || std::isinf(cap)) {
    throw std::invalid_argument("inner product needs a finite positive cap");
  }
  double acc = 0.0;
  double lo = 0.0;
  std::size_t ia = 0, ib = 0;
  const auto& ja = a.jumps();
  const auto& jb = b.jumps();
  while (lo < cap) {
    double next = cap;
    if (ia < ja.size() && ja[ia] < next) next = ja[ia];
    if (ib < jb.size() && jb[ib] < next) next = jb[ib];
    acc += a.values()[ia] * b.values()[ib] * (next - lo);
    if (ia < ja.size() && ja[ia] == next) ++ia;
    if (ib < jb.size() && jb[ib] == next) ++ib;
    lo = next;
  }
  return acc;
}

std::string to_csv(const StepFun& f) {
  std::string out = "t,value\n";
  out += "0," + format_double(f.values()[0]) + "\n";
  for (std::size_t i = 0; i < f.jumps().size(); ++i) {
    out += format_double(f.jumps()[i]) + "," + format_double(f.values()[i + 1]) + "\n";
  }
  return out;
}

std::string to_json(const StepFun& f) {
  nlohmann::ordered_json j;
  j["breakpoints"] = f.jumps();
  j["values"] = f.values();
  j["terminal"] = f.terminal();
  return j.dump();
}

}  // namespace relrank
