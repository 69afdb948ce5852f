#include "probability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "errors.hpp"

namespace relrank {

double Distribution::operator()(double x) const {
  switch (kind) {
    case Kind::UniformConstant:
      return 1.0;
    case Kind::Gaussian: {
      double z = (x - a) / b;
      return std::exp(-0.5 * z * z);
    }
    case Kind::StepGE:
      return x >= a ? 1.0 : 0.0;
    case Kind::Window:
      return (x >= a && x <= b) ? 1.0 : 0.0;
  }
  return 0.0;
}

Distribution Distribution::uniform() { return {Kind::UniformConstant, 0.0, 1.0}; }

Distribution Distribution::gaussian(double mu, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(mu)) {
    throw std::invalid_argument("gaussian needs finite mu and sigma > 0");
  }
  return {Kind::Gaussian, mu, sigma};
}

Distribution Distribution::step_ge(double threshold) {
  if (!std::isfinite(threshold)) throw std::invalid_argument("step threshold must be finite");
  return {Kind::StepGE, threshold, 0.0};
}

Distribution Distribution::window(double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("window needs lo <= hi");
  return {Kind::Window, lo, hi};
}

VectorField VectorField::constant(std::vector<double> vec) {
  for (double x : vec) {
    if (!std::isfinite(x)) throw std::invalid_argument("vector field with non-finite entry");
  }
  return {Kind::Constant, std::move(vec)};
}

VectorField VectorField::to_center(std::vector<double> center) {
  for (double x : center) {
    if (!std::isfinite(x)) throw std::invalid_argument("field center with non-finite entry");
  }
  return {Kind::ToCenter, std::move(center)};
}

std::vector<double> distance_filter(const PointCloud& reference, std::span<const double> p) {
  return distances_to_point(reference, p);
}

std::vector<double> directional_filter(const PointCloud& reference,
                                       std::span<const double> p,
                                       const VectorField& field) {
  std::size_t d = reference.dim();
  if (p.size() != d) throw structural_error("query point dimension does not match reference");
  if (field.v.size() != d) throw structural_error("field dimension does not match reference");

  // A to-center field anchored at the query point gives (p-x).(p-x)/|p-x|,
  // which is the distance filter; dispatching keeps the equality exact.
  if (field.kind == VectorField::Kind::ToCenter &&
      std::equal(field.v.begin(), field.v.end(), p.begin(), p.end())) {
    return distance_filter(reference, p);
  }

  std::size_t m = reference.size();
  std::vector<double> out(m, 0.0);
  std::vector<double> dir(d);
  for (std::size_t i = 0; i < m; ++i) {
    auto x = reference.point(i);
    double norm_sq = 0.0;
    if (field.kind == VectorField::Kind::Constant) {
      for (std::size_t q = 0; q < d; ++q) {
        dir[q] = field.v[q];
        norm_sq += dir[q] * dir[q];
      }
    } else {
      for (std::size_t q = 0; q < d; ++q) {
        dir[q] = field.v[q] - x[q];
        norm_sq += dir[q] * dir[q];
      }
    }
    if (norm_sq == 0.0) {
      out[i] = 0.0;
      continue;
    }
    double dot = 0.0;
    for (std::size_t q = 0; q < d; ++q) dot += dir[q] * (p[q] - x[q]);
    out[i] = dot / std::sqrt(norm_sq);
  }
  return out;
}

FittedGaussian fit_relative_gaussian(std::span<const double> distances,
                                     const RelativeGaussianParams& params,
                                     std::uint32_t sample_size) {
  std::size_t m = distances.size();
  if (m == 0) throw std::invalid_argument("fit over an empty distance vector");
  if (!(params.percentile > 0.0) || !(params.percentile <= 100.0)) {
    throw std::invalid_argument("percentile must be in (0, 100]");
  }
  if (params.amplification == 0) throw std::invalid_argument("amplification must be positive");
  if (sample_size == 0) throw std::invalid_argument("sample size must be positive");
  for (double v : distances) {
    if (!std::isfinite(v) || v < 0.0) throw structural_error("distances must be finite and nonnegative");
  }

  std::size_t sigma_rank = static_cast<std::size_t>(sample_size) * params.amplification;
  if (sigma_rank > m) {
    throw std::domain_error("sample_size * amplification exceeds the reference size");
  }

  // Nearest-rank percentile: the ceil(k/100 * m)-th order statistic.
  std::size_t mu_rank = static_cast<std::size_t>(std::ceil(params.percentile / 100.0 *
                                                           static_cast<double>(m)));
  if (mu_rank < 1) mu_rank = 1;
  if (mu_rank > m) mu_rank = m;

  std::vector<double> work(distances.begin(), distances.end());
  std::nth_element(work.begin(), work.begin() + (mu_rank - 1), work.end());
  double mu = work[mu_rank - 1];

  for (double& v : work) v = std::abs(v - mu);
  std::nth_element(work.begin(), work.begin() + (sigma_rank - 1), work.end());
  double sigma = work[sigma_rank - 1];

  if (sigma == 0.0) {
    // Degenerate local scale: take the smallest positive deviation, and if
    // every reference point sits at mu, a unit width.
    double smallest = 0.0;
    for (double v : work) {
      if (v > 0.0 && (smallest == 0.0 || v < smallest)) smallest = v;
    }
    sigma = smallest > 0.0 ? smallest : 1.0;
  }

  return {Distribution::gaussian(mu, sigma), mu, sigma};
}

std::vector<double> to_probability(std::span<const double> filter_values,
                                   const Distribution& d) {
  std::vector<double> out(filter_values.size());
  double total = 0.0;
  for (std::size_t i = 0; i < filter_values.size(); ++i) {
    double w = d(filter_values[i]);
    out[i] = w;
    total += w;
  }
  if (total == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return out;
  }
  for (double& w : out) w /= total;
  return out;
}

WeightedSampler::WeightedSampler(std::span<const double> weights) {
  std::size_t n = weights.size();
  remaining_.assign(weights.begin(), weights.end());
  for (double w : remaining_) {
    if (!std::isfinite(w) || w < 0.0) throw std::invalid_argument("weights must be finite and nonnegative");
    if (w > 0.0) ++support_;
  }
  tree_.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) add(i, remaining_[i]);
}

void WeightedSampler::add(std::size_t i, double delta) {
  for (std::size_t j = i + 1; j < tree_.size(); j += j & (0 - j)) tree_[j] += delta;
}

double WeightedSampler::total() const {
  double s = 0.0;
  std::size_t j = tree_.size() - 1;
  while (j > 0) {
    s += tree_[j];
    j -= j & (0 - j);
  }
  return s;
}

std::size_t WeightedSampler::find(double u) const {
  std::size_t n = tree_.size() - 1;
  std::size_t pos = 0;
  std::size_t mask = 1;
  while ((mask << 1) <= n) mask <<= 1;
  for (; mask > 0; mask >>= 1) {
    std::size_t next = pos + mask;
    if (next <= n && tree_[next] <= u) {
      pos = next;
      u -= tree_[next];
    }
  }
  return pos;  // 0-based index of the first item with prefix sum > u
}

void WeightedSampler::draw(std::uint32_t s, Philox& rng, std::vector<std::uint32_t>& out) {
  if (s > support_) throw std::invalid_argument("sample size exceeds support");
  std::size_t n = remaining_.size();
  out.clear();
  out.reserve(s);
  std::vector<std::pair<std::size_t, double>> undo;
  undo.reserve(s);
  for (std::uint32_t step = 0; step < s; ++step) {
    double u = rng.uniform() * total();
    std::size_t idx = find(u);
    // Cancellation in the tree can leave a hair of mass on an exhausted
    // index; the remaining-weight array decides, scanning forward.
    std::size_t guard = 0;
    while (idx >= n || remaining_[idx] <= 0.0) {
      idx = idx + 1 >= n ? 0 : idx + 1;
      if (++guard > n) throw std::logic_error("weighted draw found no remaining support");
    }
    double w = remaining_[idx];
    undo.emplace_back(idx, w);
    remaining_[idx] = 0.0;
    add(idx, -w);
    out.push_back(static_cast<std::uint32_t>(idx));
  }
  for (auto it = undo.rbegin(); it != undo.rend(); ++it) {
    remaining_[it->first] = it->second;
    add(it->first, it->second);
  }
  std::sort(out.begin(), out.end());
}

SubsampleSet draw_subsamples(std::span<const double> prob, const SamplingConfig& cfg) {
  if (cfg.sample_size == 0) throw std::invalid_argument("sample size must be positive");
  if (cfg.instances == 0) throw std::invalid_argument("instance count must be positive");
  WeightedSampler sampler(prob);
  SubsampleSet set;
  if (cfg.sample_size > sampler.support()) return set;
  set.instances.resize(cfg.instances);
  for (std::uint32_t i = 0; i < cfg.instances; ++i) {
    Philox rng(cfg.seed, i);
    sampler.draw(cfg.sample_size, rng, set.instances[i]);
  }
  return set;
}

}  // namespace relrank
