#include "synth_digits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "errors.hpp"
#include "rng.hpp"

namespace relrank {

namespace {

constexpr int kSide = 28;
constexpr double kPi = 3.141592653589793238462643383279502884;

struct Pt {
  double x, y;
};

// Stroke skeletons in a [-1, 1] box, y up.
std::vector<std::vector<Pt>> digit_strokes(int digit) {
  auto arc = [](double cx, double cy, double rx, double ry, double a0, double a1, int steps) {
    std::vector<Pt> s;
    for (int i = 0; i <= steps; ++i) {
      double a = a0 + (a1 - a0) * i / steps;
      s.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
    }
    return s;
  };
  switch (digit) {
    case 0:
      return {arc(0.0, 0.0, 0.52, 0.75, 0.0, 2.0 * kPi, 40)};
    case 1:
      return {{{-0.28, 0.5}, {0.02, 0.8}, {0.02, -0.8}}};
    case 2:
      return {arc(0.02, 0.42, 0.44, 0.38, kPi, -0.35, 24),
              {{0.38, 0.18}, {-0.44, -0.78}},
              {{-0.44, -0.78}, {0.48, -0.78}}};
    case 3:
      return {arc(-0.02, 0.42, 0.46, 0.38, 2.6, -1.35, 24),
              arc(-0.02, -0.40, 0.50, 0.42, 1.35, -2.6, 24)};
    case 7:
      return {{{-0.48, 0.72}, {0.48, 0.72}},
              {{0.48, 0.72}, {-0.10, -0.80}}};
    default:
      throw std::invalid_argument("no stroke model for digit " + std::to_string(digit));
  }
}

struct Population {
  double slant_mean;
  double width_mean;
  double scale_mean;
  double dx;
  double dy;
};

// The train/test gap is the point: two writer populations with different
// slant, pen width, and placement habits.
constexpr Population kTrainPop{0.06, 0.115, 1.00, 0.00, 0.00};
constexpr Population kTestPop{0.24, 0.150, 0.93, 0.04, -0.03};

double seg_dist_sq(double px, double py, Pt a, Pt b) {
  double vx = b.x - a.x, vy = b.y - a.y;
  double wx = px - a.x, wy = py - a.y;
  double vv = vx * vx + vy * vy;
  double t = vv > 0.0 ? (wx * vx + wy * vy) / vv : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  double dx = wx - t * vx, dy = wy - t * vy;
  return dx * dx + dy * dy;
}

void render(int digit, const Population& pop, Philox& rng, std::uint8_t* out) {
  double slant = pop.slant_mean + 0.10 * rng.gaussian();
  double width = std::clamp(pop.width_mean + 0.020 * rng.gaussian(), 0.06, 0.30);
  double scale = std::clamp(pop.scale_mean + 0.06 * rng.gaussian(), 0.70, 1.25);
  double dx = pop.dx + 0.05 * rng.gaussian();
  double dy = pop.dy + 0.05 * rng.gaussian();

  auto strokes = digit_strokes(digit);
  for (auto& s : strokes) {
    // Small per-stroke wobble so no two images are congruent.
    double jx = 0.03 * rng.gaussian();
    double jy = 0.03 * rng.gaussian();
    for (auto& p : s) {
      double x = (p.x + jx) * scale;
      double y = (p.y + jy) * scale;
      p.x = x + slant * y + dx;
      p.y = y + dy;
    }
  }

  // Pixel (r, c) center in stroke coordinates; 10 px per unit.
  auto to_col = [](double x) { return x * 10.0 + 13.5; };
  auto to_row = [](double y) { return 13.5 - y * 10.0; };

  double d2[kSide * kSide];
  std::fill(d2, d2 + kSide * kSide, 1e30);
  double reach = 4.0 * width;
  for (const auto& s : strokes) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      Pt a = s[i], b = s[i + 1];
      int c0 = static_cast<int>(std::floor(to_col(std::min(a.x, b.x) - reach)));
      int c1 = static_cast<int>(std::ceil(to_col(std::max(a.x, b.x) + reach)));
      int r0 = static_cast<int>(std::floor(to_row(std::max(a.y, b.y) + reach)));
      int r1 = static_cast<int>(std::ceil(to_row(std::min(a.y, b.y) - reach)));
      c0 = std::clamp(c0, 0, kSide - 1);
      c1 = std::clamp(c1, 0, kSide - 1);
      r0 = std::clamp(r0, 0, kSide - 1);
      r1 = std::clamp(r1, 0, kSide - 1);
      for (int r = r0; r <= r1; ++r) {
        double py = (13.5 - r) / 10.0;
        for (int c = c0; c <= c1; ++c) {
          double px = (c - 13.5) / 10.0;
          double v = seg_dist_sq(px, py, a, b);
          double& cell = d2[r * kSide + c];
          if (v < cell) cell = v;
        }
      }
    }
  }

  double denom = 2.0 * width * width;
  for (int i = 0; i < kSide * kSide; ++i) {
    double v = 255.0 * std::exp(-d2[i] / denom);
    int b = static_cast<int>(std::lround(v));
    out[i] = static_cast<std::uint8_t>(b < 8 ? 0 : std::min(b, 255));
  }
}

void fill_split(const SynthConfig& cfg, const Population& pop, std::uint32_t per_digit,
                std::uint64_t split_tag, IdxTensor& images, IdxTensor& labels) {
  std::uint32_t total = per_digit * static_cast<std::uint32_t>(cfg.digits.size());
  images.dims = {total, kSide, kSide};
  images.data.assign(static_cast<std::size_t>(total) * kSide * kSide, 0);
  labels.dims = {total};
  labels.data.assign(total, 0);

  // Round-robin over digits so the files are not sorted by label.
  std::uint32_t row = 0;
  for (std::uint32_t i = 0; i < per_digit; ++i) {
    for (std::size_t d = 0; d < cfg.digits.size(); ++d) {
      int digit = cfg.digits[d];
      Philox rng(cfg.seed, (split_tag << 40) ^ (static_cast<std::uint64_t>(digit) << 32) ^ i);
      render(digit, pop, rng, images.data.data() + static_cast<std::size_t>(row) * kSide * kSide);
      labels.data[row] = static_cast<std::uint8_t>(digit);
      ++row;
    }
  }
}

}  // namespace

SynthData generate_synthetic_digits(const SynthConfig& cfg) {
  if (cfg.digits.empty()) throw std::invalid_argument("no digits requested");
  for (int d : cfg.digits) {
    if (d < 0 || d > 9) throw std::invalid_argument("digits must be 0..9");
  }
  if (cfg.train_per_digit == 0 || cfg.test_per_digit == 0) {
    throw std::invalid_argument("per-digit counts must be positive");
  }
  SynthData out;
  fill_split(cfg, kTrainPop, cfg.train_per_digit, 1, out.train_images, out.train_labels);
  fill_split(cfg, kTestPop, cfg.test_per_digit, 2, out.test_images, out.test_labels);
  return out;
}

void write_synthetic_dataset(const std::filesystem::path& dir, const SynthConfig& cfg) {
  SynthData data = generate_synthetic_digits(cfg);
  std::filesystem::create_directories(dir);
  auto put = [&](const char* name, const IdxTensor& t) {
    auto bytes = serialize_idx(t);
    write_file(dir / name, bytes);
  };
  put("train-images-idx3-ubyte", data.train_images);
  put("train-labels-idx1-ubyte", data.train_labels);
  put("t10k-images-idx3-ubyte", data.test_images);
  put("t10k-labels-idx1-ubyte", data.test_labels);
}

bool dataset_present(const std::filesystem::path& dir) {
  try {
    locate_split(dir, "train");
    locate_split(dir, "test");
    return true;
  } catch (const io_error&) {
    return false;
  }
}

}  // namespace relrank
