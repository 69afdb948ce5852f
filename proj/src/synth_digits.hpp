#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "mnist.hpp"

namespace relrank {

// Deterministic handwritten-digit stand-in rendered from stroke skeletons,
// written as standard IDX files. Train and test are drawn from shifted
// parameter populations (slant, stroke width, placement), mirroring the
// writer bias between the original MNIST partitions.
struct SynthConfig {
  std::uint64_t seed = 20240101;
  std::uint32_t train_per_digit = 6000;
  std::uint32_t test_per_digit = 1000;
  std::vector<int> digits{0, 1, 2, 3, 7};
};

struct SynthData {
  IdxTensor train_images;
  IdxTensor train_labels;
  IdxTensor test_images;
  IdxTensor test_labels;
};

SynthData generate_synthetic_digits(const SynthConfig& cfg);

// Writes the four IDX files with the standard MNIST names into dir.
void write_synthetic_dataset(const std::filesystem::path& dir, const SynthConfig& cfg);

// True when dir already holds a train/test pair.
bool dataset_present(const std::filesystem::path& dir);

}  // namespace relrank
