#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace relrank {

// Decoded IDX tensor of unsigned bytes.
struct IdxTensor {
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> data;

  std::size_t count() const { return dims.empty() ? 0 : dims[0]; }
};

// Big-endian IDX with type code 0x08; every byte of the input is accounted
// for or the offset of the violation is reported.
IdxTensor parse_idx(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> serialize_idx(const IdxTensor& t);

// Reads a file, transparently inflating gzip (magic 1f 8b).
std::vector<std::uint8_t> read_file_auto(const std::filesystem::path& path);

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> gzip_compress(std::span<const std::uint8_t> bytes);

struct MnistSplit {
  std::filesystem::path images;
  std::filesystem::path labels;
};

// Locates train/test IDX pairs in dir, accepting the standard file names
// with or without a .gz suffix.
MnistSplit locate_split(const std::filesystem::path& dir, const std::string& split);

// Digits as points: one row per kept image, 784 raw byte coordinates, label
// attached. An empty digit set keeps everything.
PointCloud load_digits(const std::filesystem::path& images,
                       const std::filesystem::path& labels,
                       const std::set<int>& digits = {});

PointCloud load_split(const std::filesystem::path& dir, const std::string& split,
                      const std::set<int>& digits = {});

}  // namespace relrank
