#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <vector>

#include "errors.hpp"
#include "mnist.hpp"
#include "synth_digits.hpp"

using namespace relrank;
namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> idx_bytes(std::uint8_t type, std::vector<std::uint32_t> dims,
                                    std::vector<std::uint8_t> payload) {
  std::vector<std::uint8_t> out{0, 0, type, static_cast<std::uint8_t>(dims.size())};
  for (std::uint32_t d : dims) {
    out.push_back(d >> 24);
    out.push_back(d >> 16);
    out.push_back(d >> 8);
    out.push_back(d);
  }
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

fs::path fresh_dir(const char* name) {
  fs::path dir = fs::path("tmp_tests") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("idx parsing reads big-endian headers") {
  auto flat = idx_bytes(0x08, {3}, {7, 8, 9});
  IdxTensor t = parse_idx(flat);
  CHECK(t.dims == std::vector<std::uint32_t>{3});
  CHECK(t.data == std::vector<std::uint8_t>{7, 8, 9});
  CHECK(t.count() == 3);

  auto grid = idx_bytes(0x08, {2, 3}, {1, 2, 3, 4, 5, 6});
  IdxTensor g = parse_idx(grid);
  CHECK(g.dims == std::vector<std::uint32_t>{2, 3});
  CHECK(g.data.size() == 6);

  // A 300-entry first dimension exercises the multi-byte big-endian path.
  auto wide = idx_bytes(0x08, {300, 1}, std::vector<std::uint8_t>(300, 5));
  CHECK(parse_idx(wide).count() == 300);
}

TEST_CASE("idx parsing pins the offset of the first bad byte") {
  auto bad_type = idx_bytes(0x09, {1}, {0});
  CHECK_THROWS_AS(parse_idx(bad_type), parse_error);
  try {
    parse_idx(bad_type);
  } catch (const parse_error& e) {
    CHECK(e.offset == 2);
  }

  auto short_payload = idx_bytes(0x08, {4}, {1, 2});
  CHECK_THROWS_AS(parse_idx(short_payload), parse_error);

  auto trailing = idx_bytes(0x08, {1}, {1, 2});
  CHECK_THROWS_AS(parse_idx(trailing), parse_error);

  std::vector<std::uint8_t> stub{0, 0};
  CHECK_THROWS_AS(parse_idx(stub), parse_error);
}

TEST_CASE("idx serialization round trips") {
  IdxTensor t;
  t.dims = {2, 2};
  t.data = {10, 20, 30, 40};
  IdxTensor back = parse_idx(serialize_idx(t));
  CHECK(back.dims == t.dims);
  CHECK(back.data == t.data);

  IdxTensor mismatch;
  mismatch.dims = {3};
  mismatch.data = {1};
  CHECK_THROWS_AS(serialize_idx(mismatch), structural_error);
}

TEST_CASE("file reading inflates gzip transparently") {
  fs::path dir = fresh_dir("gzip");
  std::vector<std::uint8_t> payload;
  for (int i = 0; i < 2000; ++i) payload.push_back(static_cast<std::uint8_t>(i * 7));

  write_file(dir / "plain.bin", payload);
  CHECK(read_file_auto(dir / "plain.bin") == payload);

  auto gz = gzip_compress(payload);
  CHECK(gz.size() < payload.size());
  write_file(dir / "packed.bin.gz", gz);
  CHECK(read_file_auto(dir / "packed.bin.gz") == payload);

  CHECK_THROWS_AS(read_file_auto(dir / "absent.bin"), io_error);
}

TEST_CASE("digit loading filters labels and keeps raw coordinates") {
  fs::path dir = fresh_dir("digits");
  // Three 2x2 images labeled 7, 1, 7.
  auto images = idx_bytes(0x08, {3, 2, 2},
                          {10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 110, 120});
  auto labels = idx_bytes(0x08, {3}, {7, 1, 7});
  write_file(dir / "imgs", images);
  write_file(dir / "labs", labels);

  PointCloud all = load_digits(dir / "imgs", dir / "labs");
  REQUIRE(all.size() == 3);
  CHECK(all.dim() == 4);
  CHECK(all.point(0)[0] == 10.0);
  CHECK(all.point(2)[3] == 120.0);
  CHECK(all.label(1) == 1);

  PointCloud sevens = load_digits(dir / "imgs", dir / "labs", {7});
  REQUIRE(sevens.size() == 2);
  CHECK(sevens.point(1)[0] == 90.0);
  CHECK(sevens.label(0) == 7);

  auto bad_labels = idx_bytes(0x08, {3}, {7, 1, 12});
  write_file(dir / "bad", bad_labels);
  CHECK_THROWS_AS(load_digits(dir / "imgs", dir / "bad"), structural_error);
}

TEST_CASE("split location accepts plain and gzipped names") {
  fs::path dir = fresh_dir("splits");
  auto images = idx_bytes(0x08, {1, 2, 2}, {1, 2, 3, 4});
  auto labels = idx_bytes(0x08, {1}, {3});
  write_file(dir / "train-images-idx3-ubyte", images);
  write_file(dir / "train-labels-idx1-ubyte", labels);
  write_file(dir / "t10k-images-idx3-ubyte.gz", gzip_compress(images));
  write_file(dir / "t10k-labels-idx1-ubyte.gz", gzip_compress(labels));

  MnistSplit train = locate_split(dir, "train");
  CHECK(train.images.filename() == "train-images-idx3-ubyte");
  MnistSplit test = locate_split(dir, "test");
  CHECK(test.images.extension() == ".gz");

  PointCloud c = load_split(dir, "test");
  REQUIRE(c.size() == 1);
  CHECK(c.label(0) == 3);

  CHECK_THROWS_AS(locate_split(dir, "validation"), std::invalid_argument);
  CHECK_THROWS_AS(locate_split(dir / "nowhere", "train"), io_error);
}

TEST_CASE("synthetic digits render deterministic idx datasets") {
  SynthConfig cfg;
  cfg.train_per_digit = 12;
  cfg.test_per_digit = 5;
  cfg.digits = {1, 7};

  SynthData a = generate_synthetic_digits(cfg);
  CHECK(a.train_images.dims == std::vector<std::uint32_t>{24, 28, 28});
  CHECK(a.train_labels.count() == 24);
  CHECK(a.test_images.count() == 10);

  SynthData b = generate_synthetic_digits(cfg);
  CHECK(a.train_images.data == b.train_images.data);
  CHECK(a.test_labels.data == b.test_labels.data);

  fs::path dir = fresh_dir("synth");
  CHECK_FALSE(dataset_present(dir));
  write_synthetic_dataset(dir, cfg);
  CHECK(dataset_present(dir));

  PointCloud ones = load_split(dir, "train", {1});
  CHECK(ones.size() == 12);
  CHECK(ones.dim() == 784);
}
