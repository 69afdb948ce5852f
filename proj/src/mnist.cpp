#include "mnist.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

#include "errors.hpp"

namespace relrank {

namespace {

std::uint32_t read_be32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
         (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

}  // namespace

IdxTensor parse_idx(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw parse_error("truncated idx header", bytes.size());
  if (bytes[0] != 0) throw parse_error("magic byte 0 must be zero", 0);
  if (bytes[1] != 0) throw parse_error("magic byte 1 must be zero", 1);
  if (bytes[2] != 0x08) throw parse_error("only the unsigned-byte type code 0x08 is supported", 2);
  std::size_t nd = bytes[3];
  if (nd == 0) throw parse_error("idx tensor needs at least one dimension", 3);

  std::size_t header = 4 + 4 * nd;
  if (bytes.size() < header) throw parse_error("truncated dimension list", bytes.size());

  IdxTensor t;
  t.dims.resize(nd);
  std::uint64_t product = 1;
  for (std::size_t i = 0; i < nd; ++i) {
    t.dims[i] = read_be32(bytes.data() + 4 + 4 * i);
    product *= t.dims[i];
    if (product > (std::uint64_t{1} << 40)) {
      throw parse_error("dimension product is implausibly large", 4 + 4 * i);
    }
  }

  std::size_t expected = header + static_cast<std::size_t>(product);
  if (bytes.size() < expected) throw parse_error("payload shorter than the header promises", bytes.size());
  if (bytes.size() > expected) throw parse_error("trailing bytes after payload", expected);

  t.data.assign(bytes.begin() + header, bytes.end());
  return t;
}

std::vector<std::uint8_t> serialize_idx(const IdxTensor& t) {
  if (t.dims.empty() || t.dims.size() > 255) {
    throw structural_error("idx tensor needs between 1 and 255 dimensions");
  }
  std::uint64_t product = 1;
  for (std::uint32_t d : t.dims) product *= d;
  if (product != t.data.size()) {
    throw structural_error("idx payload size does not match dimensions");
  }
  std::vector<std::uint8_t> out;
  out.reserve(4 + 4 * t.dims.size() + t.data.size());
  out.push_back(0);
  out.push_back(0);
  out.push_back(0x08);
  out.push_back(static_cast<std::uint8_t>(t.dims.size()));
  for (std::uint32_t d : t.dims) write_be32(out, d);
  out.insert(out.end(), t.data.begin(), t.data.end());
  return out;
}

std::vector<std::uint8_t> read_file_auto(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw io_error("read failed for " + path.string());

  if (bytes.size() < 2 || bytes[0] != 0x1f || bytes[1] != 0x8b) return bytes;

  z_stream strm{};
  if (inflateInit2(&strm, 15 + 32) != Z_OK) throw io_error("zlib init failed");
  std::vector<std::uint8_t> out;
  out.reserve(bytes.size() * 4);
  std::uint8_t buf[1 << 16];
  strm.next_in = bytes.data();
  strm.avail_in = static_cast<uInt>(bytes.size());
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    strm.next_out = buf;
    strm.avail_out = sizeof(buf);
    rc = inflate(&strm, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      std::string msg = strm.msg ? strm.msg : "corrupt stream";
      inflateEnd(&strm);
      throw io_error("gzip inflate failed for " + path.string() + ": " + msg);
    }
    out.insert(out.end(), buf, buf + (sizeof(buf) - strm.avail_out));
    if (rc == Z_OK && strm.avail_in == 0 && strm.avail_out != 0) {
      inflateEnd(&strm);
      throw io_error("gzip stream truncated in " + path.string());
    }
  }
  inflateEnd(&strm);
  return out;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw io_error("write failed for " + path.string());
}

std::vector<std::uint8_t> gzip_compress(std::span<const std::uint8_t> bytes) {
  z_stream strm{};
  if (deflateInit2(&strm, 6, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw io_error("zlib deflate init failed");
  }
  std::vector<std::uint8_t> out;
  std::uint8_t buf[1 << 16];
  strm.next_in = const_cast<std::uint8_t*>(bytes.data());
  strm.avail_in = static_cast<uInt>(bytes.size());
  int rc = Z_OK;
  do {
    strm.next_out = buf;
    strm.avail_out = sizeof(buf);
    rc = deflate(&strm, Z_FINISH);
    out.insert(out.end(), buf, buf + (sizeof(buf) - strm.avail_out));
  } while (rc == Z_OK);
  deflateEnd(&strm);
  if (rc != Z_STREAM_END) throw io_error("gzip deflate failed");
  return out;
}

MnistSplit locate_split(const std::filesystem::path& dir, const std::string& split) {
  std::string img_base, lab_base;
  if (split == "train") {
    img_base = "train-images-idx3-ubyte";
    lab_base = "train-labels-idx1-ubyte";
  } else if (split == "test") {
    img_base = "t10k-images-idx3-ubyte";
    lab_base = "t10k-labels-idx1-ubyte";
  } else {
    throw std::invalid_argument("split must be train or test");
  }
  auto find = [&](const std::string& base) {
    for (const char* suffix : {"", ".gz"}) {
      std::filesystem::path p = dir / (base + suffix);
      if (std::filesystem::exists(p)) return p;
    }
    throw io_error("missing " + base + "[.gz] in " + dir.string());
  };
  return {find(img_base), find(lab_base)};
}

PointCloud load_digits(const std::filesystem::path& images,
                       const std::filesystem::path& labels,
                       const std::set<int>& digits) {
  IdxTensor img = parse_idx(read_file_auto(images));
  IdxTensor lab = parse_idx(read_file_auto(labels));
  if (img.dims.size() != 3) throw structural_error("image tensor must have rank 3");
  if (lab.dims.size() != 1) throw structural_error("label tensor must have rank 1");
  if (img.dims[0] != lab.dims[0]) {
    throw structural_error("image and label counts differ: " + std::to_string(img.dims[0]) +
                           " vs " + std::to_string(lab.dims[0]));
  }

  std::size_t count = img.dims[0];
  std::size_t dim = static_cast<std::size_t>(img.dims[1]) * img.dims[2];
  std::vector<double> coords;
  std::vector<std::int32_t> kept_labels;
  for (std::size_t i = 0; i < count; ++i) {
    int y = lab.data[i];
    if (y > 9) throw structural_error("label " + std::to_string(y) + " is not a digit");
    if (!digits.empty() && !digits.count(y)) continue;
    const std::uint8_t* px = img.data.data() + i * dim;
    for (std::size_t q = 0; q < dim; ++q) coords.push_back(static_cast<double>(px[q]));
    kept_labels.push_back(y);
  }
  return PointCloud(std::move(coords), dim, std::move(kept_labels));
}

PointCloud load_split(const std::filesystem::path& dir, const std::string& split,
                      const std::set<int>& digits) {
  MnistSplit files = locate_split(dir, split);
  return load_digits(files.images, files.labels, digits);
}

}  // namespace relrank
