#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "geometry.hpp"

namespace relrank {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Vietoris-Rips filtration: simplices ordered by (value, dimension, vertex
// lexicographic), vertices of each simplex ascending. Values are the max
// pairwise distance, so vertices enter at 0.
struct Filtration {
  std::vector<double> values;
  std::vector<std::int32_t> dims;
  std::vector<std::size_t> offsets;   // size() + 1, into verts
  std::vector<std::uint32_t> verts;
  int max_dim = 0;
  std::size_t n_points = 0;

  std::size_t size() const { return values.size(); }
  std::span<const std::uint32_t> vertices(std::size_t i) const {
    return {verts.data() + offsets[i], offsets[i + 1] - offsets[i]};
  }
};

// Enumerates all simplices up to max_dim. Throws resource_error if the
// count would pass the cap; the default is sized for the subsample regime
// (dozens of points, dimension at most 3).
Filtration build_rips_filtration(const DistanceMatrix& dm, int max_dim,
                                 std::size_t cap = 5'000'000);

struct Bar {
  double birth = 0.0;
  double death = kInfinity;  // open end; infinite when the class survives
};

struct Barcode {
  int degree = 0;
  std::vector<Bar> bars;  // zero-length bars dropped, sorted by (birth, death)
};

enum class ReduceMode { Twist, Standard };

// Boundary-matrix reduction over F2 restricted to dimensions degree and
// degree + 1, which is all a single homology degree needs. Twist mode
// processes the higher dimension first and clears columns known to be
// pivots; both modes produce identical barcodes.
Barcode reduce_barcode(const Filtration& filt, int degree,
                       ReduceMode mode = ReduceMode::Twist);

// Betti number of the scale-t Rips complex by straight Gaussian elimination
// of both boundary maps. Quadratic-and-worse in everything; capped at 12
// points so it stays an oracle.
std::size_t rank_at_oracle(const DistanceMatrix& dm, double t, int degree);

// Number of degree-l classes alive at scale t according to a barcode:
// bars with birth <= t < death.
std::size_t bars_alive_at(const Barcode& code, double t);

}  // namespace relrank
