#include "persistence.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "errors.hpp"

namespace relrank {

namespace {

// Binomial table with saturation; only tiny k ever occur.
std::vector<std::vector<std::uint64_t>> binomials(std::size_t n, std::size_t k_max) {
  std::vector<std::vector<std::uint64_t>> b(n + 1, std::vector<std::uint64_t>(k_max + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) {
    b[i][0] = 1;
    for (std::size_t j = 1; j <= k_max && j <= i; ++j) {
      std::uint64_t a = b[i - 1][j - 1];
      std::uint64_t c = b[i - 1][j];
      std::uint64_t s = a + c;
      b[i][j] = (s < a) ? UINT64_MAX : s;
    }
  }
  return b;
}

template <class Fn>
void for_each_combination(std::uint32_t n, std::uint32_t k, Fn&& fn) {
  std::vector<std::uint32_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0u);
  if (k == 0 || k > n) return;
  for (;;) {
    fn(std::span<const std::uint32_t>(idx));
    std::uint32_t pos = k;
    while (pos > 0) {
      --pos;
      if (idx[pos] != n - k + pos) break;
      if (pos == 0) return;
    }
    if (idx[pos] == n - k + pos) return;
    ++idx[pos];
    for (std::uint32_t q = pos + 1; q < k; ++q) idx[q] = idx[q - 1] + 1;
  }
}

std::uint64_t combinadic(std::span<const std::uint32_t> verts,
                         const std::vector<std::vector<std::uint64_t>>& binom) {
  std::uint64_t key = 0;
  for (std::size_t j = 0; j < verts.size(); ++j) key += binom[verts[j]][j + 1];
  return key;
}

// Symmetric difference of two ascending row-id lists into out.
void xor_columns(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b,
                 std::vector<std::uint32_t>& out) {
  out.clear();
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      out.push_back(a[i++]);
    } else if (b[j] < a[i]) {
      out.push_back(b[j++]);
    } else {
      ++i;
      ++j;
    }
  }
  out.insert(out.end(), a.begin() + i, a.end());
  out.insert(out.end(), b.begin() + j, b.end());
}

}  // namespace

Filtration build_rips_filtration(const DistanceMatrix& dm, int max_dim, std::size_t cap) {
  std::size_t n = dm.n;
  if (n == 0) throw std::invalid_argument("filtration of an empty distance matrix");
  if (max_dim < 0) throw std::invalid_argument("negative max dimension");

  auto binom = binomials(n, static_cast<std::size_t>(max_dim) + 2);
  std::uint64_t total = 0;
  for (int d = 0; d <= max_dim; ++d) {
    std::uint64_t c = binom[n][static_cast<std::size_t>(d) + 1];
    total = (total + c < total) ? UINT64_MAX : total + c;
  }
  if (total > cap) {
    throw resource_error("simplex count " + std::to_string(total) +
                         " exceeds the cap of " + std::to_string(cap));
  }

  std::size_t count = static_cast<std::size_t>(total);
  std::vector<double> values;
  std::vector<std::int32_t> dims;
  std::vector<std::uint32_t> verts;
  std::vector<std::size_t> offsets;
  values.reserve(count);
  dims.reserve(count);
  offsets.reserve(count + 1);
  offsets.push_back(0);

  for (int d = 0; d <= max_dim; ++d) {
    std::uint32_t k = static_cast<std::uint32_t>(d) + 1;
    for_each_combination(static_cast<std::uint32_t>(n), k, [&](std::span<const std::uint32_t> c) {
      double v = 0.0;
      for (std::size_t a = 0; a < c.size(); ++a) {
        for (std::size_t b = a + 1; b < c.size(); ++b) {
          double e = dm(c[a], c[b]);
          if (e > v) v = e;
        }
      }
      values.push_back(v);
      dims.push_back(d);
      verts.insert(verts.end(), c.begin(), c.end());
      offsets.push_back(verts.size());
    });
  }

  std::vector<std::uint32_t> order(values.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
    if (values[x] != values[y]) return values[x] < values[y];
    if (dims[x] != dims[y]) return dims[x] < dims[y];
    std::span<const std::uint32_t> vx{verts.data() + offsets[x], offsets[x + 1] - offsets[x]};
    std::span<const std::uint32_t> vy{verts.data() + offsets[y], offsets[y + 1] - offsets[y]};
    return std::lexicographical_compare(vx.begin(), vx.end(), vy.begin(), vy.end());
  });

  Filtration f;
  f.max_dim = max_dim;
  f.n_points = n;
  f.values.reserve(values.size());
  f.dims.reserve(values.size());
  f.offsets.reserve(values.size() + 1);
  f.offsets.push_back(0);
  f.verts.reserve(verts.size());
  for (std::uint32_t idx : order) {
    f.values.push_back(values[idx]);
    f.dims.push_back(dims[idx]);
    f.verts.insert(f.verts.end(), verts.begin() + offsets[idx], verts.begin() + offsets[idx + 1]);
    f.offsets.push_back(f.verts.size());
  }
  return f;
}

namespace {

struct ReductionScratch {
  std::vector<std::uint32_t> col;
  std::vector<std::uint32_t> tmp;
};

// Facet row ids (global filtration positions) of simplex i, ascending.
void boundary_column(const Filtration& filt, std::size_t i,
                     const std::unordered_map<std::uint64_t, std::uint32_t>& facet_ids,
                     const std::vector<std::vector<std::uint64_t>>& binom,
                     std::vector<std::uint32_t>& out) {
  auto vs = filt.vertices(i);
  out.clear();
  if (vs.size() <= 1) return;
  std::vector<std::uint32_t> facet(vs.size() - 1);
  for (std::size_t drop = 0; drop < vs.size(); ++drop) {
    std::size_t w = 0;
    for (std::size_t q = 0; q < vs.size(); ++q) {
      if (q != drop) facet[w++] = vs[q];
    }
    auto it = facet_ids.find(combinadic(facet, binom));
    if (it == facet_ids.end()) throw std::logic_error("facet missing from filtration");
    out.push_back(it->second);
  }
  std::sort(out.begin(), out.end());
}

}  // namespace

Barcode reduce_barcode(const Filtration& filt, int degree, ReduceMode mode) {
  if (degree < 0) throw std::invalid_argument("negative homology degree");
  std::size_t n = filt.size();
  auto binom = binomials(filt.n_points, static_cast<std::size_t>(degree) + 2);

  // Row ids are global filtration positions; only the two relevant facet
  // dimensions need lookup maps.
  std::unordered_map<std::uint64_t, std::uint32_t> ids_below;  // dim degree - 1
  std::unordered_map<std::uint64_t, std::uint32_t> ids_at;     // dim degree
  for (std::size_t i = 0; i < n; ++i) {
    int d = filt.dims[i];
    if (d == degree - 1) {
      ids_below.emplace(combinadic(filt.vertices(i), binom), static_cast<std::uint32_t>(i));
    } else if (d == degree) {
      ids_at.emplace(combinadic(filt.vertices(i), binom), static_cast<std::uint32_t>(i));
    }
  }

  std::vector<std::int64_t> pivot_of_row(n, -1);
  std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> reduced;
  std::vector<char> cleared(n, 0);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;  // (row, col)
  std::vector<char> positive(n, 0);

  ReductionScratch scratch;
  auto reduce_column = [&](std::size_t j, const std::unordered_map<std::uint64_t, std::uint32_t>& facets) {
    boundary_column(filt, j, facets, binom, scratch.col);
    while (!scratch.col.empty()) {
      std::uint32_t low = scratch.col.back();
      std::int64_t other = pivot_of_row[low];
      if (other < 0) break;
      xor_columns(scratch.col, reduced.at(static_cast<std::uint32_t>(other)), scratch.tmp);
      scratch.col.swap(scratch.tmp);
    }
    if (scratch.col.empty()) {
      positive[j] = 1;
      return;
    }
    std::uint32_t low = scratch.col.back();
    pivot_of_row[low] = static_cast<std::int64_t>(j);
    pairs.emplace_back(low, static_cast<std::uint32_t>(j));
    reduced.emplace(static_cast<std::uint32_t>(j), scratch.col);
    if (filt.dims[j] == degree + 1) cleared[low] = 1;
  };

  if (mode == ReduceMode::Twist) {
    for (std::size_t j = 0; j < n; ++j) {
      if (filt.dims[j] == degree + 1) reduce_column(j, ids_at);
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (filt.dims[j] != degree || cleared[j]) continue;
      reduce_column(j, ids_below);
    }
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      if (filt.dims[j] == degree) {
        reduce_column(j, ids_below);
      } else if (filt.dims[j] == degree + 1) {
        reduce_column(j, ids_at);
      }
    }
  }

  Barcode code;
  code.degree = degree;
  for (auto [row, col] : pairs) {
    if (filt.dims[row] != degree) continue;
    double birth = filt.values[row];
    double death = filt.values[col];
    if (birth < death) code.bars.push_back({birth, death});
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (filt.dims[j] != degree) continue;
    bool paired = pivot_of_row[j] >= 0;
    bool pos = positive[j] || cleared[j];
    if (pos && !paired) code.bars.push_back({filt.values[j], kInfinity});
  }
  std::sort(code.bars.begin(), code.bars.end(), [](const Bar& a, const Bar& b) {
    if (a.birth != b.birth) return a.birth < b.birth;
    return a.death < b.death;
  });
  return code;
}

namespace {

// GF(2) column rank with word-packed rows.
class BitMatrix {
 public:
  explicit BitMatrix(std::size_t rows) : words_((rows + 63) / 64) {}

  void add_column(std::vector<std::uint64_t> col) {
    for (auto& p : pivots_) {
      if (col[p.first / 64] >> (p.first % 64) & 1) {
        for (std::size_t w = 0; w < words_; ++w) col[w] ^= p.second[w];
      }
    }
    for (std::size_t w = 0; w < words_; ++w) {
      if (col[w] != 0) {
        std::size_t bit = w * 64 + static_cast<std::size_t>(std::countr_zero(col[w]));
        pivots_.emplace_back(bit, std::move(col));
        return;
      }
    }
  }

  std::size_t rank() const { return pivots_.size(); }
  std::size_t words() const { return words_; }

 private:
  std::size_t words_;
  std::vector<std::pair<std::size_t, std::vector<std::uint64_t>>> pivots_;
};

}  // namespace

std::size_t rank_at_oracle(const DistanceMatrix& dm, double t, int degree) {
  std::size_t n = dm.n;
  if (n == 0) throw std::invalid_argument("oracle on an empty distance matrix");
  if (n > 12) throw std::invalid_argument("oracle is capped at 12 points");
  if (degree < 0) throw std::invalid_argument("negative homology degree");

  auto binom = binomials(n, static_cast<std::size_t>(degree) + 2);

  auto present = [&](std::span<const std::uint32_t> c) {
    for (std::size_t a = 0; a < c.size(); ++a) {
      for (std::size_t b = a + 1; b < c.size(); ++b) {
        if (dm(c[a], c[b]) > t) return false;
      }
    }
    return true;
  };

  auto collect = [&](int d) {
    std::vector<std::vector<std::uint32_t>> out;
    if (d < 0) return out;
    for_each_combination(static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(d) + 1,
                         [&](std::span<const std::uint32_t> c) {
                           if (present(c)) out.emplace_back(c.begin(), c.end());
                         });
    return out;
  };

  auto below = collect(degree - 1);
  auto at = collect(degree);
  auto above = collect(degree + 1);

  auto index_of = [&](const std::vector<std::vector<std::uint32_t>>& sims) {
    std::unordered_map<std::uint64_t, std::size_t> m;
    for (std::size_t i = 0; i < sims.size(); ++i) m.emplace(combinadic(sims[i], binom), i);
    return m;
  };

  auto boundary_rank = [&](const std::vector<std::vector<std::uint32_t>>& cols,
                           const std::vector<std::vector<std::uint32_t>>& rows) {
    if (rows.empty() || cols.empty()) return std::size_t{0};
    auto row_ids = index_of(rows);
    BitMatrix mat(rows.size());
    std::vector<std::uint32_t> facet;
    for (const auto& c : cols) {
      std::vector<std::uint64_t> packed(mat.words(), 0);
      facet.resize(c.size() - 1);
      for (std::size_t drop = 0; drop < c.size(); ++drop) {
        std::size_t w = 0;
        for (std::size_t q = 0; q < c.size(); ++q) {
          if (q != drop) facet[w++] = c[q];
        }
        std::size_t r = row_ids.at(combinadic(facet, binom));
        packed[r / 64] ^= std::uint64_t{1} << (r % 64);
      }
      mat.add_column(std::move(packed));
    }
    return mat.rank();
  };

  std::size_t rank_down = degree == 0 ? 0 : boundary_rank(at, below);
  std::size_t rank_up = boundary_rank(above, at);
  return at.size() - rank_down - rank_up;
}

std::size_t bars_alive_at(const Barcode& code, double t) {
  std::size_t alive = 0;
  for (const Bar& b : code.bars) {
    if (b.birth <= t && t < b.death) ++alive;
  }
  return alive;
}

}  // namespace relrank
