#include "twisty/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <queue>
#include <stdexcept>
#include <unordered_map>

#include "twisty/kernels.hpp"

namespace twisty::persistence {

namespace {

bool is_prime(Coeff q) {
  if (q < 2) return false;
  for (Coeff f = 2; static_cast<std::uint32_t>(f) * f <= q; ++f)
    if (q % f == 0) return false;
  return true;
}

// Z/q arithmetic with a precomputed inverse table.
struct ModField {
  Coeff q;
  std::vector<Coeff> inv;

  explicit ModField(Coeff q_) : q(q_), inv(q_, 0) {
    for (Coeff a = 1; a < q; ++a) {
      // q is small and prime; Fermat via repeated multiplication is plenty.
      std::uint32_t x = 1;
      for (Coeff e = 0; e < q - 2; ++e) x = x * a % q;
      inv[a] = static_cast<Coeff>(x);
    }
  }
  Coeff neg(Coeff a) const { return a == 0 ? 0 : static_cast<Coeff>(q - a); }
  Coeff mul(Coeff a, Coeff b) const {
    return static_cast<Coeff>(static_cast<std::uint32_t>(a) * b % q);
  }
  Coeff add(Coeff a, Coeff b) const {
    const std::uint32_t s = static_cast<std::uint32_t>(a) + b;
    return static_cast<Coeff>(s >= q ? s - q : s);
  }
};

struct BinomialTable {
  std::size_t rows = 0;
  static constexpr int kMaxK = 5;
  std::vector<Index> table;  // rows x (kMaxK+1)

  explicit BinomialTable(std::size_t n) : rows(n + 1), table(rows * (kMaxK + 1), 0) {
    for (std::size_t i = 0; i < rows; ++i) {
      at(i, 0) = 1;
      for (int k = 1; k <= kMaxK; ++k)
        at(i, k) = i == 0 ? 0 : at(i - 1, k - 1) + at(i - 1, k);
    }
  }
  Index& at(std::size_t nn, int k) { return table[nn * (kMaxK + 1) + k]; }
  Index operator()(std::size_t nn, int k) const {
    if (k < 0) return 0;
    return table[nn * (kMaxK + 1) + k];
  }
};

struct VTerm {
  Index idx;
  Coeff coeff;
};

struct Entry {
  double diam;
  Index idx;
  Coeff coeff;
};

// Min-heap on (diam, idx): the pivot of a coboundary column is the cofacet
// that is earliest in the filtration order.
struct EntryGreater {
  bool operator()(const Entry& a, const Entry& b) const {
    return a.diam > b.diam || (a.diam == b.diam && a.idx > b.idx);
  }
};
using ColumnHeap = std::priority_queue<Entry, std::vector<Entry>, EntryGreater>;

struct Column {
  double diam;
  Index idx;
};

struct ColumnRef {
  std::uint32_t col;
  Coeff pivot_coeff;
};

struct ReportedPair {
  double birth;
  double death;
  std::vector<VTerm> cocycle;
};

class Reducer {
 public:
  Reducer(const DistanceMatrix& d, const ModField& field, double threshold)
      : d_(d), field_(field), threshold_(threshold), binom_(d.n),
        maxrow_(d.n) {}

  const BinomialTable& binom() const { return binom_; }

  // Largest v with binom(v, k) <= idx, v < hint.
  int max_vertex(Index idx, int k, int hint) const {
    int lo = k - 1, hi = hint;
    while (hi - lo > 1) {
      const int mid = lo + (hi - lo) / 2;
      if (binom_(mid, k) <= idx) lo = mid;
      else hi = mid;
    }
    return lo;
  }

  void decode(Index idx, int dim, int* out_desc) const {
    int hint = static_cast<int>(d_.n);
    for (int i = dim; i >= 0; --i) {
      const int v = max_vertex(idx, i + 1, hint);
      out_desc[dim - i] = v;
      idx -= binom_(v, i + 1);
      hint = v;
    }
  }

  double diameter(const int* vert_desc, int dim) const {
    double diam = 0.0;
    for (int a = 0; a <= dim; ++a)
      for (int b = a + 1; b <= dim; ++b)
        diam = std::max(diam, d_(vert_desc[a], vert_desc[b]));
    return diam;
  }

  // Runs the coboundary reduction for one dimension. `columns` must be
  // sorted by (diam, idx) descending. Pivot cofacets land in pivot_map for
  // clearing in the next dimension.
  void reduce_dimension(const std::vector<Column>& columns, int dim,
                        bool want_cocycles, std::vector<ReportedPair>& out,
                        std::unordered_map<Index, ColumnRef>& pivot_map) {
    pivot_map.reserve(columns.size());
    std::unordered_map<std::uint32_t, std::vector<VTerm>> v_store;
    std::vector<Entry> buffer;
    buffer.reserve(d_.n);
    std::vector<int> vert(dim + 1), vert2(dim + 1);

    for (std::uint32_t c = 0; c < columns.size(); ++c) {
      const Column col = columns[c];
      decode(col.idx, dim, vert.data());
      buffer.clear();
      append_coboundary(vert.data(), dim, col.idx, col.diam, 1, buffer);

      if (buffer.empty()) {
        ReportedPair rp{col.diam, kInfDeath, {}};
        if (want_cocycles) rp.cocycle = {{col.idx, 1}};
        out.push_back(std::move(rp));
        continue;
      }

      // Emergent shortcut: if the minimal cofacet enters with the column's
      // own diameter and is unpaired, the pair (col, cofacet) is final and
      // has zero persistence.
      std::size_t min_at = 0;
      for (std::size_t i = 1; i < buffer.size(); ++i) {
        const Entry& e = buffer[i];
        const Entry& m = buffer[min_at];
        if (e.diam < m.diam || (e.diam == m.diam && e.idx < m.idx)) min_at = i;
      }
      if (buffer[min_at].diam == col.diam &&
          pivot_map.find(buffer[min_at].idx) == pivot_map.end()) {
        pivot_map.emplace(buffer[min_at].idx,
                          ColumnRef{c, buffer[min_at].coeff});
        continue;  // zero persistence; never reported
      }

      ColumnHeap heap(EntryGreater{}, std::move(buffer));
      buffer = {};
      buffer.reserve(d_.n);
      std::vector<VTerm> v_column{{col.idx, 1}};

      while (true) {
        std::optional<Entry> pivot = pop_pivot(heap);
        if (!pivot.has_value()) {
          ReportedPair rp{col.diam, kInfDeath, {}};
          if (want_cocycles) rp.cocycle = v_column;
          out.push_back(std::move(rp));
          break;
        }
        const auto it = pivot_map.find(pivot->idx);
        if (it == pivot_map.end()) {
          pivot_map.emplace(pivot->idx, ColumnRef{c, pivot->coeff});
          ReportedPair rp{col.diam, pivot->diam, {}};
          if (want_cocycles && pivot->diam > col.diam) rp.cocycle = v_column;
          if (pivot->diam > col.diam) out.push_back(std::move(rp));
          if (v_column.size() > 1) v_store.emplace(c, std::move(v_column));
          break;
        }

        // Eliminate against the column that owns this pivot.
        const ColumnRef ref = it->second;
        const Coeff lambda = field_.mul(pivot->coeff, field_.inv[ref.pivot_coeff]);
        heap.push(*pivot);
        const auto vs = v_store.find(ref.col);
        const std::vector<VTerm> implicit{{columns[ref.col].idx, 1}};
        const std::vector<VTerm>& vi =
            vs != v_store.end() ? vs->second : implicit;

        std::vector<Entry>& scratch = buffer;
        scratch.clear();
        for (const VTerm& term : vi) {
          decode(term.idx, dim, vert2.data());
          const double sdiam = diameter(vert2.data(), dim);
          const Coeff factor = field_.neg(field_.mul(lambda, term.coeff));
          append_coboundary(vert2.data(), dim, term.idx, sdiam, factor,
                            scratch);
        }
        for (const Entry& e : scratch) heap.push(e);
        merge_add(v_column, vi, field_.neg(lambda));
      }
    }
  }

 private:
  std::optional<Entry> pop_pivot(ColumnHeap& heap) const {
    while (!heap.empty()) {
      Entry e = heap.top();
      heap.pop();
      std::uint32_t acc = e.coeff;
      while (!heap.empty() && heap.top().idx == e.idx) {
        acc = (acc + heap.top().coeff) % field_.q;
        heap.pop();
      }
      acc %= field_.q;
      if (acc != 0) {
        e.coeff = static_cast<Coeff>(acc);
        return e;
      }
    }
    return std::nullopt;
  }

  // Appends the (threshold-capped) coboundary of a simplex, scaled by
  // `scale`, to `out`. The cofacet obtained by inserting w carries sign
  // (-1)^k where k is the count of simplex vertices below w.
  void append_coboundary(const int* vert_desc, int dim, Index idx, double diam,
                         Coeff scale, std::vector<Entry>& out) {
    const std::size_t n = d_.n;
    if (dim == 1) {
      kernels::rowmax2(d_.row(vert_desc[0]), d_.row(vert_desc[1]),
                       maxrow_.data(), n);
    } else {
      kernels::rowmax3(d_.row(vert_desc[0]), d_.row(vert_desc[1]),
                       d_.row(vert_desc[2]), maxrow_.data(), n);
    }
    Index idx_below = idx;
    Index idx_above = 0;
    int k = dim + 1;
    for (int w = static_cast<int>(n) - 1; w >= 0; --w) {
      if (k > 0 && w == vert_desc[dim + 1 - k]) {
        idx_below -= binom_(w, k);
        idx_above += binom_(w, k + 1);
        --k;
        continue;
      }
      const double cof_diam = std::max(diam, maxrow_[w]);
      if (cof_diam > threshold_) continue;
      const Index cof = idx_above + binom_(w, k + 1) + idx_below;
      const Coeff coeff = (k % 2 == 0) ? scale : field_.neg(scale);
      out.push_back({cof_diam, cof, coeff});
    }
  }

  // v += factor * w, both sorted by idx; zero coefficients dropped.
  void merge_add(std::vector<VTerm>& v, const std::vector<VTerm>& w,
                 Coeff factor) const {
    std::vector<VTerm> merged;
    merged.reserve(v.size() + w.size());
    std::size_t a = 0, b = 0;
    while (a < v.size() || b < w.size()) {
      if (b == w.size() || (a < v.size() && v[a].idx < w[b].idx)) {
        merged.push_back(v[a++]);
      } else if (a == v.size() || w[b].idx < v[a].idx) {
        const Coeff cf = field_.mul(w[b].coeff, factor);
        if (cf != 0) merged.push_back({w[b].idx, cf});
        ++b;
      } else {
        const Coeff cf = field_.add(v[a].coeff, field_.mul(w[b].coeff, factor));
        if (cf != 0) merged.push_back({v[a].idx, cf});
        ++a;
        ++b;
      }
    }
    v = std::move(merged);
  }

  const DistanceMatrix& d_;
  const ModField& field_;
  double threshold_;
  BinomialTable binom_;
  std::vector<double> maxrow_;
};

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    int root = x;
    while (parent[root] != root) root = parent[root];
    while (parent[x] != root) {
      const int next = parent[x];
      parent[x] = root;
      x = next;
    }
    return root;
  }
  bool merge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

void validate_matrix(const DistanceMatrix& d) {
  if (d.entries.size() != d.n * d.n)
    throw std::invalid_argument("DistanceMatrix: wrong entry count");
  for (std::size_t i = 0; i < d.n; ++i) {
    if (d(i, i) != 0.0)
      throw std::invalid_argument("DistanceMatrix: nonzero diagonal");
    for (std::size_t j = i + 1; j < d.n; ++j) {
      if (!(d(i, j) == d(j, i)))
        throw std::invalid_argument("DistanceMatrix: not symmetric");
      if (!std::isfinite(d(i, j)))
        throw std::invalid_argument("DistanceMatrix: non-finite entry");
    }
  }
}

}  // namespace

DistanceMatrix DistanceMatrix::from_entries(std::size_t n,
                                            std::vector<double> entries) {
  DistanceMatrix d{n, std::move(entries)};
  validate_matrix(d);
  return d;
}

DistanceMatrix DistanceMatrix::from_points(const double* data, std::size_t rows,
                                           std::size_t dim) {
  DistanceMatrix d;
  d.n = rows;
  d.entries.resize(rows * rows);
  for (std::size_t i = 0; i < rows; ++i) {
    kernels::sqdist_rows(data, rows, dim, data + i * dim,
                         d.entries.data() + i * rows);
    for (std::size_t j = 0; j < rows; ++j)
      d.entries[i * rows + j] = std::sqrt(d.entries[i * rows + j]);
    d.entries[i * rows + i] = 0.0;
  }
  return d;
}

double DistanceMatrix::enclosing_radius() const {
  double radius = kInfDeath;
  for (std::size_t i = 0; i < n; ++i) {
    double far = 0.0;
    for (std::size_t j = 0; j < n; ++j) far = std::max(far, (*this)(i, j));
    radius = std::min(radius, far);
  }
  return n == 0 ? 0.0 : radius;
}

PersistenceResult rips_persistence(const DistanceMatrix& d, int maxdim,
                                   Coeff field_char, double threshold) {
  if (!is_prime(field_char))
    throw std::invalid_argument("rips_persistence: characteristic must be prime");
  if (!(threshold > 0.0))
    throw std::invalid_argument("rips_persistence: threshold must be > 0");
  if (maxdim < 0 || maxdim > 2)
    throw std::invalid_argument("rips_persistence: maxdim must be 0..2");
  validate_matrix(d);

  const std::size_t n = d.n;
  const ModField field(field_char);
  Reducer reducer(d, field, threshold);

  PersistenceResult result;
  result.field_char = field_char;
  result.threshold = threshold;
  for (int k = 0; k < 3; ++k) result.diagrams[k].dim = k;

  // Dimension 0: union-find over edges in filtration order.
  std::vector<Column> edges;
  edges.reserve(n * (n - 1) / 2);
  {
    Index idx = 0;
    for (std::size_t j = 1; j < n; ++j)
      for (std::size_t i = 0; i < j; ++i, ++idx)
        if (d(i, j) <= threshold) edges.push_back({d(i, j), idx});
  }
  std::sort(edges.begin(), edges.end(), [](const Column& a, const Column& b) {
    return a.diam < b.diam || (a.diam == b.diam && a.idx < b.idx);
  });

  UnionFind uf(n);
  std::vector<Column> h1_columns;
  std::vector<int> vert(2);
  for (const Column& e : edges) {
    reducer.decode(e.idx, 1, vert.data());
    if (uf.merge(vert[0], vert[1])) {
      if (e.diam > 0.0)
        result.diagrams[0].pairs.push_back({0.0, e.diam});
    } else {
      h1_columns.push_back(e);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (uf.find(static_cast<int>(i)) == static_cast<int>(i))
      result.diagrams[0].pairs.push_back({0.0, kInfDeath});
  std::sort(result.diagrams[0].pairs.begin(), result.diagrams[0].pairs.end(),
            [](const PersistencePair& a, const PersistencePair& b) {
              return a.birth < b.birth ||
                     (a.birth == b.birth && a.death < b.death);
            });

  if (maxdim < 1 || n == 0) return result;

  // Dimension 1: the non-merging edges, in reverse filtration order.
  std::reverse(h1_columns.begin(), h1_columns.end());
  std::vector<ReportedPair> h1_pairs;
  std::unordered_map<Index, ColumnRef> triangle_pivots;
  reducer.reduce_dimension(h1_columns, 1, true, h1_pairs, triangle_pivots);

  std::sort(h1_pairs.begin(), h1_pairs.end(),
            [](const ReportedPair& a, const ReportedPair& b) {
              return a.birth < b.birth || (a.birth == b.birth && a.death < b.death);
            });
  std::vector<int> edge_vert(2);
  for (ReportedPair& rp : h1_pairs) {
    result.diagrams[1].pairs.push_back({rp.birth, rp.death});
    CocycleRep rep;
    rep.field_char = field_char;
    rep.birth = rp.birth;
    rep.death = rp.death;
    rep.terms.reserve(rp.cocycle.size());
    for (const VTerm& term : rp.cocycle) {
      reducer.decode(term.idx, 1, edge_vert.data());
      rep.terms.push_back({edge_vert[1], edge_vert[0], term.coeff});
    }
    result.h1_cocycles.push_back(std::move(rep));
  }

  if (maxdim < 2) return result;

  // Dimension 2: all triangles under the threshold except the cleared ones.
  std::vector<Index> cleared;
  cleared.reserve(triangle_pivots.size());
  for (const auto& [idx, ref] : triangle_pivots) cleared.push_back(idx);
  std::sort(cleared.begin(), cleared.end());

  std::vector<Column> h2_columns;
  {
    Index idx = 0;
    std::size_t cpos = 0;
    for (std::size_t k = 2; k < n; ++k)
      for (std::size_t j = 1; j < k; ++j) {
        const double djk = d(j, k);
        for (std::size_t i = 0; i < j; ++i, ++idx) {
          while (cpos < cleared.size() && cleared[cpos] < idx) ++cpos;
          if (cpos < cleared.size() && cleared[cpos] == idx) continue;
          const double diam = std::max(djk, std::max(d(i, j), d(i, k)));
          if (diam <= threshold) h2_columns.push_back({diam, idx});
        }
      }
  }
  std::sort(h2_columns.begin(), h2_columns.end(),
            [](const Column& a, const Column& b) {
              return a.diam > b.diam || (a.diam == b.diam && a.idx > b.idx);
            });

  std::vector<ReportedPair> h2_pairs;
  std::unordered_map<Index, ColumnRef> tetra_pivots;
  reducer.reduce_dimension(h2_columns, 2, false, h2_pairs, tetra_pivots);
  for (const ReportedPair& rp : h2_pairs)
    result.diagrams[2].pairs.push_back({rp.birth, rp.death});
  std::sort(result.diagrams[2].pairs.begin(), result.diagrams[2].pairs.end(),
            [](const PersistencePair& a, const PersistencePair& b) {
              return a.birth < b.birth || (a.birth == b.birth && a.death < b.death);
            });

  return result;
}

std::array<std::size_t, 3> betti_oracle(const DistanceMatrix& d, double scale,
                                        int maxdim, Coeff field_char) {
  if (d.n > 16)
    throw std::invalid_argument("betti_oracle: n must be <= 16");
  if (!is_prime(field_char))
    throw std::invalid_argument("betti_oracle: characteristic must be prime");
  validate_matrix(d);
  const int n = static_cast<int>(d.n);
  const ModField field(field_char);

  // Simplices of each dimension as sorted vertex lists, filtered by diameter.
  std::array<std::vector<std::vector<int>>, 4> simplices;
  std::array<std::unordered_map<std::uint32_t, std::size_t>, 4> lookup;
  auto key_of = [](const std::vector<int>& v) {
    std::uint32_t key = 0;
    for (int x : v) key |= 1u << x;
    return key;
  };
  std::vector<int> combo;
  auto rec = [&](auto&& self, int start, int dim) -> void {
    if (static_cast<int>(combo.size()) == dim + 1) {
      double diam = 0.0;
      for (std::size_t a = 0; a < combo.size(); ++a)
        for (std::size_t b = a + 1; b < combo.size(); ++b)
          diam = std::max(diam, d(combo[a], combo[b]));
      if (diam <= scale) {
        lookup[dim][key_of(combo)] = simplices[dim].size();
        simplices[dim].push_back(combo);
      }
      return;
    }
    for (int v = start; v < n; ++v) {
      combo.push_back(v);
      self(self, v + 1, dim);
      combo.pop_back();
    }
  };
  const int top = std::min(maxdim + 1, 3);
  for (int dim = 0; dim <= top; ++dim) rec(rec, 0, dim);

  // rank of the boundary matrix d_k : C_k -> C_{k-1} over Z/q
  auto boundary_rank = [&](int k) -> std::size_t {
    if (k < 1 || simplices[k].empty() || simplices[k - 1].empty()) return 0;
    const std::size_t rows = simplices[k - 1].size();
    const std::size_t cols = simplices[k].size();
    std::vector<Coeff> m(rows * cols, 0);
    for (std::size_t c = 0; c < cols; ++c) {
      std::vector<int> face = simplices[k][c];
      for (std::size_t drop = 0; drop < face.size(); ++drop) {
        std::vector<int> sub;
        for (std::size_t i = 0; i < face.size(); ++i)
          if (i != drop) sub.push_back(face[i]);
        const auto it = lookup[k - 1].find(key_of(sub));
        if (it == lookup[k - 1].end()) continue;  // cannot happen in Rips
        const Coeff sign = (drop % 2 == 0) ? 1 : field.neg(1);
        m[it->second * cols + c] = sign;
      }
    }
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
      std::size_t pivot_row = rows;
      for (std::size_t r = rank; r < rows; ++r)
        if (m[r * cols + col] != 0) {
          pivot_row = r;
          break;
        }
      if (pivot_row == rows) continue;
      for (std::size_t cc = 0; cc < cols; ++cc)
        std::swap(m[rank * cols + cc], m[pivot_row * cols + cc]);
      const Coeff piv_inv = field.inv[m[rank * cols + col]];
      for (std::size_t r = rank + 1; r < rows; ++r) {
        const Coeff factor = field.mul(m[r * cols + col], piv_inv);
        if (factor == 0) continue;
        for (std::size_t cc = col; cc < cols; ++cc)
          m[r * cols + cc] = field.add(
              m[r * cols + cc], field.neg(field.mul(factor, m[rank * cols + cc])));
      }
      ++rank;
    }
    return rank;
  };

  std::array<std::size_t, 3> betti{0, 0, 0};
  std::array<std::size_t, 4> ranks{0, 0, 0, 0};
  for (int k = 1; k <= top; ++k) ranks[k] = boundary_rank(k);
  for (int k = 0; k <= std::min(maxdim, 2); ++k) {
    const std::size_t cells = simplices[k].size();
    const std::size_t below = ranks[k];
    const std::size_t above = (k + 1 <= top) ? ranks[k + 1] : 0;
    betti[k] = cells - below - above;
  }
  return betti;
}

std::array<std::size_t, 3> betti_from_diagrams(const PersistenceResult& result,
                                               double scale) {
  std::array<std::size_t, 3> betti{0, 0, 0};
  for (int k = 0; k < 3; ++k)
    for (const PersistencePair& p : result.diagrams[k].pairs)
      if (p.birth <= scale && scale < p.death) ++betti[k];
  return betti;
}

std::vector<PersistencePair> significant_classes(
    const PersistenceDiagram& diagram, double gap_ratio) {
  if (!(gap_ratio > 1.0))
    throw std::invalid_argument("significant_classes: gap_ratio must be > 1");
  std::vector<PersistencePair> finite;
  for (const PersistencePair& p : diagram.pairs)
    if (p.death != kInfDeath && p.persistence() > 0.0) finite.push_back(p);
  std::sort(finite.begin(), finite.end(),
            [](const PersistencePair& a, const PersistencePair& b) {
              const double pa = a.persistence(), pb = b.persistence();
              if (pa != pb) return pa > pb;
              return a.birth < b.birth || (a.birth == b.birth && a.death < b.death);
            });
  if (finite.size() < 2) return finite;
  // The prefix of classes within gap_ratio of the most persistent one. It is
  // significant only when it dominates the first excluded pair by the same
  // ratio; otherwise the diagram has no distinguished classes at all.
  std::size_t k = 1;
  while (k < finite.size() &&
         finite[k].persistence() * gap_ratio >= finite[0].persistence())
    ++k;
  if (k < finite.size() &&
      finite[k - 1].persistence() < gap_ratio * finite[k].persistence())
    k = 0;
  finite.resize(k);
  return finite;
}

}  // namespace twisty::persistence
