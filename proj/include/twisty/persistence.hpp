#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

// Vietoris-Rips persistent cohomology over Z/q in dimensions 0..2, with
// representative 1-cocycles, plus a dense brute-force Betti oracle for
// verification. Edges enter the filtration AT their length (closed
// convention); the oracle uses the same convention so the equivalence
// between the two is exact.

namespace twisty::persistence {

using Index = std::int64_t;
using Coeff = std::uint16_t;

inline constexpr double kInfDeath = std::numeric_limits<double>::infinity();

struct DistanceMatrix {
  std::size_t n = 0;
  std::vector<double> entries;  // row-major n x n

  double operator()(std::size_t i, std::size_t j) const {
    return entries[i * n + j];
  }
  const double* row(std::size_t i) const { return entries.data() + i * n; }

  // Validates symmetry (exact) and a zero diagonal.
  static DistanceMatrix from_entries(std::size_t n, std::vector<double> entries);
  // Euclidean distances between the rows of a row-major point array.
  static DistanceMatrix from_points(const double* data, std::size_t rows,
                                    std::size_t dim);

  // min over i of max over j of d(i,j); the Rips complex is a cone at this
  // scale, so every finite death in dims >= 1 falls below it.
  double enclosing_radius() const;
};

struct PersistencePair {
  double birth = 0.0;
  double death = kInfDeath;
  double persistence() const { return death - birth; }
};

struct PersistenceDiagram {
  int dim = 0;
  std::vector<PersistencePair> pairs;  // zero-persistence pairs dropped
};

struct CocycleTerm {
  int i = 0;
  int j = 0;  // oriented edge i < j
  Coeff coeff = 0;
};

struct CocycleRep {
  Coeff field_char = 2;
  double birth = 0.0;
  double death = kInfDeath;  // coboundary vanishes strictly below this scale
  std::vector<CocycleTerm> terms;
};

struct PersistenceResult {
  std::array<PersistenceDiagram, 3> diagrams;
  std::vector<CocycleRep> h1_cocycles;  // one per reported H1 pair, same order
  Coeff field_char = 2;
  double threshold = 0.0;
};

// Coboundary-matrix reduction over Z/char with clearing; representative
// 1-cocycles captured per H1 pair. Diagrams depend only on the distance
// multiset, not on point order.
PersistenceResult rips_persistence(const DistanceMatrix& d, int maxdim,
                                   Coeff field_char, double threshold);

// Betti numbers of the full Rips complex at one scale via rank-nullity of
// dense boundary matrices over Z/char. Requires n <= 16.
std::array<std::size_t, 3> betti_oracle(const DistanceMatrix& d, double scale,
                                        int maxdim, Coeff field_char);

// Betti numbers read off a persistence result: classes with
// birth <= scale < death per dimension.
std::array<std::size_t, 3> betti_from_diagrams(const PersistenceResult& result,
                                               double scale);

// Finite pairs sorted by persistence descending; returns the prefix of
// classes within gap_ratio of the most persistent one, provided that prefix
// dominates the first excluded pair by gap_ratio (else nothing is
// significant). A single finite pair is trivially significant; ties break
// by (birth, death).
std::vector<PersistencePair> significant_classes(
    const PersistenceDiagram& diagram, double gap_ratio);

}  // namespace twisty::persistence
