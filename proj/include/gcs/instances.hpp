#pragma once

#include <cstdint>
#include <string>

#include "gcs/graph.hpp"

namespace gcs {

enum class LengthKind : std::uint8_t { kEuclidean, kSquaredEuclidean };

/// s = {0}, t = {1}, m interior copies of [0, 1], complete digraph, squared
/// length. The optimum is 1 / (m + 1) along a Hamiltonian path.
Gcs HppChain(int m);

/// Random instance in R^n: s = {0}, t = {1}, interior vertices are cubes of
/// the given volume centered uniformly in [0, 1]^n. Edges: a random
/// partition of the interior vertices into s-t paths, then uniformly drawn
/// extra edges up to exactly nE.
Gcs RandomInstance(std::uint64_t seed, int n, int nV, int nE, double volume,
                   LengthKind length = LengthKind::kEuclidean);

/// Five vertices s, 1, 2, 3, t with five edges and a mirror symmetry
/// exchanging 1 and 2; all singletons except the rectangle at 3. Euclidean.
Gcs SymmetryInstance();

/// Nine-vertex, 22-edge planar instance with cycles; every interior set is
/// scaled by sigma about its Chebyshev center. The longest s-t path has 7
/// edges and no path visits every vertex.
Gcs TwoDimExample(double sigma, LengthKind length = LengthKind::kSquaredEuclidean);

struct GeneratedInstance {
  Gcs graph;
  std::string name;
  bool recreated{false};  // approximate geometry; its optimum is not a reference value
};

/// Parses generator specs:
///   hpp:<m>
///   random:<seed>:<n>:<nV>:<nE>:<volume>[:sq]
///   symmetry
///   2d:<sigma>[:euclid]
/// Throws std::invalid_argument on a malformed spec.
GeneratedInstance Generate(const std::string& spec);

}  // namespace gcs
