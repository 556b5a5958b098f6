#pragma once

#include <utility>
#include <vector>

namespace noiselab {

/// Simple undirected graph on vertices 0..n-1.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;

  static Graph empty(int n) { return {n, {}}; }
  static Graph line(int n);
  static Graph ring(int n);
  /// rows x cols rectangular lattice, row-major vertex numbering.
  static Graph grid(int rows, int cols);

  /// Throws ArgumentError on out-of-range endpoints or self-loops.
  void check() const;
};

}  // namespace noiselab
