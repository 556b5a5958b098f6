#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "noiselab/graph.hpp"
#include "noiselab/qstate.hpp"

namespace noiselab {

/// ((|0> + |1>)/sqrt2)^{(x)n}
PureState plus_all(int n);
/// |0...0>
PureState zero_state(int n);
/// Product of single-qubit states cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
PureState product_state(const std::vector<std::pair<double, double>>& bloch_angles);
/// (|0^n> + |1^n>)/sqrt2, n >= 2.
PureState ghz(int n);
PureState bell();
/// CZ on every edge applied to plus_all(graph.n).
PureState cluster_state(const Graph& graph);
/// Uniform superposition of all weight-`excitations` bitstrings of length `total`.
PureState dicke_state(int total, int excitations);
/// Brickwork layers of Haar-random two-qubit unitaries on a line, from |0^n>.
PureState random_circuit_state(int n, int depth, std::uint64_t seed);
/// a|000> + b|111>
PureState bitflip_code_encode(std::complex<double> a, std::complex<double> b);

}  // namespace noiselab
