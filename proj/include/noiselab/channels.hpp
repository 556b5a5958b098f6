#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "noiselab/graph.hpp"
#include "noiselab/qstate.hpp"

namespace noiselab {

/// Pauli string stored as X and Z bit masks over an n-qubit register
/// (bit n-1-q belongs to qubit q; Y sets both).
struct PauliString {
  int n = 0;
  std::uint64_t x = 0;
  std::uint64_t z = 0;

  /// Letters I, X, Y, Z; anything else throws ArgumentError.
  static PauliString parse(std::string_view letters);
  static PauliString identity(int n) { return {n, 0, 0}; }

  char letter(int q) const;
  std::string label() const;
  int weight() const;
  /// Dense 2^n matrix. For tests and small registers.
  Matrix matrix() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;
};

/// Kraus operators acting on `targets` (local big-endian order), identity elsewhere.
struct KrausFactor {
  std::vector<int> targets;
  std::vector<Matrix> kraus;
};

/// rho -> sum_k prob_k P_k rho P_k over full-register Pauli strings.
struct PauliFactor {
  std::vector<std::pair<double, PauliString>> terms;
};

using ChannelFactor = std::variant<KrausFactor, PauliFactor>;

/// Completely positive trace-preserving map on n qubits, stored as a sequence
/// of factors applied first to last. Each factor is trace preserving on its own.
class QuantumChannel {
 public:
  static QuantumChannel identity(int n);
  /// Kraus operators on the whole register. Validates sum K^dagger K = I within 1e-9.
  static QuantumChannel from_kraus(std::vector<Matrix> kraus);
  /// Kraus operators on `targets` of an n-qubit register.
  static QuantumChannel local(int n, const QubitSet& targets, std::vector<Matrix> kraus);
  static QuantumChannel pauli(int n, std::vector<std::pair<double, PauliString>> terms);

  int qubits() const noexcept { return n_; }
  const std::vector<ChannelFactor>& factors() const noexcept { return factors_; }

  /// Full-register Kraus list of the whole channel. Throws SizeError when the
  /// product of factor Kraus counts exceeds `max_count`.
  std::vector<Matrix> kraus_operators(std::size_t max_count = 4096) const;

  /// Same channel with qubit i relabelled to targets[i] in an n-qubit register.
  QuantumChannel embedded(const QubitSet& targets, int n) const;

  /// Linear action on an arbitrary 2^n x 2^n operator.
  Matrix act(const Matrix& x) const;

  friend QuantumChannel compose(const QuantumChannel& second, const QuantumChannel& first);

 private:
  QuantumChannel(int n, std::vector<ChannelFactor> factors)
      : n_(n), factors_(std::move(factors)) {}

  int n_ = 0;
  std::vector<ChannelFactor> factors_;
};

/// Probabilities q(P) over the 4^n Pauli strings; index digit i (base 4,
/// most significant first) is the letter on qubit i with I=0, X=1, Y=2, Z=3.
struct PauliDistribution {
  int n = 0;
  std::vector<double> q;

  double operator()(const PauliString& p) const;
  static std::size_t index_of(const PauliString& p);
  PauliString string_at(std::size_t index) const;
};

DensityMatrix apply(const QuantumChannel& channel, const DensityMatrix& rho);
/// Applies a channel declared on |targets| qubits to those qubits of rho.
DensityMatrix apply(const QuantumChannel& channel, const DensityMatrix& rho, const QubitSet& targets);

/// Tensor product of channels placed on disjoint qubit sets of an n-qubit
/// register (n < 0 means one past the largest index used).
QuantumChannel combine(const std::vector<std::pair<QuantumChannel, QubitSet>>& parts, int n = -1);
/// second o first
QuantumChannel compose(const QuantumChannel& second, const QuantumChannel& first);

/// rho -> (1-p) rho + p/3 (X rho X + Y rho Y + Z rho Z); single qubit.
QuantumChannel build_depolarizing(double p);
QuantumChannel build_depolarizing(double p, int qubit, int n);
/// Independent depolarizing on every qubit of an n-qubit register.
QuantumChannel build_product_depolarizing(double p, int n);
/// Off-diagonals scaled by (1 - lambda): rho -> (1 - lambda/2) rho + lambda/2 Z rho Z.
QuantumChannel build_dephasing(double lambda);
QuantumChannel build_product_dephasing(double lambda, int n);
/// rho -> (1-eps) rho + eps P rho P.
QuantumChannel build_correlated_flip(double eps, const PauliString& p);
/// With probability pi every qubit is independently flipped (Pauli `basis`)
/// with probability h, otherwise nothing happens; pi and h fitted to (p1, p2).
QuantumChannel build_pairwise_correlated(double p1, double p2, char basis, int n);
/// Single unitary exp(-i eps H), H a seeded Gaussian Hermitian matrix with spectral radius 1.
QuantumChannel build_random_unitary_noise(int n, double eps, std::uint64_t seed);
/// With probability eps applies V C V^dagger, C = product of CZ over graph
/// edges and V a seeded product of random single-qubit unitaries.
QuantumChannel build_cluster_noise(const Graph& graph, double eps, std::uint64_t seed);
/// Each qubit independently replaced by I/2 with probability 1 - eps.
QuantumChannel build_replacement_noise(double eps, int n);

/// Error distribution of the Pauli-twirled channel; n <= 6.
PauliDistribution pauli_expansion(const QuantumChannel& channel);

}  // namespace noiselab
