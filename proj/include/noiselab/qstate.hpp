#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace noiselab {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Rng = std::mt19937_64;

/// Register sizes above this are rejected by dense operations.
inline constexpr int kDefaultMaxQubits = 12;
/// Eigenvalues at or below this contribute nothing to an entropy.
inline constexpr double kEigenClip = 1e-12;
/// Eigenvalues below this are reported as a PSD violation.
inline constexpr double kPsdViolation = 1e-6;

/// Strictly increasing list of register positions.
class QubitSet {
 public:
  QubitSet() = default;
  QubitSet(std::initializer_list<int> indices);
  /// Sorts the input; duplicates or negative entries throw ArgumentError.
  explicit QubitSet(std::vector<int> indices);

  /// {0, 1, ..., n-1}
  static QubitSet range(int n);

  const std::vector<int>& indices() const noexcept { return idx_; }
  std::size_t size() const noexcept { return idx_.size(); }
  bool empty() const noexcept { return idx_.empty(); }
  int operator[](std::size_t i) const { return idx_[i]; }
  auto begin() const noexcept { return idx_.begin(); }
  auto end() const noexcept { return idx_.end(); }

  bool contains(int q) const;
  bool disjoint(const QubitSet& other) const;
  QubitSet complement(int n) const;
  QubitSet united(const QubitSet& other) const;
  /// Throws ArgumentError if any index is outside [0, n).
  void check(int n) const;

  friend bool operator==(const QubitSet&, const QubitSet&) = default;

 private:
  std::vector<int> idx_;
};

class DensityMatrix;

/// Unit vector of 2^n amplitudes; qubit 0 is the most significant bit.
class PureState {
 public:
  /// Throws ArgumentError unless the length is a power of two and the norm is 1 within 1e-10.
  explicit PureState(Vector amplitudes);

  static PureState basis(int n, std::size_t index);

  int qubits() const noexcept { return n_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(amps_.size()); }
  const Vector& amplitudes() const noexcept { return amps_; }
  cplx operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }

  DensityMatrix density() const;

 private:
  int n_;
  Vector amps_;
};

/// Hermitian, positive semidefinite, unit-trace matrix on an n-qubit register.
class DensityMatrix {
 public:
  /// Validates Hermiticity and unit trace within 1e-10 and eigenvalues >= -1e-9.
  explicit DensityMatrix(Matrix m);

  /// Skips the eigenvalue check. For results of operations that preserve validity.
  static DensityMatrix unchecked(Matrix m);

  static DensityMatrix maximally_mixed(int n);

  int qubits() const noexcept { return n_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const noexcept { return m_; }
  cplx operator()(std::size_t i, std::size_t j) const {
    return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  /// Eigenvalues in ascending order.
  Eigen::VectorXd spectrum() const;
  double purity() const;

 private:
  struct NoCheck {};
  DensityMatrix(Matrix m, NoCheck);

  int n_;
  Matrix m_;
};

struct StateDistance {
  double fidelity;
  double trace_distance;
};

/// Number of qubits for a dimension that must be a power of two.
int qubits_for_dim(std::size_t dim);

/// Full-register index offsets for each local basis state of `qubits`
/// (local index is big-endian in the listed order).
std::vector<std::size_t> subset_offsets(std::span<const int> qubits, int n);

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b,
                     int max_qubits = kDefaultMaxQubits);
PureState tensor(const PureState& a, const PureState& b,
                 int max_qubits = kDefaultMaxQubits);

/// Marginal on `keep`; an empty set gives the 1x1 trace.
DensityMatrix partial_trace(const DensityMatrix& rho, const QubitSet& keep);
/// Marginal of a pure state on `keep`.
DensityMatrix reduced_density(const PureState& psi, const QubitSet& keep);

/// Entropy in bits of a probability vector, with entries <= kEigenClip dropped.
double spectrum_entropy(std::span<const double> probabilities);
double binary_entropy(double p);
double von_neumann_entropy(const DensityMatrix& rho);
/// Entropy of the marginal of a pure state; works from whichever side is smaller.
double pure_marginal_entropy(const PureState& psi, const QubitSet& keep);

/// System qubits first, then max(1, ceil(log2 rank)) reference qubits.
PureState purify(const DensityMatrix& rho);

StateDistance state_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// x <- (op on targets, identity elsewhere) * x, for a 2^n-row matrix x.
void apply_local_left(const Matrix& op, std::span<const int> targets, int n, Matrix& x);
/// x <- op x op^dagger with op acting on `targets`.
void conjugate_local(const Matrix& op, std::span<const int> targets, int n, Matrix& x);
Vector apply_local(const Matrix& op, std::span<const int> targets, int n, const Vector& v);

/// Haar-random unitary (QR of a complex Gaussian matrix with phase fix).
Matrix random_unitary(std::size_t dim, Rng& rng);
PureState random_pure_state(int n, Rng& rng);
/// Ginibre-induced random state of the given rank (0 = full rank).
DensityMatrix random_density_matrix(int n, Rng& rng, int rank = 0);

}  // namespace noiselab
