#include "noiselab/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "noiselab/error.hpp"

namespace noiselab {

namespace {

constexpr double kStateTol = 1e-10;
constexpr double kEigenFloor = -1e-9;

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Matrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = cplx(normal(rng), normal(rng));
  return g;
}

Eigen::VectorXd hermitian_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace

// ---------------------------------------------------------------------------
// QubitSet

QubitSet::QubitSet(std::initializer_list<int> indices)
    : QubitSet(std::vector<int>(indices)) {}

QubitSet::QubitSet(std::vector<int> indices) : idx_(std::move(indices)) {
  std::sort(idx_.begin(), idx_.end());
  if (std::adjacent_find(idx_.begin(), idx_.end()) != idx_.end())
    throw ArgumentError("QubitSet: duplicate qubit index");
  if (!idx_.empty() && idx_.front() < 0) throw ArgumentError("QubitSet: negative qubit index");
}

QubitSet QubitSet::range(int n) {
  std::vector<int> v(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
  return QubitSet(std::move(v));
}

bool QubitSet::contains(int q) const { return std::binary_search(idx_.begin(), idx_.end(), q); }

bool QubitSet::disjoint(const QubitSet& other) const {
  return std::none_of(idx_.begin(), idx_.end(), [&](int q) { return other.contains(q); });
}

QubitSet QubitSet::complement(int n) const {
  std::vector<int> out;
  for (int q = 0; q < n; ++q)
    if (!contains(q)) out.push_back(q);
  return QubitSet(std::move(out));
}

QubitSet QubitSet::united(const QubitSet& other) const {
  std::vector<int> out;
  std::set_union(idx_.begin(), idx_.end(), other.idx_.begin(), other.idx_.end(),
                 std::back_inserter(out));
  return QubitSet(std::move(out));
}

void QubitSet::check(int n) const {
  for (int q : idx_)
    if (q < 0 || q >= n)
      throw ArgumentError("qubit index " + std::to_string(q) + " outside register of " +
                          std::to_string(n) + " qubits");
}

// ---------------------------------------------------------------------------
// PureState / DensityMatrix

int qubits_for_dim(std::size_t dim) {
  if (dim == 0 || (dim & (dim - 1)) != 0)
    throw ArgumentError("dimension " + std::to_string(dim) + " is not a power of two");
  int n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  return n;
}

PureState::PureState(Vector amplitudes)
    : n_(qubits_for_dim(static_cast<std::size_t>(amplitudes.size()))), amps_(std::move(amplitudes)) {
  if (std::abs(amps_.squaredNorm() - 1.0) > kStateTol)
    throw ArgumentError("PureState: amplitudes are not unit norm");
}

PureState PureState::basis(int n, std::size_t index) {
  Vector v = Vector::Zero(Eigen::Index{1} << n);
  if (index >= static_cast<std::size_t>(v.size())) throw ArgumentError("basis index out of range");
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return PureState(std::move(v));
}

DensityMatrix PureState::density() const {
  return DensityMatrix::unchecked(amps_ * amps_.adjoint());
}

DensityMatrix::DensityMatrix(Matrix m, NoCheck)
    : n_(qubits_for_dim(static_cast<std::size_t>(m.rows()))), m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw ArgumentError("DensityMatrix: matrix is not square");
}

DensityMatrix::DensityMatrix(Matrix m) : DensityMatrix(std::move(m), NoCheck{}) {
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kStateTol)
    throw ArgumentError("DensityMatrix: matrix is not Hermitian");
  if (std::abs(m_.trace() - cplx(1.0)) > kStateTol)
    throw ArgumentError("DensityMatrix: trace is not 1");
  if (hermitian_eigenvalues(m_).minCoeff() < kEigenFloor)
    throw PsdError("DensityMatrix: negative eigenvalue");
}

DensityMatrix DensityMatrix::unchecked(Matrix m) { return DensityMatrix(std::move(m), NoCheck{}); }

DensityMatrix DensityMatrix::maximally_mixed(int n) {
  const Eigen::Index d = Eigen::Index{1} << n;
  return unchecked(Matrix::Identity(d, d) / static_cast<double>(d));
}

Eigen::VectorXd DensityMatrix::spectrum() const { return hermitian_eigenvalues(m_); }

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

// ---------------------------------------------------------------------------
// Index helpers

std::vector<std::size_t> subset_offsets(std::span<const int> qubits, int n) {
  const std::size_t k = qubits.size();
  std::vector<std::size_t> out(std::size_t{1} << k, 0);
  for (std::size_t local = 0; local < out.size(); ++local) {
    std::size_t full = 0;
    for (std::size_t j = 0; j < k; ++j)
      if ((local >> (k - 1 - j)) & 1U) full |= std::size_t{1} << (n - 1 - qubits[j]);
    out[local] = full;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tensor products and marginals

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b, int max_qubits) {
  if (a.qubits() + b.qubits() > max_qubits)
    throw SizeError("tensor: " + std::to_string(a.qubits() + b.qubits()) +
                    " qubits exceeds limit of " + std::to_string(max_qubits));
  return DensityMatrix::unchecked(Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval());
}

PureState tensor(const PureState& a, const PureState& b, int max_qubits) {
  if (a.qubits() + b.qubits() > max_qubits)
    throw SizeError("tensor: " + std::to_string(a.qubits() + b.qubits()) +
                    " qubits exceeds limit of " + std::to_string(max_qubits));
  Vector v(static_cast<Eigen::Index>(a.dim() * b.dim()));
  const auto db = static_cast<Eigen::Index>(b.dim());
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(a.dim()); ++i)
    v.segment(i * db, db) = a.amplitudes()(i) * b.amplitudes();
  return PureState(std::move(v));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const QubitSet& keep) {
  const int n = rho.qubits();
  keep.check(n);
  const QubitSet traced = keep.complement(n);
  const auto kept_off = subset_offsets(keep.indices(), n);
  const auto traced_off = subset_offsets(traced.indices(), n);
  const auto dk = static_cast<Eigen::Index>(kept_off.size());
  const Matrix& m = rho.matrix();
  Matrix out = Matrix::Zero(dk, dk);
  for (Eigen::Index a = 0; a < dk; ++a)
    for (Eigen::Index b = 0; b < dk; ++b) {
      cplx s = 0.0;
      for (std::size_t t : traced_off)
        s += m(static_cast<Eigen::Index>(kept_off[static_cast<std::size_t>(a)] | t),
               static_cast<Eigen::Index>(kept_off[static_cast<std::size_t>(b)] | t));
      out(a, b) = s;
    }
  return DensityMatrix::unchecked(std::move(out));
}

namespace {

/// Rows indexed by `keep`, columns by the complement.
Matrix reshape_for(const PureState& psi, const QubitSet& keep) {
  const int n = psi.qubits();
  keep.check(n);
  const QubitSet rest = keep.complement(n);
  const auto kept_off = subset_offsets(keep.indices(), n);
  const auto rest_off = subset_offsets(rest.indices(), n);
  Matrix m(static_cast<Eigen::Index>(kept_off.size()), static_cast<Eigen::Index>(rest_off.size()));
  for (std::size_t a = 0; a < kept_off.size(); ++a)
    for (std::size_t t = 0; t < rest_off.size(); ++t)
      m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(t)) = psi[kept_off[a] | rest_off[t]];
  return m;
}

}  // namespace

DensityMatrix reduced_density(const PureState& psi, const QubitSet& keep) {
  if (static_cast<int>(keep.size()) > kDefaultMaxQubits)
    throw SizeError("reduced_density: marginal larger than the dense size limit");
  const Matrix m = reshape_for(psi, keep);
  return DensityMatrix::unchecked(m * m.adjoint());
}

// ---------------------------------------------------------------------------
// Entropy

double spectrum_entropy(std::span<const double> probabilities) {
  double s = 0.0;
  for (double p : probabilities) {
    if (p < -kPsdViolation) throw PsdError("entropy: eigenvalue " + std::to_string(p) + " < -1e-6");
    if (p > kEigenClip) s -= p * std::log2(p);
  }
  return std::max(s, 0.0);
}

double binary_entropy(double p) {
  const double probs[2] = {p, 1.0 - p};
  return spectrum_entropy(probs);
}

double von_neumann_entropy(const DensityMatrix& rho) {
  const Eigen::VectorXd ev = rho.spectrum();
  return spectrum_entropy(std::span<const double>(ev.data(), static_cast<std::size_t>(ev.size())));
}

double pure_marginal_entropy(const PureState& psi, const QubitSet& keep) {
  const int n = psi.qubits();
  keep.check(n);
  const QubitSet smaller = 2 * keep.size() <= static_cast<std::size_t>(n) ? keep : keep.complement(n);
  if (static_cast<int>(smaller.size()) > kDefaultMaxQubits)
    throw SizeError("pure_marginal_entropy: marginal too large");
  const Matrix m = reshape_for(psi, smaller);
  return von_neumann_entropy(DensityMatrix::unchecked(m * m.adjoint()));
}

// ---------------------------------------------------------------------------
// Purification and distances

PureState purify(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
  const Eigen::VectorXd& ev = es.eigenvalues();
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = ev.size() - 1; i >= 0; --i)
    if (ev(i) > kEigenClip) support.push_back(i);
  if (support.empty()) throw InternalError("purify: state has no support");
  int ref = 1;
  while ((std::size_t{1} << ref) < support.size()) ++ref;
  if (rho.qubits() + ref > kDefaultMaxQubits + 2)
    throw SizeError("purify: system plus reference exceeds size limit");
  const Eigen::Index dref = Eigen::Index{1} << ref;
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(rho.dim()) * dref);
  for (std::size_t k = 0; k < support.size(); ++k) {
    const Eigen::Index col = support[k];
    const double w = std::sqrt(ev(col));
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(rho.dim()); ++i)
      psi(i * dref + static_cast<Eigen::Index>(k)) = w * es.eigenvectors()(i, col);
  }
  psi.normalize();
  return PureState(std::move(psi));
}

StateDistance state_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw ArgumentError("state_distance: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
  Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix sqrt_rho = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
  const Matrix inner = sqrt_rho * sigma.matrix() * sqrt_rho;
  const Eigen::VectorXd lam = hermitian_eigenvalues(0.5 * (inner + inner.adjoint()));
  double f = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) f += std::sqrt(std::max(lam(i), 0.0));
  const Eigen::VectorXd diff = hermitian_eigenvalues(rho.matrix() - sigma.matrix());
  return {std::clamp(f * f, 0.0, 1.0), std::clamp(0.5 * diff.cwiseAbs().sum(), 0.0, 1.0)};
}

// ---------------------------------------------------------------------------
// Local operators

void apply_local_left(const Matrix& op, std::span<const int> targets, int n, Matrix& x) {
  const Eigen::Index dt = Eigen::Index{1} << targets.size();
  if (op.rows() != dt || op.cols() != dt) throw ArgumentError("apply_local: operator size mismatch");
  if (x.rows() != (Eigen::Index{1} << n)) throw ArgumentError("apply_local: register size mismatch");
  std::vector<int> tv(targets.begin(), targets.end());
  const QubitSet rest = QubitSet(tv).complement(n);
  const auto t_off = subset_offsets(targets, n);
  const auto r_off = subset_offsets(rest.indices(), n);
  Matrix block(dt, x.cols());
  for (std::size_t base : r_off) {
    for (Eigen::Index s = 0; s < dt; ++s)
      block.row(s) = x.row(static_cast<Eigen::Index>(base | t_off[static_cast<std::size_t>(s)]));
    block = (op * block).eval();
    for (Eigen::Index s = 0; s < dt; ++s)
      x.row(static_cast<Eigen::Index>(base | t_off[static_cast<std::size_t>(s)])) = block.row(s);
  }
}

void conjugate_local(const Matrix& op, std::span<const int> targets, int n, Matrix& x) {
  apply_local_left(op, targets, n, x);
  Matrix y = x.adjoint();
  apply_local_left(op, targets, n, y);
  x = y.adjoint();
}

Vector apply_local(const Matrix& op, std::span<const int> targets, int n, const Vector& v) {
  Matrix m = v;
  apply_local_left(op, targets, n, m);
  return m.col(0);
}

// ---------------------------------------------------------------------------
// Random states

Matrix random_unitary(std::size_t dim, Rng& rng) {
  const auto d = static_cast<Eigen::Index>(dim);
  Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(d, d, rng));
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < d; ++i) {
    const cplx rii = r(i, i);
    const double mag = std::abs(rii);
    q.col(i) *= mag > 0 ? rii / mag : cplx(1.0);
  }
  return q;
}

PureState random_pure_state(int n, Rng& rng) {
  Vector v = gaussian_matrix(Eigen::Index{1} << n, 1, rng).col(0);
  v.normalize();
  return PureState(std::move(v));
}

DensityMatrix random_density_matrix(int n, Rng& rng, int rank) {
  const Eigen::Index d = Eigen::Index{1} << n;
  const Eigen::Index k = rank <= 0 ? d : std::min<Eigen::Index>(rank, d);
  const Matrix g = gaussian_matrix(d, k, rng);
  Matrix m = g * g.adjoint();
  m /= m.trace().real();
  m = 0.5 * (m + m.adjoint());
  return DensityMatrix::unchecked(std::move(m));
}

}  // namespace noiselab
