#pragma once

// Reference computations written directly from the definitions, with plain
// index loops, for checking the library against.

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "noiselab/channels.hpp"
#include "noiselab/qstate.hpp"

namespace oracle {

using noiselab::cplx;
using noiselab::Matrix;

inline double h2(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

inline Matrix pauli(char c) {
  Matrix m = Matrix::Zero(2, 2);
  switch (c) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
  }
  return m;
}

inline Matrix pauli(const std::string& label) {
  Matrix m = Matrix::Identity(1, 1);
  for (char c : label) m = kron(m, pauli(c));
  return m;
}

/// Sum over the traced-out bits, keeping the listed qubits in increasing order.
inline Matrix partial_trace(const Matrix& rho, int n, const std::vector<int>& keep) {
  const int k = static_cast<int>(keep.size());
  Matrix out = Matrix::Zero(Eigen::Index{1} << k, Eigen::Index{1} << k);
  const long d = 1L << n;
  auto bit = [&](long idx, int q) { return (idx >> (n - 1 - q)) & 1L; };
  auto local = [&](long idx) {
    long r = 0;
    for (int q : keep) r = (r << 1) | bit(idx, q);
    return r;
  };
  auto rest = [&](long idx) {
    long r = 0;
    for (int q = 0; q < n; ++q) {
      bool kept = false;
      for (int x : keep) kept = kept || x == q;
      if (!kept) r = (r << 1) | bit(idx, q);
    }
    return r;
  };
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j)
      if (rest(i) == rest(j)) out(local(i), local(j)) += rho(i, j);
  return out;
}

inline double entropy(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()(i);
    if (l > 1e-12) s -= l * std::log2(l);
  }
  return s;
}

inline double mutual_information(const Matrix& rho2) {
  return entropy(partial_trace(rho2, 2, {0})) + entropy(partial_trace(rho2, 2, {1})) - entropy(rho2);
}

inline Matrix apply_kraus(const std::vector<Matrix>& kraus, const Matrix& rho) {
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const Matrix& k : kraus) out += k * rho * k.adjoint();
  return out;
}

inline std::string label_at(std::size_t index, int n) {
  std::string s(static_cast<std::size_t>(n), 'I');
  for (int q = n - 1; q >= 0; --q) {
    s[static_cast<std::size_t>(q)] = "IXYZ"[index % 4];
    index /= 4;
  }
  return s;
}

inline bool anticommute(const std::string& a, const std::string& b) {
  int count = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != 'I' && b[i] != 'I' && a[i] != b[i]) ++count;
  return count % 2 == 1;
}

/// Pauli error distribution of the twirled channel from its Pauli transfer
/// diagonal f(Q) = tr(Q E(Q)) / 2^n, inverted by q(P) = 4^-n sum_Q (+-1) f(Q).
inline std::vector<double> pauli_distribution(const noiselab::QuantumChannel& e) {
  const int n = e.qubits();
  const std::size_t count = std::size_t{1} << (2 * n);
  const double dim = std::ldexp(1.0, n);
  std::vector<Matrix> qs;
  std::vector<double> f(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Matrix q = pauli(label_at(i, n));
    f[i] = (q * e.act(q)).trace().real() / dim;
  }
  std::vector<double> out(count, 0.0);
  for (std::size_t p = 0; p < count; ++p) {
    double s = 0.0;
    for (std::size_t q = 0; q < count; ++q)
      s += anticommute(label_at(p, n), label_at(q, n)) ? -f[q] : f[q];
    out[p] = s / static_cast<double>(count);
  }
  return out;
}

/// P(Bin(n, h) > k) by direct summation in long double.
inline double binomial_tail(long n, double h, long k) {
  if (k >= n) return 0.0;
  long double total = 0.0L;
  for (long j = k + 1; j <= n; ++j) {
    long double logp = std::lgamma(static_cast<long double>(n) + 1) - std::lgamma(static_cast<long double>(j) + 1) -
                       std::lgamma(static_cast<long double>(n - j) + 1);
    if (j > 0) logp += static_cast<long double>(j) * std::log(static_cast<long double>(h));
    if (n - j > 0) logp += static_cast<long double>(n - j) * std::log1p(-static_cast<long double>(h));
    total += std::exp(logp);
  }
  return static_cast<double>(total);
}

inline double binomial_pmf(long n, long j, double h) {
  double c = 1.0;
  for (long i = 0; i < j; ++i) c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return c * std::pow(h, static_cast<double>(j)) * std::pow(1.0 - h, static_cast<double>(n - j));
}

inline Matrix projector(const Eigen::VectorXcd& v) { return v * v.adjoint(); }

}  // namespace oracle
