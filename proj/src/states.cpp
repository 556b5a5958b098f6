#include "noiselab/states.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <string>

#include "noiselab/error.hpp"

namespace noiselab {

namespace {

void check_register(int n, int min_n = 1) {
  if (n < min_n) throw ArgumentError("register needs at least " + std::to_string(min_n) + " qubits");
  if (n > kDefaultMaxQubits)
    throw SizeError(std::to_string(n) + " qubits exceeds limit of " + std::to_string(kDefaultMaxQubits));
}

}  // namespace

Graph Graph::line(int n) {
  Graph g{n, {}};
  for (int i = 0; i + 1 < n; ++i) g.edges.emplace_back(i, i + 1);
  return g;
}

Graph Graph::ring(int n) {
  Graph g = line(n);
  if (n > 2) g.edges.emplace_back(n - 1, 0);
  return g;
}

Graph Graph::grid(int rows, int cols) {
  Graph g{rows * cols, {}};
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const int v = r * cols + c;
      if (c + 1 < cols) g.edges.emplace_back(v, v + 1);
      if (r + 1 < rows) g.edges.emplace_back(v, v + cols);
    }
  return g;
}

void Graph::check() const {
  std::set<std::pair<int, int>> seen;
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n || b >= n)
      throw ArgumentError("edge (" + std::to_string(a) + "," + std::to_string(b) + ") outside graph of " +
                          std::to_string(n) + " vertices");
    if (a == b) throw ArgumentError("self-loop on vertex " + std::to_string(a));
    if (!seen.insert({std::min(a, b), std::max(a, b)}).second)
      throw ArgumentError("duplicate edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
  }
}

PureState plus_all(int n) {
  check_register(n);
  const Eigen::Index d = Eigen::Index{1} << n;
  return PureState(Vector::Constant(d, cplx(1.0 / std::sqrt(static_cast<double>(d)))));
}

PureState zero_state(int n) {
  check_register(n);
  return PureState::basis(n, 0);
}

PureState product_state(const std::vector<std::pair<double, double>>& bloch_angles) {
  const int n = static_cast<int>(bloch_angles.size());
  check_register(n);
  Vector v = Vector::Ones(1);
  for (auto [theta, phi] : bloch_angles) {
    Vector next(2 * v.size());
    const cplx c0 = std::cos(theta / 2.0);
    const cplx c1 = std::polar(std::sin(theta / 2.0), phi);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      next(2 * i) = v(i) * c0;
      next(2 * i + 1) = v(i) * c1;
    }
    v = std::move(next);
  }
  v.normalize();
  return PureState(std::move(v));
}

PureState ghz(int n) {
  check_register(n, 2);
  const Eigen::Index d = Eigen::Index{1} << n;
  Vector v = Vector::Zero(d);
  v(0) = v(d - 1) = 1.0 / std::sqrt(2.0);
  return PureState(std::move(v));
}

PureState bell() { return ghz(2); }

PureState cluster_state(const Graph& graph) {
  graph.check();
  check_register(graph.n);
  const int n = graph.n;
  Vector v = plus_all(n).amplitudes();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    int sign = 0;
    for (auto [a, b] : graph.edges)
      if (((k >> (n - 1 - a)) & 1) && ((k >> (n - 1 - b)) & 1)) sign ^= 1;
    if (sign) v(k) = -v(k);
  }
  return PureState(std::move(v));
}

PureState dicke_state(int total, int excitations) {
  check_register(total);
  if (excitations < 0 || excitations > total)
    throw ArgumentError("dicke_state: excitations must lie in [0, " + std::to_string(total) + "]");
  const Eigen::Index d = Eigen::Index{1} << total;
  Vector v = Vector::Zero(d);
  for (Eigen::Index k = 0; k < d; ++k)
    if (std::popcount(static_cast<std::uint64_t>(k)) == excitations) v(k) = 1.0;
  v.normalize();
  return PureState(std::move(v));
}

PureState random_circuit_state(int n, int depth, std::uint64_t seed) {
  check_register(n);
  if (depth < 0) throw ArgumentError("random_circuit_state: negative depth");
  Rng rng(seed);
  Matrix v = PureState::basis(n, 0).amplitudes();
  for (int layer = 0; layer < depth; ++layer) {
    if (n == 1) {
      const int t[1] = {0};
      apply_local_left(random_unitary(2, rng), t, n, v);
      continue;
    }
    for (int q = layer % 2; q + 1 < n; q += 2) {
      const int t[2] = {q, q + 1};
      apply_local_left(random_unitary(4, rng), t, n, v);
    }
  }
  Vector out = v.col(0);
  out.normalize();
  return PureState(std::move(out));
}

PureState bitflip_code_encode(std::complex<double> a, std::complex<double> b) {
  if (std::abs(std::norm(a) + std::norm(b) - 1.0) > 1e-10)
    throw ArgumentError("bitflip_code_encode: |a|^2 + |b|^2 must equal 1");
  Vector v = Vector::Zero(8);
  v(0) = a;
  v(7) = b;
  return PureState(std::move(v));
}

}  // namespace noiselab
