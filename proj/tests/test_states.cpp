#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "noiselab/error.hpp"
#include "noiselab/graph.hpp"
#include "noiselab/measures.hpp"
#include "noiselab/states.hpp"
#include "oracles.hpp"

using namespace noiselab;

namespace {

Matrix plus_projector() { return Matrix::Constant(2, 2, cplx(0.5)); }

/// CZ on every edge of |+>^n, written out as phases on basis amplitudes.
Vector cluster_oracle(const Graph& g) {
  const long d = 1L << g.n;
  Vector v(d);
  for (long i = 0; i < d; ++i) {
    int parity = 0;
    for (auto [a, b] : g.edges) parity ^= static_cast<int>(((i >> (g.n - 1 - a)) & 1) & ((i >> (g.n - 1 - b)) & 1));
    v(i) = (parity ? -1.0 : 1.0) / std::sqrt(static_cast<double>(d));
  }
  return v;
}

}  // namespace

TEST_CASE("plus_all") {
  CHECK(std::abs(plus_all(1)[0] - cplx(1 / std::sqrt(2.0))) < 1e-15);
  CHECK(std::abs(plus_all(1)[1] - cplx(1 / std::sqrt(2.0))) < 1e-15);
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(plus_all(2)[i] - cplx(0.5)) < 1e-15);
  const DensityMatrix p = plus_all(4).density();
  for (int q = 0; q < 4; ++q) CHECK((partial_trace(p, QubitSet{q}).matrix() - plus_projector()).norm() < 1e-14);
  CHECK_THROWS_AS(plus_all(0), ArgumentError);
  CHECK_THROWS_AS(plus_all(13), SizeError);
}

TEST_CASE("ghz and bell") {
  CHECK((partial_trace(ghz(2).density(), QubitSet{1}).matrix() - Matrix::Identity(2, 2) * 0.5).norm() < 1e-15);
  Matrix half = Matrix::Zero(4, 4);
  half(0, 0) = half(3, 3) = 0.5;
  const DensityMatrix g = ghz(3).density();
  for (auto qs : {QubitSet{0, 1}, QubitSet{0, 2}, QubitSet{1, 2}})
    CHECK((partial_trace(g, qs).matrix() - half).norm() < 1e-15);
  CHECK(ent_pair(bell().density(), 0, 1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(ghz(1), ArgumentError);
}

TEST_CASE("cluster states") {
  CHECK((cluster_state(Graph::empty(3)).amplitudes() - plus_all(3).amplitudes()).norm() < 1e-15);
  const PureState edge = cluster_state(Graph{2, {{0, 1}}});
  CHECK(ent_pair(edge.density(), 0, 1) == doctest::Approx(2.0).epsilon(1e-12));
  const DensityMatrix line = cluster_state(Graph::line(4)).density();
  for (int q : {1, 2}) CHECK((partial_trace(line, QubitSet{q}).matrix() - Matrix::Identity(2, 2) * 0.5).norm() < 1e-14);

  for (const Graph& g : {Graph::line(5), Graph::ring(5), Graph::grid(2, 3), Graph{4, {{0, 2}, {1, 3}, {0, 3}}}})
    CHECK((cluster_state(g).amplitudes() - cluster_oracle(g)).norm() < 1e-13);

  Graph g = Graph::grid(2, 3);
  const Vector reference = cluster_state(g).amplitudes();
  Rng rng(1);
  for (int t = 0; t < 10; ++t) {
    std::shuffle(g.edges.begin(), g.edges.end(), rng);
    CHECK((cluster_state(g).amplitudes() - reference).norm() < 1e-12);
  }
  CHECK_THROWS_AS(cluster_state(Graph{2, {{0, 0}}}), ArgumentError);
  CHECK_THROWS_AS(cluster_state(Graph{2, {{0, 2}}}), ArgumentError);
  CHECK_THROWS_AS(cluster_state(Graph{3, {{0, 1}, {1, 0}}}), ArgumentError);
}

TEST_CASE("dicke states") {
  const PureState d21 = dicke_state(2, 1);
  CHECK(std::abs(d21[1] - cplx(1 / std::sqrt(2.0))) < 1e-15);
  CHECK(std::abs(d21[2] - cplx(1 / std::sqrt(2.0))) < 1e-15);
  CHECK(std::abs(d21[0]) < 1e-15);

  const DensityMatrix d42 = dicke_state(4, 2).density();
  CHECK((partial_trace(d42, QubitSet{0}).matrix() - Matrix::Identity(2, 2) * 0.5).norm() < 1e-14);
  // Six basis terms of weight 2; a pair marginal sees 00 once, 01 and 10 twice, 11 once.
  Matrix expected = Matrix::Zero(4, 4);
  expected(0, 0) = 1.0 / 6.0;
  expected(1, 1) = expected(2, 2) = 1.0 / 3.0;
  expected(3, 3) = 1.0 / 6.0;
  expected(1, 2) = expected(2, 1) = 1.0 / 3.0;
  const Matrix pair = partial_trace(d42, QubitSet{0, 1}).matrix();
  CHECK((pair - expected).norm() < 1e-14);
  for (auto qs : {QubitSet{0, 2}, QubitSet{1, 3}, QubitSet{2, 3}})
    CHECK((partial_trace(d42, qs).matrix() - pair).norm() < 1e-14);
  const DensityMatrix d63 = dicke_state(6, 3).density();
  const Matrix triple = partial_trace(d63, QubitSet{0, 1, 2}).matrix();
  CHECK((partial_trace(d63, QubitSet{1, 3, 5}).matrix() - triple).norm() < 1e-14);
  CHECK_THROWS_AS(dicke_state(3, 4), ArgumentError);
}

TEST_CASE("random circuit states") {
  CHECK((random_circuit_state(3, 0, 7).amplitudes() - PureState::basis(3, 0).amplitudes()).norm() < 1e-15);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PureState s = random_circuit_state(5, 4, seed);
    CHECK(std::abs(s.amplitudes().norm() - 1.0) < 1e-10);
    CHECK(s.amplitudes() == random_circuit_state(5, 4, seed).amplitudes());
  }
  CHECK((random_circuit_state(4, 3, 1).amplitudes() - random_circuit_state(4, 3, 2).amplitudes()).norm() > 1e-3);
}

TEST_CASE("bit-flip code encoding") {
  CHECK((bitflip_code_encode(1.0, 0.0).amplitudes() - PureState::basis(3, 0).amplitudes()).norm() < 1e-15);
  const double h = 1 / std::sqrt(2.0);
  CHECK((bitflip_code_encode(h, h).amplitudes() - ghz(3).amplitudes()).norm() < 1e-15);
  Matrix half = Matrix::Zero(4, 4);
  half(0, 0) = half(3, 3) = 0.5;
  CHECK((partial_trace(bitflip_code_encode(h, h).density(), QubitSet{1, 2}).matrix() - half).norm() < 1e-15);
  CHECK_THROWS_AS(bitflip_code_encode(1.0, 1.0), ArgumentError);
}

TEST_CASE("product states") {
  const PureState p = product_state({{0.0, 0.0}, {M_PI, 0.0}});
  CHECK(std::abs(p[1] - cplx(1.0)) < 1e-15);
  CHECK(zero_state(2).amplitudes() == PureState::basis(2, 0).amplitudes());
}
