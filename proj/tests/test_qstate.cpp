#include <doctest.h>

#include <cmath>

#include "noiselab/error.hpp"
#include "noiselab/qstate.hpp"
#include "noiselab/states.hpp"
#include "oracles.hpp"

using namespace noiselab;

namespace {

Matrix diag(std::initializer_list<double> d) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) m(i, i) = x, ++i;
  return m;
}

std::vector<int> random_subset(int n, Rng& rng) {
  std::vector<int> out;
  while (out.empty())
    for (int q = 0; q < n; ++q)
      if (rng() & 1U) out.push_back(q);
  return out;
}

}  // namespace

TEST_CASE("QubitSet keeps sorted unique indices") {
  const QubitSet a(std::vector<int>{3, 0, 2});
  CHECK(a.indices() == std::vector<int>{0, 2, 3});
  CHECK(a.contains(2));
  CHECK_FALSE(a.contains(1));
  CHECK(a.complement(5) == QubitSet{1, 4});
  CHECK(a.united(QubitSet{1}) == QubitSet{0, 1, 2, 3});
  CHECK(a.disjoint(QubitSet{1, 4}));
  CHECK_THROWS_AS(QubitSet({1, 1}), ArgumentError);
  CHECK_THROWS_AS(QubitSet({-1}), ArgumentError);
  CHECK_THROWS_AS(a.check(3), ArgumentError);
  CHECK_NOTHROW(a.check(4));
}

TEST_CASE("state validation") {
  Vector v(2);
  v << 1.0, 1.0;
  CHECK_THROWS_AS(PureState{v}, ArgumentError);
  Vector odd(3);
  odd << 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(PureState{odd}, ArgumentError);
  CHECK(PureState::basis(2, 3)[3] == cplx(1.0));

  Matrix nonherm = diag({0.5, 0.5});
  nonherm(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityMatrix{nonherm}, ArgumentError);
  CHECK_THROWS_AS(DensityMatrix{diag({0.5, 0.6})}, ArgumentError);
  CHECK_THROWS_AS(DensityMatrix{diag({1.1, -0.1})}, PsdError);
  CHECK_NOTHROW(DensityMatrix{diag({1.0 + 1e-10, -1e-10})});
}

TEST_CASE("tensor") {
  const DensityMatrix zero = PureState::basis(1, 0).density();
  CHECK((tensor(zero, zero).matrix() - PureState::basis(2, 0).density().matrix()).norm() < 1e-15);
  const DensityMatrix half = DensityMatrix::maximally_mixed(1);
  CHECK((tensor(half, half).matrix() - DensityMatrix::maximally_mixed(2).matrix()).norm() < 1e-15);
  CHECK_THROWS_AS(tensor(DensityMatrix::maximally_mixed(7), DensityMatrix::maximally_mixed(6)), SizeError);

  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const DensityMatrix a = random_density_matrix(2, rng);
    const DensityMatrix b = random_density_matrix(2, rng);
    const DensityMatrix ab = tensor(a, b);
    CHECK((ab.matrix() - oracle::kron(a.matrix(), b.matrix())).norm() < 1e-13);
    CHECK((partial_trace(ab, QubitSet{0, 1}).matrix() - a.matrix()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((partial_trace(ab, QubitSet{2, 3}).matrix() - b.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("partial trace examples") {
  const DensityMatrix b = bell().density();
  CHECK((partial_trace(b, QubitSet{0}).matrix() - diag({0.5, 0.5})).norm() < 1e-15);

  const DensityMatrix g = ghz(3).density();
  CHECK((partial_trace(g, QubitSet{0, 1}).matrix() - diag({0.5, 0, 0, 0.5})).norm() < 1e-15);

  const PureState p = product_state({{0.3, 0.1}, {1.2, -0.4}, {2.0, 0.7}});
  const PureState p0 = product_state({{0.3, 0.1}});
  const PureState p2 = product_state({{2.0, 0.7}});
  CHECK((partial_trace(p.density(), QubitSet{0, 2}).matrix() - tensor(p0, p2).density().matrix()).norm() < 1e-12);
  CHECK(partial_trace(g, QubitSet{}).matrix()(0, 0).real() == doctest::Approx(1.0));
}

TEST_CASE("partial trace matches index-loop oracle") {
  Rng rng(5);
  for (int t = 0; t < 30; ++t) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const DensityMatrix rho = random_density_matrix(n, rng);
    const auto keep = random_subset(n, rng);
    const Matrix ours = partial_trace(rho, QubitSet(keep)).matrix();
    CHECK((ours - oracle::partial_trace(rho.matrix(), n, keep)).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("partial trace in two stages equals tracing once") {
  Rng rng(6);
  for (int t = 0; t < 100; ++t) {
    const int n = 3 + static_cast<int>(rng() % 2);
    const DensityMatrix rho = random_density_matrix(n, rng);
    const auto outer = random_subset(n, rng);
    std::vector<int> inner_local;
    std::vector<int> inner_global;
    for (std::size_t i = 0; i < outer.size(); ++i)
      if (rng() & 1U) {
        inner_local.push_back(static_cast<int>(i));
        inner_global.push_back(outer[i]);
      }
    const DensityMatrix once = partial_trace(rho, QubitSet(inner_global));
    const DensityMatrix twice = partial_trace(partial_trace(rho, QubitSet(outer)), QubitSet(inner_local));
    CHECK((once.matrix() - twice.matrix()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("entropy examples") {
  Rng rng(1);
  CHECK(std::abs(von_neumann_entropy(random_pure_state(3, rng).density())) < 1e-10);
  CHECK(von_neumann_entropy(DensityMatrix::maximally_mixed(1)) == doctest::Approx(1.0).epsilon(1e-14));
  const double expected = -0.25 * std::log2(0.25) - 0.75 * std::log2(0.75);
  CHECK(von_neumann_entropy(DensityMatrix(diag({0.25, 0.75}))) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(std::abs(expected - 0.811278) < 1e-6);
  CHECK(binary_entropy(0.1) == doctest::Approx(oracle::h2(0.1)).epsilon(1e-14));
  CHECK(binary_entropy(0.0) == 0.0);
  const std::vector<double> spec{0.5, 0.5, 1e-13};
  CHECK(spectrum_entropy(spec) == doctest::Approx(1.0));
}

TEST_CASE("entropy additivity, unitary invariance and subadditivity on 100 seeded states") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const DensityMatrix a = random_density_matrix(2, rng, 1 + static_cast<int>(seed % 4));
    const DensityMatrix b = random_density_matrix(1, rng);
    CHECK(std::abs(von_neumann_entropy(tensor(a, b)) - von_neumann_entropy(a) - von_neumann_entropy(b)) < 1e-8);

    const Matrix u = random_unitary(4, rng);
    const DensityMatrix rotated = DensityMatrix::unchecked(u * a.matrix() * u.adjoint());
    CHECK(std::abs(von_neumann_entropy(rotated) - von_neumann_entropy(a)) < 1e-8);

    const DensityMatrix rho = random_density_matrix(4, rng);
    const QubitSet left{0, 2};
    const QubitSet right{1};
    const double s_l = von_neumann_entropy(partial_trace(rho, left));
    const double s_r = von_neumann_entropy(partial_trace(rho, right));
    const double s_lr = von_neumann_entropy(partial_trace(rho, left.united(right)));
    CHECK(s_l + s_r - s_lr >= -1e-8);
  }
}

TEST_CASE("pure marginal entropy agrees with the reduced state") {
  Rng rng(9);
  for (int t = 0; t < 20; ++t) {
    const PureState psi = random_pure_state(5, rng);
    const QubitSet keep({0, 3, 4});
    const double direct = oracle::entropy(oracle::partial_trace(psi.density().matrix(), 5, {0, 3, 4}));
    CHECK(pure_marginal_entropy(psi, keep) == doctest::Approx(direct).epsilon(1e-10));
    CHECK(von_neumann_entropy(reduced_density(psi, keep)) == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("purify") {
  Rng rng(3);
  const PureState psi = random_pure_state(2, rng);
  const PureState pur = purify(psi.density());
  CHECK(pur.qubits() == 3);
  const Vector expected = tensor(psi, PureState::basis(1, 0)).amplitudes();
  CHECK(std::abs(std::abs(expected.dot(pur.amplitudes())) - 1.0) < 1e-12);

  const PureState m = purify(DensityMatrix::maximally_mixed(1));
  CHECK(m.qubits() == 2);
  CHECK((reduced_density(m, QubitSet{0}).matrix() - diag({0.5, 0.5})).norm() < 1e-12);
  CHECK((reduced_density(m, QubitSet{1}).matrix() - diag({0.5, 0.5})).norm() < 1e-12);

  for (int t = 0; t < 10; ++t) {
    const DensityMatrix rho = random_density_matrix(2, rng);
    const PureState p = purify(rho);
    CHECK((reduced_density(p, QubitSet{0, 1}).matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("state distance") {
  Rng rng(4);
  const DensityMatrix rho = random_density_matrix(2, rng);
  const auto same = state_distance(rho, rho);
  CHECK(same.fidelity == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(same.trace_distance) < 1e-12);
  const DensityMatrix zero = PureState::basis(1, 0).density();
  const DensityMatrix one = PureState::basis(1, 1).density();
  const auto orth = state_distance(zero, one);
  CHECK(std::abs(orth.fidelity) < 1e-12);
  CHECK(orth.trace_distance == doctest::Approx(1.0));
  const auto half = state_distance(zero, DensityMatrix::maximally_mixed(1));
  CHECK(half.fidelity == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(half.trace_distance == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(state_distance(zero, rho), ArgumentError);
}

TEST_CASE("random generators") {
  Rng rng(8);
  const Matrix u = random_unitary(8, rng);
  CHECK((u.adjoint() * u - Matrix::Identity(8, 8)).norm() < 1e-12);
  const DensityMatrix r = random_density_matrix(3, rng, 2);
  int support = 0;
  for (double l : r.spectrum()) support += l > 1e-10;
  CHECK(support == 2);
  CHECK(r.matrix().trace().real() == doctest::Approx(1.0));
  Rng a(17), b(17);
  CHECK(random_pure_state(3, a).amplitudes() == random_pure_state(3, b).amplitudes());
}

TEST_CASE("local operator application matches the dense embedding") {
  Rng rng(12);
  const Matrix op = random_unitary(4, rng);
  const PureState psi = random_pure_state(3, rng);
  const std::vector<int> targets{2, 0};
  // op acts on (q2, q0) in that order; build the dense version by permuting qubits.
  const Matrix dense_ordered = oracle::kron(op, Matrix::Identity(2, 2));  // on (q2, q0, q1)
  Matrix perm = Matrix::Zero(8, 8);  // (q0 q1 q2) -> (q2 q0 q1)
  for (int i = 0; i < 8; ++i) {
    const int b0 = (i >> 2) & 1, b1 = (i >> 1) & 1, b2 = i & 1;
    perm((b2 << 2) | (b0 << 1) | b1, i) = 1.0;
  }
  const Vector expected = perm.transpose() * dense_ordered * perm * psi.amplitudes();
  CHECK((apply_local(op, targets, 3, psi.amplitudes()) - expected).norm() < 1e-12);
}
