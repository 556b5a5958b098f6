#include <doctest.h>

#include <array>
#include <cmath>

#include "noiselab/error.hpp"
#include "noiselab/measures.hpp"
#include "noiselab/optimizers.hpp"
#include "noiselab/states.hpp"
#include "oracles.hpp"

using namespace noiselab;

namespace {

MarginalConstraintSet pair_constraints(const DensityMatrix& rho) {
  MarginalConstraintSet c{rho.qubits(), {}};
  for (int a = 0; a < rho.qubits(); ++a)
    for (int b = a + 1; b < rho.qubits(); ++b) c.targets.emplace_back(QubitSet{a, b}, partial_trace(rho, QubitSet{a, b}));
  return c;
}

double max_marginal_error(const MaxEntResult& r, const MarginalConstraintSet& c) {
  double worst = 0.0;
  for (const auto& [qs, sigma] : c.targets)
    worst = std::max(worst, (partial_trace(r.state, qs).matrix() - sigma.matrix()).cwiseAbs().maxCoeff());
  return worst;
}

/// Classical iterative proportional fitting of a 3-bit distribution to its pair marginals.
double classical_maxent_entropy(const std::array<double, 8>& p) {
  std::array<double, 8> q;
  q.fill(1.0 / 8.0);
  const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  auto bit = [](int x, int k) { return (x >> (2 - k)) & 1; };
  for (int sweep = 0; sweep < 5000; ++sweep)
    for (const auto& pr : pairs) {
      double target[2][2] = {}, have[2][2] = {};
      for (int x = 0; x < 8; ++x) {
        target[bit(x, pr[0])][bit(x, pr[1])] += p[static_cast<std::size_t>(x)];
        have[bit(x, pr[0])][bit(x, pr[1])] += q[static_cast<std::size_t>(x)];
      }
      for (int x = 0; x < 8; ++x)
        q[static_cast<std::size_t>(x)] *= target[bit(x, pr[0])][bit(x, pr[1])] / have[bit(x, pr[0])][bit(x, pr[1])];
    }
  double s = 0.0;
  for (double x : q)
    if (x > 0) s -= x * std::log2(x);
  return s;
}

}  // namespace

TEST_CASE("max entropy under product constraints is the product") {
  Rng rng(1);
  for (int t = 0; t < 10; ++t) {
    const DensityMatrix a = random_density_matrix(1, rng);
    const DensityMatrix b = random_density_matrix(1, rng);
    const DensityMatrix c = random_density_matrix(1, rng);
    const DensityMatrix prod = tensor(tensor(a, b), c);
    const MaxEntResult r = max_entropy_with_marginals(pair_constraints(prod));
    CHECK(r.entropy == doctest::Approx(von_neumann_entropy(a) + von_neumann_entropy(b) + von_neumann_entropy(c)).epsilon(1e-7));
    CHECK((r.state.matrix() - prod.matrix()).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("singleton constraints give the product of the marginals") {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const DensityMatrix rho = random_density_matrix(2, rng);
    const MarginalConstraintSet c = MarginalConstraintSet::proper_marginals(rho);
    const MaxEntResult r = max_entropy_with_marginals(c, {}, &rho);
    const DensityMatrix ra = partial_trace(rho, QubitSet{0});
    const DensityMatrix rb = partial_trace(rho, QubitSet{1});
    CHECK((r.state.matrix() - oracle::kron(ra.matrix(), rb.matrix())).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(r.entropy == doctest::Approx(von_neumann_entropy(ra) + von_neumann_entropy(rb)).epsilon(1e-8));
    CHECK(r.candidate_gap >= -1e-5);
  }
}

TEST_CASE("GHZ(3) pair marginals maximize to the incoherent mixture") {
  const MaxEntResult r = max_entropy_with_marginals(pair_constraints(ghz(3).density()));
  CHECK(r.entropy == doctest::Approx(1.0).epsilon(1e-6));
  Matrix expected = Matrix::Zero(8, 8);
  expected(0, 0) = expected(7, 7) = 0.5;
  CHECK((r.state.matrix() - expected).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(r.regularized);
  CHECK(r.residual <= 1e-6);
}

TEST_CASE("diagonal targets agree with classical iterative scaling") {
  Rng rng(3);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int t = 0; t < 10; ++t) {
    std::array<double, 8> p;
    double total = 0.0;
    for (double& x : p) total += (x = u(rng));
    Matrix m = Matrix::Zero(8, 8);
    for (int i = 0; i < 8; ++i) m(i, i) = (p[static_cast<std::size_t>(i)] /= total);
    const MaxEntResult r = max_entropy_with_marginals(pair_constraints(DensityMatrix(m)));
    CHECK(r.entropy == doctest::Approx(classical_maxent_entropy(p)).epsilon(1e-7));
  }
}

TEST_CASE("generic pure three-qubit states are fixed by their pair marginals") {
  Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    const DensityMatrix rho = random_pure_state(3, rng).density();
    const MaxEntResult r = max_entropy_with_marginals(pair_constraints(rho));
    CHECK(r.entropy < 1e-6);
    CHECK(r.residual <= 1e-6);
  }
}

TEST_CASE("max-entropy output matches targets and dominates the generating state") {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const int n = 3 + t % 2;
    const DensityMatrix rho = random_density_matrix(n, rng, 1 + t % 5);
    const MarginalConstraintSet c = MarginalConstraintSet::proper_marginals(rho);
    const MaxEntOptions opts{};
    const MaxEntResult r = max_entropy_with_marginals(c, opts, &rho);
    CHECK(r.residual <= opts.tol);
    CHECK(max_marginal_error(r, c) <= opts.tol);
    CHECK(r.entropy >= von_neumann_entropy(rho) - 10 * opts.tol);
  }
}

TEST_CASE("max-entropy input validation") {
  MarginalConstraintSet bad{2, {{QubitSet{0}, PureState::basis(1, 0).density()}, {QubitSet{0, 1}, DensityMatrix::maximally_mixed(2)}}};
  CHECK_THROWS_AS(max_entropy_with_marginals(bad), InfeasibleError);
  const MarginalConstraintSet ok = MarginalConstraintSet::proper_marginals(DensityMatrix::maximally_mixed(3));
  CHECK_THROWS_AS(max_entropy_with_marginals(ok, {1e-10, 100}), ArgumentError);
  CHECK_THROWS_AS(max_entropy_with_marginals(MarginalConstraintSet{5, {}}), SizeError);
  CHECK_THROWS_AS(max_entropy_with_marginals(pair_constraints(ghz(3).density()), {1e-6, 1}), ConvergenceError);
  MarginalConstraintSet mismatch{2, {{QubitSet{0, 1}, DensityMatrix::maximally_mixed(1)}}};
  CHECK_THROWS_AS(max_entropy_with_marginals(mismatch), ArgumentError);
}

TEST_CASE("decomposition search: certificates for classically correlated and maximally mixed pairs") {
  Matrix cc = Matrix::Zero(4, 4);
  cc(0, 0) = cc(3, 3) = 0.5;
  for (const DensityMatrix& rho : {DensityMatrix(cc), DensityMatrix::maximally_mixed(2)}) {
    const DecompositionResult r = max_avg_pure_decomposition(rho, DecompositionOptions{8, 200, 3, 0});
    CHECK(r.value >= 2.0 - 1e-3);
    CHECK(r.residual < 1e-8);
    CHECK((r.decomposition.mixture() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-8);
    double avg = 0.0;
    for (std::size_t k = 0; k < r.decomposition.states.size(); ++k)
      avg += r.decomposition.weights[k] * ent_pair(r.decomposition.states[k].density(), 0, 1);
    CHECK(avg == doctest::Approx(r.value).epsilon(1e-9));
    for (std::size_t i = 1; i < r.best_history.size(); ++i) CHECK(r.best_history[i] >= r.best_history[i - 1]);
  }
}

TEST_CASE("the two Bell projectors average to the classically correlated state") {
  Eigen::VectorXcd phi_plus(4), phi_minus(4);
  phi_plus << 1, 0, 0, 1;
  phi_minus << 1, 0, 0, -1;
  phi_plus /= std::sqrt(2.0);
  phi_minus /= std::sqrt(2.0);
  Matrix cc = Matrix::Zero(4, 4);
  cc(0, 0) = cc(3, 3) = 0.5;
  CHECK((0.5 * oracle::projector(phi_plus) + 0.5 * oracle::projector(phi_minus) - cc).norm() < 1e-12);
  CHECK(oracle::mutual_information(oracle::projector(phi_plus)) == doctest::Approx(2.0));
}

TEST_CASE("decomposition of a pure state is the state itself") {
  Rng rng(6);
  const PureState psi = random_pure_state(2, rng);
  const DecompositionResult r = max_avg_pure_decomposition(psi.density());
  CHECK(r.rank == 1);
  CHECK(r.decomposition.states.size() == 1);
  CHECK(r.value == doctest::Approx(2.0 * pure_marginal_entropy(psi, QubitSet{0})).epsilon(1e-10));
}

TEST_CASE("decomposition search on random mixed pairs is bounded, monotone and reproducible") {
  Rng rng(7);
  for (int t = 0; t < 10; ++t) {
    const DensityMatrix rho = random_density_matrix(2, rng, 2 + t % 3);
    const DecompositionOptions opts{4, 50, static_cast<std::uint64_t>(t), 0};
    const DecompositionResult r = max_avg_pure_decomposition(rho, opts);
    const double bound = 2.0 * std::min(von_neumann_entropy(partial_trace(rho, QubitSet{0})),
                                        von_neumann_entropy(partial_trace(rho, QubitSet{1})));
    CHECK(r.value <= bound + 1e-6);
    CHECK(r.residual < 1e-8);
    for (std::size_t i = 1; i < r.best_history.size(); ++i) CHECK(r.best_history[i] >= r.best_history[i - 1]);
    const DecompositionResult again = max_avg_pure_decomposition(rho, opts);
    CHECK(again.value == r.value);
    CHECK(again.evaluations == r.evaluations);
  }
}

TEST_CASE("decomposition search with a custom objective") {
  Rng rng(8);
  const DensityMatrix rho = random_density_matrix(2, rng, 3);
  const MemberObjective constant = [](const PureState&) { return 1.0; };
  const DecompositionResult r = max_avg_pure_decomposition(rho, DecompositionOptions{2, 5, 1, 0}, constant);
  CHECK(r.value == doctest::Approx(1.0));
  CHECK(r.cap == 6);
}
