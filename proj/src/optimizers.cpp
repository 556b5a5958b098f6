#include "noiselab/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "noiselab/channels.hpp"
#include "noiselab/error.hpp"
#include "noiselab/seed.hpp"

namespace noiselab {

namespace {

constexpr double kRegularization = 1e-9;
constexpr double kConsistencyTol = 1e-8;
constexpr double kReconstructionTol = 1e-8;
constexpr int kStages = 9;  // mixing 1e-1 ... 1e-9 of I/d
constexpr int kStageSteps = 100;
constexpr double kStageTol = 1e-8;
constexpr int kPolishSteps = 40;
constexpr double kGradientTol = 1e-12;

double trace_distance(const Matrix& a, const Matrix& b) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a - b, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace

MarginalConstraintSet MarginalConstraintSet::proper_marginals(const DensityMatrix& rho) {
  const int m = rho.qubits();
  if (m < 2) throw ArgumentError("proper_marginals: need at least two qubits");
  MarginalConstraintSet c{m, {}};
  for (int drop = 0; drop < m; ++drop) {
    const QubitSet keep = QubitSet{drop}.complement(m);
    c.targets.emplace_back(keep, partial_trace(rho, keep));
  }
  return c;
}

MaxEntResult max_entropy_with_marginals(const MarginalConstraintSet& constraints, const MaxEntOptions& options,
                                        const DensityMatrix* candidate) {
  const int m = constraints.qubits;
  if (m < 1) throw ArgumentError("max_entropy_with_marginals: empty register");
  if (m > 4) throw SizeError("max_entropy_with_marginals: at most 4 qubits supported");
  if (options.tol < 1e-8) throw ArgumentError("max_entropy_with_marginals: tol must be >= 1e-8");
  const Eigen::Index d = Eigen::Index{1} << m;
  const auto& targets = constraints.targets;

  for (const auto& [qs, sigma] : targets) {
    qs.check(m);
    if (static_cast<int>(qs.size()) != sigma.qubits())
      throw ArgumentError("max_entropy_with_marginals: target size does not match its qubit set");
  }
  // Overlapping targets must agree.
  for (std::size_t i = 0; i < targets.size(); ++i)
    for (std::size_t j = i + 1; j < targets.size(); ++j) {
      const QubitSet& a = targets[i].first;
      const QubitSet& b = targets[j].first;
      std::vector<int> in_a, in_b;
      for (int q : a)
        if (b.contains(q)) {
          in_a.push_back(static_cast<int>(std::lower_bound(a.begin(), a.end(), q) - a.begin()));
          in_b.push_back(static_cast<int>(std::lower_bound(b.begin(), b.end(), q) - b.begin()));
        }
      const Matrix ma = partial_trace(targets[i].second, QubitSet(in_a)).matrix();
      const Matrix mb = partial_trace(targets[j].second, QubitSet(in_b)).matrix();
      if ((ma - mb).cwiseAbs().maxCoeff() > kConsistencyTol)
        throw InfeasibleError("max_entropy_with_marginals: targets disagree on their overlap");
    }

  bool regularized = false;
  for (const auto& [qs, sigma] : targets)
    if (sigma.spectrum().minCoeff() < kRegularization) regularized = true;

  // Multipliers live on the non-identity Pauli strings supported inside some
  // constrained subset; matching their expectations is the same as matching
  // the marginals, and the parametrization has no redundant directions.
  std::vector<Matrix> paulis;
  std::vector<double> target_mean;
  {
    const PauliDistribution shape{m, {}};
    for (std::size_t idx = 1; idx < (std::size_t{1} << (2 * m)); ++idx) {
      const PauliString p = shape.string_at(idx);
      for (const auto& [qs, sigma] : targets) {
        bool inside = true;
        std::string local;
        for (int q = 0; q < m; ++q) {
          if (qs.contains(q)) local.push_back(p.letter(q));
          else if (p.letter(q) != 'I') inside = false;
        }
        if (!inside) continue;
        paulis.push_back(p.matrix());
        target_mean.push_back((PauliString::parse(local).matrix() * sigma.matrix()).trace().real());
        break;
      }
    }
  }
  const auto np = static_cast<Eigen::Index>(paulis.size());
  const Eigen::VectorXd exact = Eigen::Map<const Eigen::VectorXd>(target_mean.data(), np);
  Eigen::VectorXd s = exact;

  struct Point {
    Eigen::VectorXd theta;
    Eigen::SelfAdjointEigenSolver<Matrix> es;
    Eigen::VectorXd shifted;  // eigenvalues minus the largest
    Eigen::VectorXd prob;     // spectrum of rho
    double objective;         // log Z - theta . s
  };
  auto evaluate = [&](Eigen::VectorXd theta) {
    Matrix h = Matrix::Zero(d, d);
    for (Eigen::Index k = 0; k < np; ++k) h += theta(k) * paulis[static_cast<std::size_t>(k)];
    Point pt{std::move(theta), Eigen::SelfAdjointEigenSolver<Matrix>(h), {}, {}, 0.0};
    const double top = pt.es.eigenvalues().maxCoeff();
    pt.shifted = pt.es.eigenvalues().array() - top;
    pt.prob = pt.shifted.array().exp().matrix();
    const double z = pt.prob.sum();
    pt.prob /= z;
    pt.objective = top + std::log(z) - pt.theta.dot(s);
    return pt;
  };
  auto density_of = [&](const Point& pt) -> Matrix {
    return pt.es.eigenvectors() * pt.prob.asDiagonal() * pt.es.eigenvectors().adjoint();
  };
  auto residual_of = [&](const Matrix& rho) {
    double r = 0.0;
    const DensityMatrix state = DensityMatrix::unchecked(rho);
    for (const auto& [qs, sigma] : targets)
      r = std::max(r, trace_distance(partial_trace(state, qs).matrix(), sigma.matrix()));
    return r;
  };
  // Damped Newton direction from the gradient <P> - s and the Kubo-Mori
  // Hessian in the eigenbasis of H.
  auto newton = [&](const Point& pt, Eigen::VectorXd& grad, double& slope) {
    const Matrix& v = pt.es.eigenvectors();
    Matrix weight(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) {
        const double gap = std::abs(pt.shifted(i) - pt.shifted(j));
        const double high = std::max(pt.prob(i), pt.prob(j));
        weight(i, j) = gap < 1e-10 ? high : -high * std::expm1(-gap) / gap;
      }
    Matrix rows(np, d * d);
    Eigen::VectorXd mean(np);
    for (Eigen::Index k = 0; k < np; ++k) {
      const Matrix q = v.adjoint() * paulis[static_cast<std::size_t>(k)] * v;
      double e = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) e += pt.prob(i) * q(i, i).real();
      mean(k) = e;
      for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i) rows(k, j * d + i) = q(i, j) * std::sqrt(weight(i, j).real());
    }
    grad = mean - s;
    Eigen::MatrixXd hess = (rows.conjugate() * rows.transpose()).real() - mean * mean.transpose();
    hess = 0.5 * (hess + hess.transpose());
    hess.diagonal().array() += 1e-12 * (1.0 + hess.diagonal().maxCoeff());
    Eigen::VectorXd dir = -hess.ldlt().solve(grad);
    slope = grad.dot(dir);
    if (!(slope < 0.0) || !dir.allFinite()) {
      dir = -grad;
      slope = -grad.squaredNorm();
    }
    return dir;
  };
  // Armijo backtracking; false when no step decreases the objective.
  auto line_search = [&](Point& pt, const Eigen::VectorXd& dir, double slope) {
    double step = 1.0;
    for (int halving = 0; halving < 60; ++halving, step *= 0.5) {
      Point next = evaluate(pt.theta + step * dir);
      if (next.objective <= pt.objective + 1e-4 * step * slope) {
        pt = std::move(next);
        return true;
      }
    }
    return false;
  };

  // Targets are mixed with delta of I/d, whose Pauli expectations vanish, so
  // a full-rank feasible point exists and the dual optimum is finite. When
  // the marginals nearly pin the state down that optimum moves far out as
  // delta shrinks, so delta is lowered in stages, each warm-started from the
  // previous one.
  Point cur = evaluate(Eigen::VectorXd::Zero(np));
  int iterations = 0;
  double residual = std::numeric_limits<double>::infinity();
  Eigen::VectorXd grad;
  double slope = 0.0;
  for (int stage = 1; stage < kStages; ++stage) {
    s = (1.0 - std::pow(10.0, -stage)) * exact;
    cur = evaluate(cur.theta);
    for (int step = 0; step < kStageSteps && iterations < options.max_iter; ++step) {
      ++iterations;
      const Eigen::VectorXd dir = newton(cur, grad, slope);
      if (grad.lpNorm<Eigen::Infinity>() <= kStageTol || !line_search(cur, dir, slope)) break;
    }
  }

  s = (1.0 - kRegularization) * exact;
  cur = evaluate(cur.theta);
  residual = residual_of(density_of(cur));
  int polish = 0;
  for (;;) {
    // Once feasible, a bounded number of extra steps sharpens the entropy.
    if (residual <= options.tol && ++polish > kPolishSteps) break;
    if (iterations >= options.max_iter)
      throw ConvergenceError("max_entropy_with_marginals: no convergence after " + std::to_string(iterations) +
                                 " iterations (residual " + std::to_string(residual) + ")",
                             residual);
    ++iterations;
    const Eigen::VectorXd dir = newton(cur, grad, slope);
    if (residual <= options.tol && grad.lpNorm<Eigen::Infinity>() <= kGradientTol) break;
    const double previous = cur.objective;
    const bool moved = line_search(cur, dir, slope);
    const double before = residual;
    residual = residual_of(density_of(cur));
    if (residual <= options.tol && previous - cur.objective < 1e-15 * (1.0 + std::abs(previous))) break;
    if (!moved && residual >= before)
      throw ConvergenceError("max_entropy_with_marginals: line search stalled (residual " +
                                 std::to_string(residual) + ")",
                             residual);
  }

  Matrix rho = density_of(cur);
  rho = 0.5 * (rho + rho.adjoint());
  std::vector<double> probs(cur.prob.data(), cur.prob.data() + cur.prob.size());
  const double s_star = spectrum_entropy(probs);
  double gap = std::numeric_limits<double>::quiet_NaN();
  if (candidate != nullptr) gap = s_star - von_neumann_entropy(*candidate);
  return {DensityMatrix::unchecked(std::move(rho)), s_star, iterations, residual, regularized, gap};
}

// ---------------------------------------------------------------------------
// Decomposition search

Matrix Decomposition::mixture() const {
  const Eigen::Index d = states.empty() ? 0 : static_cast<Eigen::Index>(states.front().dim());
  Matrix m = Matrix::Zero(d, d);
  for (std::size_t k = 0; k < states.size(); ++k)
    m += weights[k] * states[k].amplitudes() * states[k].amplitudes().adjoint();
  return m;
}

namespace {

class EnsembleSearch {
 public:
  EnsembleSearch(const MemberObjective& objective, long& evaluations)
      : objective_(objective), evaluations_(evaluations) {}

  /// p * f(psi/|psi|) for an unnormalized member.
  double member_value(const Vector& v) {
    const double p = v.squaredNorm();
    if (p < 1e-15) return 0.0;
    ++evaluations_;
    return p * objective_(PureState(v / std::sqrt(p)));
  }

  /// Mixes columns k and l by a 2x2 unitary with angles (theta, phi, chi).
  static std::pair<Vector, Vector> rotate(const Vector& a, const Vector& b, double theta, double phi, double chi) {
    const double c = std::cos(theta), s = std::sin(theta);
    const Vector bb = std::polar(1.0, chi) * b;
    return {c * a + s * std::polar(1.0, phi) * bb, -s * std::polar(1.0, -phi) * a + c * bb};
  }

  /// Pattern search on one column pair; returns the improvement (>= 0).
  double optimize_pair(Matrix& psi, std::vector<double>& values, Eigen::Index k, Eigen::Index l) {
    const Vector a = psi.col(k), b = psi.col(l);
    const double base = values[static_cast<std::size_t>(k)] + values[static_cast<std::size_t>(l)];
    double params[3] = {0.0, 0.0, 0.0};
    double best = base;
    double vk = values[static_cast<std::size_t>(k)], vl = values[static_cast<std::size_t>(l)];
    for (double step = std::numbers::pi / 4.0; step > 1e-4; step *= 0.5) {
      bool improved = true;
      while (improved) {
        improved = false;
        for (int p = 0; p < 3; ++p)
          for (double dir : {1.0, -1.0}) {
            double trial[3] = {params[0], params[1], params[2]};
            trial[p] += dir * step;
            const auto [na, nb] = rotate(a, b, trial[0], trial[1], trial[2]);
            const double fa = member_value(na), fb = member_value(nb);
            if (fa + fb > best + 1e-12) {
              best = fa + fb;
              vk = fa;
              vl = fb;
              std::copy(trial, trial + 3, params);
              improved = true;
            }
          }
      }
    }
    if (best <= base) return 0.0;
    const auto [na, nb] = rotate(a, b, params[0], params[1], params[2]);
    psi.col(k) = na;
    psi.col(l) = nb;
    values[static_cast<std::size_t>(k)] = vk;
    values[static_cast<std::size_t>(l)] = vl;
    return best - base;
  }

 private:
  const MemberObjective& objective_;
  long& evaluations_;
};

}  // namespace

DecompositionResult max_avg_pure_decomposition(const DensityMatrix& rho, const DecompositionOptions& options,
                                               const MemberObjective& objective, double ceiling) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
  const Eigen::Index d = static_cast<Eigen::Index>(rho.dim());
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = d - 1; i >= 0; --i)
    if (es.eigenvalues()(i) > kEigenClip) support.push_back(i);
  const auto rank = static_cast<Eigen::Index>(support.size());
  if (rank == 0) throw ArgumentError("max_avg_pure_decomposition: state has no support");
  Matrix w(d, rank);
  for (Eigen::Index i = 0; i < rank; ++i)
    w.col(i) = std::sqrt(es.eigenvalues()(support[static_cast<std::size_t>(i)])) *
               es.eigenvectors().col(support[static_cast<std::size_t>(i)]);
  const Eigen::Index cap = std::max<Eigen::Index>(rank, options.cap > 0 ? options.cap : 2 * rank);
  const int restarts = std::max(1, options.restarts);

  long evaluations = 0;
  EnsembleSearch search(objective, evaluations);
  double best_value = -std::numeric_limits<double>::infinity();
  Matrix best_psi;
  std::vector<double> history;
  int total_sweeps = 0;
  int restarts_run = 0;
  auto at_ceiling = [&] { return best_value >= ceiling - 1e-9; };

  for (int r = 0; r < restarts && !at_ceiling(); ++r) {
    ++restarts_run;
    Matrix psi = Matrix::Zero(d, cap);
    if (r == 0 || rank == 1) {
      psi.leftCols(rank) = w;  // spectral ensemble
    } else {
      Rng rng(derive_seed(options.seed, "decomposition-restart", static_cast<std::uint64_t>(r)));
      const Matrix u = random_unitary(static_cast<std::size_t>(cap), rng).leftCols(rank);
      psi = w * u.transpose();
    }
    std::vector<double> values(static_cast<std::size_t>(cap));
    for (Eigen::Index k = 0; k < cap; ++k) values[static_cast<std::size_t>(k)] = search.member_value(psi.col(k));
    auto total = [&] {
      double s = 0.0;
      for (double v : values) s += v;
      return s;
    };
    auto record = [&] {
      const double t = total();
      if (t > best_value) {
        best_value = t;
        best_psi = psi;
      }
      history.push_back(best_value);
    };
    record();
    if (rank == 1) break;  // the decomposition of a pure state is unique
    for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
      ++total_sweeps;
      double gain = 0.0;
      for (Eigen::Index k = 0; k < cap; ++k)
        for (Eigen::Index l = k + 1; l < cap; ++l) gain += search.optimize_pair(psi, values, k, l);
      record();
      if (gain < 1e-10 || at_ceiling()) break;
    }
  }

  Decomposition dec;
  for (Eigen::Index k = 0; k < best_psi.cols(); ++k) {
    const double p = best_psi.col(k).squaredNorm();
    if (p < 1e-15) continue;
    dec.weights.push_back(p);
    dec.states.emplace_back(best_psi.col(k) / std::sqrt(p));
  }
  const double residual = trace_distance(dec.mixture(), rho.matrix());
  if (residual > kReconstructionTol)
    throw InternalError("max_avg_pure_decomposition: reconstruction residual " + std::to_string(residual));
  return {best_value, std::move(dec), static_cast<int>(rank), static_cast<int>(cap), restarts_run,
          total_sweeps, evaluations, residual, std::move(history)};
}

DecompositionResult max_avg_pure_decomposition(const DensityMatrix& rho_pair, const DecompositionOptions& options) {
  if (rho_pair.qubits() != 2) throw ArgumentError("pair decomposition needs a two-qubit state");
  const MemberObjective pair_value = [](const PureState& psi) {
    return 2.0 * pure_marginal_entropy(psi, QubitSet{0});
  };
  const double ceiling = 2.0 * std::min(von_neumann_entropy(partial_trace(rho_pair, QubitSet{0})),
                                        von_neumann_entropy(partial_trace(rho_pair, QubitSet{1})));
  return max_avg_pure_decomposition(rho_pair, options, pair_value, ceiling);
}

}  // namespace noiselab
