#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "noiselab/qstate.hpp"

namespace noiselab {

/// Target marginals on subsets of an ambient register of `qubits` qubits
/// (indices local to that register).
struct MarginalConstraintSet {
  int qubits = 0;
  std::vector<std::pair<QubitSet, DensityMatrix>> targets;

  /// All (m-1)-qubit marginals of an m-qubit state.
  static MarginalConstraintSet proper_marginals(const DensityMatrix& rho);
};

struct MaxEntOptions {
  double tol = 1e-6;
  int max_iter = 10000;
};

struct MaxEntResult {
  DensityMatrix state;
  double entropy;     // bits
  int iterations;     // Newton steps
  double residual;    // max trace distance between a marginal and its target
  bool regularized;   // some target had an eigenvalue below 1e-9
  double candidate_gap;  // S* - S(candidate), NaN without a candidate
};

/// Maximum-entropy state with the given marginals (mixed with 1e-9 of I/d),
/// by damped Newton descent on the dual over Pauli multipliers,
/// rho = exp(sum_P theta_P P) / Z.
/// Throws InfeasibleError for inconsistent targets and ConvergenceError when
/// `max_iter` iterations do not bring every marginal within `tol`.
MaxEntResult max_entropy_with_marginals(const MarginalConstraintSet& constraints,
                                        const MaxEntOptions& options = {},
                                        const DensityMatrix* candidate = nullptr);

/// Convex decomposition into pure states.
struct Decomposition {
  std::vector<double> weights;
  std::vector<PureState> states;

  Matrix mixture() const;
};

struct DecompositionOptions {
  int restarts = 32;
  int max_sweeps = 200;
  std::uint64_t seed = 0;
  /// Number of ensemble members; 0 means 2 * rank.
  int cap = 0;
};

struct DecompositionResult {
  double value;
  Decomposition decomposition;
  int rank;
  int cap;
  int restarts;
  int sweeps;             // total over restarts
  long evaluations;       // objective calls
  double residual;        // trace distance of the reconstruction to the input
  std::vector<double> best_history;  // best value after each sweep
};

/// Per-member objective; the decomposition value is sum_k p_k f(psi_k).
using MemberObjective = std::function<double(const PureState&)>;

/// Local search over ensembles psi_k = sum_i U_ki sqrt(lambda_i) v_i (U an
/// isometry) by successive two-member rotations, with seeded restarts.
/// The search stops early once the value reaches `ceiling`, a known upper bound.
DecompositionResult max_avg_pure_decomposition(const DensityMatrix& rho, const DecompositionOptions& options,
                                               const MemberObjective& objective,
                                               double ceiling = std::numeric_limits<double>::infinity());

/// Pair objective: f(psi) = 2 S(tr_b psi), i.e. the mutual information of a pure pair.
/// Bounded above by 2 min(S(rho_a), S(rho_b)).
DecompositionResult max_avg_pure_decomposition(const DensityMatrix& rho_pair,
                                               const DecompositionOptions& options = {});

}  // namespace noiselab
