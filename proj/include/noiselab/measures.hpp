#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "noiselab/channels.hpp"
#include "noiselab/optimizers.hpp"
#include "noiselab/qstate.hpp"

namespace noiselab {

/// A named value in bits plus whatever the computation wants to record
/// about how it was obtained.
struct MeasureReport {
  std::string measure;
  double value = 0.0;
  std::vector<QubitSet> qubit_sets;
  std::map<std::string, double> diagnostics;
  std::vector<std::string> notes;
  /// Per-subset contributions (tilde_ent).
  std::vector<std::pair<QubitSet, double>> terms;
  /// Best decomposition found (emergent entanglement).
  std::optional<Decomposition> certificate;
};

/// E(rho0) with rho0 = plus_all(n).
DensityMatrix noisy_reference(const QuantumChannel& channel);

/// L(A) = S((E(rho0))|_A).
double leak_L(const QuantumChannel& channel, const QubitSet& qubits);
/// L(A) with an alternative input state in place of rho0.
double leak_L(const QuantumChannel& channel, const QubitSet& qubits, const DensityMatrix& input);

/// Mutual information between A and the environment of a Stinespring
/// dilation built factor by factor from the Kraus lists, on input rho0
/// (or `input` when given).
MeasureReport leak_Lprime(const QuantumChannel& channel, const QubitSet& qubits,
                          const std::optional<PureState>& input = std::nullopt);

/// S(rho_a) + S(rho_b) - S(rho_ab)
double ent_pair(const DensityMatrix& rho, int a, int b);
/// L(a) + L(b) - L({a, b})
double el_pair(const QuantumChannel& channel, int a, int b);

/// Best average pair entanglement over pure decompositions of rho_ab,
/// floored at ent_pair. A lower bound on the true maximum.
MeasureReport emergent_entanglement(const DensityMatrix& rho, int a, int b,
                                    const DecompositionOptions& budget = {});

/// -S(rho_A) + max S(rho*) over states sharing every proper marginal of rho_A.
/// 2 <= |A| <= 4.
MeasureReport ent_set(const DensityMatrix& rho, const QubitSet& qubits, const MaxEntOptions& options = {});
/// ent_set of the noisy reference output E(rho0).
MeasureReport el_set(const QuantumChannel& channel, const QubitSet& qubits, const MaxEntOptions& options = {});

/// Sum of ent_set over every subset B with 2 <= |B| <= min(max_subset_size, 4),
/// plus the full set when n <= 4. Pure rho on at most 8 qubits.
MeasureReport tilde_ent(const DensityMatrix& rho, int max_subset_size = 4, const MaxEntOptions& options = {});

}  // namespace noiselab
