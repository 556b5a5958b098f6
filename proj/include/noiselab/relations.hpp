#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "noiselab/channels.hpp"
#include "noiselab/measures.hpp"
#include "noiselab/optimizers.hpp"
#include "noiselab/qstate.hpp"

namespace noiselab {

enum class Verdict { satisfied, violated, vacuous };

const char* to_string(Verdict v);

/// Both sides below this count as zero.
inline constexpr double kZeroTol = 1e-9;

/// Outcome of checking EL >= c * (reference leak) * (entanglement term).
struct ConjectureVerdict {
  int relation = 0;
  std::string mode;            // "marginal" or "decomposed" for relations 3/4
  std::vector<int> qubits;
  double el = 0.0;             // left side
  double ent_term = 0.0;       // ENT, EE, ent_set or best sum p_k ent_set
  std::vector<double> leaks;   // L(a) for each qubit
  double reference_leak = 0.0; // average (pairs) or minimum (sets)
  double k_hat = 0.0;          // el / ent_term; +inf or NaN when ent_term vanishes
  double k_hat_normalized = 0.0;  // k_hat / reference_leak
  double level = 1.0;
  Verdict verdict = Verdict::vacuous;
  /// The entanglement term is a lower bound, so "satisfied" is provisional.
  bool conditional = false;
  std::map<std::string, double> diagnostics;
  std::vector<std::string> notes;
};

/// Vacuous when EL vanishes together with the entanglement term or with every
/// leak; otherwise satisfied iff el + zero >= level * reference_leak * ent_term.
/// Relations 3 and 4 pass the max-entropy tolerance as `zero`.
Verdict judge(double el, double ent_term, double reference_leak, double max_leak, double level,
              double zero = kZeroTol);

ConjectureVerdict eval_relation1(const DensityMatrix& rho, const QuantumChannel& channel, int a, int b,
                                 double level = 1.0);
ConjectureVerdict eval_relation2(const DensityMatrix& rho, const QuantumChannel& channel, int a, int b,
                                 double level = 1.0, const DecompositionOptions& budget = {});

enum class SetMode { marginal, decomposed };

ConjectureVerdict eval_relation34(const DensityMatrix& rho, const QuantumChannel& channel, const QubitSet& qubits,
                                  double level = 1.0, SetMode mode = SetMode::marginal,
                                  const MaxEntOptions& maxent = {}, const DecompositionOptions& budget = {});

struct CensorshipPoint {
  int n;
  double value;                 // total within the truncation, or the pair total
  double without_full_set;
  double pair_terms;
  MeasureReport report;
};

struct CensorshipReport {
  std::string family;
  int truncation = 4;
  bool pairs_only = false;
  std::vector<CensorshipPoint> points;
  double exponent;              // least-squares slope of log value vs log n; NaN if undefined
  std::string classification;
};

/// tilde_ent for each n in [n_min, n_max] and a power-law fit of its growth.
/// With pairs_only the fitted value is the sum of the pair terms alone.
CensorshipReport censorship_scan(const std::function<PureState(int)>& family, const std::string& name, int n_min,
                                 int n_max, int truncation, const MaxEntOptions& options = {},
                                 bool pairs_only = false);

/// Least-squares slope of log y against log x over points with y > kZeroTol.
double fit_exponent(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace noiselab
