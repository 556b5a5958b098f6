#include "noiselab/measures.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "noiselab/error.hpp"
#include "noiselab/states.hpp"

namespace noiselab {

namespace {

constexpr int kMaxDilationQubits = 20;
constexpr int kMaxSetQubits = 4;
constexpr int kMaxTildeQubits = 8;

void check_pair(int n, int a, int b) {
  if (a == b) throw ArgumentError("pair measure needs two distinct qubits");
  QubitSet{a, b}.check(n);
}

double marginal_entropy(const DensityMatrix& rho, const QubitSet& qs) {
  return von_neumann_entropy(partial_trace(rho, qs));
}

/// Local operators (support qubits, matrix) of one factor's Kraus list.
std::vector<std::pair<std::vector<int>, Matrix>> factor_ops(const ChannelFactor& f, int n) {
  std::vector<std::pair<std::vector<int>, Matrix>> ops;
  if (const auto* kf = std::get_if<KrausFactor>(&f)) {
    for (const Matrix& k : kf->kraus) ops.emplace_back(kf->targets, k);
    return ops;
  }
  for (const auto& [prob, p] : std::get<PauliFactor>(f).terms) {
    std::vector<int> support;
    std::string letters;
    for (int q = 0; q < n; ++q)
      if (p.letter(q) != 'I') {
        support.push_back(q);
        letters.push_back(p.letter(q));
      }
    Matrix m = support.empty() ? Matrix::Identity(1, 1) : PauliString::parse(letters).matrix();
    ops.emplace_back(std::move(support), std::sqrt(prob) * m);
  }
  return ops;
}

}  // namespace

DensityMatrix noisy_reference(const QuantumChannel& channel) {
  return apply(channel, plus_all(channel.qubits()).density());
}

double leak_L(const QuantumChannel& channel, const QubitSet& qubits) {
  if (qubits.empty()) throw ArgumentError("leak_L: empty qubit set");
  return marginal_entropy(noisy_reference(channel), qubits);
}

double leak_L(const QuantumChannel& channel, const QubitSet& qubits, const DensityMatrix& input) {
  if (qubits.empty()) throw ArgumentError("leak_L: empty qubit set");
  return marginal_entropy(apply(channel, input), qubits);
}

MeasureReport leak_Lprime(const QuantumChannel& channel, const QubitSet& qubits,
                          const std::optional<PureState>& input) {
  const int n = channel.qubits();
  if (qubits.empty()) throw ArgumentError("leak_Lprime: empty qubit set");
  qubits.check(n);
  PureState start = input ? *input : plus_all(n);
  if (start.qubits() != n) throw ArgumentError("leak_Lprime: input state size mismatch");

  // Each factor appends ceil(log2 #Kraus) environment qubits after the current register.
  Vector psi = start.amplitudes();
  int total = n;
  for (const ChannelFactor& f : channel.factors()) {
    const auto ops = factor_ops(f, n);
    int env = 0;
    while ((std::size_t{1} << env) < ops.size()) ++env;
    if (total + env > kMaxDilationQubits)
      throw SizeError("leak_Lprime: dilation needs " + std::to_string(total + env) + " qubits (limit " +
                      std::to_string(kMaxDilationQubits) + ")");
    const Eigen::Index stride = Eigen::Index{1} << env;
    Vector next = Vector::Zero(psi.size() * stride);
    for (std::size_t k = 0; k < ops.size(); ++k) {
      const auto& [targets, op] = ops[k];
      const Vector branch = targets.empty() ? Vector(op(0, 0) * psi) : apply_local(op, targets, total, psi);
      for (Eigen::Index i = 0; i < psi.size(); ++i) next(i * stride + static_cast<Eigen::Index>(k)) = branch(i);
    }
    next.normalize();
    psi = std::move(next);
    total += env;
  }

  const PureState dilated(std::move(psi));
  std::vector<int> env_idx;
  for (int q = n; q < total; ++q) env_idx.push_back(q);
  const QubitSet env(env_idx);
  const double s_a = pure_marginal_entropy(dilated, qubits);
  const double s_n = env.empty() ? 0.0 : pure_marginal_entropy(dilated, env);
  const double s_an = env.empty() ? s_a : pure_marginal_entropy(dilated, qubits.united(env));
  MeasureReport r;
  r.measure = "leak_Lprime";
  r.value = s_a + s_n - s_an;
  r.qubit_sets = {qubits};
  r.diagnostics = {{"S_A", s_a}, {"S_env", s_n}, {"S_A_env", s_an}, {"environment_qubits", total - n}};
  return r;
}

double ent_pair(const DensityMatrix& rho, int a, int b) {
  check_pair(rho.qubits(), a, b);
  return marginal_entropy(rho, QubitSet{a}) + marginal_entropy(rho, QubitSet{b}) -
         marginal_entropy(rho, QubitSet{a, b});
}

double el_pair(const QuantumChannel& channel, int a, int b) {
  check_pair(channel.qubits(), a, b);
  const DensityMatrix out = noisy_reference(channel);
  return marginal_entropy(out, QubitSet{a}) + marginal_entropy(out, QubitSet{b}) -
         marginal_entropy(out, QubitSet{a, b});
}

MeasureReport emergent_entanglement(const DensityMatrix& rho, int a, int b, const DecompositionOptions& budget) {
  check_pair(rho.qubits(), a, b);
  const DensityMatrix pair = partial_trace(rho, QubitSet{a, b});
  const double floor = ent_pair(pair, 0, 1);
  DecompositionResult found = max_avg_pure_decomposition(pair, budget);
  MeasureReport r;
  r.measure = "emergent_entanglement";
  r.value = std::max(found.value, floor);
  r.qubit_sets = {QubitSet{a, b}};
  r.diagnostics = {{"decomposition_value", found.value},
                   {"ent_floor", floor},
                   {"floored", found.value < floor ? 1.0 : 0.0},
                   {"rank", found.rank},
                   {"cap", found.cap},
                   {"restarts", found.restarts},
                   {"sweeps", found.sweeps},
                   {"evaluations", static_cast<double>(found.evaluations)},
                   {"reconstruction_residual", found.residual}};
  r.notes.push_back("lower bound: best decomposition found by local search");
  r.certificate = std::move(found.decomposition);
  return r;
}

MeasureReport ent_set(const DensityMatrix& rho, const QubitSet& qubits, const MaxEntOptions& options) {
  qubits.check(rho.qubits());
  if (qubits.size() < 2) throw ArgumentError("ent_set: need at least two qubits");
  if (qubits.size() > static_cast<std::size_t>(kMaxSetQubits)) throw SizeError("ent_set: at most 4 qubits");
  const DensityMatrix local = partial_trace(rho, qubits);
  // Pure single-qubit marginals force a pure product state: nothing beyond the marginals.
  bool pure_product = true;
  for (int q = 0; q < local.qubits() && pure_product; ++q)
    pure_product = partial_trace(local, QubitSet{q}).purity() > 1.0 - 1e-12;
  if (pure_product) {
    MeasureReport r;
    r.measure = "ent_set";
    r.value = 0.0;
    r.qubit_sets = {qubits};
    r.diagnostics = {{"max_entropy", 0.0}, {"entropy", 0.0}, {"iterations", 0.0}, {"residual", 0.0}, {"regularized", 0.0}};
    r.notes.push_back("pure single-qubit marginals");
    return r;
  }
  const MaxEntResult best = max_entropy_with_marginals(MarginalConstraintSet::proper_marginals(local), options, &local);
  const double s_local = von_neumann_entropy(local);
  MeasureReport r;
  r.measure = "ent_set";
  r.value = best.entropy - s_local;
  r.qubit_sets = {qubits};
  r.diagnostics = {{"max_entropy", best.entropy},
                   {"entropy", s_local},
                   {"iterations", best.iterations},
                   {"residual", best.residual},
                   {"regularized", best.regularized ? 1.0 : 0.0}};
  if (best.regularized) r.notes.push_back("targets regularized with 1e-9 of the maximally mixed state");
  return r;
}

MeasureReport el_set(const QuantumChannel& channel, const QubitSet& qubits, const MaxEntOptions& options) {
  MeasureReport r = ent_set(noisy_reference(channel), qubits, options);
  r.measure = "el_set";
  r.notes.push_back("E* realized as the max-entropy output with the same proper marginals on input rho0");
  return r;
}

MeasureReport tilde_ent(const DensityMatrix& rho, int max_subset_size, const MaxEntOptions& options) {
  const int n = rho.qubits();
  if (n > kMaxTildeQubits) throw SizeError("tilde_ent: at most 8 qubits");
  if (rho.purity() < 1.0 - 1e-9) throw ArgumentError("tilde_ent: the ideal state must be pure");
  if (max_subset_size < 2) throw ArgumentError("tilde_ent: max_subset_size must be at least 2");
  const int limit = std::min(max_subset_size, kMaxSetQubits);
  MeasureReport r;
  r.measure = "tilde_ent";
  double total = 0.0, without_full = 0.0, pairs = 0.0, full_term = std::numeric_limits<double>::quiet_NaN();
  double max_residual = 0.0;
  int max_iterations = 0;
  auto add_term = [&](const QubitSet& subset) {
    const MeasureReport term = ent_set(rho, subset, options);
    r.terms.emplace_back(subset, term.value);
    total += term.value;
    if (static_cast<int>(subset.size()) == n) full_term = term.value;
    else without_full += term.value;
    if (subset.size() == 2) pairs += term.value;
    max_residual = std::max(max_residual, term.diagnostics.at("residual"));
    max_iterations = std::max(max_iterations, static_cast<int>(term.diagnostics.at("iterations")));
  };
  for (int size = 2; size <= std::min(limit, n); ++size)
    for (std::uint32_t mask = (1U << n) - 1;; --mask) {
      if (std::popcount(mask) == size) {
        std::vector<int> qs;
        for (int q = 0; q < n; ++q)
          if (mask & (1U << (n - 1 - q))) qs.push_back(q);
        add_term(QubitSet(std::move(qs)));
      }
      if (mask == 0) break;
    }
  if (n >= 2 && n <= kMaxSetQubits && limit < n) add_term(QubitSet::range(n));
  r.value = total;
  r.qubit_sets = {QubitSet::range(n)};
  r.diagnostics = {{"total_with_full_set", total},
                   {"total_without_full_set", without_full},
                   {"full_set_term", full_term},
                   {"pair_terms_total", pairs},
                   {"truncation", limit},
                   {"subsets", static_cast<double>(r.terms.size())},
                   {"max_residual", max_residual},
                   {"max_iterations", max_iterations}};
  if (limit < n) r.notes.push_back("truncated at subset size " + std::to_string(limit));
  if (limit < n && n <= kMaxSetQubits) r.notes.push_back("full-set term included exactly");
  return r;
}

}  // namespace noiselab
