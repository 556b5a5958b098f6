#include "noiselab/relations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "noiselab/error.hpp"

namespace noiselab {

namespace {

void fill_ratios(ConjectureVerdict& v, double zero = kZeroTol) {
  if (v.ent_term < zero)
    v.k_hat = v.el > zero ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();
  else
    v.k_hat = v.el / v.ent_term;
  v.k_hat_normalized = v.reference_leak > kZeroTol ? v.k_hat / v.reference_leak
                                                   : std::numeric_limits<double>::quiet_NaN();
  const double max_leak = v.leaks.empty() ? 0.0 : *std::max_element(v.leaks.begin(), v.leaks.end());
  v.verdict = judge(v.el, v.ent_term, v.reference_leak, max_leak, v.level, zero);
}

void check_registers(const DensityMatrix& rho, const QuantumChannel& channel) {
  if (rho.qubits() != channel.qubits())
    throw ArgumentError("relation: state and channel act on different registers");
}

ConjectureVerdict pair_verdict(int id, const DensityMatrix& rho, const QuantumChannel& channel, int a, int b,
                               double level) {
  check_registers(rho, channel);
  ConjectureVerdict v;
  v.relation = id;
  v.qubits = {a, b};
  v.level = level;
  v.el = el_pair(channel, a, b);
  v.leaks = {leak_L(channel, QubitSet{a}), leak_L(channel, QubitSet{b})};
  v.reference_leak = 0.5 * (v.leaks[0] + v.leaks[1]);
  return v;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::satisfied: return "satisfied";
    case Verdict::violated: return "violated";
    case Verdict::vacuous: return "vacuous";
  }
  return "unknown";
}

Verdict judge(double el, double ent_term, double reference_leak, double max_leak, double level, double zero) {
  if (el < zero && (ent_term < zero || max_leak < zero)) return Verdict::vacuous;
  return el + zero >= level * reference_leak * ent_term ? Verdict::satisfied : Verdict::violated;
}

ConjectureVerdict eval_relation1(const DensityMatrix& rho, const QuantumChannel& channel, int a, int b, double level) {
  ConjectureVerdict v = pair_verdict(1, rho, channel, a, b, level);
  v.ent_term = ent_pair(rho, a, b);
  fill_ratios(v);
  return v;
}

ConjectureVerdict eval_relation2(const DensityMatrix& rho, const QuantumChannel& channel, int a, int b, double level,
                                 const DecompositionOptions& budget) {
  ConjectureVerdict v = pair_verdict(2, rho, channel, a, b, level);
  const MeasureReport ee = emergent_entanglement(rho, a, b, budget);
  v.ent_term = ee.value;
  v.diagnostics = ee.diagnostics;
  fill_ratios(v);
  if (v.verdict == Verdict::satisfied) {
    v.conditional = true;
    v.notes.push_back("satisfied relative to a lower bound on EE; a larger EE may violate");
  }
  return v;
}

ConjectureVerdict eval_relation34(const DensityMatrix& rho, const QuantumChannel& channel, const QubitSet& qubits,
                                  double level, SetMode mode, const MaxEntOptions& maxent,
                                  const DecompositionOptions& budget) {
  check_registers(rho, channel);
  ConjectureVerdict v;
  v.relation = mode == SetMode::marginal ? 3 : 4;
  v.mode = mode == SetMode::marginal ? "marginal" : "decomposed";
  v.qubits = qubits.indices();
  v.level = level;
  const MeasureReport el = el_set(channel, qubits, maxent);
  v.el = el.value;
  for (int q : qubits) v.leaks.push_back(leak_L(channel, QubitSet{q}));
  v.reference_leak = *std::min_element(v.leaks.begin(), v.leaks.end());
  v.diagnostics["el_iterations"] = el.diagnostics.at("iterations");
  v.diagnostics["el_residual"] = el.diagnostics.at("residual");
  v.notes = el.notes;

  if (mode == SetMode::marginal) {
    const MeasureReport ent = ent_set(rho, qubits, maxent);
    v.ent_term = ent.value;
    v.diagnostics["ent_iterations"] = ent.diagnostics.at("iterations");
    v.diagnostics["ent_residual"] = ent.diagnostics.at("residual");
  } else {
    const DensityMatrix local = partial_trace(rho, qubits);
    const QubitSet all = QubitSet::range(local.qubits());
    const MemberObjective member = [&](const PureState& psi) { return ent_set(psi.density(), all, maxent).value; };
    const DecompositionResult found = max_avg_pure_decomposition(local, budget, member);
    v.ent_term = found.value;
    v.diagnostics["rank"] = found.rank;
    v.diagnostics["cap"] = found.cap;
    v.diagnostics["restarts"] = found.restarts;
    v.diagnostics["sweeps"] = found.sweeps;
    v.diagnostics["evaluations"] = static_cast<double>(found.evaluations);
    v.diagnostics["reconstruction_residual"] = found.residual;
  }
  // Both sides are max-entropy values, accurate to the optimizer tolerance.
  v.diagnostics["zero_tolerance"] = maxent.tol;
  fill_ratios(v, maxent.tol);
  if (mode == SetMode::decomposed && v.verdict == Verdict::satisfied) {
    v.conditional = true;
    v.notes.push_back("satisfied relative to the best decomposition found; another may violate");
  }
  return v;
}

double fit_exponent(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
    if (y[i] > kZeroTol && x[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

CensorshipReport censorship_scan(const std::function<PureState(int)>& family, const std::string& name, int n_min,
                                 int n_max, int truncation, const MaxEntOptions& options, bool pairs_only) {
  if (n_min < 1 || n_max < n_min) throw ArgumentError("censorship_scan: invalid n range");
  if (n_max > 8) throw SizeError("censorship_scan: n must not exceed 8");
  if (truncation < 2) throw ArgumentError("censorship_scan: truncation must be at least 2");
  CensorshipReport out;
  out.family = name;
  out.truncation = std::min(pairs_only ? 2 : truncation, 4);
  out.pairs_only = pairs_only;
  std::vector<double> ns, values;
  for (int n = n_min; n <= n_max; ++n) {
    MeasureReport r = tilde_ent(family(n).density(), out.truncation, options);
    const double pairs = r.diagnostics.at("pair_terms_total");
    const double v = pairs_only ? pairs : r.value;
    const double without = r.diagnostics.at("total_without_full_set");
    out.points.push_back({n, v, without, pairs, std::move(r)});
    ns.push_back(n);
    values.push_back(v);
  }
  out.exponent = fit_exponent(ns, values);
  const bool all_zero = std::all_of(values.begin(), values.end(), [](double v) { return v < kZeroTol; });
  if (all_zero)
    out.classification = "trivially censored";
  else if (std::isnan(out.exponent))
    out.classification = "undetermined";
  else if (out.exponent < 0.8)
    out.classification = "sublinear";
  else if (out.exponent <= 1.3)
    out.classification = "linear";
  else if (out.exponent <= 2.5)
    out.classification = "quadratic";
  else
    out.classification = "faster than quadratic";
  return out;
}

}  // namespace noiselab
