#include "noiselab/sync.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "noiselab/channels.hpp"
#include "noiselab/error.hpp"
#include "noiselab/states.hpp"

namespace noiselab {

double WeightDistribution::mean() const {
  double m = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) m += static_cast<double>(k) * w[k];
  return m;
}

double WeightDistribution::conditional_mean() const {
  const double hit = 1.0 - w.front();
  if (hit <= 0.0) return 0.0;
  return mean() / hit;
}

WeightDistribution weight_distribution(const QuantumChannel& channel) {
  const PauliDistribution dist = pauli_expansion(channel);
  WeightDistribution out{dist.n, std::vector<double>(static_cast<std::size_t>(dist.n) + 1, 0.0)};
  for (std::size_t idx = 0; idx < dist.q.size(); ++idx)
    out.w[static_cast<std::size_t>(dist.string_at(idx).weight())] += dist.q[idx];
  return out;
}

ClassicalMixtureModel fit_mixture(double p1, double p2) {
  if (!(p1 >= 0.0 && p1 <= 1.0) || !(p2 >= 0.0 && p2 <= 1.0))
    throw ArgumentError("fit_mixture: moments must lie in [0, 1]");
  if (p1 == 0.0) {
    if (p2 != 0.0) throw ArgumentError("fit_mixture: p2 > 0 with p1 = 0 is infeasible");
    return {1.0, 0.0};
  }
  // Relative slack of 1e-12 absorbs rounding in p1*p1 at the independence point.
  if (p2 > p1 || p2 < p1 * p1 * (1.0 - 1e-12))
    throw ArgumentError("fit_mixture: need p1^2 <= p2 <= p1, got p1=" + std::to_string(p1) +
                        " p2=" + std::to_string(p2));
  return {std::min(1.0, p1 * p1 / p2), p2 / p1};
}

double log_binomial_pmf(long n, long j, double h) {
  if (j < 0 || j > n) return -std::numeric_limits<double>::infinity();
  const double dn = static_cast<double>(n);
  const double dj = static_cast<double>(j);
  double lp = std::lgamma(dn + 1.0) - std::lgamma(dj + 1.0) - std::lgamma(dn - dj + 1.0);
  if (j > 0) lp += dj * std::log(h);
  if (j < n) lp += (dn - dj) * std::log1p(-h);
  return lp;
}

double binomial_upper_tail(long n, double h, long k) {
  if (k >= n) return 0.0;
  if (k < 0) return 1.0;
  if (h <= 0.0) return 0.0;
  if (h >= 1.0) return 1.0;
  double top = -std::numeric_limits<double>::infinity();
  for (long j = k + 1; j <= n; ++j) top = std::max(top, log_binomial_pmf(n, j, h));
  double sum = 0.0;
  for (long j = k + 1; j <= n; ++j) sum += std::exp(log_binomial_pmf(n, j, h) - top);
  return std::min(1.0, std::exp(top + std::log(sum)));
}

double tail_probability(const ClassicalMixtureModel& model, long n, long k) {
  if (n < 0 || n > 1'000'000) throw ArgumentError("tail_probability: n must lie in [0, 1e6]");
  return model.pi * binomial_upper_tail(n, model.h, k);
}

TripleMomentReport triple_moment(const ClassicalMixtureModel& model, double p3_target) {
  const double implied = model.p3();
  const double p1 = model.p1();
  const double indep = p1 * p1 * p1;
  return {implied, indep, indep > 0.0 ? implied / indep : 1.0, p3_target,
          p3_target > 0.0 ? implied / p3_target : std::numeric_limits<double>::quiet_NaN()};
}

double repetition_majority_error(double eps, long m) {
  if (m < 1 || m % 2 == 0) throw ArgumentError("repetition length must be odd, got " + std::to_string(m));
  if (!(eps >= 0.0 && eps <= 1.0)) throw ArgumentError("repetition_majority_error: eps must lie in [0, 1]");
  return binomial_upper_tail(m, (1.0 - eps) / 2.0, (m - 1) / 2);
}

RandomizationDemo quantum_randomization_demo(double eps, std::complex<double> a, std::complex<double> b) {
  const PureState encoded = bitflip_code_encode(a, b);
  const QuantumChannel noise = build_replacement_noise(eps, 3);
  const DensityMatrix noisy = apply(noise, encoded.density());

  // Syndrome (q0 xor q1, q1 xor q2) -> qubit to flip.
  Matrix recovered = Matrix::Zero(8, 8);
  for (int syndrome = 0; syndrome < 4; ++syndrome) {
    Matrix r = Matrix::Zero(8, 8);
    for (int k = 0; k < 8; ++k) {
      const int b0 = (k >> 2) & 1, b1 = (k >> 1) & 1, b2 = k & 1;
      if (((b0 ^ b1) << 1 | (b1 ^ b2)) != syndrome) continue;
      int flip = 0;
      if (syndrome == 0b10) flip = 0b100;
      if (syndrome == 0b11) flip = 0b010;
      if (syndrome == 0b01) flip = 0b001;
      r(k ^ flip, k) = 1.0;
    }
    recovered += r * noisy.matrix() * r.adjoint();
  }
  // Undo the encoder: CNOT(0->1) then CNOT(0->2) is its own inverse.
  Matrix decoder = Matrix::Zero(8, 8);
  for (int k = 0; k < 8; ++k) {
    const int out = (k & 0b100) ? (k ^ 0b011) : k;
    decoder(out, k) = 1.0;
  }
  const DensityMatrix decoded =
      DensityMatrix::unchecked(decoder * recovered * decoder.adjoint());
  const DensityMatrix logical = partial_trace(decoded, QubitSet{0});
  Vector ideal(2);
  ideal << a, b;
  const double fidelity = std::clamp((ideal.adjoint() * logical.matrix() * ideal)(0, 0).real(), 0.0, 1.0);

  // Computational-basis majority readout, branch by branch.
  auto majority_prob = [&](std::size_t basis, bool want_one) {
    const DensityMatrix out = apply(noise, PureState::basis(3, basis).density());
    double p = 0.0;
    for (std::size_t k = 0; k < 8; ++k)
      if ((std::popcount(k) >= 2) == want_one) p += out(k, k).real();
    return p;
  };
  const double success = std::norm(a) * majority_prob(0, false) + std::norm(b) * majority_prob(7, true);
  return {fidelity, std::clamp(success, 0.0, 1.0)};
}

}  // namespace noiselab
