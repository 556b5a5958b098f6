#pragma once

#include <complex>
#include <vector>

namespace noiselab {

class QuantumChannel;

/// Probability of each error-support size under the Pauli-twirled channel.
struct WeightDistribution {
  int n = 0;
  std::vector<double> w;  // indexed by weight 0..n

  double mean() const;
  /// Mean weight conditioned on a non-identity error; 0 if W(0) == 1.
  double conditional_mean() const;
};

/// Exchangeable two-mode model: with probability pi every bit is hit
/// independently with probability h, otherwise no bit is hit.
struct ClassicalMixtureModel {
  double pi = 1.0;
  double h = 0.0;

  double p1() const { return pi * h; }
  double p2() const { return pi * h * h; }
  double p3() const { return pi * h * h * h; }
};

struct TripleMomentReport {
  double implied_p3;
  double independent_p3;  // p1^3
  double ratio;           // implied / independent
  double target_p3;
  double target_ratio;    // implied / target
};

struct RandomizationDemo {
  double decoded_fidelity;
  double majority_success;
};

WeightDistribution weight_distribution(const QuantumChannel& channel);

/// Moment-matched mixture: h = p2/p1, pi = p1^2/p2. Requires p1^2 <= p2 <= p1.
ClassicalMixtureModel fit_mixture(double p1, double p2);

/// log P(Bin(n, h) = j)
double log_binomial_pmf(long n, long j, double h);
/// P(Bin(n, h) > k), summed in log space.
double binomial_upper_tail(long n, double h, long k);
/// P(#hits > k) = pi * P(Bin(n, h) > k).
double tail_probability(const ClassicalMixtureModel& model, long n, long k);

TripleMomentReport triple_moment(const ClassicalMixtureModel& model, double p3_target);

/// P(Bin(m, (1-eps)/2) >= (m+1)/2): each bit is hit with probability 1-eps and
/// a hit bit becomes an unbiased coin. m must be odd.
double repetition_majority_error(double eps, long m);

/// Three-qubit bit-flip code under replacement noise (each qubit replaced by
/// I/2 with probability 1-eps): syndrome-decoded logical fidelity and the
/// success probability of majority readout in the computational basis.
RandomizationDemo quantum_randomization_demo(double eps, std::complex<double> a, std::complex<double> b);

}  // namespace noiselab
