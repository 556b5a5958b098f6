#include "noiselab/channels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <string>

#include "noiselab/error.hpp"
#include "noiselab/sync.hpp"

namespace noiselab {

namespace {

constexpr double kTraceTol = 1e-9;
constexpr int kMaxExpansionQubits = 6;

std::uint64_t qubit_bit(int q, int n) { return std::uint64_t{1} << (n - 1 - q); }

int parity(std::uint64_t v) { return std::popcount(v) & 1; }

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0))
    throw ArgumentError(std::string(what) + " must lie in [0, 1], got " + std::to_string(p));
}

/// Local operator on `targets` (listed order) expanded to the full n-qubit register.
Matrix expand(const Matrix& op, std::span<const int> targets, int n) {
  const Eigen::Index d = Eigen::Index{1} << n;
  Matrix full = Matrix::Identity(d, d);
  apply_local_left(op, targets, n, full);
  return full;
}

void check_trace_preserving(const std::vector<Matrix>& kraus) {
  if (kraus.empty()) throw ArgumentError("channel needs at least one Kraus operator");
  const Eigen::Index d = kraus.front().rows();
  Matrix sum = Matrix::Zero(d, d);
  for (const Matrix& k : kraus) {
    if (k.rows() != d || k.cols() != d) throw ArgumentError("Kraus operators differ in shape");
    sum.noalias() += k.adjoint() * k;
  }
  if ((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > kTraceTol)
    throw ArgumentError("Kraus operators are not trace preserving");
}

/// P rho P for one Pauli string, accumulated with weight `prob`.
void add_pauli_conjugate(double prob, const PauliString& p, const Matrix& x, Matrix& out) {
  const Eigen::Index d = x.rows();
  std::vector<double> sign(static_cast<std::size_t>(d));
  for (Eigen::Index k = 0; k < d; ++k)
    sign[static_cast<std::size_t>(k)] = parity(static_cast<std::uint64_t>(k) & p.z) ? -1.0 : 1.0;
  const auto xm = static_cast<Eigen::Index>(p.x);
  for (Eigen::Index j = 0; j < d; ++j) {
    const Eigen::Index jj = j ^ xm;
    const double sj = prob * sign[static_cast<std::size_t>(jj)];
    for (Eigen::Index i = 0; i < d; ++i) {
      const Eigen::Index ii = i ^ xm;
      out(i, j) += sj * sign[static_cast<std::size_t>(ii)] * x(ii, jj);
    }
  }
}

Matrix act_factor(const ChannelFactor& f, int n, const Matrix& x) {
  if (const auto* kf = std::get_if<KrausFactor>(&f)) {
    Matrix out = Matrix::Zero(x.rows(), x.cols());
    for (const Matrix& k : kf->kraus) {
      Matrix y = x;
      conjugate_local(k, kf->targets, n, y);
      out += y;
    }
    return out;
  }
  const auto& pf = std::get<PauliFactor>(f);
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (const auto& [prob, p] : pf.terms) add_pauli_conjugate(prob, p, x, out);
  return out;
}

/// Compresses a Kraus list to at most d^2 operators via the Choi matrix.
std::vector<Matrix> compress_kraus(const std::vector<Matrix>& kraus) {
  const Eigen::Index d = kraus.front().rows();
  if (static_cast<Eigen::Index>(kraus.size()) <= d * d) return kraus;
  Matrix choi = Matrix::Zero(d * d, d * d);
  for (const Matrix& k : kraus) {
    const Eigen::Map<const Vector> v(k.data(), d * d);
    choi.noalias() += v * v.adjoint();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(choi);
  const double top = es.eigenvalues().maxCoeff();
  std::vector<Matrix> out;
  for (Eigen::Index i = 0; i < d * d; ++i) {
    const double lam = es.eigenvalues()(i);
    if (lam <= 1e-14 * top) continue;
    Vector v = std::sqrt(lam) * es.eigenvectors().col(i);
    out.emplace_back(Eigen::Map<Matrix>(v.data(), d, d));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// PauliString

PauliString PauliString::parse(std::string_view letters) {
  const int n = static_cast<int>(letters.size());
  if (n > 62) throw SizeError("Pauli string longer than 62 qubits");
  PauliString p{n, 0, 0};
  for (int q = 0; q < n; ++q) {
    const std::uint64_t bit = qubit_bit(q, n);
    switch (letters[static_cast<std::size_t>(q)]) {
      case 'I': break;
      case 'X': p.x |= bit; break;
      case 'Y': p.x |= bit; p.z |= bit; break;
      case 'Z': p.z |= bit; break;
      default:
        throw ArgumentError(std::string("invalid Pauli letter '") +
                            letters[static_cast<std::size_t>(q)] + "'");
    }
  }
  return p;
}

char PauliString::letter(int q) const {
  const std::uint64_t bit = qubit_bit(q, n);
  const bool bx = (x & bit) != 0;
  const bool bz = (z & bit) != 0;
  return bx ? (bz ? 'Y' : 'X') : (bz ? 'Z' : 'I');
}

std::string PauliString::label() const {
  std::string s;
  for (int q = 0; q < n; ++q) s.push_back(letter(q));
  return s;
}

int PauliString::weight() const { return std::popcount(x | z); }

Matrix PauliString::matrix() const {
  const Eigen::Index d = Eigen::Index{1} << n;
  const int ny = std::popcount(x & z);
  const cplx phases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const cplx global = phases[ny % 4];
  Matrix m = Matrix::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double s = parity(static_cast<std::uint64_t>(j) & z) ? -1.0 : 1.0;
    m(j ^ static_cast<Eigen::Index>(x), j) = global * s;
  }
  return m;
}

// ---------------------------------------------------------------------------
// QuantumChannel

QuantumChannel QuantumChannel::identity(int n) { return QuantumChannel(n, {}); }

QuantumChannel QuantumChannel::from_kraus(std::vector<Matrix> kraus) {
  check_trace_preserving(kraus);
  const int n = qubits_for_dim(static_cast<std::size_t>(kraus.front().rows()));
  return local(n, QubitSet::range(n), std::move(kraus));
}

QuantumChannel QuantumChannel::local(int n, const QubitSet& targets, std::vector<Matrix> kraus) {
  targets.check(n);
  check_trace_preserving(kraus);
  if (kraus.front().rows() != (Eigen::Index{1} << targets.size()))
    throw ArgumentError("Kraus operator size does not match the target qubits");
  std::erase_if(kraus, [](const Matrix& k) { return k.cwiseAbs().maxCoeff() == 0.0; });
  return QuantumChannel(n, {KrausFactor{targets.indices(), std::move(kraus)}});
}

QuantumChannel QuantumChannel::pauli(int n, std::vector<std::pair<double, PauliString>> terms) {
  double total = 0.0;
  for (const auto& [prob, p] : terms) {
    if (p.n != n) throw ArgumentError("Pauli term acts on a different register size");
    if (prob < 0.0) throw ArgumentError("negative Pauli term probability");
    total += prob;
  }
  if (std::abs(total - 1.0) > kTraceTol) throw ArgumentError("Pauli term probabilities do not sum to 1");
  std::erase_if(terms, [](const auto& t) { return t.first == 0.0; });
  return QuantumChannel(n, {PauliFactor{std::move(terms)}});
}

std::vector<Matrix> QuantumChannel::kraus_operators(std::size_t max_count) const {
  const Eigen::Index d = Eigen::Index{1} << n_;
  std::vector<Matrix> result{Matrix::Identity(d, d)};
  for (const ChannelFactor& f : factors_) {
    std::vector<Matrix> ops;
    if (const auto* kf = std::get_if<KrausFactor>(&f)) {
      for (const Matrix& k : kf->kraus) ops.push_back(expand(k, kf->targets, n_));
    } else {
      for (const auto& [prob, p] : std::get<PauliFactor>(f).terms) ops.push_back(std::sqrt(prob) * p.matrix());
    }
    if (ops.size() * result.size() > max_count)
      throw SizeError("kraus_operators: more than " + std::to_string(max_count) + " operators");
    std::vector<Matrix> next;
    next.reserve(ops.size() * result.size());
    for (const Matrix& r : result)
      for (const Matrix& k : ops) next.push_back(k * r);
    result = std::move(next);
  }
  return result;
}

QuantumChannel QuantumChannel::embedded(const QubitSet& targets, int n) const {
  if (static_cast<int>(targets.size()) != n_)
    throw ArgumentError("embedded: channel acts on " + std::to_string(n_) + " qubits but " +
                        std::to_string(targets.size()) + " targets given");
  targets.check(n);
  std::vector<ChannelFactor> out;
  for (const ChannelFactor& f : factors_) {
    if (const auto* kf = std::get_if<KrausFactor>(&f)) {
      KrausFactor g{{}, kf->kraus};
      for (int t : kf->targets) g.targets.push_back(targets[static_cast<std::size_t>(t)]);
      out.emplace_back(std::move(g));
    } else {
      PauliFactor g;
      for (const auto& [prob, p] : std::get<PauliFactor>(f).terms) {
        PauliString q{n, 0, 0};
        for (int i = 0; i < n_; ++i) {
          const std::uint64_t src = qubit_bit(i, n_);
          const std::uint64_t dst = qubit_bit(targets[static_cast<std::size_t>(i)], n);
          if (p.x & src) q.x |= dst;
          if (p.z & src) q.z |= dst;
        }
        g.terms.emplace_back(prob, q);
      }
      out.emplace_back(std::move(g));
    }
  }
  return QuantumChannel(n, std::move(out));
}

Matrix QuantumChannel::act(const Matrix& x) const {
  if (x.rows() != (Eigen::Index{1} << n_) || x.cols() != x.rows())
    throw ArgumentError("channel applied to an operator of the wrong size");
  Matrix y = x;
  for (const ChannelFactor& f : factors_) y = act_factor(f, n_, y);
  return y;
}

DensityMatrix apply(const QuantumChannel& channel, const DensityMatrix& rho) {
  if (channel.qubits() != rho.qubits())
    throw ArgumentError("apply: channel on " + std::to_string(channel.qubits()) +
                        " qubits, state on " + std::to_string(rho.qubits()));
  Matrix out = channel.act(rho.matrix());
  out = 0.5 * (out + out.adjoint());
  return DensityMatrix::unchecked(std::move(out));
}

DensityMatrix apply(const QuantumChannel& channel, const DensityMatrix& rho, const QubitSet& targets) {
  return apply(channel.embedded(targets, rho.qubits()), rho);
}

QuantumChannel combine(const std::vector<std::pair<QuantumChannel, QubitSet>>& parts, int n) {
  if (n < 0) {
    n = 0;
    for (const auto& [ch, qs] : parts)
      if (!qs.empty()) n = std::max(n, qs.indices().back() + 1);
  }
  QubitSet used;
  QuantumChannel out = QuantumChannel::identity(n);
  for (const auto& [ch, qs] : parts) {
    if (!used.disjoint(qs)) throw ArgumentError("combine: overlapping qubit sets");
    used = used.united(qs);
    out = compose(ch.embedded(qs, n), out);
  }
  return out;
}

QuantumChannel compose(const QuantumChannel& second, const QuantumChannel& first) {
  if (second.n_ != first.n_) throw ArgumentError("compose: register sizes differ");
  std::vector<ChannelFactor> f = first.factors_;
  f.insert(f.end(), second.factors_.begin(), second.factors_.end());
  return QuantumChannel(first.n_, std::move(f));
}

// ---------------------------------------------------------------------------
// PauliDistribution

std::size_t PauliDistribution::index_of(const PauliString& p) {
  std::size_t idx = 0;
  for (int q = 0; q < p.n; ++q) {
    idx *= 4;
    switch (p.letter(q)) {
      case 'X': idx += 1; break;
      case 'Y': idx += 2; break;
      case 'Z': idx += 3; break;
      default: break;
    }
  }
  return idx;
}

PauliString PauliDistribution::string_at(std::size_t index) const {
  static constexpr char kLetters[4] = {'I', 'X', 'Y', 'Z'};
  std::string s(static_cast<std::size_t>(n), 'I');
  for (int q = n - 1; q >= 0; --q) {
    s[static_cast<std::size_t>(q)] = kLetters[index % 4];
    index /= 4;
  }
  return PauliString::parse(s);
}

double PauliDistribution::operator()(const PauliString& p) const {
  if (p.n != n) throw ArgumentError("Pauli string size mismatch");
  return q[index_of(p)];
}

// ---------------------------------------------------------------------------
// Builders

QuantumChannel build_depolarizing(double p) {
  check_probability(p, "depolarizing p");
  return QuantumChannel::pauli(1, {{1.0 - p, PauliString::parse("I")},
                                   {p / 3.0, PauliString::parse("X")},
                                   {p / 3.0, PauliString::parse("Y")},
                                   {p / 3.0, PauliString::parse("Z")}});
}

QuantumChannel build_depolarizing(double p, int qubit, int n) {
  return build_depolarizing(p).embedded(QubitSet{qubit}, n);
}

QuantumChannel build_product_depolarizing(double p, int n) {
  std::vector<std::pair<QuantumChannel, QubitSet>> parts;
  for (int q = 0; q < n; ++q) parts.emplace_back(build_depolarizing(p), QubitSet{q});
  return combine(parts, n);
}

QuantumChannel build_dephasing(double lambda) {
  check_probability(lambda, "dephasing lambda");
  return QuantumChannel::pauli(1, {{1.0 - lambda / 2.0, PauliString::parse("I")},
                                   {lambda / 2.0, PauliString::parse("Z")}});
}

QuantumChannel build_product_dephasing(double lambda, int n) {
  std::vector<std::pair<QuantumChannel, QubitSet>> parts;
  for (int q = 0; q < n; ++q) parts.emplace_back(build_dephasing(lambda), QubitSet{q});
  return combine(parts, n);
}

QuantumChannel build_correlated_flip(double eps, const PauliString& p) {
  check_probability(eps, "correlated flip epsilon");
  if (p.n < 1) throw ArgumentError("correlated flip needs a non-empty Pauli string");
  return QuantumChannel::pauli(p.n, {{1.0 - eps, PauliString::identity(p.n)}, {eps, p}});
}

QuantumChannel build_pairwise_correlated(double p1, double p2, char basis, int n) {
  if (basis != 'X' && basis != 'Y' && basis != 'Z')
    throw ArgumentError(std::string("flip basis must be X, Y or Z, got '") + basis + "'");
  if (n < 1 || n > kDefaultMaxQubits) throw SizeError("pairwise correlated channel register size");
  const ClassicalMixtureModel model = fit_mixture(p1, p2);
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  std::vector<std::pair<double, PauliString>> terms;
  for (std::uint64_t s = 0; s <= full; ++s) {
    const int w = std::popcount(s);
    double prob = model.pi * std::pow(model.h, w) * std::pow(1.0 - model.h, n - w);
    if (s == 0) prob += 1.0 - model.pi;
    PauliString p{n, 0, 0};
    if (basis != 'Z') p.x = s;
    if (basis != 'X') p.z = s;
    terms.emplace_back(prob, p);
  }
  return QuantumChannel::pauli(n, std::move(terms));
}

QuantumChannel build_random_unitary_noise(int n, double eps, std::uint64_t seed) {
  if (!(eps >= 0.0)) throw ArgumentError("random unitary noise rate must be >= 0");
  if (n < 1 || n > kDefaultMaxQubits) throw SizeError("random unitary noise register size");
  Rng rng(seed);
  const Eigen::Index d = Eigen::Index{1} << n;
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) g(i, j) = cplx(normal(rng), normal(rng));
  const Matrix h = 0.5 * (g + g.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const double radius = es.eigenvalues().cwiseAbs().maxCoeff();
  Vector phases(d);
  for (Eigen::Index i = 0; i < d; ++i)
    phases(i) = std::exp(cplx(0.0, -eps * es.eigenvalues()(i) / radius));
  Matrix u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  return QuantumChannel::from_kraus({std::move(u)});
}

QuantumChannel build_cluster_noise(const Graph& graph, double eps, std::uint64_t seed) {
  graph.check();
  check_probability(eps, "cluster noise epsilon");
  const int n = graph.n;
  if (n < 1 || n > kDefaultMaxQubits) throw SizeError("cluster noise register size");
  const Eigen::Index d = Eigen::Index{1} << n;
  Rng rng(seed);
  Matrix v = Matrix::Identity(d, d);
  for (int q = 0; q < n; ++q) {
    const int t[1] = {q};
    apply_local_left(random_unitary(2, rng), t, n, v);
  }
  Vector cz(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    int sign = 0;
    for (const auto& [a, b] : graph.edges)
      if ((k & static_cast<Eigen::Index>(qubit_bit(a, n))) && (k & static_cast<Eigen::Index>(qubit_bit(b, n))))
        sign ^= 1;
    cz(k) = sign ? -1.0 : 1.0;
  }
  std::vector<Matrix> kraus;
  if (eps < 1.0) kraus.push_back(std::sqrt(1.0 - eps) * Matrix::Identity(d, d));
  if (eps > 0.0) kraus.push_back(std::sqrt(eps) * (v * cz.asDiagonal() * v.adjoint()));
  return QuantumChannel::from_kraus(std::move(kraus));
}

QuantumChannel build_replacement_noise(double eps, int n) {
  check_probability(eps, "replacement epsilon");
  // Replacement by I/2 equals the uniform Pauli mixture.
  const double r = (1.0 - eps) / 4.0;
  const QuantumChannel one = QuantumChannel::pauli(
      1, {{eps + r, PauliString::parse("I")}, {r, PauliString::parse("X")},
          {r, PauliString::parse("Y")}, {r, PauliString::parse("Z")}});
  std::vector<std::pair<QuantumChannel, QubitSet>> parts;
  for (int q = 0; q < n; ++q) parts.emplace_back(one, QubitSet{q});
  return combine(parts, n);
}

// ---------------------------------------------------------------------------
// Pauli expansion

namespace {

/// Channel restricted to a set of qubits, either as a Pauli mixture keyed by
/// full-register masks or as local Kraus operators.
struct ExpansionBlock {
  QubitSet qubits;
  bool is_pauli = true;
  std::map<std::pair<std::uint64_t, std::uint64_t>, double> pauli;
  std::vector<Matrix> kraus;
};

/// Restrict full-register masks to `qubits` as a local PauliString.
PauliString restrict_to(std::uint64_t x, std::uint64_t z, const QubitSet& qubits, int n) {
  const int t = static_cast<int>(qubits.size());
  PauliString p{t, 0, 0};
  for (int i = 0; i < t; ++i) {
    const std::uint64_t src = qubit_bit(qubits[static_cast<std::size_t>(i)], n);
    const std::uint64_t dst = qubit_bit(i, t);
    if (x & src) p.x |= dst;
    if (z & src) p.z |= dst;
  }
  return p;
}

std::vector<Matrix> block_kraus(const ExpansionBlock& b, const QubitSet& onto, int n) {
  std::vector<int> pos;
  for (int q : b.qubits)
    pos.push_back(static_cast<int>(std::lower_bound(onto.begin(), onto.end(), q) - onto.begin()));
  const int t = static_cast<int>(onto.size());
  std::vector<Matrix> out;
  if (b.is_pauli) {
    for (const auto& [key, prob] : b.pauli)
      out.push_back(std::sqrt(prob) * expand(restrict_to(key.first, key.second, b.qubits, n).matrix(), pos, t));
  } else {
    for (const Matrix& k : b.kraus) out.push_back(expand(k, pos, t));
  }
  return out;
}

std::vector<double> block_distribution(const ExpansionBlock& b, int n) {
  const int t = static_cast<int>(b.qubits.size());
  const std::size_t count = std::size_t{1} << (2 * t);
  std::vector<double> q(count, 0.0);
  if (b.is_pauli) {
    for (const auto& [key, prob] : b.pauli)
      q[PauliDistribution::index_of(restrict_to(key.first, key.second, b.qubits, n))] += prob;
    return q;
  }
  const PauliDistribution shape{t, {}};
  const Eigen::Index d = Eigen::Index{1} << t;
  const double norm = 1.0 / static_cast<double>(d * d);
  for (std::size_t idx = 0; idx < count; ++idx) {
    const PauliString p = shape.string_at(idx);
    const cplx phases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const cplx global = phases[std::popcount(p.x & p.z) % 4];
    double acc = 0.0;
    for (const Matrix& k : b.kraus) {
      // tr(P K) = sum_j c(j) K(j, j^x) with P|j> = c(j)|j^x>
      cplx tr = 0.0;
      for (Eigen::Index j = 0; j < d; ++j) {
        const double s = parity(static_cast<std::uint64_t>(j) & p.z) ? -1.0 : 1.0;
        tr += s * k(j, j ^ static_cast<Eigen::Index>(p.x));
      }
      acc += std::norm(global * tr);
    }
    q[idx] = acc * norm;
  }
  return q;
}

}  // namespace

PauliDistribution pauli_expansion(const QuantumChannel& channel) {
  const int n = channel.qubits();
  if (n > kMaxExpansionQubits)
    throw SizeError("pauli_expansion: " + std::to_string(n) + " qubits exceeds limit of 6");
  std::vector<ExpansionBlock> blocks;
  for (const ChannelFactor& f : channel.factors()) {
    ExpansionBlock incoming;
    if (const auto* kf = std::get_if<KrausFactor>(&f)) {
      incoming.qubits = QubitSet(kf->targets);
      incoming.is_pauli = false;
      // Local Kraus operators are in `targets` order; reorder onto the sorted set.
      std::vector<int> pos;
      for (int q : kf->targets)
        pos.push_back(static_cast<int>(std::lower_bound(incoming.qubits.begin(), incoming.qubits.end(), q) -
                                       incoming.qubits.begin()));
      for (const Matrix& k : kf->kraus)
        incoming.kraus.push_back(expand(k, pos, static_cast<int>(pos.size())));
    } else {
      std::uint64_t support = 0;
      for (const auto& [prob, p] : std::get<PauliFactor>(f).terms) {
        support |= p.x | p.z;
        incoming.pauli[{p.x, p.z}] += prob;
      }
      std::vector<int> qs;
      for (int q = 0; q < n; ++q)
        if (support & qubit_bit(q, n)) qs.push_back(q);
      incoming.qubits = QubitSet(std::move(qs));
    }
    if (incoming.qubits.empty()) continue;

    std::vector<ExpansionBlock> overlapping, rest;
    for (auto& b : blocks) (b.qubits.disjoint(incoming.qubits) ? rest : overlapping).push_back(std::move(b));
    ExpansionBlock merged;
    merged.qubits = incoming.qubits;
    for (const auto& b : overlapping) merged.qubits = merged.qubits.united(b.qubits);
    const bool all_pauli = incoming.is_pauli &&
                           std::all_of(overlapping.begin(), overlapping.end(), [](const auto& b) { return b.is_pauli; });
    if (all_pauli) {
      // Composition of Pauli channels convolves the error distributions.
      std::map<std::pair<std::uint64_t, std::uint64_t>, double> acc{{{0, 0}, 1.0}};
      overlapping.push_back(std::move(incoming));
      for (const auto& b : overlapping) {
        std::map<std::pair<std::uint64_t, std::uint64_t>, double> next;
        for (const auto& [k1, p1] : acc)
          for (const auto& [k2, p2] : b.pauli) next[{k1.first ^ k2.first, k1.second ^ k2.second}] += p1 * p2;
        acc = std::move(next);
      }
      merged.pauli = std::move(acc);
    } else {
      merged.is_pauli = false;
      const int t = static_cast<int>(merged.qubits.size());
      const Eigen::Index d = Eigen::Index{1} << t;
      std::vector<Matrix> ops{Matrix::Identity(d, d)};
      overlapping.push_back(std::move(incoming));
      for (const auto& b : overlapping) {
        const std::vector<Matrix> bk = block_kraus(b, merged.qubits, n);
        std::vector<Matrix> next;
        for (const Matrix& r : ops)
          for (const Matrix& k : bk) next.push_back(k * r);
        ops = compress_kraus(next);
      }
      merged.kraus = std::move(ops);
    }
    rest.push_back(std::move(merged));
    blocks = std::move(rest);
  }

  PauliDistribution dist{n, std::vector<double>(std::size_t{1} << (2 * n), 0.0)};
  std::vector<std::vector<double>> local;
  for (const auto& b : blocks) local.push_back(block_distribution(b, n));
  QubitSet covered;
  for (const auto& b : blocks) covered = covered.united(b.qubits);
  for (std::size_t idx = 0; idx < dist.q.size(); ++idx) {
    const PauliString p = dist.string_at(idx);
    bool outside_identity = true;
    for (int q = 0; q < n; ++q)
      if (!covered.contains(q) && p.letter(q) != 'I') outside_identity = false;
    if (!outside_identity) continue;
    double prob = 1.0;
    for (std::size_t bi = 0; bi < blocks.size() && prob != 0.0; ++bi)
      prob *= local[bi][PauliDistribution::index_of(restrict_to(p.x, p.z, blocks[bi].qubits, n))];
    dist.q[idx] = prob;
  }
  return dist;
}

}  // namespace noiselab
