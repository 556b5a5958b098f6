#include "noiselab/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <utility>
#include <vector>

#include "noiselab/error.hpp"
#include "noiselab/graph.hpp"
#include "noiselab/seed.hpp"
#include "noiselab/states.hpp"
#include "noiselab/sync.hpp"

namespace noiselab {

namespace {

std::string field(const std::string& path, const std::string& key) { return path + "." + key; }

void require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
}

const Json& member(const Json& j, const std::string& key, const std::string& path) {
  require_object(j, path);
  if (!j.contains(key)) throw ConfigError(field(path, key), "missing");
  return j.at(key);
}

double number(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = member(j, key, path);
  if (!v.is_number()) throw ConfigError(field(path, key), "expected a number");
  return v.get<double>();
}

double number_or(const Json& j, const std::string& key, const std::string& path, double fallback) {
  return j.contains(key) ? number(j, key, path) : fallback;
}

long integer(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = member(j, key, path);
  if (!v.is_number_integer()) throw ConfigError(field(path, key), "expected an integer");
  return v.get<long>();
}

long integer_or(const Json& j, const std::string& key, const std::string& path, long fallback) {
  return j.contains(key) ? integer(j, key, path) : fallback;
}

std::string text(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = member(j, key, path);
  if (!v.is_string()) throw ConfigError(field(path, key), "expected a string");
  return v.get<std::string>();
}

std::string text_or(const Json& j, const std::string& key, const std::string& path, const std::string& fallback) {
  return j.contains(key) ? text(j, key, path) : fallback;
}

bool flag_or(const Json& j, const std::string& key, const std::string& path, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) throw ConfigError(field(path, key), "expected true or false");
  return j.at(key).get<bool>();
}

std::vector<int> index_list(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = member(j, key, path);
  if (!v.is_array()) throw ConfigError(field(path, key), "expected an array of qubit indices");
  std::vector<int> out;
  for (const Json& e : v) {
    if (!e.is_number_integer()) throw ConfigError(field(path, key), "expected integer qubit indices");
    out.push_back(e.get<int>());
  }
  return out;
}

cplx amplitude(const Json& v, const std::string& path) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError(path, "expected a number or [re, im]");
}

std::pair<cplx, cplx> logical_amplitudes(const Json& spec, const std::string& path) {
  if (spec.contains("a") || spec.contains("b"))
    return {amplitude(member(spec, "a", path), field(path, "a")), amplitude(member(spec, "b", path), field(path, "b"))};
  const std::string name = text_or(spec, "logical", path, "zero");
  const double h = 1.0 / std::sqrt(2.0);
  if (name == "zero") return {1.0, 0.0};
  if (name == "one") return {0.0, 1.0};
  if (name == "plus") return {h, h};
  if (name == "minus") return {h, -h};
  throw ConfigError(field(path, "logical"), "unknown logical state '" + name + "'");
}

Graph graph_from(const Json& spec, const std::string& path, std::optional<int> n_hint) {
  Graph g;
  if (spec.contains("edges")) {
    g.n = static_cast<int>(integer(spec, "n", path));
    const Json& edges = spec.at("edges");
    if (!edges.is_array()) throw ConfigError(field(path, "edges"), "expected an array of pairs");
    for (const Json& e : edges) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
        throw ConfigError(field(path, "edges"), "expected pairs of vertex indices");
      g.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    try {
      g.check();
    } catch (const ArgumentError& ex) {
      throw ConfigError(field(path, "edges"), ex.what());
    }
    return g;
  }
  const std::string kind = text_or(spec, "graph", path, "line");
  if (kind == "grid")
    return Graph::grid(static_cast<int>(integer(spec, "rows", path)), static_cast<int>(integer(spec, "cols", path)));
  const int n = spec.contains("n") || !n_hint ? static_cast<int>(integer(spec, "n", path)) : *n_hint;
  if (n < 1) throw ConfigError(field(path, "n"), "must be positive");
  if (kind == "line") return Graph::line(n);
  if (kind == "ring") return Graph::ring(n);
  if (kind == "empty") return Graph::empty(n);
  throw ConfigError(field(path, "graph"), "unknown graph '" + kind + "'");
}

std::uint64_t need_seed(std::optional<std::uint64_t> seed, const std::string& user) {
  if (!seed) throw ConfigError("seed", "required by " + user);
  return *seed;
}

PureState build_state_unchecked(const Json& spec, std::optional<std::uint64_t> seed, const std::string& path) {
  const std::string family = text(spec, "family", path);
  auto n = [&] { return static_cast<int>(integer(spec, "n", path)); };
  if (family == "plus_all") return plus_all(n());
  if (family == "product") {
    if (!spec.contains("angles")) return zero_state(n());
    const Json& angles = spec.at("angles");
    std::vector<std::pair<double, double>> bloch;
    if (!angles.is_array()) throw ConfigError(field(path, "angles"), "expected [[theta, phi], ...]");
    for (const Json& a : angles) {
      if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number())
        throw ConfigError(field(path, "angles"), "expected [[theta, phi], ...]");
      bloch.emplace_back(a[0].get<double>(), a[1].get<double>());
    }
    return product_state(bloch);
  }
  if (family == "bell") return bell();
  if (family == "ghz") return ghz(n());
  if (family == "cluster") return cluster_state(graph_from(spec, path, std::nullopt));
  if (family == "dicke") {
    const int total = n();
    return dicke_state(total, static_cast<int>(integer_or(spec, "excitations", path, total / 2)));
  }
  if (family == "random_circuit")
    return random_circuit_state(n(), static_cast<int>(integer(spec, "depth", path)),
                                need_seed(seed, "the random_circuit state family"));
  if (family == "bitflip_code") {
    const auto [a, b] = logical_amplitudes(spec, path);
    return bitflip_code_encode(a, b);
  }
  throw ConfigError(field(path, "family"), "unknown state family '" + family + "'");
}

QuantumChannel build_noise_rec(const Json& spec, int n, std::optional<std::uint64_t> root, const std::string& path,
                               std::uint64_t& component) {
  const std::uint64_t index = component++;
  const std::string type = text(spec, "type", path);
  if (spec.contains("n") && integer(spec, "n", path) != n)
    throw ConfigError(field(path, "n"), "register has " + std::to_string(n) + " qubits");
  auto stochastic_seed = [&](const std::string& user) {
    return derive_seed(need_seed(root, user), "noise", index);
  };
  if (type == "identity") return QuantumChannel::identity(n);
  if (type == "depolarizing") {
    const double p = number(spec, "p", path);
    if (spec.contains("qubit")) return build_depolarizing(p, static_cast<int>(integer(spec, "qubit", path)), n);
    return build_product_depolarizing(p, n);
  }
  if (type == "dephasing") return build_product_dephasing(number(spec, "lambda", path), n);
  if (type == "correlated_flip") {
    const std::string label = text(spec, "pauli", path);
    if (static_cast<int>(label.size()) != n)
      throw ConfigError(field(path, "pauli"), "needs one letter per qubit (" + std::to_string(n) + ")");
    return build_correlated_flip(number(spec, "epsilon", path), PauliString::parse(label));
  }
  if (type == "pairwise_correlated") {
    const std::string basis = text_or(spec, "basis", path, "Z");
    if (basis.size() != 1) throw ConfigError(field(path, "basis"), "expected one of X, Y, Z");
    return build_pairwise_correlated(number(spec, "p1", path), number(spec, "p2", path), basis[0], n);
  }
  if (type == "random_unitary")
    return build_random_unitary_noise(n, number(spec, "epsilon", path), stochastic_seed("random_unitary noise"));
  if (type == "cluster") {
    const Graph g = graph_from(spec, path, n);
    if (g.n != n) throw ConfigError(field(path, "graph"), "graph size differs from the register");
    return build_cluster_noise(g, number(spec, "epsilon", path), stochastic_seed("cluster noise"));
  }
  if (type == "replacement") return build_replacement_noise(number(spec, "epsilon", path), n);
  if (type == "compose") {
    const Json& parts = member(spec, "channels", path);
    if (!parts.is_array() || parts.empty()) throw ConfigError(field(path, "channels"), "expected a non-empty array");
    QuantumChannel out = QuantumChannel::identity(n);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const std::string sub = field(path, "channels") + "[" + std::to_string(i) + "]";
      require_object(parts[i], sub);
      out = compose(build_noise_rec(parts[i], n, root, sub, component), out);
    }
    return out;
  }
  throw ConfigError(field(path, "type"), "unknown noise type '" + type + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& path) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw ConfigError(path, "cannot parse number '" + s + "'");
  return v;
}

long parse_long(const std::string& s, const std::string& path) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0') throw ConfigError(path, "cannot parse integer '" + s + "'");
  return v;
}

Json parse_noise_part(const std::string& part) {
  const auto t = split(part, ':');
  const std::string& type = t[0];
  auto arg = [&](std::size_t i) -> const std::string& {
    if (i >= t.size()) throw ConfigError("noise", "'" + part + "' is missing arguments");
    return t[i];
  };
  Json j;
  j["type"] = type;
  if (type == "identity") return j;
  if (type == "depolarizing") {
    j["p"] = parse_double(arg(1), "noise.p");
    if (t.size() > 2) j["qubit"] = parse_long(t[2], "noise.qubit");
  } else if (type == "dephasing") {
    j["lambda"] = parse_double(arg(1), "noise.lambda");
  } else if (type == "correlated_flip") {
    j["epsilon"] = parse_double(arg(1), "noise.epsilon");
    j["pauli"] = arg(2);
  } else if (type == "pairwise_correlated") {
    j["p1"] = parse_double(arg(1), "noise.p1");
    j["p2"] = parse_double(arg(2), "noise.p2");
    if (t.size() > 3) j["basis"] = t[3];
  } else if (type == "random_unitary" || type == "replacement") {
    j["epsilon"] = parse_double(arg(1), "noise.epsilon");
  } else if (type == "cluster") {
    j["epsilon"] = parse_double(arg(1), "noise.epsilon");
    if (t.size() > 2) j["graph"] = t[2];
  } else {
    throw ConfigError("noise.type", "unknown noise type '" + type + "'");
  }
  return j;
}

Json num(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

Json num_map(const std::map<std::string, double>& m) {
  Json j = Json::object();
  for (const auto& [k, v] : m) j[k] = num(v);
  return j;
}

Json qubit_json(const QubitSet& qs) { return qs.indices(); }

MaxEntOptions maxent_options(const Json& config) {
  MaxEntOptions o;
  if (!config.contains("maxent")) return o;
  const Json& m = config.at("maxent");
  require_object(m, "maxent");
  o.tol = number_or(m, "tol", "maxent", o.tol);
  o.max_iter = static_cast<int>(integer_or(m, "max_iter", "maxent", o.max_iter));
  return o;
}

DecompositionOptions decomposition_options(const Json& config) {
  DecompositionOptions o;
  if (!config.contains("decomposition")) return o;
  const Json& d = config.at("decomposition");
  require_object(d, "decomposition");
  o.restarts = static_cast<int>(integer_or(d, "restarts", "decomposition", o.restarts));
  o.max_sweeps = static_cast<int>(integer_or(d, "max_sweeps", "decomposition", o.max_sweeps));
  o.cap = static_cast<int>(integer_or(d, "cap", "decomposition", o.cap));
  return o;
}

struct Context {
  std::optional<std::uint64_t> seed;
  std::optional<DensityMatrix> state;
  std::optional<QuantumChannel> noise;
  MaxEntOptions maxent;
  DecompositionOptions budget;
};

const DensityMatrix& need_state(const Context& ctx, const std::string& path) {
  if (!ctx.state) throw ConfigError("state", "required by " + path);
  return *ctx.state;
}

const QuantumChannel& need_noise(const Context& ctx, const std::string& path) {
  if (!ctx.noise) throw ConfigError("noise", "required by " + path);
  return *ctx.noise;
}

DecompositionOptions seeded_budget(const Context& ctx, std::size_t index, const std::string& path) {
  DecompositionOptions b = ctx.budget;
  b.seed = derive_seed(need_seed(ctx.seed, path), "evaluation", index);
  return b;
}

std::pair<int, int> pair_of(const Json& eval, const std::string& path) {
  const auto q = index_list(eval, "qubits", path);
  if (q.size() != 2) throw ConfigError(field(path, "qubits"), "expected exactly two qubits");
  return {q[0], q[1]};
}

Json eval_measure(const Json& eval, const Context& ctx, std::size_t index, const std::string& path) {
  const std::string name = text(eval, "name", path);
  if (name == "weight_distribution") {
    const WeightDistribution w = weight_distribution(need_noise(ctx, path));
    Json j;
    j["kind"] = "measure";
    j["measure"] = name;
    j["value"] = num(w.conditional_mean());
    Json weights = Json::array();
    for (double x : w.w) weights.push_back(num(x));
    j["weights"] = weights;
    j["diagnostics"] = {{"mean", num(w.mean())}, {"conditional_mean", num(w.conditional_mean())}};
    return j;
  }
  MeasureReport r;
  if (name == "leak_L" || name == "leak_Lprime") {
    const QubitSet qs(index_list(eval, "qubits", path));
    if (name == "leak_L") {
      r.measure = name;
      r.value = leak_L(need_noise(ctx, path), qs);
      r.qubit_sets = {qs};
    } else {
      r = leak_Lprime(need_noise(ctx, path), qs);
    }
  } else if (name == "ent_pair" || name == "el_pair") {
    const auto [a, b] = pair_of(eval, path);
    r.measure = name;
    r.value = name == "ent_pair" ? ent_pair(need_state(ctx, path), a, b) : el_pair(need_noise(ctx, path), a, b);
    r.qubit_sets = {QubitSet{a, b}};
  } else if (name == "emergent_entanglement") {
    const auto [a, b] = pair_of(eval, path);
    r = emergent_entanglement(need_state(ctx, path), a, b, seeded_budget(ctx, index, "emergent_entanglement"));
  } else if (name == "ent_set") {
    r = ent_set(need_state(ctx, path), QubitSet(index_list(eval, "qubits", path)), ctx.maxent);
  } else if (name == "el_set") {
    r = el_set(need_noise(ctx, path), QubitSet(index_list(eval, "qubits", path)), ctx.maxent);
  } else if (name == "tilde_ent") {
    r = tilde_ent(need_state(ctx, path), static_cast<int>(integer_or(eval, "truncation", path, 4)), ctx.maxent);
  } else {
    throw ConfigError(field(path, "name"), "unknown measure '" + name + "'");
  }
  return to_json(r);
}

Json eval_relation(const Json& eval, const Context& ctx, std::size_t index, const std::string& path) {
  const long id = integer(eval, "id", path);
  const double level = number_or(eval, "level", path, 1.0);
  const DensityMatrix& rho = need_state(ctx, path);
  const QuantumChannel& channel = need_noise(ctx, path);
  if (id == 1 || id == 2) {
    const auto [a, b] = pair_of(eval, path);
    if (id == 1) return to_json(eval_relation1(rho, channel, a, b, level));
    return to_json(eval_relation2(rho, channel, a, b, level, seeded_budget(ctx, index, "relation 2")));
  }
  if (id == 3 || id == 4) {
    const QubitSet qs(index_list(eval, "qubits", path));
    if (id == 3) return to_json(eval_relation34(rho, channel, qs, level, SetMode::marginal, ctx.maxent));
    return to_json(eval_relation34(rho, channel, qs, level, SetMode::decomposed, ctx.maxent,
                                   seeded_budget(ctx, index, "relation 4")));
  }
  throw ConfigError(field(path, "id"), "relation id must be 1, 2, 3 or 4");
}

Json eval_censorship(const Json& eval, const Context& ctx, const std::string& path) {
  const Json& family_field = member(eval, "family", path);
  const Json family = family_field.is_string() ? parse_state_spec(family_field.get<std::string>()) : family_field;
  require_object(family, field(path, "family"));
  const std::string name = text(family, "family", field(path, "family"));
  const int n_min = static_cast<int>(integer(eval, "n_min", path));
  const int n_max = static_cast<int>(integer(eval, "n_max", path));
  const int truncation = static_cast<int>(integer_or(eval, "truncation", path, 4));
  const bool pairs_only = flag_or(eval, "pairs_only", path, false);
  std::optional<std::uint64_t> root;
  if (name == "random_circuit") root = need_seed(ctx.seed, "the random_circuit state family");
  const std::string fpath = field(path, "family");
  const auto make = [&](int n) {
    Json spec = family;
    spec["n"] = n;
    std::optional<std::uint64_t> s;
    if (root) s = derive_seed(*root, "censorship-state", static_cast<std::uint64_t>(n));
    return build_state(spec, s, fpath);
  };
  Json j = to_json(censorship_scan(make, name, n_min, n_max, truncation, ctx.maxent, pairs_only));
  return j;
}

Json eval_sync(const Json& eval, const std::string& path) {
  const double p1 = number(eval, "p1", path);
  const double p2 = number(eval, "p2", path);
  const long n = integer(eval, "n", path);
  const long k = integer(eval, "threshold", path);
  const ClassicalMixtureModel model = fit_mixture(p1, p2);
  Json j;
  j["kind"] = "sync";
  j["p1"] = num(p1);
  j["p2"] = num(p2);
  j["model"] = {{"pi", num(model.pi)}, {"h", num(model.h)}};
  j["n"] = n;
  j["threshold"] = k;
  j["tail_fitted"] = num(tail_probability(model, n, k));
  j["tail_independent"] = num(binomial_upper_tail(n, p1, k));
  j["expected_hits"] = num(static_cast<double>(n) * p1);
  const TripleMomentReport t = triple_moment(model, number_or(eval, "p3", path, 0.0));
  j["triple"] = {{"implied_p3", num(t.implied_p3)},
                 {"independent_p3", num(t.independent_p3)},
                 {"ratio", num(t.ratio)},
                 {"target_p3", num(t.target_p3)},
                 {"target_ratio", num(t.target_ratio)}};
  return j;
}

Json eval_qec(const Json& eval, const std::string& path) {
  const double eps = number(eval, "epsilon", path);
  const Json spec = eval.contains("logical") && eval.at("logical").is_object() ? eval.at("logical") : eval;
  const auto [a, b] = logical_amplitudes(spec, path);
  const RandomizationDemo d = quantum_randomization_demo(eps, a, b);
  Json j;
  j["kind"] = "qec_demo";
  j["epsilon"] = num(eps);
  j["logical"] = eval.contains("logical") ? eval.at("logical") : Json("zero");
  j["decoded_fidelity"] = num(d.decoded_fidelity);
  j["majority_success"] = num(d.majority_success);
  std::vector<long> sizes{1, 3, 5, 11, 101, 1001};
  if (eval.contains("repetitions")) {
    sizes.clear();
    for (int m : index_list(eval, "repetitions", path)) sizes.push_back(m);
  }
  Json rep = Json::array();
  for (long m : sizes) rep.push_back({{"m", m}, {"majority_error", num(repetition_majority_error(eps, m))}});
  j["repetition"] = rep;
  return j;
}

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    return;
  }
  std::string cell;
  if (j.is_string()) cell = j.get<std::string>();
  else if (!j.is_null()) cell = j.dump();
  out.emplace_back(prefix, cell);
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q.push_back('"');
    q.push_back(c);
  }
  return q + "\"";
}

}  // namespace

PureState build_state(const Json& spec, std::optional<std::uint64_t> seed, const std::string& path) {
  require_object(spec, path);
  try {
    return build_state_unchecked(spec, seed, path);
  } catch (const ArgumentError& e) {
    throw ConfigError(path, e.what());
  } catch (const SizeError& e) {
    throw ConfigError(path, e.what());
  }
}

QuantumChannel build_noise(const Json& spec, int n, std::optional<std::uint64_t> root_seed, const std::string& path) {
  require_object(spec, path);
  std::uint64_t component = 0;
  try {
    return build_noise_rec(spec, n, root_seed, path, component);
  } catch (const ArgumentError& e) {
    throw ConfigError(path, e.what());
  } catch (const SizeError& e) {
    throw ConfigError(path, e.what());
  }
}

Json parse_state_spec(const std::string& s) {
  if (!s.empty() && s.front() == '{') {
    try {
      return Json::parse(s);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("state", e.what());
    }
  }
  const auto t = split(s, ':');
  Json j;
  j["family"] = t[0];
  const std::string& family = t[0];
  if (family == "bell") return j;
  if (family == "ghz" || family == "plus_all" || family == "product") {
    if (t.size() > 1) j["n"] = parse_long(t[1], "state.n");
  } else if (family == "cluster") {
    if (t.size() > 1) j["graph"] = t[1];
    if (t.size() > 2) {
      if (t[1] == "grid") {
        const auto rc = split(t[2], 'x');
        if (rc.size() != 2) throw ConfigError("state", "grid size must look like 2x3");
        j["rows"] = parse_long(rc[0], "state.rows");
        j["cols"] = parse_long(rc[1], "state.cols");
      } else {
        j["n"] = parse_long(t[2], "state.n");
      }
    }
  } else if (family == "dicke") {
    if (t.size() > 1) j["n"] = parse_long(t[1], "state.n");
    if (t.size() > 2) j["excitations"] = parse_long(t[2], "state.excitations");
  } else if (family == "random_circuit") {
    if (t.size() > 1) j["n"] = parse_long(t[1], "state.n");
    j["depth"] = t.size() > 2 ? parse_long(t[2], "state.depth") : 4;
  } else if (family == "bitflip_code") {
    j["logical"] = t.size() > 1 ? t[1] : "zero";
  } else {
    throw ConfigError("state.family", "unknown state family '" + family + "'");
  }
  return j;
}

Json parse_noise_spec(const std::string& s) {
  if (!s.empty() && s.front() == '{') {
    try {
      return Json::parse(s);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("noise", e.what());
    }
  }
  const auto parts = split(s, '+');
  if (parts.size() == 1) return parse_noise_part(parts[0]);
  Json j;
  j["type"] = "compose";
  j["channels"] = Json::array();
  for (const auto& p : parts) j["channels"].push_back(parse_noise_part(p));
  return j;
}

Json to_json(const MeasureReport& r) {
  Json j;
  j["kind"] = "measure";
  j["measure"] = r.measure;
  Json sets = Json::array();
  for (const auto& qs : r.qubit_sets) sets.push_back(qubit_json(qs));
  j["qubit_sets"] = sets;
  j["value"] = num(r.value);
  j["diagnostics"] = num_map(r.diagnostics);
  if (!r.notes.empty()) j["notes"] = r.notes;
  if (!r.terms.empty()) {
    Json terms = Json::array();
    for (const auto& [qs, v] : r.terms) terms.push_back({{"qubits", qubit_json(qs)}, {"value", num(v)}});
    j["terms"] = terms;
  }
  if (r.certificate) {
    Json members = Json::array();
    for (std::size_t k = 0; k < r.certificate->weights.size(); ++k) {
      Json amps = Json::array();
      const Vector& v = r.certificate->states[k].amplitudes();
      for (Eigen::Index i = 0; i < v.size(); ++i) amps.push_back({num(v(i).real()), num(v(i).imag())});
      members.push_back({{"weight", num(r.certificate->weights[k])}, {"amplitudes", amps}});
    }
    j["certificate"] = members;
  }
  return j;
}

Json to_json(const ConjectureVerdict& v) {
  Json j;
  j["kind"] = "relation";
  j["relation"] = v.relation;
  if (!v.mode.empty()) j["mode"] = v.mode;
  j["qubits"] = v.qubits;
  j["el"] = num(v.el);
  j["ent_term"] = num(v.ent_term);
  Json leaks = Json::array();
  for (double l : v.leaks) leaks.push_back(num(l));
  j["leaks"] = leaks;
  j["reference_leak"] = num(v.reference_leak);
  j["k_hat"] = num(v.k_hat);
  j["k_hat_normalized"] = num(v.k_hat_normalized);
  j["level"] = num(v.level);
  j["verdict"] = to_string(v.verdict);
  j["conditional"] = v.conditional;
  j["diagnostics"] = num_map(v.diagnostics);
  if (!v.notes.empty()) j["notes"] = v.notes;
  return j;
}

Json to_json(const CensorshipReport& r) {
  Json j;
  j["kind"] = "censorship";
  j["family"] = r.family;
  j["truncation"] = r.truncation;
  j["pairs_only"] = r.pairs_only;
  Json points = Json::array();
  for (const auto& p : r.points)
    points.push_back({{"n", p.n},
                      {"value", num(p.value)},
                      {"without_full_set", num(p.without_full_set)},
                      {"pair_terms", num(p.pair_terms)},
                      {"max_residual", num(p.report.diagnostics.at("max_residual"))}});
  j["points"] = points;
  j["exponent"] = num(r.exponent);
  j["classification"] = r.classification;
  return j;
}

Json run_experiment(const Json& input) {
  require_object(input, "config");
  Json config = input;
  Context ctx;
  if (config.contains("seed")) {
    const Json& s = config.at("seed");
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0))
      throw ConfigError("seed", "expected a non-negative integer");
    ctx.seed = s.get<std::uint64_t>();
  }
  ctx.maxent = maxent_options(config);
  ctx.budget = decomposition_options(config);
  config["maxent"] = {{"tol", num(ctx.maxent.tol)}, {"max_iter", ctx.maxent.max_iter}};
  config["decomposition"] = {
      {"restarts", ctx.budget.restarts}, {"max_sweeps", ctx.budget.max_sweeps}, {"cap", ctx.budget.cap}};

  Json diagnostics = Json::object();
  int n = -1;
  if (config.contains("state")) {
    if (config.at("state").is_string()) config["state"] = parse_state_spec(config.at("state").get<std::string>());
    std::optional<std::uint64_t> s;
    if (ctx.seed) s = derive_seed(*ctx.seed, "state", 0);
    ctx.state = build_state(config.at("state"), s, "state").density();
    n = ctx.state->qubits();
  }
  if (config.contains("noise")) {
    if (config.at("noise").is_string()) config["noise"] = parse_noise_spec(config.at("noise").get<std::string>());
    const Json& spec = config.at("noise");
    require_object(spec, "noise");
    if (n < 0) n = static_cast<int>(integer(spec, "n", "noise"));
    ctx.noise = build_noise(spec, n, ctx.seed, "noise");
    diagnostics["noise_factors"] = ctx.noise->factors().size();
  }
  diagnostics["qubits"] = n >= 0 ? Json(n) : Json(nullptr);

  const Json& evals = member(config, "evaluations", "config");
  if (!evals.is_array()) throw ConfigError("evaluations", "expected an array");
  Json results = Json::array();
  for (std::size_t i = 0; i < evals.size(); ++i) {
    const std::string path = "evaluations[" + std::to_string(i) + "]";
    const Json& eval = evals[i];
    const std::string kind = text(eval, "kind", path);
    try {
      if (kind == "measure") results.push_back(eval_measure(eval, ctx, i, path));
      else if (kind == "relation") results.push_back(eval_relation(eval, ctx, i, path));
      else if (kind == "censorship") results.push_back(eval_censorship(eval, ctx, path));
      else if (kind == "sync") results.push_back(eval_sync(eval, path));
      else if (kind == "qec_demo") results.push_back(eval_qec(eval, path));
      else throw ConfigError(field(path, "kind"), "unknown evaluation kind '" + kind + "'");
    } catch (const ArgumentError& e) {
      throw ConfigError(path, e.what());
    }
  }
  diagnostics["evaluations"] = results.size();

  Json report;
  report["config"] = config;
  report["results"] = results;
  report["diagnostics"] = diagnostics;
  report["version"] = kVersion;
  return report;
}

std::string report_to_csv(const Json& report) {
  std::vector<std::string> header;
  std::vector<std::vector<std::pair<std::string, std::string>>> rows;
  for (const Json& r : report.at("results")) {
    std::vector<std::pair<std::string, std::string>> row;
    flatten(r, "", row);
    for (const auto& [k, v] : row)
      if (std::find(header.begin(), header.end(), k) == header.end()) header.push_back(k);
    rows.push_back(std::move(row));
  }
  std::ostringstream out;
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << csv_cell(header[c]);
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c) out << ",";
      for (const auto& [k, v] : row)
        if (k == header[c]) {
          out << csv_cell(v);
          break;
        }
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace noiselab
