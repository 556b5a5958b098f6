#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "noiselab/channels.hpp"
#include "noiselab/measures.hpp"
#include "noiselab/qstate.hpp"
#include "noiselab/relations.hpp"

namespace noiselab {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "noiselab 0.1.0";

/// Builds the state described by a state spec. `seed` is the per-use seed
/// for stochastic families; `path` prefixes field names in ConfigError.
PureState build_state(const Json& spec, std::optional<std::uint64_t> seed, const std::string& path = "state");

/// Builds the channel described by a noise spec on an n-qubit register.
/// Stochastic components draw derive_seed(root, "noise", k) for the k-th
/// component in depth-first order.
QuantumChannel build_noise(const Json& spec, int n, std::optional<std::uint64_t> root_seed,
                           const std::string& path = "noise");

/// "ghz:3", "cluster:line:4", "dicke:4:2", "bitflip_code:plus", ... or raw JSON.
Json parse_state_spec(const std::string& text);
/// "depolarizing:0.1", "correlated_flip:0.2:ZZ", "a+b" for composition
/// (a applied first), ... or raw JSON.
Json parse_noise_spec(const std::string& text);

/// Runs every evaluation of the config and assembles the report
/// {config, results, diagnostics, version}. Deterministic in (config, seed).
Json run_experiment(const Json& config);

Json to_json(const MeasureReport& r);
Json to_json(const ConjectureVerdict& v);
Json to_json(const CensorshipReport& r);

/// One row per result; nested objects flattened with dotted keys, arrays
/// written as compact JSON.
std::string report_to_csv(const Json& report);

}  // namespace noiselab
