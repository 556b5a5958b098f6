#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "noiselab/error.hpp"
#include "noiselab/experiment.hpp"

using noiselab::Json;

namespace {

void emit(const Json& report, const std::string& format, const std::string& out) {
  const std::string body = format == "csv" ? noiselab::report_to_csv(report) : report.dump(2) + "\n";
  if (out.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw noiselab::Error("cannot write " + out);
  f << body;
}

Json read_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw noiselab::ConfigError("config", "cannot open " + path);
  try {
    return Json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw noiselab::ConfigError("config", e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"noiselab: entropy measures and noise/entanglement relations on small qubit registers"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "json";
  app.add_option("--seed", seed, "root seed for every stochastic component");
  app.add_option("--out", out, "write the report to this path instead of stdout");
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"json", "csv"}));

  Json config;
  std::string state, noise, name, family, logical = "plus", config_path;
  std::vector<int> qubits, repetitions;
  int id = 1, truncate = 4, n_min = 2, n_max = 6, register_size = 0;
  double level = 1.0, p1 = 0.0, p2 = 0.0, p3 = 0.0, epsilon = 0.0;
  long n = 0, threshold = 0;
  bool pairs_only = false;

  auto* measure = app.add_subcommand("measure", "evaluate one measure on a state or channel");
  measure->add_option("--name", name, "leak_L, leak_Lprime, ent_pair, el_pair, emergent_entanglement, ent_set, "
                                      "el_set, tilde_ent or weight_distribution")
      ->required();
  measure->add_option("--state", state, "state spec, e.g. ghz:3 or JSON");
  measure->add_option("--noise", noise, "noise spec, e.g. correlated_flip:0.2:ZZ or JSON");
  measure->add_option("--qubits", qubits, "qubit indices")->delimiter(',');
  measure->add_option("--truncate", truncate, "largest subset size for tilde_ent");

  auto* relation = app.add_subcommand("relation", "judge relation 1, 2, 3 or 4 at a satisfaction level");
  relation->add_option("--id", id, "relation id")->check(CLI::Range(1, 4));
  relation->add_option("--level", level, "satisfaction level c");
  relation->add_option("--state", state, "state spec")->required();
  relation->add_option("--noise", noise, "noise spec")->required();
  relation->add_option("--qubits", qubits, "qubit indices")->delimiter(',')->required();

  auto* censorship = app.add_subcommand("censorship", "tilde_ent growth across a state family");
  censorship->add_option("--family", family, "family template, e.g. cluster:line, ghz, dicke")->required();
  censorship->add_option("--n-min", n_min, "smallest register");
  censorship->add_option("--n-max", n_max, "largest register");
  censorship->add_option("--truncate", truncate, "largest subset size");
  censorship->add_flag("--pairs-only", pairs_only, "fit the pair terms alone");

  auto* sync = app.add_subcommand("sync", "classical synchronization tails and channel weight distributions");
  sync->add_option("--p1", p1, "single-bit error probability")->required();
  sync->add_option("--p2", p2, "pair error probability")->required();
  sync->add_option("--n", n, "number of bits")->required();
  sync->add_option("--threshold", threshold, "tail counts more than this many hits")->required();
  sync->add_option("--p3", p3, "target triple probability");
  sync->add_option("--noise", noise, "also report the weight distribution of this channel");
  sync->add_option("--register", register_size, "qubits for --noise");

  auto* qec = app.add_subcommand("qec-demo", "bit-flip code and repetition code under replacement noise");
  qec->add_option("--epsilon", epsilon, "probability that a qubit survives")->required();
  qec->add_option("--logical", logical, "logical input")->check(CLI::IsMember({"zero", "one", "plus", "minus"}));
  qec->add_option("--repetitions", repetitions, "odd repetition lengths")->delimiter(',');

  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("--config", config_path, "JSON config")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      config = read_config(config_path);
      if (out.empty() && config.contains("output") && config.at("output").is_string())
        out = config.at("output").get<std::string>();
    } else {
      Json eval;
      if (*measure) {
        eval = {{"kind", "measure"}, {"name", name}};
        if (!qubits.empty()) eval["qubits"] = qubits;
        if (name == "tilde_ent") eval["truncation"] = truncate;
      } else if (*relation) {
        eval = {{"kind", "relation"}, {"id", id}, {"qubits", qubits}, {"level", level}};
      } else if (*censorship) {
        eval = {{"kind", "censorship"}, {"family", family}, {"n_min", n_min}, {"n_max", n_max},
                {"truncation", truncate}, {"pairs_only", pairs_only}};
      } else if (*sync) {
        eval = {{"kind", "sync"}, {"p1", p1}, {"p2", p2}, {"n", n}, {"threshold", threshold}};
        if (p3 > 0.0) eval["p3"] = p3;
      } else if (*qec) {
        eval = {{"kind", "qec_demo"}, {"epsilon", epsilon}, {"logical", logical}};
        if (!repetitions.empty()) eval["repetitions"] = repetitions;
      }
      if (!state.empty()) config["state"] = noiselab::parse_state_spec(state);
      if (!noise.empty()) {
        config["noise"] = noiselab::parse_noise_spec(noise);
        if (register_size > 0) config["noise"]["n"] = register_size;
      }
      config["evaluations"] = Json::array({eval});
      if (*sync && !noise.empty())
        config["evaluations"].push_back({{"kind", "measure"}, {"name", "weight_distribution"}});
    }
    if (seed) config["seed"] = *seed;
    emit(noiselab::run_experiment(config), format, out);
  } catch (const noiselab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const noiselab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
