#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "arclab/config.hpp"
#include "arclab/error.hpp"
#include "arclab/runner.hpp"

using namespace arclab;
using nlohmann::json;

namespace {

// Flag text for one params key, kept as written until the config is assembled.
const std::map<std::string, std::string> kDescriptions{
    {"arith", "continued fraction, convergents, beta proxy and resonances of alpha"},
    {"lyapunov", "Lyapunov spectrum at strip heights"},
    {"accel", "acceleration of L^k from an epsilon grid"},
    {"rho", "fibered rotation number"},
    {"regime", "uh / subcritical / critical / supercritical classification and radius h"},
    {"det", "log-determinants of dual or Schrodinger sections"},
    {"green", "Green's function entries with Cramer numerators"},
    {"spectrum", "section spectra and the Schrodinger-dual Hausdorff distance"},
    {"avgdet", "phase-averaged (1/n) ln|P_n| on an epsilon grid"},
    {"wedge", "wedge-minor ratios, zero sets, block-minor bounds, numerator bounds"},
    {"localize", "masked decay rate of a dual eigenvector and regular sites"},
    {"reduce", "almost-reducing conjugations at several scales"},
};

struct Flag {
  std::string key;
  std::string text;
};

// Converts a flag string to the JSON type of the default.
json convert(const std::string& key, const std::string& text, const json& def) {
  if (def.is_boolean()) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError("--" + key + " expects true or false");
  }
  if (def.is_string()) return text;
  if (def.is_array()) {
    const auto xs = text.find(':') != std::string::npos ? parse_grid(text) : parse_list(text);
    if (!def.empty() && def[0].is_number_integer()) {
      json out = json::array();
      for (double x : xs) {
        if (x != std::floor(x)) throw ConfigError("--" + key + " expects integers");
        out.push_back(static_cast<long>(x));
      }
      return out;
    }
    return xs;
  }
  const auto xs = parse_list(text);
  if (xs.size() != 1) throw ConfigError("--" + key + " expects one number");
  if (def.is_number_integer()) {
    if (xs[0] != std::floor(xs[0])) throw ConfigError("--" + key + " expects an integer");
    return static_cast<long>(xs[0]);
  }
  return xs[0];
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << body;
}

int execute(const RunConfig& cfg) {
  const RunResult rr = run(cfg);
  const std::string report = rr.report.dump(2) + "\n";
  if (cfg.out.empty()) {
    std::cout << report;
    return 0;
  }
  std::filesystem::create_directories(cfg.out);
  const std::filesystem::path dir(cfg.out);
  write_file(dir / (cfg.command + ".json"), report);
  for (const auto& t : rr.tables) write_file(dir / (t.name + ".csv"), t.render());
  std::cout << report;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasiperiodic cocycles: arithmetic, exponents, determinants, localization and reducibility"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  std::string potential, alpha, surd, energy, energy_grid, out, config_path;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::map<std::string, std::vector<Flag>> flags;
  std::map<std::string, CLI::App*> subs;

  for (const auto& name : commands()) {
    auto* sub = app.add_subcommand(name, kDescriptions.at(name));
    subs[name] = sub;
    sub->add_option("--config", config_path, "RunConfig JSON; flags given here override it");
    sub->add_option("--potential", potential, "JSON list of V_0..V_d, entries numbers or [re, im]");
    sub->add_option("--alpha", alpha, "frequency as a decimal string");
    sub->add_option("--alpha-surd", surd, "frequency (a + b*sqrt(c))/den as a,b,c[,den]");
    sub->add_option("--energy", energy, "energy or comma-separated energies");
    sub->add_option("--energy-grid", energy_grid, "a:b:n");
    sub->add_option("--seed", seed, "64-bit seed");
    sub->add_option("--threads", threads, "worker threads");
    sub->add_option("--out", out, "output directory for JSON and CSV reports");
    const json defaults = default_params(name);
    for (const auto& [key, def] : defaults.items()) {
      std::string flag = key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      sub->add_option_function<std::string>(
          "--" + flag, [&flags, name, key = key](const std::string& v) { flags[name].push_back({key, v}); },
          "default " + def.dump());
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kConfig);
  }

  try {
    std::string name;
    for (const auto& [n, sub] : subs)
      if (sub->parsed()) name = n;

    json j = json::object();
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) throw ConfigError("cannot read " + config_path);
      try {
        j = json::parse(is);
      } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config file: ") + e.what());
      }
      if (j.contains("command") && j["command"] != name) throw ConfigError("config is for another command");
    }
    j["command"] = name;
    if (!potential.empty()) {
      try {
        j["potential"] = json::parse(potential);
      } catch (const json::exception&) {
        throw ConfigError("--potential must be a JSON list");
      }
    }
    if (!alpha.empty()) j["alpha"] = alpha;
    if (!surd.empty()) {
      json s = json::array();
      for (double x : parse_list(surd)) s.push_back(static_cast<long>(x));
      j["alpha"] = {{"surd", s}};
    }
    if (!energy.empty()) j["energies"] = parse_list(energy);
    if (!energy_grid.empty()) j["energies"] = parse_grid(energy_grid);
    if (subs[name]->count("--seed")) j["seed"] = seed;
    if (subs[name]->count("--threads")) j["threads"] = threads;
    if (!out.empty()) j["out"] = out;
    const json defaults = default_params(name);
    json params = j.value("params", json::object());
    for (const auto& f : flags[name]) params[f.key] = convert(f.key, f.text, defaults.at(f.key));
    j["params"] = params;

    return execute(RunConfig::from_json(j));
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kNumeric);
  }
}
