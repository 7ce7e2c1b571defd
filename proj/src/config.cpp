#include "arclab/config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "arclab/error.hpp"

#ifndef ARCLAB_VERSION
#define ARCLAB_VERSION "unknown"
#endif

namespace arclab {

using nlohmann::json;

namespace {

const json& defaults_table() {
  static const json table = {
      {"arith", {{"depth", 20}, {"theta", 0.0}, {"eps0", 0.3}, {"horizon", 1000}}},
      {"lyapunov", {{"eps_grid", {0.0}}, {"iters", 10000}, {"samples", 64}, {"dual", false}}},
      {"accel",
       {{"eps_grid", {0.01, 0.02, 0.03, 0.04, 0.05}}, {"iters", 5000}, {"samples", 32}, {"k", 1}, {"dual", false}}},
      {"rho", {{"iters", 200000}}},
      {"regime",
       {{"iters", 5000},
        {"samples", 32},
        {"eps_grid", {0.01, 0.02, 0.03, 0.04, 0.05}},
        {"h_grid", {0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.5}},
        {"sites", 500},
        {"phases", 4}}},
      {"det", {{"theta", 0.0}, {"eps", 0.0}, {"n", {10, 20, 40, 80}}, {"schrodinger", false}}},
      {"green", {{"theta", 0.0}, {"interval", "0:20"}, {"schrodinger", false}}},
      {"spectrum", {{"sites", 500}, {"phases", 4}, {"bulk_only", true}}},
      {"avgdet", {{"n", 200}, {"eps_grid", {0.0, 0.01, 0.02, 0.03, 0.04, 0.05}}, {"grid", 128}}},
      {"wedge",
       {{"check", "th1"},
        {"draws", 20},
        {"d", 2},
        {"k", 20},
        {"k0", 5},
        {"samples", 100},
        {"theta", 0.21},
        {"eps", 0.1},
        {"length", 120}}},
      {"localize",
       {{"theta", 0.2137},
        {"sites", 2000},
        {"c0", 4.0},
        {"eta", 0.1},
        {"eps0", 0.3},
        {"energy_index", nullptr},
        {"gamma", nullptr},
        {"regular_m", 60},
        {"regular_xi", 0.8}}},
      {"reduce",
       {{"radii", {0.05}},
        {"scales", {34, 55, 89}},
        {"c0", 4.0},
        {"eps0", 0.3},
        {"eta", 0.01},
        {"sites", 400},
        {"theta_hint", nullptr},
        {"horizon", 1000},
        {"dump", ""}}},
  };
  return table;
}

void reject_unknown(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

bool same_kind(const json& a, const json& b) {
  if (a.is_null() || b.is_null()) return true;
  if (a.is_number() && b.is_number()) return true;
  return a.type() == b.type();
}

}  // namespace

ExtReal AlphaSpec::value() const {
  if (surd) return quadratic_surd((*surd)[0], (*surd)[1], (*surd)[2], (*surd)[3]);
  return parse_decimal(decimal);
}

TrigPolynomial RunConfig::trig_polynomial() const { return TrigPolynomial::from_nonnegative(potential); }

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"arith", "lyapunov", "accel", "rho",      "regime", "det",
                                              "green", "spectrum", "avgdet", "wedge", "localize", "reduce"};
  return names;
}

json default_params(const std::string& command) {
  const auto& t = defaults_table();
  if (!t.contains(command)) throw ConfigError("unknown command '" + command + "'");
  return t.at(command);
}

json merge_params(const std::string& command, const json& given) {
  json out = default_params(command);
  if (given.is_null()) return out;
  if (!given.is_object()) throw ConfigError("params must be an object");
  for (const auto& [key, value] : given.items()) {
    if (!out.contains(key)) throw ConfigError("unknown key '" + key + "' in params of " + command);
    if (!same_kind(out[key], value)) throw ConfigError("wrong type for params." + key);
    out[key] = value;
  }
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw ConfigError("grid must be a:b:n, got '" + text + "'");
  double a = 0.0, b = 0.0;
  long n = 0;
  try {
    std::size_t used = 0;
    a = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument(parts[0]);
    b = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
    n = std::stol(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument(parts[2]);
  } catch (const std::logic_error&) {
    throw ConfigError("grid must be a:b:n, got '" + text + "'");
  }
  if (n < 1) throw ConfigError("grid needs at least one point");
  std::vector<double> out;
  for (long i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  return out;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(p, &used));
      if (used != p.size()) throw std::invalid_argument(p);
    } catch (const std::logic_error&) {
      throw ConfigError("not a number list: '" + text + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty number list");
  return out;
}

std::vector<cplx> parse_potential(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("potential must be a non-empty list of V_0..V_d");
  std::vector<cplx> v;
  for (const auto& x : j) {
    if (x.is_number()) {
      v.emplace_back(x.get<double>(), 0.0);
    } else if (x.is_array() && x.size() == 2 && x[0].is_number() && x[1].is_number()) {
      v.emplace_back(x[0].get<double>(), x[1].get<double>());
    } else {
      throw ConfigError("potential entries must be numbers or [re, im] pairs");
    }
  }
  return v;
}

std::string version_string() { return ARCLAB_VERSION; }

json RunConfig::to_json() const {
  json pot = json::array();
  for (const auto& c : potential) pot.push_back({c.real(), c.imag()});
  json a;
  if (alpha.surd) {
    a = {{"surd", *alpha.surd}};
  } else {
    a = alpha.decimal;
  }
  return {{"command", command},   {"potential", pot}, {"alpha", a},         {"energies", energies},
          {"params", params},     {"seed", seed},     {"threads", threads}, {"out", out}};
}

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j, {"command", "potential", "alpha", "energies", "params", "seed", "threads", "out"}, "config");
  RunConfig c;
  try {
    if (!j.contains("command")) throw ConfigError("config needs a command");
    c.command = j.at("command").get<std::string>();
    if (std::find(commands().begin(), commands().end(), c.command) == commands().end()) {
      throw ConfigError("unknown command '" + c.command + "'");
    }
    if (j.contains("potential")) c.potential = parse_potential(j.at("potential"));
    if (j.contains("alpha")) {
      const auto& a = j.at("alpha");
      if (a.is_string()) {
        c.alpha = {a.get<std::string>(), std::nullopt};
        parse_decimal(c.alpha.decimal);
      } else if (a.is_object()) {
        reject_unknown(a, {"surd"}, "alpha");
        const auto s = a.at("surd").get<std::vector<long>>();
        if (s.size() != 3 && s.size() != 4) throw ConfigError("surd must be [a, b, c] or [a, b, c, den]");
        c.alpha = {"", std::array<long, 4>{s[0], s[1], s[2], s.size() == 4 ? s[3] : 1}};
        c.alpha.value();
      } else {
        throw ConfigError("alpha must be a decimal string or {\"surd\": [...]}");
      }
    }
    if (j.contains("energies")) c.energies = j.at("energies").get<std::vector<double>>();
    c.params = merge_params(c.command, j.value("params", json::object()));
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
      c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("threads")) {
      if (!j.at("threads").is_number_unsigned() || j.at("threads").get<std::uint64_t>() == 0) {
        throw ConfigError("threads must be a positive integer");
      }
      c.threads = j.at("threads").get<unsigned>();
    }
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  c.trig_polynomial();
  return c;
}

}  // namespace arclab
