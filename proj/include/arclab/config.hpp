#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "arclab/arithmetic.hpp"
#include "arclab/common.hpp"
#include "arclab/trig_polynomial.hpp"

namespace arclab {

/// Frequency as a decimal string, or (a + b√c)/den from a surd tag.
struct AlphaSpec {
  std::string decimal;
  std::optional<std::array<long, 4>> surd;

  ExtReal value() const;
  bool operator==(const AlphaSpec&) const = default;
};

/// Everything that determines a run. Parameters missing from `params` are filled from the
/// command's defaults, so a serialized config is complete.
struct RunConfig {
  std::string command;
  std::vector<cplx> potential{cplx(0.0), cplx(0.5)};  // V_0..V_d
  AlphaSpec alpha{"", std::array<long, 4>{-1, 1, 5, 2}};  // golden mean
  std::vector<double> energies;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out;

  TrigPolynomial trig_polynomial() const;

  nlohmann::json to_json() const;
  /// Throws ConfigError on unknown keys, wrong types or an unknown command.
  static RunConfig from_json(const nlohmann::json& j);
};

/// Known commands in dispatch order.
const std::vector<std::string>& commands();

/// Default parameter block of a command. Throws ConfigError for unknown commands.
nlohmann::json default_params(const std::string& command);

/// Merges `given` into the defaults, rejecting keys the command does not know.
nlohmann::json merge_params(const std::string& command, const nlohmann::json& given);

/// "a:b:n" gives n equally spaced points from a to b inclusive.
std::vector<double> parse_grid(const std::string& text);

/// Comma-separated numbers.
std::vector<double> parse_list(const std::string& text);

/// Potential from a JSON list of V_0..V_d, each a number or [re, im].
std::vector<cplx> parse_potential(const nlohmann::json& j);

/// Build version in git-describe form.
std::string version_string();

}  // namespace arclab
