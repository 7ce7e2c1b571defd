#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "arclab/config.hpp"

namespace arclab {

struct CsvTable {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(const std::vector<double>& values);
  std::string render() const;
};

struct RunResult {
  nlohmann::json report;  // embeds the config and version
  std::vector<CsvTable> tables;
  std::vector<std::string> binaries;  // files written directly by the command
};

/// Dispatches on config.command. Module errors propagate with their exit codes.
RunResult run(const RunConfig& config);

/// Round-trip formatting used in CSV cells.
std::string format_number(double x);

}  // namespace arclab
