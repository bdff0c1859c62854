#pragma once

// INI-style configuration files. Section and key names mirror the type fields;
// unknown sections or keys are rejected with ConfigError.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "pma/control.hpp"
#include "pma/scenario.hpp"
#include "pma/tuner.hpp"

namespace pma {

/// Parses a scenario. Relative `gains_file` / `trace` paths resolve against `base_dir`.
Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

/// Writes every scenario field; parse_scenario reads it back unchanged.
void write_scenario(std::ostream& out, const Scenario& s);

/// Reads a [gains] section. Missing keys keep the published values.
PsmcGains<double> parse_gains(std::istream& in);
PsmcGains<double> load_gains(const std::filesystem::path& path);
void write_gains(std::ostream& out, const PsmcGains<double>& g);

/// FA settings plus the scenario each candidate is scored on.
struct TuneJob {
  FaConfig fa;
  Scenario scenario;
  std::string name = "tune";
};

TuneJob parse_tune_job(std::istream& in, const std::filesystem::path& base_dir = {});
TuneJob load_tune_job(const std::filesystem::path& path);

}  // namespace pma
