#pragma once

// CSV / JSON serialization of results and the run manifest.

#include <cstdint>
#include <map>
#include <ostream>
#include <string>

#include "json.hpp"

#include "perinull/asymptotics.hpp"
#include "perinull/core.hpp"
#include "perinull/laplace.hpp"
#include "perinull/sim.hpp"

namespace perinull {

// Shortest decimal that round-trips; "nan" / "inf" / "-inf" otherwise.
// Locale independent.
std::string format_double(double x);

nlohmann::json to_json(const BFResult& r);
nlohmann::json to_json(const AsymptoticSummary& s);
nlohmann::json to_json(const LaplaceResult& r);
nlohmann::json to_json(const CConstants& c);

// Header: variant,n,mean,q025,q975,source. Simulated cells first (variant
// order of the config), then the asymptotic overlay labelled "peri".
void write_curves_csv(const SimResult& result, std::ostream& out);

struct RunManifest {
  std::string command;
  std::map<std::string, std::string> parameters;
  std::uint64_t seed = 0;
  std::string version;
  std::string timestamp;  // UTC, ISO 8601
};

RunManifest make_manifest(std::string command, std::map<std::string, std::string> parameters,
                          std::uint64_t seed);
nlohmann::json to_json(const RunManifest& m);

// Gnuplot script drawing mean and quantile curves from curves.csv.
std::string plot_script(const std::string& csv_name);

}  // namespace perinull
