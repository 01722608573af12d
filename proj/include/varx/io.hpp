#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "varx/calibration.hpp"
#include "varx/dynamics.hpp"
#include "varx/inference.hpp"
#include "varx/timeseries.hpp"

namespace varx::io {

using Json = nlohmann::ordered_json;

/// Comma-separated, header row first, empty cell or NaN = missing.
/// Throws ParseError naming the source and line.
TimeSeriesMatrix parse_csv(std::istream& in, const std::string& source = "<stream>");
TimeSeriesMatrix read_csv(const std::string& path);
/// Shortest round-trip decimal for each value; missing entries are empty.
std::string format_csv(const TimeSeriesMatrix& series);
/// Writes through a temporary file in the same directory and renames it.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

std::string format_number(double v);

/// Splits a table into the named endogenous / exogenous channels. Throws
/// ParseError for unknown names or overlap.
struct ChannelSplit {
  TimeSeriesMatrix y;
  std::optional<TimeSeriesMatrix> x;
};
ChannelSplit split_channels(const TimeSeriesMatrix& table, const std::vector<std::string>& exogenous,
                            const std::vector<std::string>& endogenous = {});

Json filter_to_json(const FilterTensor& f);
FilterTensor filter_from_json(const Json& j, const std::string& what);

Json model_to_json(const VarxFit& fit, const std::vector<std::string>& y_names,
                   const std::vector<std::string>& x_names);
/// One row per tested link: source,target,kind,n,deviance,raw_deviance,p,R2,R.
std::string links_csv(const VarxFit& fit, const std::vector<std::string>& y_names,
                      const std::vector<std::string>& x_names);
/// Horizon rows of H, one column per (output, input) pair.
std::string impulse_csv(const ImpulseResponse& ir, const std::vector<std::string>& y_names,
                        const std::vector<std::string>& x_names);

/// Generator file: A, B, noise_std, model_kind, seed, T, burn_in, input_std.
struct GeneratorFile {
  GeneratorSpec spec;
  double input_std = 1.0;
};
GeneratorFile generator_from_json(const Json& j);
Json generator_to_json(const GeneratorFile& g);
/// Simulates x (seeded from the generator seed) and y; returns y columns then x columns.
TimeSeriesMatrix simulate_table(const GeneratorFile& g);

ScenarioSpec scenario_from_json(const Json& j);
Json scenario_to_json(const ScenarioSpec& s);
Json report_to_json(const CalibrationReport& r);
std::string summary_table(const CalibrationReport& r);

}  // namespace varx::io
