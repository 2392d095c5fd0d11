#pragma once

// CSV and JSON serialisation of fields, grids, spectra, scans and evolution
// records, plus the run manifest.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ymflow/evolution.hpp"
#include "ymflow/resolvent.hpp"
#include "ymflow/spectrum.hpp"

namespace ymflow::io {

using json = nlohmann::ordered_json;

/// Shortest round-trip decimal text of a double.
std::string format_double(double x);

/// Columns of equal length under a header row.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns);
void write_text(const std::filesystem::path& path, const std::string& text);

std::string field_csv(const RadialField& u);
json field_json(const RadialField& u);

/// {kind, N, R_max, order}
json grid_json(const RadialGrid& g);

json spectral_json(const SpectralResult& r);
std::string eigenfunction_csv(const Eigenpair& e);

std::string scan_csv(const ScanSummary& s);
json scan_json(const ScanSummary& s);

/// time_label is "t" or "tau".
std::string record_csv(const ExperimentRecord& r, const std::string& time_label);
json record_json(const ExperimentRecord& r);

json stability_json(const StabilityResult& r);

/// {command, version, config, results, diagnostics}
json envelope(const std::string& command, const json& config, const json& results,
              const json& diagnostics);

/// manifest.json: command, version, seed, resolved config, UTC timestamp and
/// the list of files written by the run.
void write_manifest(const std::filesystem::path& dir, const std::string& command, const json& config,
                    unsigned long long seed, const std::vector<std::string>& files);

const char* version();

}  // namespace ymflow::io
