#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "gibq/construction.hpp"
#include "gibq/harness.hpp"
#include "gibq/lattice.hpp"

namespace gibq {

using Json = nlohmann::ordered_json;

Json field_to_json(const SpectralField& f);
/// Reads {period, entries: [{xi, re, im}]}, optional "domain": "torus" | "line".
SpectralField field_from_json(const Json& j);

Json pair_to_json(const InitialPair& pair);
/// Accepts a pair document {u0, u1} or a bare field (taken as (f, 0)).
InitialPair pair_from_json(const Json& j);

Json trajectory_to_json(const Trajectory& t);
Json params_to_json(const InflationParams& p);
Json ledger_to_json(const EstimateLedger& ledger);
Json report_to_json(const InflationReport& report);

/// "x,value" rows at the grid points.
std::string grid_to_csv(const GridField& g);

std::string read_text_file(const std::filesystem::path& path);
/// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string sha1_hex(const std::string& data);
/// Git object hash of a blob with this content.
std::string git_blob_hash(const std::string& content);

}  // namespace gibq
