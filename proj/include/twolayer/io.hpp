#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "twolayer/fieldops.hpp"

namespace twolayer {

using Json = nlohmann::ordered_json;

// Doubles are written with 17 significant digits so that every value round-trips.
std::string format_number(double v);
std::string dump_json(const Json& j);

// Write to a sibling temporary file and rename it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Comma separated, '.' decimal, LF line ends, header row first.
std::string table_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns);

// Columns x, eta_under, eta_over in ascending x, and the grid sidecar.
std::string profile_csv(const ProfilePair& eta);
Json profile_sidecar(const PeriodicGrid& g);
ProfilePair read_profile(const std::filesystem::path& csv, const std::filesystem::path& sidecar);

Json to_json(const Params& p);
Json to_json(const AssumptionReport& r);
Json to_json(const NlsCoefficients& c);
Json to_json(const FunctionalBreakdown& b);

}  // namespace twolayer
