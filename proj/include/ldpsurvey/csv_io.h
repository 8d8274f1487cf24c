#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "ldpsurvey/core.h"
#include "ldpsurvey/mechanisms.h"

namespace ldpsurvey {

// CSV layout: header "x1,...,xd,y", then one decimal row per data point.
// Values are written in shortest round-trip form, so load(save(ds)) is exact.

Dataset parse_csv(std::istream& in, const ModelBounds& bounds);
Dataset load_csv(const std::string& path, const ModelBounds& bounds);
void write_csv(std::ostream& out, const Dataset& ds);
void save_csv(const Dataset& ds, const std::string& path);

std::string format_double(double v);

// Sidecar path for a published CSV.
std::string sidecar_path(const std::string& csv_path);

nlohmann::json private_sidecar(const PrivateDataset& pds);
// Writes the noisy covariates and responses as CSV plus a JSON sidecar with
// the noise spec, Sigma_w diagonal and provenance. Keys in extra are merged
// into the sidecar.
void save_private(const PrivateDataset& pds, const std::string& path,
                  const nlohmann::json& extra = nlohmann::json::object());
// Reads a published CSV and its sidecar.
PrivateDataset load_private(const std::string& path);

void write_json_file(const nlohmann::json& j, const std::string& path);
nlohmann::json read_json_file(const std::string& path);

}  // namespace ldpsurvey
