#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "sobexlab/experiments.hpp"
#include "sobexlab/geometry.hpp"
#include "sobexlab/norms.hpp"

namespace sobexlab::io {

// CSV contract: comment header with metadata, then
// k,quantity,analytic_log2,quad_log2,formula_log2,stderr (blank for NaN).
std::string rate_table_csv(const experiments::RateTable& table);
nlohmann::json rate_table_json(const experiments::RateTable& table);

// region,value,log2_value,stderr
std::string norm_report_csv(const norms::NormReport& report);
nlohmann::json norm_report_json(const norms::NormReport& report);

nlohmann::json mushroom_json(const geometry::MushroomSpec& spec);
nlohmann::json placement_json(const geometry::PlacementReport& report);

// Write-temp-then-rename in the target directory.
void atomic_write(const std::filesystem::path& path,
                  const std::string& content);

}  // namespace sobexlab::io
