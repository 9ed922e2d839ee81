#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>

#include <json.hpp>

#include "legfunnel/simulation.hpp"

namespace legfunnel {

inline constexpr const char* kToolVersion = "0.1.0";

/// Header row of the trajectory CSV, fixed column order.
std::string csv_header();

/// One row per (step, leg).
void write_csv(std::ostream& os, const SimTrajectory& traj);

nlohmann::json metrics_to_json(const Metrics& m);

/// 64-bit FNV-1a of the raw config bytes, hex encoded.
std::string config_hash(const std::string& text);

struct RunManifest {
    std::string config_path;
    std::string output_dir;
    std::string run_id;
    std::string tool_version = kToolVersion;
    std::string config_hash;

    nlohmann::json to_json() const;
};

}  // namespace legfunnel
