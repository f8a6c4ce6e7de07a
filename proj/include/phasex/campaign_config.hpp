#pragma once

#include "phasex/energy_meter.hpp"
#include "phasex/explorer.hpp"
#include "phasex/toolchain.hpp"

#include <json.hpp>

#include <filesystem>

namespace phasex {

/// Everything a campaign needs, resolved and validated. Relative paths in
/// the config file are taken relative to the file's own directory, so a
/// campaign directory can be moved as a unit.
struct CampaignConfig {
    ExplorationPlan plan;
    ToolchainConfig toolchain;
    ProviderSpec provider;
    std::filesystem::path catalog_path;
    std::filesystem::path journal_dir;
    std::filesystem::path scratch_dir;
    bool keep_artifacts = false;

    /// The resolved configuration, printable before a run starts.
    nlohmann::json to_json() const;
};

/// Parses and validates a campaign config file. Unknown keys are rejected
/// so typos fail loudly. Throws ConfigError on any schema violation and
/// Error on I/O failure.
CampaignConfig load_campaign_config(const std::filesystem::path& config_file);

} // namespace phasex
