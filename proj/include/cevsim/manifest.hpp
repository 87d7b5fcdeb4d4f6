#pragma once

#include <string>

#include <json.hpp>

namespace cevsim {

/// Provenance record accompanying every output file: the full effective
/// inputs, tool version, timestamp and the seed-derivation contract.
struct RunManifest {
    std::string command;
    nlohmann::json inputs;
    std::string kernel;

    nlohmann::json to_json() const;

    /// Writes `<output_path>.manifest.json` next to the output it describes.
    std::string write_sidecar(const std::string& output_path) const;
};

/// The fixed description of how draws derive from (seed, trajectory, index).
const std::string& seed_derivation_doc();

}  // namespace cevsim
