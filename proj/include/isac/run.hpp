#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "isac/config.hpp"

namespace isac {

struct RunResult {
  std::vector<std::string> files;  ///< written, relative to the output directory
};

/// Runs one mode and writes its outputs plus manifest.json into out_dir.
RunResult run(Mode mode, const RunConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace isac
