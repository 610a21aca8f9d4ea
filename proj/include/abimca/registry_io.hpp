#pragma once

#include <filesystem>

#include "abimca/engine.hpp"

namespace abimca {

struct StoredRegistry {
    SubseqRegistry registry;
    AbimcaConfig config;
};

/// Writes `manifest.cfg` (format tag, config, standardization stats and each
/// snapshot's file name and creation step) plus one model file per snapshot
/// (model_001.txt, ...) into `dir`.
void save_registry(const std::filesystem::path& dir, const SubseqRegistry& registry, const AbimcaConfig& config);

/// Throws ParseError on a missing or inconsistent manifest.
StoredRegistry load_registry(const std::filesystem::path& dir);

}  // namespace abimca
