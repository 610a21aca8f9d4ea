#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "abimca/engine.hpp"
#include "abimca/kmeans.hpp"

namespace abimca {

/// Ordered key/value pairs as stored in params.cfg and registry manifests.
using KeyValues = std::map<std::string, std::string>;

/// Parameter names follow the search-space naming:
///   abimca: learning-rate omega eta theta-factor seq-len step-size
///           score-weight latent-center penalty allow-unknown seed
///   kmeans: n-clusters max-iter batch-size seq-len seed
/// Throws ConfigError on an unknown key or an unparsable value.
void set_param(AbimcaConfig& config, std::string_view key, std::string_view value);
void set_param(KMeansConfig& config, std::string_view key, std::string_view value);

KeyValues to_key_values(const AbimcaConfig& config);
KeyValues to_key_values(const KMeansConfig& config);

template <class Config>
Config from_key_values(const KeyValues& kv, Config base = {}) {
    for (const auto& [k, v] : kv) set_param(base, k, v);
    return base;
}

/// `key = value` lines; '#' starts a comment; blank lines are ignored.
/// Throws ParseError on a line without '='.
KeyValues read_key_values(const std::filesystem::path& path);
void write_key_values(const std::filesystem::path& path, const KeyValues& kv);

}  // namespace abimca
