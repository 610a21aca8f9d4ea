#include "abimca/registry_io.hpp"

#include <cstdio>
#include <sstream>

#include "abimca/core/error.hpp"
#include "abimca/csv.hpp"
#include "abimca/model_io.hpp"
#include "abimca/params.hpp"

namespace abimca {
namespace {

constexpr const char* kFormat = "abimca-registry 1";

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
    return out;
}

std::vector<double> split_reals(const std::string& s, const std::string& key) {
    std::vector<double> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ParseError("registry manifest: bad number in " + key);
        }
    }
    return out;
}

std::string model_file(std::size_t id) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "model_%03zu.txt", id);
    return buf;
}

const std::string& require(const KeyValues& kv, const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ParseError("registry manifest: missing " + key);
    return it->second;
}

}  // namespace

void save_registry(const std::filesystem::path& dir, const SubseqRegistry& registry, const AbimcaConfig& config) {
    std::filesystem::create_directories(dir);
    KeyValues kv;
    kv["format"] = kFormat;
    kv["count"] = std::to_string(registry.size());
    for (const auto& [k, v] : to_key_values(config)) kv["config." + k] = v;
    kv["stats.mean"] = join(registry.stats.mean);
    kv["stats.std"] = join(registry.stats.stddev);
    for (std::size_t id = 1; id <= registry.size(); ++id) {
        const std::string file = model_file(id);
        kv["model." + std::to_string(id) + ".file"] = file;
        kv["model." + std::to_string(id) + ".created-at"] = std::to_string(registry.created_at(static_cast<Label>(id)));
        save_model(dir / file, registry.model(static_cast<Label>(id)));
    }
    write_key_values(dir / "manifest.cfg", kv);
}

StoredRegistry load_registry(const std::filesystem::path& dir) {
    const KeyValues kv = read_key_values(dir / "manifest.cfg");
    if (require(kv, "format") != kFormat) throw ParseError("registry manifest: unsupported format");

    StoredRegistry out;
    for (const auto& [k, v] : kv) {
        if (k.rfind("config.", 0) == 0) set_param(out.config, k.substr(7), v);
    }
    out.registry.stats.mean = split_reals(require(kv, "stats.mean"), "stats.mean");
    out.registry.stats.stddev = split_reals(require(kv, "stats.std"), "stats.std");
    if (out.registry.stats.mean.size() != out.registry.stats.stddev.size()) {
        throw ParseError("registry manifest: stats length mismatch");
    }

    std::size_t count = 0;
    try {
        count = std::stoul(require(kv, "count"));
    } catch (const std::logic_error&) {
        throw ParseError("registry manifest: bad count");
    }
    for (std::size_t id = 1; id <= count; ++id) {
        const std::string prefix = "model." + std::to_string(id);
        AeModel m = load_model(dir / require(kv, prefix + ".file"));
        if (!out.registry.stats.mean.empty() && m.dims() != out.registry.stats.mean.size()) {
            throw ParseError("registry manifest: model " + std::to_string(id) + " dimension mismatch");
        }
        std::size_t created = 0;
        try {
            created = std::stoul(require(kv, prefix + ".created-at"));
        } catch (const std::logic_error&) {
            throw ParseError("registry manifest: bad created-at for model " + std::to_string(id));
        }
        out.registry.add(std::move(m), created);
    }
    return out;
}

}  // namespace abimca
