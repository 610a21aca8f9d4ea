#include "abimca/params.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "abimca/core/error.hpp"
#include "abimca/csv.hpp"

namespace abimca {
namespace {

double to_real(std::string_view key, std::string_view v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
        throw ConfigError("bad value for " + std::string(key) + ": '" + std::string(v) + "'");
    }
    return out;
}

std::uint64_t to_uint(std::string_view key, std::string_view v) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError("bad integer for " + std::string(key) + ": '" + std::string(v) + "'");
    }
    return out;
}

bool to_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("bad boolean for " + std::string(key) + ": '" + std::string(v) + "'");
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    return std::string(s.substr(b, s.find_last_not_of(" \t\r") - b + 1));
}

}  // namespace

void set_param(AbimcaConfig& c, std::string_view key, std::string_view value) {
    if (key == "learning-rate") c.learning_rate = to_real(key, value);
    else if (key == "omega") c.train_cycles = to_uint(key, value);
    else if (key == "eta") c.detection_threshold = to_real(key, value);
    else if (key == "theta-factor") c.theta_factor = to_real(key, value);
    else if (key == "seq-len") c.window_length = to_uint(key, value);
    else if (key == "step-size") c.stride = to_uint(key, value);
    else if (key == "score-weight") c.score_weight = to_real(key, value);
    else if (key == "latent-center") c.latent_center = to_real(key, value);
    else if (key == "penalty") c.penalty_weight = to_real(key, value);
    else if (key == "allow-unknown") c.allow_unknown_in_predict = to_bool(key, value);
    else if (key == "seed") c.seed = to_uint(key, value);
    else throw ConfigError("unknown abimca parameter: " + std::string(key));
}

void set_param(KMeansConfig& c, std::string_view key, std::string_view value) {
    if (key == "n-clusters") c.n_clusters = to_uint(key, value);
    else if (key == "max-iter") c.max_iter = to_uint(key, value);
    else if (key == "batch-size") c.batch_size = to_uint(key, value);
    else if (key == "seq-len") c.seq_len = to_uint(key, value);
    else if (key == "seed") c.seed = to_uint(key, value);
    else throw ConfigError("unknown kmeans parameter: " + std::string(key));
}

KeyValues to_key_values(const AbimcaConfig& c) {
    return {{"learning-rate", format_double(c.learning_rate)},
            {"omega", std::to_string(c.train_cycles)},
            {"eta", format_double(c.detection_threshold)},
            {"theta-factor", format_double(c.theta_factor)},
            {"seq-len", std::to_string(c.window_length)},
            {"step-size", std::to_string(c.stride)},
            {"score-weight", format_double(c.score_weight)},
            {"latent-center", format_double(c.latent_center)},
            {"penalty", format_double(c.penalty_weight)},
            {"allow-unknown", c.allow_unknown_in_predict ? "true" : "false"},
            {"seed", std::to_string(c.seed)}};
}

KeyValues to_key_values(const KMeansConfig& c) {
    return {{"n-clusters", std::to_string(c.n_clusters)},
            {"max-iter", std::to_string(c.max_iter)},
            {"batch-size", std::to_string(c.batch_size)},
            {"seq-len", std::to_string(c.seq_len)},
            {"seed", std::to_string(c.seed)}};
}

KeyValues read_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    KeyValues out;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        const std::string s = trim(line.substr(0, line.find('#')));
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ParseError("expected key = value at line " + std::to_string(row), row);
        out[trim(s.substr(0, eq))] = trim(s.substr(eq + 1));
    }
    return out;
}

void write_key_values(const std::filesystem::path& path, const KeyValues& kv) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
}

}  // namespace abimca
