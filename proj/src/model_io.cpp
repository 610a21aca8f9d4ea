#include "abimca/model_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "abimca/core/error.hpp"

namespace abimca {
namespace {

constexpr const char* kMagic = "abimca-ae";
constexpr int kVersion = 1;

// Next non-comment, non-blank line split into tokens.
std::istringstream next_line(std::istream& in, std::size_t& line_no) {
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        return std::istringstream(line);
    }
    throw ParseError("model file: unexpected end of input", line_no);
}

double parse_value(const std::string& tok, std::size_t line_no) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || !std::isfinite(v)) {
        throw ParseError("model file: bad value '" + tok + "'", line_no);
    }
    return v;
}

}  // namespace

void write_model(std::ostream& out, const AeModel& model) {
    const auto layout = param_layout(model.dims());
    out << "# recurrent autoencoder parameters, matrices row-major\n# order:";
    for (const auto& b : layout) out << ' ' << b.name;
    out << '\n' << kMagic << ' ' << kVersion << '\n';
    out << "dims " << model.dims() << " hidden " << model.hidden() << " latent " << model.latent() << " count "
        << model.param_count() << '\n';
    char buf[32];
    const auto theta = model.params();
    for (const auto& b : layout) {
        out << "block " << b.name << ' ' << b.rows << ' ' << b.cols << '\n';
        for (std::size_t r = 0; r < b.rows; ++r) {
            for (std::size_t c = 0; c < b.cols; ++c) {
                std::snprintf(buf, sizeof buf, "%.17g", theta[b.offset + r * b.cols + c]);
                out << (c ? " " : "") << buf;
            }
            out << '\n';
        }
    }
}

AeModel read_model(std::istream& in) {
    std::size_t line_no = 0;
    std::string magic, key;
    int version = 0;
    if (!(next_line(in, line_no) >> magic >> version) || magic != kMagic) {
        throw ParseError("model file: missing abimca-ae header", line_no);
    }
    if (version != kVersion) throw ParseError("model file: unsupported version " + std::to_string(version), line_no);

    std::size_t d = 0, hidden = 0, latent = 0, count = 0;
    auto dims_line = next_line(in, line_no);
    std::string k1, k2, k3, k4;
    if (!(dims_line >> k1 >> d >> k2 >> hidden >> k3 >> latent >> k4 >> count) || k1 != "dims" ||
        k2 != "hidden" || k3 != "latent" || k4 != "count") {
        throw ParseError("model file: malformed dims line", line_no);
    }
    if (d < 2 || hidden != d - 1 || latent != d - 1) throw ParseError("model file: inconsistent dimensions", line_no);

    AeModel model(d);
    if (count != model.param_count()) throw ParseError("model file: parameter count mismatch", line_no);
    auto theta = model.params();
    for (const auto& b : param_layout(d)) {
        auto head = next_line(in, line_no);
        std::string name;
        std::size_t rows = 0, cols = 0;
        if (!(head >> key >> name >> rows >> cols) || key != "block" || name != b.name || rows != b.rows ||
            cols != b.cols) {
            throw ParseError("model file: expected block " + b.name, line_no);
        }
        std::size_t filled = 0;
        while (filled < b.size()) {
            auto line = next_line(in, line_no);
            std::string tok;
            while (line >> tok) {
                if (filled == b.size()) throw ParseError("model file: too many values in " + b.name, line_no);
                theta[b.offset + filled++] = parse_value(tok, line_no);
            }
        }
    }
    return model;
}

void save_model(const std::filesystem::path& path, const AeModel& model) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_model(out, model);
}

AeModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return read_model(in);
}

}  // namespace abimca
