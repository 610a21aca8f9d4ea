#pragma once

#include <filesystem>
#include <iosfwd>

#include "abimca/autoencoder.hpp"

namespace abimca {

/// Versioned text format:
///
///   abimca-ae 1
///   dims <d> hidden <H> latent <L> count <P>
///   block <name> <rows> <cols>
///   <rows*cols values, row-major, 17 significant digits>
///   ...
///
/// Lines starting with '#' are comments; the writer emits the parameter order
/// from param_layout() as a comment header. Values round-trip bit-exactly.
void write_model(std::ostream& out, const AeModel& model);

/// Throws ParseError on a bad header, block mismatch or malformed value.
AeModel read_model(std::istream& in);

void save_model(const std::filesystem::path& path, const AeModel& model);
AeModel load_model(const std::filesystem::path& path);

}  // namespace abimca
