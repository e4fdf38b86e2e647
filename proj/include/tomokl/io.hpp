#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "tomokl/image.hpp"

namespace tomokl {

/// RM2 raw matrix: ASCII header "RM2 <M> <N>\n" followed by M*N little-endian
/// IEEE-754 doubles in row-major order.
void write_rm2(std::ostream& os, const Image2D& img);
void write_rm2(const std::filesystem::path& path, const Image2D& img);

/// Reads an RM2 matrix. The format carries no spacing, so the returned image
/// gets `spacing` (defaults to the [-1,1]^2 convention, 2 / max(M, N)).
Image2D read_rm2(std::istream& is, double spacing = 0.0);
Image2D read_rm2(const std::filesystem::path& path, double spacing = 0.0);

/// 8-bit binary PGM preview with linear min-max scaling (constant images map to 0).
void write_pgm(const std::filesystem::path& path, const Image2D& img);

using KeyValues = std::map<std::string, std::string>;

/// Sidecar text: one "key=value" per line, sorted by key.
void write_key_values(const std::filesystem::path& path, const KeyValues& kv);
KeyValues read_key_values(const std::filesystem::path& path);

/// Shortest decimal text that round-trips the double exactly.
std::string format_real(double v);

/// Path of the geometry sidecar that accompanies a sinogram file.
std::filesystem::path sidecar_path(const std::filesystem::path& matrix_path);

}  // namespace tomokl
