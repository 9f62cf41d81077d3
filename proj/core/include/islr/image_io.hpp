#pragma once

// Binary PPM (P6, maxval 255) frame I/O and binary PGM (P5) mask export
// with 0/255 values.

#include <filesystem>

#include "islr/imaging.hpp"

namespace islr {

Frame read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const Frame& f);

BinaryMask read_pgm_mask(const std::filesystem::path& path);
void write_pgm_mask(const std::filesystem::path& path, const BinaryMask& m);

}  // namespace islr
