#pragma once

#include <filesystem>

#include "aid/image.hpp"
#include "aid/mask.hpp"

namespace aid {

/// Reads an 8-bit grey or RGB PNG. Palette images are expanded, alpha is
/// stripped, 16-bit samples are reduced to 8 bits.
ImageBuffer read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const ImageBuffer& img);

/// 1-bit greyscale PNG: dropped pixels black, kept pixels white.
void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask);
BinaryMask read_mask_png(const std::filesystem::path& path);

}  // namespace aid
