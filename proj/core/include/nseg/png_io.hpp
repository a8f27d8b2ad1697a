#pragma once

#include <filesystem>
#include <utility>

#include "nseg/image.hpp"

namespace nseg {

/// Decodes an 8-bit PNG. Palette images are expanded to RGB, 16-bit samples
/// are reduced to 8 bits and sub-byte grayscale is expanded. Throws DataError.
ImagePlane read_png(const std::filesystem::path& path);

/// Like read_png but palette images keep their raw indices (one channel) and
/// sub-byte grayscale is unpacked without rescaling. Used for mask files.
ImagePlane read_png_indices(const std::filesystem::path& path);

/// Width and height from the PNG header without decoding pixel data.
std::pair<int, int> png_dimensions(const std::filesystem::path& path);

/// Encodes 1 (gray), 2 (gray+alpha), 3 (RGB) or 4 (RGBA) channels. Output
/// bytes depend only on the pixels.
void write_png(const std::filesystem::path& path, const ImagePlane& image);
void write_png(const std::filesystem::path& path, const LabelMask& mask);

}  // namespace nseg
