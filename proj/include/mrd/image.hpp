#pragma once

#include "mrd/grid.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mrd {

/// 8-bit interleaved RGB image.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    ImageDims dims() const noexcept { return {width, height}; }
    const std::uint8_t* pixel(int x, int y) const noexcept {
        return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }
};

/// Throws Error{io_error} when the file is missing or not a PNG.
Image read_png(const std::filesystem::path& path);

/// Reads only the header.
ImageDims read_png_dims(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const Image& image, bool fast = false);

/// PNG bytes of a sub-rectangle.
std::vector<std::uint8_t> encode_png(const Image& image, const PixelRect& region);

Image decode_png(std::span<const std::uint8_t> bytes);

/// Extends the image right and down to `padded` by replicating the last
/// column and row.
Image pad_replicate(const Image& image, ImageDims padded);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace mrd
