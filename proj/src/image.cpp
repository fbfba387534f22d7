#include "mrd/image.hpp"

#include "mrd/error.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>

namespace mrd {

namespace {

struct PngImage {
    png_image img;
    PngImage() {
        std::memset(&img, 0, sizeof(img));
        img.version = PNG_IMAGE_VERSION;
    }
    ~PngImage() { png_image_free(&img); }
    PngImage(const PngImage&) = delete;
    PngImage& operator=(const PngImage&) = delete;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, "cannot open image '" + path.string() + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

Image finish_read(PngImage& png, const std::string& what) {
    png.img.format = PNG_FORMAT_RGB;
    Image out;
    out.width = static_cast<int>(png.img.width);
    out.height = static_cast<int>(png.img.height);
    out.rgb.resize(PNG_IMAGE_SIZE(png.img));
    if (!png_image_finish_read(&png.img, nullptr, out.rgb.data(), 0, nullptr)) {
        throw Error(ErrorCode::io_error, "failed to decode " + what + ": " + png.img.message);
    }
    return out;
}

}  // namespace

Image decode_png(std::span<const std::uint8_t> bytes) {
    PngImage png;
    if (!png_image_begin_read_from_memory(&png.img, bytes.data(), bytes.size())) {
        throw Error(ErrorCode::io_error, std::string("not a PNG: ") + png.img.message);
    }
    return finish_read(png, "PNG buffer");
}

Image read_png(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    PngImage png;
    if (!png_image_begin_read_from_memory(&png.img, bytes.data(), bytes.size())) {
        throw Error(ErrorCode::io_error,
                    "'" + path.string() + "' is not a readable PNG: " + png.img.message);
    }
    return finish_read(png, "'" + path.string() + "'");
}

ImageDims read_png_dims(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    PngImage png;
    if (!png_image_begin_read_from_memory(&png.img, bytes.data(), bytes.size())) {
        throw Error(ErrorCode::io_error,
                    "'" + path.string() + "' is not a readable PNG: " + png.img.message);
    }
    return {static_cast<int>(png.img.width), static_cast<int>(png.img.height)};
}

void write_png(const std::filesystem::path& path, const Image& image, bool fast) {
    PngImage png;
    png.img.width = static_cast<png_uint_32>(image.width);
    png.img.height = static_cast<png_uint_32>(image.height);
    png.img.format = PNG_FORMAT_RGB;
    if (fast) png.img.flags |= PNG_IMAGE_FLAG_FAST;
    if (!png_image_write_to_file(&png.img, path.c_str(), 0, image.rgb.data(), 0, nullptr)) {
        throw Error(ErrorCode::io_error,
                    "failed to write '" + path.string() + "': " + png.img.message);
    }
}

std::vector<std::uint8_t> encode_png(const Image& image, const PixelRect& region) {
    if (region.empty() || !PixelRect{0, 0, image.width, image.height}.contains(region)) {
        invalid_argument("crop region outside image");
    }
    PngImage png;
    png.img.width = static_cast<png_uint_32>(region.width());
    png.img.height = static_cast<png_uint_32>(region.height());
    png.img.format = PNG_FORMAT_RGB;
    png.img.flags |= PNG_IMAGE_FLAG_FAST;
    const auto* first = image.pixel(region.x0, region.y0);
    const auto row_stride = static_cast<png_int_32>(image.width * 3);

    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&png.img, nullptr, &size, 0, first, row_stride, nullptr)) {
        throw Error(ErrorCode::io_error, std::string("PNG encode failed: ") + png.img.message);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&png.img, out.data(), &size, 0, first, row_stride, nullptr)) {
        throw Error(ErrorCode::io_error, std::string("PNG encode failed: ") + png.img.message);
    }
    out.resize(size);
    return out;
}

Image pad_replicate(const Image& image, ImageDims padded) {
    if (padded.width_px < image.width || padded.height_px < image.height) {
        invalid_argument("padded size smaller than image");
    }
    if (image.width < 1 || image.height < 1) invalid_argument("cannot pad an empty image");
    Image out;
    out.width = padded.width_px;
    out.height = padded.height_px;
    out.rgb.resize(static_cast<std::size_t>(out.width) * out.height * 3);
    const std::size_t src_row = static_cast<std::size_t>(image.width) * 3;
    const std::size_t dst_row = static_cast<std::size_t>(out.width) * 3;
    for (int y = 0; y < out.height; ++y) {
        const int sy = std::min(y, image.height - 1);
        const auto* src = image.rgb.data() + static_cast<std::size_t>(sy) * src_row;
        auto* dst = out.rgb.data() + static_cast<std::size_t>(y) * dst_row;
        std::memcpy(dst, src, src_row);
        const auto* edge = src + src_row - 3;
        for (int x = image.width; x < out.width; ++x) {
            std::memcpy(dst + static_cast<std::size_t>(x) * 3, edge, 3);
        }
    }
    return out;
}

namespace {
constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
        out.push_back(kAlphabet[(v >> 18) & 63]);
        out.push_back(kAlphabet[(v >> 12) & 63]);
        out.push_back(kAlphabet[(v >> 6) & 63]);
        out.push_back(kAlphabet[v & 63]);
    }
    const std::size_t rest = bytes.size() - i;
    if (rest == 1) {
        const std::uint32_t v = bytes[i] << 16;
        out.push_back(kAlphabet[(v >> 18) & 63]);
        out.push_back(kAlphabet[(v >> 12) & 63]);
        out += "==";
    } else if (rest == 2) {
        const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
        out.push_back(kAlphabet[(v >> 18) & 63]);
        out.push_back(kAlphabet[(v >> 12) & 63]);
        out.push_back(kAlphabet[(v >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
    std::array<int, 256> lut{};
    lut.fill(-1);
    for (int i = 0; i < 64; ++i) lut[static_cast<unsigned char>(kAlphabet[i])] = i;

    std::vector<std::uint8_t> out;
    std::uint32_t acc = 0;
    int bits = 0;
    for (char c : text) {
        if (c == '=') break;
        const int v = lut[static_cast<unsigned char>(c)];
        if (v < 0) throw Error(ErrorCode::protocol_error, "invalid base64 character");
        acc = (acc << 6) | static_cast<std::uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xFF));
        }
    }
    return out;
}

}  // namespace mrd
