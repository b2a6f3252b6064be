#include "aid/png_io.hpp"

#include <cstdio>
#include <memory>
#include <vector>

#include <png.h>

#include "aid/error.hpp"

namespace aid {
namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw IoError("cannot open '" + path.string() + "'");
    return f;
}

[[noreturn]] void png_fail(png_structp, png_const_charp msg) {
    throw IoError(std::string("libpng: ") + msg);
}

void png_warn(png_structp, png_const_charp) {}

struct ReadState {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~ReadState() { png_destroy_read_struct(&png, info ? &info : nullptr, nullptr); }
};

struct WriteState {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~WriteState() { png_destroy_write_struct(&png, info ? &info : nullptr); }
};

struct RawPng {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> data;
};

RawPng read_raw(const std::filesystem::path& path) {
    auto file = open_file(path, "rb");
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
        throw IoError("'" + path.string() + "' is not a PNG file");

    ReadState st;
    st.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
    if (!st.png) throw IoError("libpng: cannot create read struct");
    st.info = png_create_info_struct(st.png);
    if (!st.info) throw IoError("libpng: cannot create info struct");

    png_init_io(st.png, file.get());
    png_set_sig_bytes(st.png, 8);
    png_read_info(st.png, st.info);

    const auto color = png_get_color_type(st.png, st.info);
    const auto depth = png_get_bit_depth(st.png, st.info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(st.png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(st.png);
    if (depth == 16) png_set_strip_16(st.png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(st.png);
    if (png_get_valid(st.png, st.info, PNG_INFO_tRNS)) png_set_strip_alpha(st.png);
    png_read_update_info(st.png, st.info);

    RawPng raw;
    raw.width = static_cast<int>(png_get_image_width(st.png, st.info));
    raw.height = static_cast<int>(png_get_image_height(st.png, st.info));
    raw.channels = png_get_channels(st.png, st.info);
    const std::size_t stride = png_get_rowbytes(st.png, st.info);
    raw.data.resize(stride * raw.height);
    std::vector<png_bytep> rows(raw.height);
    for (int y = 0; y < raw.height; ++y) rows[y] = raw.data.data() + stride * y;
    png_read_image(st.png, rows.data());
    png_read_end(st.png, nullptr);
    return raw;
}

void write_raw(const std::filesystem::path& path, int width, int height, int bit_depth,
               int color_type, const std::vector<std::vector<std::uint8_t>>& rows) {
    auto file = open_file(path, "wb");
    WriteState st;
    st.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
    if (!st.png) throw IoError("libpng: cannot create write struct");
    st.info = png_create_info_struct(st.png);
    if (!st.info) throw IoError("libpng: cannot create info struct");
    png_init_io(st.png, file.get());
    png_set_IHDR(st.png, st.info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(st.png, st.info);
    for (const auto& row : rows) png_write_row(st.png, row.data());
    png_write_end(st.png, nullptr);
}

}  // namespace

ImageBuffer read_png(const std::filesystem::path& path) {
    RawPng raw = read_raw(path);
    if (raw.channels == 1 || raw.channels == 3)
        return ImageBuffer(raw.width, raw.height, raw.channels, std::move(raw.data));
    throw IoError("'" + path.string() + "': unsupported channel count " +
                  std::to_string(raw.channels));
}

void write_png(const std::filesystem::path& path, const ImageBuffer& img) {
    const std::size_t stride = static_cast<std::size_t>(img.width()) * img.channels();
    std::vector<std::vector<std::uint8_t>> rows(img.height());
    for (int y = 0; y < img.height(); ++y)
        rows[y].assign(img.data().begin() + stride * y, img.data().begin() + stride * (y + 1));
    write_raw(path, img.width(), img.height(), 8,
              img.channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, rows);
}

void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask) {
    std::vector<std::vector<std::uint8_t>> rows(mask.height());
    for (int y = 0; y < mask.height(); ++y) {
        rows[y].assign((mask.width() + 7) / 8, 0);
        for (int x = 0; x < mask.width(); ++x)
            if (!mask.dropped(x, y)) rows[y][x / 8] |= static_cast<std::uint8_t>(0x80u >> (x % 8));
    }
    write_raw(path, mask.width(), mask.height(), 1, PNG_COLOR_TYPE_GRAY, rows);
}

BinaryMask read_mask_png(const std::filesystem::path& path) {
    const ImageBuffer img = read_png(path);
    BinaryMask mask(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) mask.set(x, y, img.at(x, y, 0) < 128);
    return mask;
}

}  // namespace aid
